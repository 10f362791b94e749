#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xorgame {

// Root of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexOutOfRange : public Error { using Error::Error; };
class DuplicateClause : public Error { using Error::Error; };
class ExhaustedSpace : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class NotStaircase : public Error { using Error::Error; };
class NotQPerfect : public Error { using Error::Error; };
class NoCrossing : public Error { using Error::Error; };
class DegenerateFit : public Error { using Error::Error; };
class LengthMismatch : public Error { using Error::Error; };
class InvalidArgument : public Error { using Error::Error; };

// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace xorgame
