#pragma once

// Text formats.
//
// Game file: a header line "n m" (optionally "n m 3"; the third field is the
// player count and only 3 is accepted) followed by m lines "a b c s".
// Blank lines and lines starting with '#' are ignored.
//
// Strategy file: 3n whitespace-separated tokens, each an integer or a
// fraction p/q. '#' starts a comment running to the end of the line.

#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "xorgame/game.hpp"
#include "xorgame/linalg.hpp"

namespace xorgame {

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_long(std::string_view tok, long long& v) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline std::string_view strip_comment(std::string_view line) {
  if (auto pos = line.find('#'); pos != std::string_view::npos) line = line.substr(0, pos);
  return line;
}

}  // namespace detail

inline XorGame parse_game(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long long n = 0, m = 0;
  bool have_header = false;
  std::vector<Clause> clauses;
  std::vector<std::size_t> clause_lines;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split_ws(detail::strip_comment(line));
    if (fields.empty()) continue;
    if (!have_header) {
      if (fields.size() != 2 && fields.size() != 3) throw ParseError(lineno, "header must be 'n m' or 'n m k'");
      long long k = 3;
      if (!detail::parse_long(fields[0], n) || !detail::parse_long(fields[1], m) ||
          (fields.size() == 3 && !detail::parse_long(fields[2], k)))
        throw ParseError(lineno, "header fields must be integers");
      if (n < 1) throw ParseError(lineno, "n must be positive");
      if (m < 1) throw ParseError(lineno, "m must be positive");
      if (k != 3) throw ParseError(lineno, "only 3-player games are supported (k=" + std::to_string(k) + ")");
      have_header = true;
      continue;
    }
    if (fields.size() != 4) throw ParseError(lineno, "clause must have 4 fields 'a b c s'");
    long long v[4];
    for (int i = 0; i < 4; ++i)
      if (!detail::parse_long(fields[static_cast<std::size_t>(i)], v[i]))
        throw ParseError(lineno, "'" + std::string(fields[static_cast<std::size_t>(i)]) + "' is not an integer");
    for (int i = 0; i < 3; ++i)
      if (v[i] < 1 || v[i] > n)
        throw ParseError(lineno, "question " + std::to_string(v[i]) + " outside [1, " + std::to_string(n) + "]");
    if (v[3] != 0 && v[3] != 1) throw ParseError(lineno, "parity must be 0 or 1");
    if (static_cast<long long>(clauses.size()) == m) throw ParseError(lineno, "more clauses than the header declares");
    clauses.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), static_cast<int>(v[3])});
    clause_lines.push_back(lineno);
  }
  if (!have_header) throw ParseError(lineno + 1, "missing header");
  if (static_cast<long long>(clauses.size()) != m)
    throw ParseError(lineno + 1, "header declares " + std::to_string(m) + " clauses, found " +
                                     std::to_string(clauses.size()));
  for (std::size_t i = 0; i < clauses.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (clauses[i] == clauses[j])
        throw ParseError(clause_lines[i], "duplicate of the clause on line " + std::to_string(clause_lines[j]));
  return make_game(static_cast<int>(n), std::move(clauses));
}

inline XorGame parse_game(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_game(in);
}

inline void write_game(std::ostream& out, const XorGame& game) {
  out << game.n() << ' ' << game.m() << '\n';
  for (const Clause& c : game.clauses()) out << c.a << ' ' << c.b << ' ' << c.c << ' ' << c.s << '\n';
}

inline std::string format_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline Rational parse_rational(std::string_view tok) {
  const auto slash = tok.find('/');
  const std::string num(tok.substr(0, slash));
  auto valid_int = [](const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
  };
  auto to_big = [](std::string s) { return BigInt(s.front() == '+' ? s.substr(1) : s); };
  if (!valid_int(num)) throw InvalidArgument("'" + std::string(tok) + "' is not a rational");
  if (slash == std::string_view::npos) return Rational(to_big(num));
  const std::string den(tok.substr(slash + 1));
  if (!valid_int(den) || den.front() == '-') throw InvalidArgument("'" + std::string(tok) + "' is not a rational");
  const BigInt d = to_big(den);
  if (d == 0) throw InvalidArgument("'" + std::string(tok) + "' has a zero denominator");
  return Rational(to_big(num), d);
}

// Reads every rational token of a strategy file.
inline RationalVector parse_strategy(std::istream& in) {
  RationalVector out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (auto tok : detail::split_ws(detail::strip_comment(line))) {
      try {
        out.push_back(parse_rational(tok));
      } catch (const InvalidArgument& e) {
        throw ParseError(lineno, e.what());
      }
    }
  }
  return out;
}

inline RationalVector parse_strategy(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_strategy(in);
}

inline void write_strategy(std::ostream& out, const RationalVector& z, int n) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    out << format_rational(z[i]);
    out << (((i + 1) % static_cast<std::size_t>(n) == 0) ? '\n' : ' ');
  }
}

}  // namespace xorgame
