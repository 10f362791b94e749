#pragma once

// Three independent decision procedures for perfect quantum (MERP) and
// classical strategies of a 3XOR game:
//   * Hnf  - row Hermite form of (gamma | s); also extracts both strategies.
//   * Snf  - Smith form of gamma; also extracts both strategies.
//   * Dual - integer / GF(2) solvability of the refutation system; verdicts only.

#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "xorgame/game.hpp"
#include "xorgame/linalg.hpp"

namespace xorgame {

enum class Method { Hnf, Snf, Dual };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Hnf: return "hnf";
    case Method::Snf: return "snf";
    case Method::Dual: return "dual";
  }
  return "?";
}

struct Classification {
  bool q_perfect = false;
  bool c_perfect = false;
  std::optional<RationalVector> merp;  // phases in [0, 2), length 3n
  std::optional<BitVector> classical;  // length 3n
  Method method = Method::Hnf;

  bool pseudotelepathy() const noexcept { return q_perfect && !c_perfect; }
};

// Raised by cross_check when two procedures disagree. Never expected on a
// valid game; it indicates a bug.
class ClassifierDisagreement : public Error {
 public:
  ClassifierDisagreement(XorGame game, Classification hnf, Classification snf, Classification dual)
      : Error(describe(hnf, snf, dual)), game_(std::move(game)), hnf_(hnf), snf_(snf), dual_(dual) {}

  const XorGame& game() const noexcept { return game_; }
  const Classification& hnf() const noexcept { return hnf_; }
  const Classification& snf() const noexcept { return snf_; }
  const Classification& dual() const noexcept { return dual_; }

 private:
  static std::string describe(const Classification& h, const Classification& s, const Classification& d) {
    std::ostringstream os;
    os << "classifiers disagree (q,c): hnf=(" << h.q_perfect << ',' << h.c_perfect << ") snf=(" << s.q_perfect
       << ',' << s.c_perfect << ") dual=(" << d.q_perfect << ',' << d.c_perfect << ')';
    return os.str();
  }

  XorGame game_;
  Classification hnf_, snf_, dual_;
};

// H of hnf((gamma | s)) split as [[R, b1], [0, b2]]. A row goes to the b2
// block iff it vanishes on every gamma column.
struct HnfPartition {
  IntMatrix r;
  IntVector b1;
  IntVector b2;
};

inline HnfPartition partition_hermite(const IntMatrix& h, std::size_t gamma_cols) {
  if (h.cols() != gamma_cols + 1) throw DimensionMismatch("partition_hermite: expected one appended column");
  std::size_t top = 0;
  while (top < h.rows()) {
    bool zero = true;
    for (std::size_t j = 0; j < gamma_cols && zero; ++j) zero = h(top, j) == 0;
    if (zero) break;
    ++top;
  }
  HnfPartition p{IntMatrix(top, gamma_cols), IntVector(top), IntVector(h.rows() - top)};
  for (std::size_t i = 0; i < top; ++i) {
    for (std::size_t j = 0; j < gamma_cols; ++j) p.r(i, j) = h(i, j);
    p.b1[i] = h(i, gamma_cols);
  }
  for (std::size_t i = top; i < h.rows(); ++i) p.b2[i - top] = h(i, gamma_cols);
  return p;
}

inline IntMatrix augment(const IntMatrix& gamma, const IntVector& s_vec) {
  if (s_vec.size() != gamma.rows()) throw DimensionMismatch("s_vec length differs from row count");
  IntMatrix w(gamma.rows(), gamma.cols() + 1);
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    for (std::size_t j = 0; j < gamma.cols(); ++j) w(i, j) = gamma(i, j);
    w(i, gamma.cols()) = s_vec[i];
  }
  return w;
}

inline HnfPartition hnf_partition(const IntMatrix& gamma, const IntVector& s_vec) {
  return partition_hermite(hermite_form(augment(gamma, s_vec)), gamma.cols());
}

namespace detail {
inline bool all_even(const IntVector& v) {
  return std::all_of(v.begin(), v.end(), [](const BigInt& x) { return !is_odd(x); });
}
}  // namespace detail

inline Classification classify_hnf(const XorGame& game) {
  const DefiningSystem sys = defining_system(game);
  const HnfPartition part = hnf_partition(sys.gamma, sys.s_vec);
  Classification out;
  out.method = Method::Hnf;
  out.q_perfect = detail::all_even(part.b2);
  if (out.q_perfect) out.merp = solve_triangular_rational(part.r, part.b1);
  out.classical = solve_mod2(sys.gamma, sys.s_vec);
  out.c_perfect = out.classical.has_value();
  return out;
}

inline Classification classify_snf(const XorGame& game) {
  const DefiningSystem sys = defining_system(game);
  const std::size_t rows = sys.gamma.rows(), cols = sys.gamma.cols();
  const SnfResult s = snf(sys.gamma);
  const IntVector t = multiply<BigInt>(s.omega_inv, sys.s_vec);

  Classification out;
  out.method = Method::Snf;
  out.q_perfect = true;
  out.c_perfect = true;
  for (std::size_t i = 0; i < rows; ++i) {
    const BigInt d = s.invariant(i);
    const bool t_odd = detail::is_odd(t[i]);
    if (d == 0 && t_odd) out.q_perfect = false;
    if (!detail::is_odd(d) && t_odd) out.c_perfect = false;
  }
  if (out.q_perfect) {
    RationalVector y(cols, Rational(0));
    for (std::size_t i = 0; i < std::min(rows, cols); ++i)
      if (s.invariant(i) != 0) y[i] = Rational(t[i], s.invariant(i));
    RationalVector z = multiply<Rational>(s.psi_inv, y);
    for (auto& v : z) v = canonical_mod2(v);
    out.merp = std::move(z);
  }
  if (out.c_perfect) {
    IntVector y(cols, BigInt(0));
    for (std::size_t i = 0; i < std::min(rows, cols); ++i)
      if (detail::is_odd(s.invariant(i))) y[i] = detail::is_odd(t[i]) ? 1 : 0;
    const IntVector x = multiply<BigInt>(s.psi_inv, y);
    BitVector bits(cols);
    for (std::size_t j = 0; j < cols; ++j) bits[j] = detail::is_odd(x[j]);
    out.classical = std::move(bits);
  }
  return out;
}

// The refutation system [[gamma^T, 0], [s^T, 2]] xi = (0, ..., 0, 1).
inline std::pair<IntMatrix, IntVector> dual_system(const DefiningSystem& sys) {
  const std::size_t m = sys.gamma.rows(), v = sys.gamma.cols();
  IntMatrix dual(v + 1, m + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < v; ++j) dual(j, i) = sys.gamma(i, j);
    dual(v, i) = sys.s_vec[i];
  }
  dual(v, m) = 2;
  IntVector rhs(v + 1, BigInt(0));
  rhs[v] = 1;
  return {std::move(dual), std::move(rhs)};
}

inline Classification classify_dual(const XorGame& game) {
  const auto [dual, rhs] = dual_system(defining_system(game));
  Classification out;
  out.method = Method::Dual;
  out.q_perfect = !integer_solvable(dual, rhs);
  out.c_perfect = !solve_mod2(dual, rhs).has_value();
  return out;
}

// Whether the perfect MERP strategy of gamma z = s (mod 2) is unique modulo 2.
inline bool unique_merp(const IntMatrix& gamma, const IntVector& s_vec) {
  const HnfPartition part = hnf_partition(gamma, s_vec);
  if (!detail::all_even(part.b2)) throw NotQPerfect("system has no rational solution modulo 2");
  if (part.r.rows() != gamma.cols()) return false;
  for (std::size_t i = 0; i < part.r.rows(); ++i)
    if (part.r(i, i) != 1) return false;
  return true;
}

inline Classification cross_check(const XorGame& game) {
  Classification h = classify_hnf(game);
  Classification s = classify_snf(game);
  Classification d = classify_dual(game);
  auto same = [](const Classification& x, const Classification& y) {
    return x.q_perfect == y.q_perfect && x.c_perfect == y.c_perfect;
  };
  if (!same(h, s) || !same(h, d)) throw ClassifierDisagreement(game, h, s, d);
  return h;
}

}  // namespace xorgame
