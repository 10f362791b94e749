#pragma once

// Scoring of deterministic and MERP strategies. Perfection of a MERP phase
// vector is decided in exact rational arithmetic; floating point appears only
// in reported scores and in the GHZ state-vector simulation.

#include <array>
#include <complex>
#include <numbers>
#include <vector>

#include "xorgame/game.hpp"
#include "xorgame/linalg.hpp"

namespace xorgame {

// Player p's phase for question j is z[p * n + j - 1], each in [0, 2).
struct MerpStrategy {
  RationalVector z;
};

// Player p's answer bit for question j is x[p * n + j - 1].
struct ClassicalStrategy {
  BitVector x;
};

namespace detail {
inline void check_length(const XorGame& game, std::size_t len) {
  if (len != game.variables())
    throw DimensionMismatch("strategy has " + std::to_string(len) + " entries, game needs " +
                            std::to_string(game.variables()));
}

inline Rational clause_phase(const XorGame& game, const Clause& c, const RationalVector& z) {
  return z[game.column(0, c.a)] + z[game.column(1, c.b)] + z[game.column(2, c.c)];
}
}  // namespace detail

inline Rational classical_score(const XorGame& game, const ClassicalStrategy& strat) {
  detail::check_length(game, strat.x.size());
  std::size_t won = 0;
  for (const Clause& c : game.clauses()) {
    const int parity = strat.x[game.column(0, c.a)] ^ strat.x[game.column(1, c.b)] ^ strat.x[game.column(2, c.c)];
    if (parity == c.s) ++won;
  }
  return Rational(won, game.m());
}

// Best deterministic score by enumerating all 2^(3n) strategies; 3n <= 24.
inline Rational best_classical_score(const XorGame& game) {
  const std::size_t v = game.variables();
  if (v > 24) throw InvalidArgument("exhaustive classical search limited to 3n <= 24");
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << v); ++mask) {
    std::size_t won = 0;
    for (const Clause& c : game.clauses()) {
      const auto bit = [&](std::size_t col) { return static_cast<int>((mask >> col) & 1u); };
      if ((bit(game.column(0, c.a)) ^ bit(game.column(1, c.b)) ^ bit(game.column(2, c.c))) == c.s) ++won;
    }
    best = std::max(best, won);
  }
  return Rational(best, game.m());
}

// 1/2 + 1/(2m) * sum_i cos(pi (z_a + z_b + z_c - s)).
inline double merp_score(const XorGame& game, const MerpStrategy& strat) {
  detail::check_length(game, strat.z.size());
  double sum = 0.0;
  for (const Clause& c : game.clauses()) {
    // Reduce mod 2 exactly before converting so cos sees a small argument.
    const Rational phase = canonical_mod2(detail::clause_phase(game, c, strat.z) - c.s);
    sum += std::cos(std::numbers::pi * phase.convert_to<double>());
  }
  return 0.5 + sum / (2.0 * static_cast<double>(game.m()));
}

// Every clause argument z_a + z_b + z_c - s is an even integer.
inline bool is_perfect_merp(const XorGame& game, const MerpStrategy& strat) {
  detail::check_length(game, strat.z.size());
  for (const Clause& c : game.clauses())
    if (canonical_mod2(detail::clause_phase(game, c, strat.z) - c.s) != 0) return false;
  return true;
}

// Three-qubit state vector; basis index bit (2 - q) is qubit q.
struct StateVector {
  std::array<std::complex<double>, 8> amplitudes{};

  static StateVector ghz() {
    StateVector s;
    s.amplitudes[0] = s.amplitudes[7] = 1.0 / std::numbers::sqrt2;
    return s;
  }

  double norm_squared() const {
    double t = 0.0;
    for (const auto& a : amplitudes) t += std::norm(a);
    return t;
  }

  using Op = std::array<std::complex<double>, 4>;  // row-major 2x2

  StateVector apply(std::size_t qubit, const Op& op) const {
    StateVector out;
    const std::size_t mask = std::size_t{1} << (2 - qubit);
    for (std::size_t i = 0; i < 8; ++i) {
      const std::size_t bit = (i & mask) ? 1 : 0;
      const std::size_t i0 = i & ~mask, i1 = i | mask;
      out.amplitudes[i] = op[bit * 2 + 0] * amplitudes[i0] + op[bit * 2 + 1] * amplitudes[i1];
    }
    return out;
  }

  std::complex<double> inner(const StateVector& other) const {
    std::complex<double> t = 0.0;
    for (std::size_t i = 0; i < 8; ++i) t += std::conj(amplitudes[i]) * other.amplitudes[i];
    return t;
  }
};

// exp(-i theta Z / 2) X exp(i theta Z / 2) = cos(theta) X + sin(theta) Y. On
// the GHZ state the product of three such observables has expectation
// cos(theta_1 + theta_2 + theta_3); theta = pi * z reproduces the score law.
inline StateVector::Op rotated_x(double theta) {
  const std::complex<double> i(0.0, 1.0);
  return {0.0, std::exp(-i * theta), std::exp(i * theta), 0.0};
}

// Per-clause win probabilities of the MERP strategy, computed on an explicit
// GHZ state.
inline std::vector<double> simulate_merp(const XorGame& game, const MerpStrategy& strat) {
  detail::check_length(game, strat.z.size());
  const StateVector ghz = StateVector::ghz();
  std::vector<double> wins;
  wins.reserve(game.m());
  for (const Clause& c : game.clauses()) {
    const int q[3] = {c.a, c.b, c.c};
    StateVector psi = ghz;
    for (int p = 0; p < 3; ++p) {
      const double phase = canonical_mod2(strat.z[game.column(p, q[p])]).convert_to<double>();
      psi = psi.apply(static_cast<std::size_t>(p), rotated_x(std::numbers::pi * phase));
    }
    const double correlation = ghz.inner(psi).real();
    const double sign = c.s ? -1.0 : 1.0;
    wins.push_back(0.5 * (1.0 + sign * correlation));
  }
  return wins;
}

}  // namespace xorgame
