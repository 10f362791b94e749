#pragma once

// Exact Q/C-perfection verdicts without strategies, fast enough for Monte
// Carlo sweeps over games with hundreds of questions.
//
// 1. Peel: a clause containing a question asked in no other clause can always
//    be satisfied afterwards, so it is dropped (repeatedly). What remains is
//    the 2-core; the game is Q- (C-) perfect iff its core is.
// 2. Eliminate the core's (gamma | s) over the 2-adic integers, represented
//    modulo 2^64. Odd pivots first (this is GF(2) elimination carried at full
//    precision), then pivots of minimal 2-adic valuation. After the odd phase
//    every remaining row is even on gamma, so C-perfect iff those rows have
//    even s. After the full elimination Q-perfect iff the rows without a
//    pivot have even s, provided they are exactly zero on gamma.
// 3. That proviso is certified by rank. The pivots found are nonzero, so they
//    bound the rank from below; exact integer kernel vectors bound it from
//    above. Each connected component of the core contributes two (+1 on
//    player 1's questions, -1 on player 2's or player 3's). When those are not
//    enough, a kernel basis is computed modulo a 61-bit prime, rationally
//    reconstructed, and every reconstructed vector is verified over Z. If the
//    bounds meet, the residual is exactly zero; otherwise the Hermite
//    classifier decides.

#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "xorgame/classifier.hpp"
#include "xorgame/game.hpp"

namespace xorgame {

struct PerfectionFlags {
  bool q_perfect = false;
  bool c_perfect = false;
  bool used_fallback = false;  // the rank certificate failed and Hnf decided

  bool pseudotelepathy() const noexcept { return q_perfect && !c_perfect; }
};

namespace detail {

// Inverse of an odd u modulo 2^64 by Newton iteration.
constexpr std::uint64_t inverse_mod_2_64(std::uint64_t u) noexcept {
  std::uint64_t x = u;  // correct to 3 bits
  for (int i = 0; i < 5; ++i) x *= 2 - u * x;
  return x;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct Core {
  std::vector<std::size_t> clauses;         // indices of surviving clauses
  std::vector<std::size_t> column_of;       // game column -> core column or npos
  std::size_t columns = 0;
  std::size_t components = 0;
};

inline Core two_core(const XorGame& game) {
  constexpr auto npos = static_cast<std::size_t>(-1);
  const std::size_t m = game.m(), v = game.variables();
  std::vector<std::array<std::size_t, 3>> cols(m);
  std::vector<std::vector<std::size_t>> incident(v);
  std::vector<std::size_t> degree(v, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const Clause& c = game.clauses()[i];
    cols[i] = {game.column(0, c.a), game.column(1, c.b), game.column(2, c.c)};
    for (auto j : cols[i]) incident[j].push_back(i), ++degree[j];
  }
  std::vector<bool> alive(m, true);
  std::vector<std::size_t> stack;
  for (std::size_t j = 0; j < v; ++j)
    if (degree[j] == 1) stack.push_back(j);
  while (!stack.empty()) {
    const std::size_t j = stack.back();
    stack.pop_back();
    if (degree[j] != 1) continue;
    for (auto i : incident[j]) {
      if (!alive[i]) continue;
      alive[i] = false;
      for (auto k : cols[i])
        if (--degree[k] == 1) stack.push_back(k);
    }
  }

  Core core;
  core.column_of.assign(v, npos);
  for (std::size_t i = 0; i < m; ++i)
    if (alive[i]) core.clauses.push_back(i);
  for (std::size_t j = 0; j < v; ++j)
    if (degree[j] > 0) core.column_of[j] = core.columns++;
  UnionFind uf(core.columns);
  core.components = core.columns;
  for (auto i : core.clauses) {
    if (uf.unite(core.column_of[cols[i][0]], core.column_of[cols[i][1]])) --core.components;
    if (uf.unite(core.column_of[cols[i][0]], core.column_of[cols[i][2]])) --core.components;
  }
  return core;
}

// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace modp {
constexpr std::uint64_t P = (std::uint64_t{1} << 61) - 1;

constexpr std::uint64_t reduce(uint128 x) noexcept {
  std::uint64_t r = static_cast<std::uint64_t>(x & P) + static_cast<std::uint64_t>(x >> 61);
  r = (r & P) + (r >> 61);
  return r >= P ? r - P : r;
}
constexpr std::uint64_t mul(std::uint64_t a, std::uint64_t b) noexcept {
  return reduce(static_cast<uint128>(a) * b);
}
constexpr std::uint64_t sub(std::uint64_t a, std::uint64_t b) noexcept { return a >= b ? a - b : a + P - b; }
constexpr std::uint64_t pow(std::uint64_t a, std::uint64_t e) noexcept {
  std::uint64_t r = 1;
  for (; e; e >>= 1, a = mul(a, a))
    if (e & 1) r = mul(r, a);
  return r;
}
constexpr std::uint64_t inverse(std::uint64_t a) noexcept { return pow(a, P - 2); }

// num/den with |num|, den <= 2^30 congruent to a, if one exists.
inline std::optional<std::pair<std::int64_t, std::int64_t>> reconstruct(std::uint64_t a) {
  constexpr std::int64_t bound = std::int64_t{1} << 30;
  std::int64_t r0 = static_cast<std::int64_t>(P), r1 = static_cast<std::int64_t>(a);
  std::int64_t t0 = 0, t1 = 1;
  while (r1 > bound) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::pair{r1, r0 - q * r1};
    std::tie(t0, t1) = std::pair{t1, t0 - q * t1};
  }
  if (t1 == 0 || t1 > bound || t1 < -bound) return std::nullopt;
  if (t1 < 0) r1 = -r1, t1 = -t1;
  return std::pair{r1, t1};
}
}  // namespace modp

// Number of linearly independent integer vectors verified to lie in the right
// kernel of the 0/1 matrix whose rows have ones at `rows[i]`.
inline std::size_t verified_kernel_dimension(const std::vector<std::array<std::size_t, 3>>& rows, std::size_t cols) {
  const std::size_t m = rows.size();
  std::vector<std::uint64_t> a(m * cols, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : rows[i]) a[i * cols + j] = 1;
  auto at = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return a[r * cols + c]; };

  // Reduced row echelon form modulo P.
  std::vector<std::size_t> pivot_col;
  std::vector<bool> is_pivot(cols, false);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m; ++c) {
    std::size_t p = r;
    while (p < m && at(p, c) == 0) ++p;
    if (p == m) continue;
    if (p != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(at(p, j), at(r, j));
    const std::uint64_t inv = modp::inverse(at(r, c));
    for (std::size_t j = c; j < cols; ++j) at(r, j) = modp::mul(at(r, j), inv);
    for (std::size_t k = 0; k < m; ++k) {
      if (k == r || at(k, c) == 0) continue;
      const std::uint64_t f = at(k, c);
      for (std::size_t j = c; j < cols; ++j)
        if (at(r, j)) at(k, j) = modp::sub(at(k, j), modp::mul(f, at(r, j)));
    }
    pivot_col.push_back(c);
    is_pivot[c] = true;
    ++r;
  }

  // Free column f gives e_f - sum_i R[i, f] e_{pivot_i}. Distinct free
  // columns give independent vectors, so every verified one counts.
  std::size_t verified = 0;
  std::vector<std::int64_t> w(cols);
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::pair<std::int64_t, std::int64_t>> frac;  // (num, den) per pivot row
    std::int64_t lcm = 1;
    bool ok = true;
    for (std::size_t i = 0; i < pivot_col.size() && ok; ++i) {
      const std::uint64_t v = modp::sub(0, at(i, f));
      auto q = modp::reconstruct(v);
      if (!q) {
        ok = false;
        break;
      }
      frac.push_back(*q);
      const std::int64_t g = std::gcd(lcm, q->second);
      if (__builtin_mul_overflow(lcm / g, q->second, &lcm) || lcm > (std::int64_t{1} << 32)) ok = false;
    }
    if (!ok) continue;
    std::fill(w.begin(), w.end(), 0);
    w[f] = lcm;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) w[pivot_col[i]] = frac[i].first * (lcm / frac[i].second);
    bool in_kernel = true;
    for (const auto& row : rows) {
      int128 sum = 0;
      for (auto j : row) sum += w[j];
      if (sum != 0) {
        in_kernel = false;
        break;
      }
    }
    if (in_kernel) ++verified;
  }
  return verified;
}

}  // namespace detail

inline PerfectionFlags decide_perfection(const XorGame& game) {
  const detail::Core core = detail::two_core(game);
  if (core.clauses.empty()) return {true, true, false};

  const std::size_t rows = core.clauses.size();
  const std::size_t gcols = core.columns;
  const std::size_t width = gcols + 1;  // s in the last column
  std::vector<std::uint64_t> a(rows * width, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    const Clause& c = game.clauses()[core.clauses[r]];
    a[r * width + core.column_of[game.column(0, c.a)]] = 1;
    a[r * width + core.column_of[game.column(1, c.b)]] = 1;
    a[r * width + core.column_of[game.column(2, c.c)]] = 1;
    a[r * width + gcols] = static_cast<std::uint64_t>(c.s);
  }
  auto at = [&](std::size_t r, std::size_t c) -> std::uint64_t& { return a[r * width + c]; };
  auto swap_rows = [&](std::size_t x, std::size_t y) {
    if (x != y) std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(x * width),
                                 a.begin() + static_cast<std::ptrdiff_t>((x + 1) * width),
                                 a.begin() + static_cast<std::ptrdiff_t>(y * width));
  };
  auto swap_cols = [&](std::size_t x, std::size_t y) {
    if (x != y)
      for (std::size_t r = 0; r < rows; ++r) std::swap(at(r, x), at(r, y));
  };
  // Clear column t below row t using pivot 2^shift * unit.
  auto eliminate = [&](std::size_t t, unsigned shift) {
    const std::uint64_t inv = detail::inverse_mod_2_64(at(t, t) >> shift);
    const std::uint64_t* prow = &a[t * width];
    for (std::size_t k = t + 1; k < rows; ++k) {
      std::uint64_t* row = &a[k * width];
      if (row[t] == 0) continue;
      const std::uint64_t f = (row[t] >> shift) * inv;
      for (std::size_t j = t; j < width; ++j) row[j] -= f * prow[j];
    }
  };

  // Odd pivots, column by column. A column with no odd entry left is moved
  // past `end`; its entries stay even for the rest of this phase.
  std::size_t t = 0, end = gcols;
  while (t < rows && t < end) {
    std::size_t p = t;
    while (p < rows && (at(p, t) & 1u) == 0) ++p;
    if (p == rows) {
      swap_cols(t, --end);
      continue;
    }
    swap_rows(t, p);
    eliminate(t, 0);
    ++t;
  }
  PerfectionFlags flags;
  flags.c_perfect = true;
  for (std::size_t r = t; r < rows; ++r)
    if (at(r, gcols) & 1u) flags.c_perfect = false;
  if (flags.c_perfect) {
    flags.q_perfect = true;
    return flags;
  }

  // Even pivots by minimal valuation over the remaining block.
  while (t < rows && t < gcols) {
    unsigned best = 64;
    std::size_t bi = 0, bj = 0;
    for (std::size_t r = t; r < rows && best > 1; ++r)
      for (std::size_t c = t; c < gcols; ++c) {
        const std::uint64_t v = at(r, c);
        if (v == 0) continue;
        const auto tz = static_cast<unsigned>(std::countr_zero(v));
        if (tz < best) best = tz, bi = r, bj = c;
      }
    if (best == 64) break;
    swap_rows(t, bi);
    swap_cols(t, bj);
    eliminate(t, best);
    ++t;
  }

  std::size_t bound = std::min(rows, gcols - 2 * core.components);
  if (t < bound) {
    std::vector<std::array<std::size_t, 3>> core_rows(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const Clause& c = game.clauses()[core.clauses[r]];
      core_rows[r] = {core.column_of[game.column(0, c.a)], core.column_of[game.column(1, c.b)],
                      core.column_of[game.column(2, c.c)]};
    }
    bound = std::min(bound, gcols - detail::verified_kernel_dimension(core_rows, gcols));
  }
  if (t < bound) {
    flags.q_perfect = classify_hnf(game).q_perfect;
    flags.used_fallback = true;
    return flags;
  }
  flags.q_perfect = true;
  for (std::size_t r = t; r < rows; ++r)
    if (at(r, gcols) & 1u) flags.q_perfect = false;
  return flags;
}

}  // namespace xorgame
