#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "xorgame/errors.hpp"
#include "xorgame/matrix.hpp"
#include "xorgame/random.hpp"

namespace xorgame {

// One round of the game: questions a, b, c (1-based, one per player) and the
// parity s the XOR of the answers must equal.
struct Clause {
  int a = 1;
  int b = 1;
  int c = 1;
  int s = 0;

  friend auto operator<=>(const Clause&, const Clause&) = default;
};

// A validated 3-player XOR game with n questions per player. Immutable.
class XorGame {
 public:
  int n() const noexcept { return n_; }
  std::size_t m() const noexcept { return clauses_.size(); }
  const std::vector<Clause>& clauses() const noexcept { return clauses_; }

  // Column of player `player` (0, 1, 2) answering question q (1-based) in
  // the defining system.
  std::size_t column(int player, int q) const noexcept {
    return static_cast<std::size_t>(player) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(q - 1);
  }
  std::size_t variables() const noexcept { return 3 * static_cast<std::size_t>(n_); }

  friend bool operator==(const XorGame&, const XorGame&) = default;

 private:
  XorGame(int n, std::vector<Clause> clauses) : n_(n), clauses_(std::move(clauses)) {}
  friend XorGame make_game(int n, std::vector<Clause> clauses);

  int n_;
  std::vector<Clause> clauses_;
};

inline XorGame make_game(int n, std::vector<Clause> clauses) {
  if (n < 1) throw InvalidArgument("question count must be positive, got " + std::to_string(n));
  if (clauses.empty()) throw InvalidArgument("a game needs at least one clause");
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const Clause& c = clauses[i];
    for (int q : {c.a, c.b, c.c})
      if (q < 1 || q > n)
        throw IndexOutOfRange("clause " + std::to_string(i + 1) + ": question " + std::to_string(q) +
                              " outside [1, " + std::to_string(n) + "]");
    if (c.s != 0 && c.s != 1)
      throw IndexOutOfRange("clause " + std::to_string(i + 1) + ": parity must be 0 or 1");
  }
  std::vector<Clause> sorted = clauses;
  std::sort(sorted.begin(), sorted.end());
  if (auto it = std::adjacent_find(sorted.begin(), sorted.end()); it != sorted.end())
    throw DuplicateClause("clause (" + std::to_string(it->a) + "," + std::to_string(it->b) + "," +
                          std::to_string(it->c) + "," + std::to_string(it->s) + ") appears twice");
  return XorGame(n, std::move(clauses));
}

// The m x 3n system gamma x = s_vec (mod 2). Columns [0, n) belong to player
// 1, [n, 2n) to player 2 and [2n, 3n) to player 3.
struct DefiningSystem {
  IntMatrix gamma;
  IntVector s_vec;
};

inline DefiningSystem defining_system(const XorGame& game) {
  DefiningSystem sys{IntMatrix(game.m(), game.variables()), IntVector(game.m())};
  for (std::size_t i = 0; i < game.m(); ++i) {
    const Clause& c = game.clauses()[i];
    sys.gamma(i, game.column(0, c.a)) = 1;
    sys.gamma(i, game.column(1, c.b)) = 1;
    sys.gamma(i, game.column(2, c.c)) = 1;
    sys.s_vec[i] = c.s;
  }
  return sys;
}

// Inverse of defining_system; rejects matrices that are not one-hot per block.
inline XorGame game_from_system(const DefiningSystem& sys) {
  const std::size_t cols = sys.gamma.cols();
  if (cols == 0 || cols % 3 != 0) throw DimensionMismatch("gamma must have 3n columns");
  if (sys.s_vec.size() != sys.gamma.rows()) throw DimensionMismatch("s_vec length differs from row count");
  const int n = static_cast<int>(cols / 3);
  std::vector<Clause> clauses;
  clauses.reserve(sys.gamma.rows());
  for (std::size_t i = 0; i < sys.gamma.rows(); ++i) {
    int q[3] = {0, 0, 0};
    for (std::size_t j = 0; j < cols; ++j) {
      const BigInt& v = sys.gamma(i, j);
      if (v == 0) continue;
      const std::size_t block = j / static_cast<std::size_t>(n);
      if (v != 1 || q[block] != 0) throw InvalidArgument("row " + std::to_string(i + 1) + " is not one-hot per block");
      q[block] = static_cast<int>(j % static_cast<std::size_t>(n)) + 1;
    }
    if (!q[0] || !q[1] || !q[2]) throw InvalidArgument("row " + std::to_string(i + 1) + " misses a block");
    const BigInt& s = sys.s_vec[i];
    if (s != 0 && s != 1) throw InvalidArgument("parity must be 0 or 1");
    clauses.push_back({q[0], q[1], q[2], s == 1 ? 1 : 0});
  }
  return make_game(n, std::move(clauses));
}

// How sample_random_game treats repeats: Triple discards any repeated
// question triple (whatever its parity); FullTuple only exact (a,b,c,s) repeats.
enum class Dedup { Triple, FullTuple };

inline std::string_view to_string(Dedup d) { return d == Dedup::Triple ? "triple" : "full"; }

inline Dedup parse_dedup(std::string_view s) {
  if (s == "triple") return Dedup::Triple;
  if (s == "full") return Dedup::FullTuple;
  throw InvalidArgument("dedup must be 'triple' or 'full', got '" + std::string(s) + "'");
}

inline std::uint64_t sampler_capacity(int n, Dedup dedup) {
  const auto nn = static_cast<std::uint64_t>(n);
  return nn * nn * nn * (dedup == Dedup::Triple ? 1 : 2);
}

// m distinct uniformly random clauses; a deterministic function of the
// arguments. Rejection sampling while the space is at most half used,
// otherwise a partial Fisher-Yates shuffle of the whole space.
inline XorGame sample_random_game(int n, std::size_t m, std::uint64_t seed, Dedup dedup = Dedup::Triple) {
  if (n < 1 || n > (1 << 20)) throw InvalidArgument("question count must lie in [1, 2^20]");
  if (m < 1) throw InvalidArgument("clause count must be positive");
  const std::uint64_t capacity = sampler_capacity(n, dedup);
  if (m > capacity)
    throw ExhaustedSpace(std::to_string(m) + " distinct clauses requested but only " + std::to_string(capacity) +
                         " exist for n=" + std::to_string(n) + " (" + std::string(to_string(dedup)) + " dedup)");

  CounterRng rng(seed);
  const auto nn = static_cast<std::uint64_t>(n);
  std::vector<Clause> clauses;
  clauses.reserve(m);
  auto emit = [&](std::uint64_t idx) {
    int s;
    if (dedup == Dedup::FullTuple) {
      s = static_cast<int>(idx & 1u);
      idx >>= 1;
    } else {
      s = static_cast<int>(rng() >> 63);
    }
    const auto a = static_cast<int>(idx / (nn * nn)) + 1;
    const auto b = static_cast<int>(idx / nn % nn) + 1;
    const auto c = static_cast<int>(idx % nn) + 1;
    clauses.push_back({a, b, c, s});
  };

  if (2 * m <= capacity) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(2 * m);
    while (clauses.size() < m) {
      const std::uint64_t idx = rng.below(capacity);
      if (seen.insert(idx).second) emit(idx);
    }
  } else {
    std::vector<std::uint64_t> space(capacity);
    std::iota(space.begin(), space.end(), std::uint64_t{0});
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t j = i + rng.below(capacity - i);
      std::swap(space[i], space[j]);
      emit(space[i]);
    }
  }
  return make_game(n, std::move(clauses));
}

// The 4-clause GHZ game: the parity must be odd unless everyone gets question 1.
inline XorGame ghz_game() { return make_game(2, {{1, 1, 1, 0}, {1, 2, 2, 1}, {2, 1, 2, 1}, {2, 2, 1, 1}}); }

}  // namespace xorgame
