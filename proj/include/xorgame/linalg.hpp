#pragma once

// Exact integer linear algebra: row Hermite normal form, Smith normal form,
// GF(2) elimination, rational back-substitution and integer solvability.
//
// Normal forms are first attempted in overflow-checked 64-bit arithmetic and
// restarted with arbitrary-precision integers if any intermediate overflows,
// so results never depend on the word size.

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "xorgame/matrix.hpp"

namespace xorgame {

namespace detail {

struct Overflow {};

// int64 that throws Overflow instead of wrapping.
class CheckedInt {
 public:
  constexpr CheckedInt(std::int64_t v = 0) noexcept : v_(v) {}  // NOLINT(implicit)
  explicit CheckedInt(const BigInt& b) {
    if (b > std::numeric_limits<std::int64_t>::max() || b < std::numeric_limits<std::int64_t>::min())
      throw Overflow{};
    v_ = static_cast<std::int64_t>(b);
  }
  explicit operator BigInt() const { return BigInt(v_); }
  std::int64_t value() const noexcept { return v_; }

  friend CheckedInt operator+(CheckedInt a, CheckedInt b) {
    std::int64_t r;
    if (__builtin_add_overflow(a.v_, b.v_, &r)) throw Overflow{};
    return r;
  }
  friend CheckedInt operator-(CheckedInt a, CheckedInt b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw Overflow{};
    return r;
  }
  friend CheckedInt operator*(CheckedInt a, CheckedInt b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw Overflow{};
    return r;
  }
  friend CheckedInt operator/(CheckedInt a, CheckedInt b) {
    if (b.v_ == -1) return -a;
    return a.v_ / b.v_;
  }
  friend CheckedInt operator%(CheckedInt a, CheckedInt b) {
    if (b.v_ == -1) return 0;
    return a.v_ % b.v_;
  }
  CheckedInt operator-() const {
    if (v_ == std::numeric_limits<std::int64_t>::min()) throw Overflow{};
    return -v_;
  }
  CheckedInt& operator+=(CheckedInt o) { return *this = *this + o; }
  CheckedInt& operator-=(CheckedInt o) { return *this = *this - o; }
  friend bool operator==(CheckedInt a, CheckedInt b) noexcept { return a.v_ == b.v_; }
  friend auto operator<=>(CheckedInt a, CheckedInt b) noexcept { return a.v_ <=> b.v_; }

 private:
  std::int64_t v_;
};

inline CheckedInt abs_value(CheckedInt v) { return v < 0 ? -v : v; }
inline BigInt abs_value(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

// Floor division, b != 0.
template <class T>
T floor_div(const T& a, const T& b) {
  T q = a / b;
  if (T(q * b) != a && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

// row[dst] -= q * row[src], restricted to columns >= from.
template <class T>
void sub_row_multiple(Matrix<T>& m, std::size_t dst, std::size_t src, const T& q, std::size_t from = 0) {
  auto d = m.row(dst);
  auto s = m.row(src);
  for (std::size_t j = from; j < m.cols(); ++j)
    if (s[j] != 0) d[j] -= q * s[j];
}

// col[dst] += q * col[src].
template <class T>
void add_col_multiple(Matrix<T>& m, std::size_t dst, std::size_t src, const T& q) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    if (m(i, src) != 0) m(i, dst) += q * m(i, src);
}

template <class T>
void negate_row(Matrix<T>& m, std::size_t r) {
  for (auto& v : m.row(r)) v = -v;
}

template <class T>
void negate_col(Matrix<T>& m, std::size_t c) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, c) = -m(i, c);
}

// Brings h to row Hermite normal form in place. When omega is non-null it
// holds a matrix with (original) = omega * h on return; it must start as I.
template <class T>
std::vector<std::size_t> hermite_in_place(Matrix<T>& h, Matrix<T>* omega) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < h.cols() && row < h.rows(); ++col) {
    bool found = false;
    for (;;) {
      std::size_t best = h.rows();
      for (std::size_t k = row; k < h.rows(); ++k)
        if (h(k, col) != 0 && (best == h.rows() || abs_value(h(k, col)) < abs_value(h(best, col)))) best = k;
      if (best == h.rows()) break;
      found = true;
      h.swap_rows(row, best);
      if (omega) omega->swap_cols(row, best);
      bool clear = true;
      for (std::size_t k = row + 1; k < h.rows(); ++k) {
        if (h(k, col) == 0) continue;
        T q = h(k, col) / h(row, col);
        sub_row_multiple(h, k, row, q, col);
        if (omega) add_col_multiple(*omega, row, k, q);
        if (h(k, col) != 0) clear = false;
      }
      if (clear) break;
    }
    if (!found) continue;
    if (h(row, col) < 0) {
      negate_row(h, row);
      if (omega) negate_col(*omega, row);
    }
    for (std::size_t k = 0; k < row; ++k) {
      if (h(k, col) == 0) continue;
      T q = floor_div(h(k, col), h(row, col));
      if (q == 0) continue;
      sub_row_multiple(h, k, row, q, col);
      if (omega) add_col_multiple(*omega, row, k, q);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <class T>
struct SnfWork {
  Matrix<T> d, omega, omega_inv, psi, psi_inv;
};

// Smith normal form with all four transforms: d = omega_inv * m * psi_inv,
// m = omega * d * psi.
template <class T>
SnfWork<T> smith(const Matrix<T>& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  SnfWork<T> w{m, Matrix<T>::identity(rows), Matrix<T>::identity(rows), Matrix<T>::identity(cols),
               Matrix<T>::identity(cols)};
  auto& d = w.d;

  // D <- E D with E = I - q e_k e_t^T.
  auto row_op = [&](std::size_t k, std::size_t t, const T& q) {
    sub_row_multiple(d, k, t, q);
    sub_row_multiple(w.omega_inv, k, t, q);
    add_col_multiple(w.omega, t, k, q);
  };
  // D <- D F with F = I - q e_t e_k^T.
  auto col_op = [&](std::size_t k, std::size_t t, const T& q) {
    add_col_multiple(d, k, t, T(-q));
    add_col_multiple(w.psi_inv, k, t, T(-q));
    sub_row_multiple(w.psi, t, k, T(-q));
  };
  auto swap_r = [&](std::size_t a, std::size_t b) {
    d.swap_rows(a, b);
    w.omega_inv.swap_rows(a, b);
    w.omega.swap_cols(a, b);
  };
  auto swap_c = [&](std::size_t a, std::size_t b) {
    d.swap_cols(a, b);
    w.psi_inv.swap_cols(a, b);
    w.psi.swap_rows(a, b);
  };

  const std::size_t diag = std::min(rows, cols);
  for (std::size_t t = 0; t < diag; ++t) {
    std::size_t bi = rows, bj = cols;
    for (std::size_t i = t; i < rows; ++i)
      for (std::size_t j = t; j < cols; ++j)
        if (d(i, j) != 0 && (bi == rows || abs_value(d(i, j)) < abs_value(d(bi, bj)))) bi = i, bj = j;
    if (bi == rows) break;
    swap_r(t, bi);
    swap_c(t, bj);

    for (;;) {
      for (std::size_t k = t + 1; k < rows; ++k)
        if (d(k, t) != 0) row_op(k, t, T(d(k, t) / d(t, t)));
      for (std::size_t k = t + 1; k < cols; ++k)
        if (d(t, k) != 0) col_op(k, t, T(d(t, k) / d(t, t)));

      // Remainders smaller than the pivot move into the pivot position.
      std::size_t mi = t, mj = t;
      for (std::size_t k = t + 1; k < rows; ++k)
        if (d(k, t) != 0 && abs_value(d(k, t)) < abs_value(d(mi, mj))) mi = k, mj = t;
      for (std::size_t k = t + 1; k < cols; ++k)
        if (d(t, k) != 0 && abs_value(d(t, k)) < abs_value(d(mi, mj))) mi = t, mj = k;
      if (mi != t || mj != t) {
        swap_r(t, mi);
        swap_c(t, mj);
        continue;
      }
      bool dirty = false;
      for (std::size_t k = t + 1; k < rows && !dirty; ++k) dirty = d(k, t) != 0;
      for (std::size_t k = t + 1; k < cols && !dirty; ++k) dirty = d(t, k) != 0;
      if (dirty) continue;

      // Divisibility: fold an offending row into the pivot row and repeat.
      std::size_t bad = rows;
      for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == rows) break;
      row_op(t, bad, T(-1));
    }
    if (d(t, t) < 0) {
      negate_row(d, t);
      negate_row(w.omega_inv, t);
      negate_col(w.omega, t);
    }
  }
  return w;
}

template <class T>
Matrix<BigInt> to_big(const Matrix<T>& m) {
  return Matrix<BigInt>::convert(m);
}

// Runs f<CheckedInt>() and retries with f<BigInt>() on overflow.
template <class F>
auto with_overflow_fallback(F&& f) {
  try {
    return f.template operator()<CheckedInt>();
  } catch (const Overflow&) {
    return f.template operator()<BigInt>();
  }
}

inline bool is_odd(const BigInt& v) { return v % 2 != 0; }

}  // namespace detail

struct HnfResult {
  IntMatrix omega;  // unimodular, m = omega * h
  IntMatrix h;
  std::vector<std::size_t> pivot_cols;  // pivot column of each nonzero row of h
};

inline HnfResult hnf(const IntMatrix& m) {
  return detail::with_overflow_fallback([&]<class T>() {
    auto h = Matrix<T>::convert(m);
    auto omega = Matrix<T>::identity(m.rows());
    auto pivots = detail::hermite_in_place(h, &omega);
    return HnfResult{detail::to_big(omega), detail::to_big(h), std::move(pivots)};
  });
}

// Hermite form without the certificate.
inline IntMatrix hermite_form(const IntMatrix& m, std::vector<std::size_t>* pivot_cols = nullptr) {
  return detail::with_overflow_fallback([&]<class T>() {
    auto h = Matrix<T>::convert(m);
    auto pivots = detail::hermite_in_place<T>(h, nullptr);
    if (pivot_cols) *pivot_cols = std::move(pivots);
    return detail::to_big(h);
  });
}

struct SnfResult {
  IntMatrix omega;  // m = omega * d * psi
  IntMatrix d;
  IntMatrix psi;
  IntMatrix omega_inv;
  IntMatrix psi_inv;

  std::size_t rank() const {
    std::size_t r = 0;
    while (r < std::min(d.rows(), d.cols()) && d(r, r) != 0) ++r;
    return r;
  }
  // d_i for i < rows(m); zero past the diagonal.
  BigInt invariant(std::size_t i) const { return i < std::min(d.rows(), d.cols()) ? d(i, i) : BigInt(0); }
};

inline SnfResult snf(const IntMatrix& m) {
  return detail::with_overflow_fallback([&]<class T>() {
    auto w = detail::smith(Matrix<T>::convert(m));
    return SnfResult{detail::to_big(w.omega), detail::to_big(w.d), detail::to_big(w.psi),
                     detail::to_big(w.omega_inv), detail::to_big(w.psi_inv)};
  });
}

// Dense GF(2) matrix with 64-bit word rows.
class BitMatrix {
 public:
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(rows * words_, 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool get(std::size_t r, std::size_t c) const { return (word(r, c / 64) >> (c % 64)) & 1u; }
  void set(std::size_t r, std::size_t c, bool v) {
    auto mask = std::uint64_t{1} << (c % 64);
    auto& w = bits_[r * words_ + c / 64];
    w = v ? (w | mask) : (w & ~mask);
  }
  void xor_rows(std::size_t dst, std::size_t src) {
    for (std::size_t k = 0; k < words_; ++k) bits_[dst * words_ + k] ^= bits_[src * words_ + k];
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t k = 0; k < words_; ++k) std::swap(bits_[a * words_ + k], bits_[b * words_ + k]);
  }

  // Reduced row echelon form over the first `limit` columns; returns pivot columns.
  std::vector<std::size_t> reduce(std::size_t limit) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < limit && row < rows_; ++col) {
      std::size_t p = row;
      while (p < rows_ && !get(p, col)) ++p;
      if (p == rows_) continue;
      swap_rows(row, p);
      for (std::size_t k = 0; k < rows_; ++k)
        if (k != row && get(k, col)) xor_rows(k, row);
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

 private:
  std::uint64_t word(std::size_t r, std::size_t k) const { return bits_[r * words_ + k]; }

  std::size_t rows_, cols_, words_;
  std::vector<std::uint64_t> bits_;
};

// Some x in {0,1}^cols with a x = b (mod 2), free variables zero; nullopt if
// the system is inconsistent.
inline std::optional<BitVector> solve_mod2(const IntMatrix& a, std::span<const BigInt> b) {
  if (b.size() != a.rows()) throw DimensionMismatch("solve_mod2: rhs length differs from row count");
  const std::size_t n = a.cols();
  BitMatrix aug(a.rows(), n + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.set(i, j, detail::is_odd(a(i, j)));
    aug.set(i, n, detail::is_odd(b[i]));
  }
  auto pivots = aug.reduce(n);
  for (std::size_t i = pivots.size(); i < a.rows(); ++i)
    if (aug.get(i, n)) return std::nullopt;
  BitVector x(n, 0);
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = aug.get(i, n);
  return x;
}

inline std::optional<BitVector> solve_mod2(const IntMatrix& a, const IntVector& b) {
  return solve_mod2(a, std::span<const BigInt>(b));
}

// Representative of q modulo 2 in [0, 2).
inline Rational canonical_mod2(const Rational& q) {
  BigInt num = numerator(q), den = denominator(q);
  BigInt two_den = 2 * den;
  BigInt r = num % two_den;
  if (r < 0) r += two_den;
  return Rational(r, den);
}

// Exact solution of r z = b for an upper-staircase r with a pivot in every
// row. Non-pivot variables are zero; entries are reduced into [0, 2) when
// canonicalize is set.
inline RationalVector solve_triangular_rational(const IntMatrix& r, std::span<const BigInt> b,
                                                bool canonicalize = true) {
  if (b.size() != r.rows()) throw DimensionMismatch("solve_triangular_rational: rhs length differs from row count");
  std::vector<std::size_t> pivot(r.rows());
  for (std::size_t i = 0; i < r.rows(); ++i) {
    std::size_t c = 0;
    while (c < r.cols() && r(i, c) == 0) ++c;
    if (c == r.cols()) throw NotStaircase("row " + std::to_string(i) + " has no pivot");
    if (i > 0 && c <= pivot[i - 1]) throw NotStaircase("pivot columns are not strictly increasing at row " + std::to_string(i));
    pivot[i] = c;
  }
  RationalVector z(r.cols(), Rational(0));
  for (std::size_t i = r.rows(); i-- > 0;) {
    Rational acc(b[i]);
    for (std::size_t j = pivot[i] + 1; j < r.cols(); ++j)
      if (r(i, j) != 0 && z[j] != 0) acc -= Rational(r(i, j)) * z[j];
    z[pivot[i]] = acc / Rational(r(i, pivot[i]));
  }
  if (canonicalize)
    for (auto& v : z) v = canonical_mod2(v);
  return z;
}

inline RationalVector solve_triangular_rational(const IntMatrix& r, const IntVector& b, bool canonicalize = true) {
  return solve_triangular_rational(r, std::span<const BigInt>(b), canonicalize);
}

// Whether m xi = b has an integer solution, decided through the Smith form.
inline bool integer_solvable(const IntMatrix& m, std::span<const BigInt> b) {
  if (b.size() != m.rows()) throw DimensionMismatch("integer_solvable: rhs length differs from row count");
  const SnfResult s = snf(m);
  const IntVector c = multiply<BigInt>(s.omega_inv, IntVector(b.begin(), b.end()));
  for (std::size_t i = 0; i < c.size(); ++i) {
    const BigInt d = s.invariant(i);
    if (d == 0 ? c[i] != 0 : c[i] % d != 0) return false;
  }
  return true;
}

inline bool integer_solvable(const IntMatrix& m, const IntVector& b) {
  return integer_solvable(m, std::span<const BigInt>(b));
}

}  // namespace xorgame
