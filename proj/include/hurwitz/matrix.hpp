#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "hurwitz/errors.hpp"
#include "hurwitz/scalar.hpp"

namespace hurwitz {

/// Dense row-major matrix over a scalar backend.
template <Scalar S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols), S(0)) {}
  Matrix(std::initializer_list<std::initializer_list<S>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    for (const auto& r : rows) {
      if (static_cast<int>(r.size()) != cols_) fail(ErrorKind::InvalidArgument, "ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  static Matrix diagonal(std::span<const S> d) {
    Matrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows_; ++i) m(i, i) = d[static_cast<size_t>(i)];
    return m;
  }

  static Matrix from_columns(const std::vector<std::vector<S>>& columns) {
    int n = static_cast<int>(columns.size());
    int r = n == 0 ? 0 : static_cast<int>(columns[0].size());
    Matrix m(r, n);
    for (int j = 0; j < n; ++j) m.set_column(j, columns[static_cast<size_t>(j)]);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  S& operator()(int i, int j) { return data_[static_cast<size_t>(i * cols_ + j)]; }
  const S& operator()(int i, int j) const { return data_[static_cast<size_t>(i * cols_ + j)]; }

  std::vector<S> column(int j) const {
    std::vector<S> c(static_cast<size_t>(rows_));
    for (int i = 0; i < rows_; ++i) c[static_cast<size_t>(i)] = (*this)(i, j);
    return c;
  }
  void set_column(int j, std::span<const S> c) {
    if (static_cast<int>(c.size()) != rows_) fail(ErrorKind::InvalidArgument, "column length mismatch");
    for (int i = 0; i < rows_; ++i) (*this)(i, j) = c[static_cast<size_t>(i)];
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<S> apply(std::span<const S> x) const {
    if (static_cast<int>(x.size()) != cols_) fail(ErrorKind::InvalidArgument, "vector length mismatch");
    std::vector<S> y(static_cast<size_t>(rows_), S(0));
    for (int i = 0; i < rows_; ++i) {
      S acc(0);
      for (int j = 0; j < cols_; ++j) {
        const S& xj = x[static_cast<size_t>(j)];
        if (xj == S(0)) continue;
        acc += (*this)(i, j) * xj;
      }
      y[static_cast<size_t>(i)] = acc;
    }
    return y;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= S(-1); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) fail(ErrorKind::InvalidArgument, "matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik == S(0)) continue;
        for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::span<const S> data() const { return data_; }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorKind::InvalidArgument, "matrix shape mismatch");
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

/// Square matrices act as linear endomorphisms of an algebra.
template <Scalar S>
using LinMap = Matrix<S>;

template <Scalar S>
S max_abs(const Matrix<S>& m) {
  S best(0);
  for (const S& v : m.data()) {
    S a = abs_value(v);
    if (a > best) best = a;
  }
  return best;
}

template <Scalar S>
S max_abs_diff(const Matrix<S>& a, const Matrix<S>& b) {
  return max_abs(Matrix<S>(a - b));
}

/// Exact equality, or max-norm difference within tol * max(1, |a|, |b|).
template <Scalar S>
bool matrices_close(const Matrix<S>& a, const Matrix<S>& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    double scale = std::max({1.0, max_abs(a), max_abs(b)});
    return max_abs_diff(a, b) <= tol * scale;
  }
}

namespace detail {

// Clears the denominators of each row; returns the integer matrix and the
// per-row multipliers (so that result = diag(mult) * m).
inline std::pair<std::vector<std::vector<mpz_class>>, std::vector<mpz_class>> integer_rows(
    const Matrix<Rational>& m) {
  int n = m.rows();
  std::vector<std::vector<mpz_class>> z(static_cast<size_t>(n), std::vector<mpz_class>(static_cast<size_t>(m.cols())));
  std::vector<mpz_class> mult(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    mpz_class l = 1;
    for (int j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).raw().get_den_mpz_t());
    mult[static_cast<size_t>(i)] = l;
    for (int j = 0; j < m.cols(); ++j) {
      mpq_class v = m(i, j).raw() * l;
      z[static_cast<size_t>(i)][static_cast<size_t>(j)] = v.get_num();
    }
  }
  return {std::move(z), std::move(mult)};
}

// Fraction-free (Bareiss) forward elimination on an n x w integer block whose
// leading n x n part is eliminated. Returns the row-swap sign, or 0 when singular.
inline int bareiss_forward(std::vector<std::vector<mpz_class>>& a, int n) {
  int sign = 1;
  mpz_class prev = 1;
  size_t width = a.empty() ? 0 : a[0].size();
  for (int k = 0; k < n; ++k) {
    auto kk = static_cast<size_t>(k);
    int pivot = -1;
    for (int i = k; i < n; ++i)
      if (a[static_cast<size_t>(i)][kk] != 0) { pivot = i; break; }
    if (pivot < 0) return 0;
    if (pivot != k) {
      std::swap(a[kk], a[static_cast<size_t>(pivot)]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      auto ii = static_cast<size_t>(i);
      for (size_t j = kk + 1; j < width; ++j) {
        a[ii][j] = (a[ii][j] * a[kk][kk] - a[ii][kk] * a[kk][j]);
        mpz_divexact(a[ii][j].get_mpz_t(), a[ii][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[ii][kk] = 0;
    }
    prev = a[kk][kk];
  }
  return sign;
}

struct LuResult {
  Matrix<double> lu;
  std::vector<int> perm;
  int sign = 1;
  bool singular = false;
};

inline LuResult lu_decompose(const Matrix<double>& m, double tol) {
  int n = m.rows();
  LuResult r{m, std::vector<int>(static_cast<size_t>(n)), 1, false};
  for (int i = 0; i < n; ++i) r.perm[static_cast<size_t>(i)] = i;
  double scale = std::max(1e-300, max_abs(m));
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::fabs(r.lu(i, k)) > std::fabs(r.lu(p, k))) p = i;
    if (std::fabs(r.lu(p, k)) <= tol * scale) {
      r.singular = true;
      return r;
    }
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(r.lu(p, j), r.lu(k, j));
      std::swap(r.perm[static_cast<size_t>(p)], r.perm[static_cast<size_t>(k)]);
      r.sign = -r.sign;
    }
    for (int i = k + 1; i < n; ++i) {
      r.lu(i, k) /= r.lu(k, k);
      for (int j = k + 1; j < n; ++j) r.lu(i, j) -= r.lu(i, k) * r.lu(k, j);
    }
  }
  return r;
}

}  // namespace detail

/// Exact: Bareiss elimination on the denominator-cleared matrix. Approx: LU
/// with partial pivoting.
template <Scalar S>
S determinant(const Matrix<S>& m) {
  if (!m.square()) fail(ErrorKind::InvalidArgument, "determinant of a non-square matrix");
  int n = m.rows();
  if (n == 0) return S(1);
  if constexpr (is_exact_v<S>) {
    auto [z, mult] = detail::integer_rows(m);
    int sign = detail::bareiss_forward(z, n);
    if (sign == 0) return Rational(0);
    mpq_class det(z[static_cast<size_t>(n - 1)][static_cast<size_t>(n - 1)] * sign);
    mpz_class scale = 1;
    for (const auto& c : mult) scale *= c;
    return Rational(mpq_class(det / scale));
  } else {
    // Zero tolerance: report the numerical determinant even when tiny.
    auto lu = detail::lu_decompose(m, 0.0);
    if (lu.singular) return 0.0;
    double det = lu.sign;
    for (int i = 0; i < n; ++i) det *= lu.lu(i, i);
    return det;
  }
}

/// Exact: fraction-free Bareiss on [M | I] followed by integer back-substitution.
/// Approx: LU; Singular when a pivot falls below eq * max|m|.
template <Scalar S>
Matrix<S> inverse(const Matrix<S>& m, const ToleranceContext& ctx = {}) {
  if (!m.square()) fail(ErrorKind::InvalidArgument, "inverse of a non-square matrix");
  int n = m.rows();
  auto nn = static_cast<size_t>(n);
  if constexpr (is_exact_v<S>) {
    auto [z, mult] = detail::integer_rows(m);
    for (size_t i = 0; i < nn; ++i) {
      z[i].resize(2 * nn, 0);
      z[i][nn + i] = 1;
    }
    if (detail::bareiss_forward(z, n) == 0) fail(ErrorKind::Singular, "matrix is singular");
    const mpz_class d = z[nn - 1][nn - 1];
    // Solve U X = R scaled by d; d * X is integral.
    std::vector<std::vector<mpz_class>> x(nn, std::vector<mpz_class>(nn));
    for (size_t c = 0; c < nn; ++c) {
      for (int i = n - 1; i >= 0; --i) {
        auto ii = static_cast<size_t>(i);
        mpz_class acc = d * z[ii][nn + c];
        for (size_t j = ii + 1; j < nn; ++j) acc -= z[ii][j] * x[j][c];
        mpz_divexact(acc.get_mpz_t(), acc.get_mpz_t(), z[ii][ii].get_mpz_t());
        x[ii][c] = acc;
      }
    }
    Matrix<Rational> inv(n, n);
    for (size_t i = 0; i < nn; ++i)
      for (size_t j = 0; j < nn; ++j)
        inv(static_cast<int>(i), static_cast<int>(j)) = Rational(mpq_class(x[i][j] * mult[j], d));
    return inv;
  } else {
    auto lu = detail::lu_decompose(m, ctx.eq);
    if (lu.singular) fail(ErrorKind::Singular, "matrix is numerically singular");
    Matrix<double> inv(n, n);
    for (int c = 0; c < n; ++c) {
      std::vector<double> y(nn, 0.0);
      for (int i = 0; i < n; ++i) {
        double acc = lu.perm[static_cast<size_t>(i)] == c ? 1.0 : 0.0;
        for (int j = 0; j < i; ++j) acc -= lu.lu(i, j) * y[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
      }
      for (int i = n - 1; i >= 0; --i) {
        double acc = y[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) acc -= lu.lu(i, j) * inv(j, c);
        inv(i, c) = acc / lu.lu(i, i);
      }
    }
    return inv;
  }
}

template <Scalar S>
bool is_invertible(const Matrix<S>& m, const ToleranceContext& ctx = {}) {
  if constexpr (is_exact_v<S>) {
    return !determinant(m).is_zero();
  } else {
    return !detail::lu_decompose(m, ctx.eq).singular;
  }
}

}  // namespace hurwitz
