#pragma once

// Linear maps of a Hurwitz algebra: similitude certification, symmetric
// eigendecomposition, nullspaces and the polar factorisation alpha = zeta delta lambda.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hurwitz/algebra.hpp"
#include "hurwitz/errors.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/scalar.hpp"

namespace hurwitz {

/// Adjoint with respect to the norm form: D^{-1} phi^T D with D = diag(d).
/// Coincides with the transpose when the basis is orthonormal.
template <Scalar S>
Matrix<S> adjoint(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi) {
  const auto& d = alg.norm_diagonal();
  Matrix<S> t = phi.transpose();
  for (int i = 0; i < t.rows(); ++i)
    for (int j = 0; j < t.cols(); ++j)
      t(i, j) = t(i, j) * d[static_cast<size_t>(j)] / d[static_cast<size_t>(i)];
  return t;
}

template <Scalar S>
struct SimilitudeCert {
  Matrix<S> map;
  S multiplier = S(1);
  bool proper = true;
  /// Max-norm of phi^T B phi - mu B (zero on the exact backend).
  S residual = S(0);
};

/// Certifies phi as a similitude of (A, n): phi^T B phi = mu B. Properness is
/// read off from det(phi) = +-mu^{l/2}; in dimension one every similitude counts
/// as proper.
template <Scalar S>
SimilitudeCert<S> similitude_check(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi,
                                   const ToleranceContext& ctx = {}) {
  int l = alg.dim();
  if (phi.rows() != l || phi.cols() != l) fail(ErrorKind::AlgebraMismatch, "map dimension differs from algebra");
  S det = determinant(phi);
  if (det == S(0) || !is_invertible(phi, ctx)) fail(ErrorKind::Singular, "similitude candidate is singular");
  Matrix<S> b = alg.gram();
  Matrix<S> g = phi.transpose() * b * phi;
  S mu = g(0, 0) / b(0, 0);
  S residual = max_abs_diff(g, Matrix<S>(mu * b));
  bool ok;
  if constexpr (is_exact_v<S>) {
    ok = residual == S(0);
  } else {
    ok = residual <= ctx.residual * std::max(1.0, std::fabs(mu) * max_abs(b));
  }
  if (!ok || mu == S(0)) {
    fail(ErrorKind::NotSimilitude, "phi^T B phi deviates from a multiple of B by " + to_string(residual));
  }
  bool proper = true;
  if (l % 2 == 0) {
    S target = power(mu, static_cast<unsigned>(l / 2));
    if constexpr (is_exact_v<S>) {
      if (det == target) {
        proper = true;
      } else if (det == -target) {
        proper = false;
      } else {
        fail(ErrorKind::NotSimilitude, "determinant is not +-mu^{l/2}");
      }
    } else {
      proper = sign(det) == sign(target);
    }
  }
  return {phi, mu, proper, residual};
}

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix<double> vectors;      // orthonormal columns
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
inline EigenResult symmetric_eigen(const Matrix<double>& s, const ToleranceContext& ctx = {}) {
  if (!s.square()) fail(ErrorKind::InvalidArgument, "eigendecomposition of a non-square matrix");
  int n = s.rows();
  double scale = std::max(1e-300, max_abs(s));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(s(i, j) - s(j, i)) > ctx.residual * scale) fail(ErrorKind::NotSymmetric, "matrix is not symmetric");

  Matrix<double> a = s;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (s(i, j) + s(j, i));
  Matrix<double> v = Matrix<double>::identity(n);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off = std::max(off, std::fabs(a(i, j)));
    if (off <= 1e-300 || off <= 1e-17 * scale) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = a(p, q);
        if (apq == 0.0) continue;
        double theta = (a(q, q) - a(p, p)) / (2 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), sn = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0;
        for (int k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });
  EigenResult r{std::vector<double>(static_cast<size_t>(n)), Matrix<double>(n, n)};
  for (int k = 0; k < n; ++k) {
    int src = order[static_cast<size_t>(k)];
    r.values[static_cast<size_t>(k)] = a(src, src);
    for (int i = 0; i < n; ++i) r.vectors(i, k) = v(i, src);
  }
  return r;
}

/// Basis of the right nullspace. Exact: reduced row echelon form over Q.
/// Approx: eigenvectors of M^T M whose singular value is below
/// null_tol * sigma_max (orthonormal basis).
template <Scalar S>
std::vector<std::vector<S>> nullspace(const Matrix<S>& m, double null_tol = 1e-6) {
  int rows = m.rows(), cols = m.cols();
  std::vector<std::vector<S>> basis;
  if constexpr (is_exact_v<S>) {
    Matrix<Rational> r = m;
    std::vector<int> pivot_cols;
    int row = 0;
    for (int c = 0; c < cols && row < rows; ++c) {
      int p = -1;
      for (int i = row; i < rows; ++i)
        if (!r(i, c).is_zero()) { p = i; break; }
      if (p < 0) continue;
      for (int j = 0; j < cols; ++j) std::swap(r(p, j), r(row, j));
      Rational inv = Rational(1) / r(row, c);
      for (int j = 0; j < cols; ++j) r(row, j) *= inv;
      for (int i = 0; i < rows; ++i) {
        if (i == row || r(i, c).is_zero()) continue;
        Rational f = r(i, c);
        for (int j = 0; j < cols; ++j) r(i, j) -= f * r(row, j);
      }
      pivot_cols.push_back(c);
      ++row;
    }
    std::vector<bool> is_pivot(static_cast<size_t>(cols), false);
    for (int c : pivot_cols) is_pivot[static_cast<size_t>(c)] = true;
    for (int f = 0; f < cols; ++f) {
      if (is_pivot[static_cast<size_t>(f)]) continue;
      std::vector<Rational> v(static_cast<size_t>(cols), Rational(0));
      v[static_cast<size_t>(f)] = 1;
      for (size_t k = 0; k < pivot_cols.size(); ++k)
        v[static_cast<size_t>(pivot_cols[k])] = -r(static_cast<int>(k), f);
      basis.push_back(std::move(v));
    }
  } else {
    Matrix<double> gram = m.transpose() * m;
    EigenResult e = symmetric_eigen(gram);
    double smax = std::sqrt(std::max(0.0, e.values.front()));
    for (int k = 0; k < cols; ++k) {
      double sigma = std::sqrt(std::max(0.0, e.values[static_cast<size_t>(k)]));
      if (sigma <= null_tol * std::max(smax, 1e-300) || smax == 0.0) basis.push_back(e.vectors.column(k));
    }
  }
  return basis;
}

/// alpha = zeta * delta * lambda with zeta special orthogonal, delta positive
/// definite and self-adjoint, lambda in {I, kappa}.
struct PolarFactors {
  Matrix<double> zeta;
  Matrix<double> delta;
  bool lambda_is_kappa = false;
  double residual = 0;  // max-norm of zeta delta lambda - alpha

  Matrix<double> lambda(int dim) const {
    Matrix<double> k = Matrix<double>::identity(dim);
    if (lambda_is_kappa)
      for (int i = 1; i < dim; ++i) k(i, i) = -1;
    return k;
  }
};

/// Polar factorisation on a Euclidean algebra. The sign of det(alpha) fixes
/// lambda first; the rest is computed in the orthonormal basis sqrt(d_i) e_i.
inline PolarFactors polar_decompose(const HurwitzAlgebra<double>& alg, const Matrix<double>& alpha,
                                    const ToleranceContext& ctx = {}) {
  if (!alg.euclidean()) fail(ErrorKind::NotEuclidean, "polar factorisation needs a Euclidean norm");
  int n = alg.dim();
  if (alpha.rows() != n || alpha.cols() != n) fail(ErrorKind::AlgebraMismatch, "map dimension differs from algebra");
  if (!is_invertible(alpha, ctx)) fail(ErrorKind::Singular, "polar factorisation of a singular map");

  std::vector<double> w(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] = std::sqrt(alg.norm_diagonal()[static_cast<size_t>(i)]);
  auto to_ortho = [&](const Matrix<double>& m) {
    Matrix<double> r = m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) *= w[static_cast<size_t>(i)] / w[static_cast<size_t>(j)];
    return r;
  };
  auto from_ortho = [&](const Matrix<double>& m) {
    Matrix<double> r = m;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r(i, j) *= w[static_cast<size_t>(j)] / w[static_cast<size_t>(i)];
    return r;
  };

  PolarFactors f;
  f.lambda_is_kappa = determinant(alpha) < 0;
  Matrix<double> lambda = f.lambda(n);
  Matrix<double> a = to_ortho(alpha) * lambda;  // lambda is its own inverse

  // Scaled Newton iteration X <- (g X + (g X)^{-T}) / 2 for the orthogonal
  // factor; it avoids squaring the condition number as a^T a would.
  Matrix<double> zeta = a;
  for (int it = 0; it < 100; ++it) {
    Matrix<double> inv_t = inverse(zeta, ctx).transpose();
    double fx = 0, fi = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        fx += zeta(i, j) * zeta(i, j);
        fi += inv_t(i, j) * inv_t(i, j);
      }
    double g = std::sqrt(std::sqrt(fi / fx));
    bool near = std::fabs(g - 1) < 1e-3;
    if (near) g = 1;
    Matrix<double> next = (zeta * g + inv_t * (1 / g)) * 0.5;
    double step = max_abs_diff(next, zeta);
    zeta = next;
    if (near && step <= 4e-15) break;
  }
  Matrix<double> delta = zeta.transpose() * a;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) delta(i, j) = delta(j, i) = 0.5 * (delta(i, j) + delta(j, i));
  if (symmetric_eigen(delta, ctx).values.back() <= 0)
    fail(ErrorKind::Singular, "polar factorisation of a singular map");

  f.zeta = from_ortho(zeta);
  f.delta = from_ortho(delta);
  f.residual = max_abs_diff(Matrix<double>(f.zeta * f.delta * lambda), alpha);
  return f;
}

}  // namespace hurwitz
