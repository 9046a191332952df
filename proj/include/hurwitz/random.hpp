#pragma once

// Seeded test-data generators. Exact draws use small integer coordinates in
// [-5, 5]; approximate draws use standard normals.

#include <cmath>
#include <cstdint>
#include <random>

#include "hurwitz/algebra.hpp"
#include "hurwitz/linear_maps.hpp"
#include "hurwitz/matrix.hpp"

namespace hurwitz {

using Rng = std::mt19937_64;

template <Scalar S>
S random_scalar(Rng& rng) {
  if constexpr (is_exact_v<S>) {
    std::uniform_int_distribution<int> d(-5, 5);
    return Rational(d(rng));
  } else {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(rng);
  }
}

template <Scalar S>
Element<S> random_element(const HurwitzAlgebra<S>& alg, Rng& rng) {
  Element<S> x = alg.zero();
  for (int i = 0; i < alg.dim(); ++i) x[i] = random_scalar<S>(rng);
  return x;
}

template <Scalar S>
Element<S> random_invertible_element(const HurwitzAlgebra<S>& alg, Rng& rng, const ToleranceContext& ctx = {}) {
  for (;;) {
    Element<S> x = random_element(alg, rng);
    if (!x.is_zero() && alg.is_invertible(x, ctx)) {
      if constexpr (!is_exact_v<S>) {
        // Keep draws away from the isotropic cone of split forms.
        if (std::fabs(alg.norm(x)) < 1e-2 * x.max_abs() * x.max_abs()) continue;
      }
      return x;
    }
  }
}

/// Unit-norm element of a Euclidean algebra.
inline Element<double> random_unit_element(const HurwitzAlgebra<double>& alg, Rng& rng) {
  Element<double> x = random_invertible_element(alg, rng);
  return x * (1.0 / std::sqrt(alg.norm(x)));
}

template <Scalar S>
Matrix<S> random_matrix(int n, Rng& rng) {
  Matrix<S> m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = random_scalar<S>(rng);
  return m;
}

template <Scalar S>
Matrix<S> random_invertible(const HurwitzAlgebra<S>& alg, Rng& rng, const ToleranceContext& ctx = {}) {
  for (;;) {
    Matrix<S> m = random_matrix<S>(alg.dim(), rng);
    if (is_invertible(m, ctx)) return m;
  }
}

template <Scalar S>
Matrix<S> random_invertible(const HurwitzAlgebra<S>& alg, std::uint64_t seed, const ToleranceContext& ctx = {}) {
  Rng rng(seed);
  return random_invertible(alg, rng, ctx);
}

/// L_a R_b for random invertible a, b; in dimension <= 2 a kappa factor may be
/// appended, since every similitude of a commutative Hurwitz algebra acts.
template <Scalar S>
Matrix<S> random_proper_similitude(const HurwitzAlgebra<S>& alg, Rng& rng, const ToleranceContext& ctx = {}) {
  Element<S> a = random_invertible_element(alg, rng, ctx);
  Element<S> b = random_invertible_element(alg, rng, ctx);
  Matrix<S> phi = alg.left_matrix(a) * alg.right_matrix(b);
  if (alg.dim() <= 2 && std::bernoulli_distribution(0.5)(rng)) phi = phi * alg.kappa();
  return phi;
}

template <Scalar S>
Matrix<S> random_proper_similitude(const HurwitzAlgebra<S>& alg, std::uint64_t seed, const ToleranceContext& ctx = {}) {
  Rng rng(seed);
  return random_proper_similitude(alg, rng, ctx);
}

}  // namespace hurwitz
