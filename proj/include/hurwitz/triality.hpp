#pragma once

// Triality components: phi(xy) = phi1(x) phi2(y).
//
// Dimension <= 4 uses the associative pair (R_{phi(1)}^{-1} phi, phi). For
// octonions the pair is found numerically: with c = phi2(1) and u = phi(1),
// phi1 = R_{c^{-1}} phi and phi2 = L_{c u^{-1}} phi, so only c (up to scale)
// is unknown. It is recovered by damped Gauss-Newton on the unit sphere from
// random starts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hurwitz/algebra.hpp"
#include "hurwitz/linear_maps.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/random.hpp"

namespace hurwitz {

template <Scalar S>
struct TrialityTriple {
  Matrix<S> phi;
  Matrix<S> phi1;
  Matrix<S> phi2;
  S residual = S(0);
};

/// max over basis pairs of |phi(e_i e_j) - phi1(e_i) phi2(e_j)|.
template <Scalar S>
S triality_basis_residual(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi, const Matrix<S>& phi1,
                          const Matrix<S>& phi2) {
  S worst(0);
  int l = alg.dim();
  for (int i = 0; i < l; ++i) {
    Element<S> x1 = Element<S>(phi1.column(i));
    for (int j = 0; j < l; ++j) {
      Element<S> lhs = alg.apply(phi, alg.basis_product(i, j));
      Element<S> rhs = alg.mul(x1, Element<S>(phi2.column(j)));
      S d = (lhs - rhs).max_abs();
      if (d > worst) worst = d;
    }
  }
  return worst;
}

namespace detail {

template <Scalar S>
S similitude_deviation(const HurwitzAlgebra<S>& alg, const Matrix<S>& m) {
  Matrix<S> b = alg.gram();
  Matrix<S> g = m.transpose() * b * m;
  S mu = g(0, 0) / b(0, 0);
  return max_abs_diff(g, Matrix<S>(mu * b));
}

// Rough magnitude of phi(e_i e_j) used to scale absolute residuals.
template <Scalar S>
double product_scale(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi) {
  double m = to_double(max_abs(phi));
  double c = 0;
  for (int i = 0; i < alg.dim(); ++i)
    for (int j = 0; j < alg.dim(); ++j) c = std::max(c, std::fabs(to_double(alg.product_coeff(i, j))));
  return std::max(1.0, m * std::max(1.0, c));
}

}  // namespace detail

/// Recomputes the triality residual, both consistency relations and the
/// similitude deviations of phi1, phi2; returns the largest deviation.
template <Scalar S>
S verify_triality(const HurwitzAlgebra<S>& alg, const TrialityTriple<S>& t, const ToleranceContext& ctx = {}) {
  S worst = triality_basis_residual(alg, t.phi, t.phi1, t.phi2);
  auto bump = [&](const S& v) {
    if (v > worst) worst = v;
  };
  Element<S> c = Element<S>(t.phi2.column(0));
  Element<S> d = Element<S>(t.phi1.column(0));
  if (!alg.is_invertible(c, ctx) || !alg.is_invertible(d, ctx)) {
    bump(max_abs(t.phi1) + max_abs(t.phi2) + S(1));
    return worst;
  }
  bump(max_abs_diff(t.phi1, Matrix<S>(alg.right_matrix(alg.inverse(c, ctx)) * t.phi)));
  bump(max_abs_diff(t.phi2, Matrix<S>(alg.left_matrix(alg.inverse(d, ctx)) * t.phi)));
  bump(detail::similitude_deviation(alg, t.phi1));
  bump(detail::similitude_deviation(alg, t.phi2));
  return worst;
}

struct TrialitySolverOptions {
  int restarts = 16;
  int max_iterations = 60;
  std::uint64_t seed = 0x7a11717;
};

namespace detail {

struct OctonionTrialityProblem {
  const HurwitzAlgebra<double>& alg;
  std::vector<Element<double>> images;  // phi(e_i)
  std::vector<Element<double>> targets; // phi(e_i e_j), row-major
  Element<double> u_inv;                // phi(1)^{-1}

  // Residual r_ij = phi(e_i e_j) - (phi(e_i) c^{-1})((c u^{-1}) phi(e_j)), stacked.
  std::vector<double> residual(const Element<double>& c) const {
    int l = alg.dim();
    double n = alg.norm(c);
    Element<double> cbar = alg.conj(c);
    Element<double> cu = alg.mul(c, u_inv);
    std::vector<double> r;
    r.reserve(static_cast<size_t>(l * l * l));
    std::vector<Element<double>> right(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j) right[static_cast<size_t>(j)] = alg.mul(cu, images[static_cast<size_t>(j)]);
    for (int i = 0; i < l; ++i) {
      Element<double> left = alg.mul(images[static_cast<size_t>(i)], cbar);
      for (int j = 0; j < l; ++j) {
        Element<double> p = alg.mul(left, right[static_cast<size_t>(j)]);
        const auto& tgt = targets[static_cast<size_t>(i * l + j)];
        for (int k = 0; k < l; ++k) r.push_back(tgt[k] - p[k] / n);
      }
    }
    return r;
  }

  // d r / d c_k, analytic: P = N(c)/n(c) with N bilinear in (conj c, c).
  Matrix<double> jacobian(const Element<double>& c) const {
    int l = alg.dim();
    double n = alg.norm(c);
    Element<double> cbar = alg.conj(c);
    Element<double> cu = alg.mul(c, u_inv);
    const auto& d = alg.norm_diagonal();
    Matrix<double> jac(l * l * l, l);
    std::vector<Element<double>> right(static_cast<size_t>(l));
    for (int j = 0; j < l; ++j) right[static_cast<size_t>(j)] = alg.mul(cu, images[static_cast<size_t>(j)]);
    for (int k = 0; k < l; ++k) {
      Element<double> ek = alg.basis(k);
      Element<double> ekbar = alg.conj(ek);
      Element<double> eku = alg.mul(ek, u_inv);
      double dn = 2 * d[static_cast<size_t>(k)] * c[k];
      for (int i = 0; i < l; ++i) {
        const auto& xi = images[static_cast<size_t>(i)];
        Element<double> left = alg.mul(xi, cbar);
        Element<double> left_k = alg.mul(xi, ekbar);
        for (int j = 0; j < l; ++j) {
          const auto& yj = images[static_cast<size_t>(j)];
          Element<double> num = alg.mul(left, right[static_cast<size_t>(j)]);
          Element<double> dnum = alg.mul(left_k, right[static_cast<size_t>(j)]) + alg.mul(left, alg.mul(eku, yj));
          for (int m = 0; m < l; ++m) {
            double dp = dnum[m] / n - num[m] * dn / (n * n);
            jac((i * l + j) * l + m, k) = -dp;
          }
        }
      }
    }
    return jac;
  }
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

inline double sum_sq(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

// Levenberg-Marquardt steps from a unit start; returns the final c.
inline Element<double> refine_octonion_c(const OctonionTrialityProblem& prob, Element<double> c, int iterations,
                                         double target) {
  const auto& alg = prob.alg;
  int l = alg.dim();
  auto normalise = [&](Element<double> x) { return x * (1.0 / std::sqrt(alg.norm(x))); };
  c = normalise(c);
  std::vector<double> r = prob.residual(c);
  double cost = sum_sq(r);
  double damping = 1e-3;
  for (int it = 0; it < iterations; ++it) {
    if (max_abs(r) <= target) break;
    Matrix<double> jac = prob.jacobian(c);
    Matrix<double> jtj = jac.transpose() * jac;
    std::vector<double> jtr = jac.transpose().apply(r);
    double diag_scale = 0;
    for (int k = 0; k < l; ++k) diag_scale = std::max(diag_scale, jtj(k, k));
    bool improved = false;
    for (int attempt = 0; attempt < 12 && !improved; ++attempt) {
      Matrix<double> sys = jtj;
      for (int k = 0; k < l; ++k) sys(k, k) += damping * std::max(diag_scale, 1e-12);
      Matrix<double> inv;
      try {
        inv = inverse(sys, ToleranceContext{1e-300, 1e-8});
      } catch (const Error&) {
        damping *= 10;
        continue;
      }
      std::vector<double> step = inv.apply(jtr);
      Element<double> trial = c;
      for (int k = 0; k < l; ++k) trial[k] -= step[static_cast<size_t>(k)];
      if (!(alg.norm(trial) > 0)) {
        damping *= 10;
        continue;
      }
      trial = normalise(trial);
      std::vector<double> rt = prob.residual(trial);
      double ct = sum_sq(rt);
      if (ct < cost) {
        c = trial;
        r = std::move(rt);
        cost = ct;
        damping = std::max(damping / 10, 1e-15);
        improved = true;
      } else {
        damping *= 10;
      }
    }
    if (!improved) break;
  }
  return c;
}

}  // namespace detail

/// Triality components of phi. Dimension <= 4 is exact; dimension 8 uses the
/// restarted solver (approximate backend only).
template <Scalar S>
TrialityTriple<S> triality_components(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi,
                                      const ToleranceContext& ctx = {}, const TrialitySolverOptions& opts = {}) {
  int l = alg.dim();
  if (l < 2) fail(ErrorKind::InvalidArgument, "triality components need dimension >= 2");
  SimilitudeCert<S> cert = similitude_check(alg, phi, ctx);
  if (l >= 4 && !cert.proper) fail(ErrorKind::ImproperSimilitude, "triality needs a proper similitude in dimension >= 4");
  Element<S> u = Element<S>(phi.column(0));
  if (!alg.is_invertible(u, ctx)) fail(ErrorKind::NotInvertible, "phi(1) has zero norm");

  if (l <= 4) {
    TrialityTriple<S> t{phi, alg.right_matrix(alg.inverse(u, ctx)) * phi, phi, S(0)};
    t.residual = triality_basis_residual(alg, t.phi, t.phi1, t.phi2);
    return t;
  } else if constexpr (is_exact_v<S>) {
    fail(ErrorKind::BackendMismatch, "octonion triality solving needs the approximate backend");
  } else {
    detail::OctonionTrialityProblem prob{alg, {}, {}, alg.inverse(u, ctx)};
    for (int i = 0; i < l; ++i) prob.images.push_back(Element<double>(phi.column(i)));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) prob.targets.push_back(alg.apply(phi, alg.basis_product(i, j)));
    double scale = detail::product_scale(alg, phi);
    double accept = ctx.residual * scale;
    Rng rng(opts.seed);
    double best = INFINITY;
    for (int attempt = 0; attempt < opts.restarts; ++attempt) {
      Element<double> start = alg.zero();
      std::normal_distribution<double> nd(0.0, 1.0);
      for (int k = 0; k < l; ++k) start[k] = nd(rng);
      if (!(alg.norm(start) > 0)) continue;
      // Polish well below the acceptance threshold once converged.
      Element<double> c = detail::refine_octonion_c(prob, start, opts.max_iterations, 1e-15 * scale);
      double res = detail::max_abs(prob.residual(c));
      best = std::min(best, res);
      if (res <= accept) {
        Element<double> phi1_at_1 = alg.mul(u, alg.inverse(c, ctx));
        TrialityTriple<double> t{phi, alg.right_matrix(alg.inverse(c, ctx)) * phi,
                                 alg.left_matrix(alg.inverse(phi1_at_1, ctx)) * phi, 0.0};
        t.residual = triality_basis_residual(alg, t.phi, t.phi1, t.phi2);
        if (t.residual <= accept) return t;
      }
    }
    fail(ErrorKind::TrialitySolverFailed,
         "no restart reached the residual tolerance (best " + to_string(best) + ")");
  }
}

/// w with t2 = (R_w^{-1} t1.phi1, L_w t1.phi2) and w in the invertible nucleus.
template <Scalar S>
Element<S> triality_align(const HurwitzAlgebra<S>& alg, const TrialityTriple<S>& t1, const TrialityTriple<S>& t2,
                          const ToleranceContext& ctx = {}) {
  if (!matrices_close(t1.phi, t2.phi, ctx.residual)) fail(ErrorKind::InvalidArgument, "triples do not share phi");
  Matrix<S> m = t2.phi2 * inverse(t1.phi2, ctx);
  Element<S> w = Element<S>(m.column(0));
  if (!alg.is_invertible(w, ctx)) fail(ErrorKind::NotRelated, "candidate w is not invertible");
  if (!alg.in_nucleus(w, ctx)) fail(ErrorKind::NotRelated, "candidate w is not in the nucleus");
  if (!matrices_close(t2.phi2, Matrix<S>(alg.left_matrix(w) * t1.phi2), ctx.residual))
    fail(ErrorKind::NotRelated, "second components are not related by L_w");
  if (!matrices_close(t2.phi1, Matrix<S>(alg.right_matrix(alg.inverse(w, ctx)) * t1.phi1), ctx.residual))
    fail(ErrorKind::NotRelated, "first components are not related by R_w^{-1}");
  return w;
}

/// Known triples built from Moufang identities: L_a has components
/// (L_a R_a, L_{a^{-1}}) and R_a has (R_{a^{-1}}, L_a R_a). Valid in every
/// alternative algebra, so they give exact octonion triples.
template <Scalar S>
TrialityTriple<S> left_multiplication_triple(const HurwitzAlgebra<S>& alg, const Element<S>& a) {
  Matrix<S> la = alg.left_matrix(a);
  return {la, la * alg.right_matrix(a), alg.left_matrix(alg.inverse(a)), S(0)};
}

template <Scalar S>
TrialityTriple<S> right_multiplication_triple(const HurwitzAlgebra<S>& alg, const Element<S>& a) {
  Matrix<S> ra = alg.right_matrix(a);
  return {ra, alg.right_matrix(alg.inverse(a)), alg.left_matrix(a) * ra, S(0)};
}

/// (phi psi)_i = phi_i psi_i.
template <Scalar S>
TrialityTriple<S> compose_triples(const TrialityTriple<S>& f, const TrialityTriple<S>& g) {
  return {f.phi * g.phi, f.phi1 * g.phi1, f.phi2 * g.phi2, S(0)};
}

/// L_a R_b with its triality components known by construction.
template <Scalar S>
TrialityTriple<S> random_proper_similitude_with_triality(const HurwitzAlgebra<S>& alg, Rng& rng,
                                                         const ToleranceContext& ctx = {}) {
  Element<S> a = random_invertible_element(alg, rng, ctx);
  Element<S> b = random_invertible_element(alg, rng, ctx);
  return compose_triples(left_multiplication_triple(alg, a), right_multiplication_triple(alg, b));
}

}  // namespace hurwitz
