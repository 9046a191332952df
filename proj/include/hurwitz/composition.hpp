#pragma once

// Isotopes of quaternion algebras that are composition algebras: both maps
// similitudes. Their orbits are classified by a pair (a, b) up to simultaneous
// conjugation and scaling, plus the properness class.

#include <optional>
#include <utility>
#include <vector>

#include "hurwitz/isotope.hpp"
#include "hurwitz/quaternion.hpp"

namespace hurwitz {

template <Scalar S>
struct CompCanonicalForm {
  IsotopeClass cls;
  Element<S> a;
  Element<S> b;
};

template <Scalar S>
struct CompCanonicalResult {
  CompCanonicalForm<S> form;
  Reduction<S> reduction;
};

/// Normal-form maps of the class: (L_a, R_b), (R_a kappa, R_b), (L_a, L_b kappa),
/// (L_a kappa, R_b kappa).
template <Scalar S>
Isotope<S> rebuild(const HurwitzAlgebra<S>& alg, const CompCanonicalForm<S>& f) {
  return {multiplication_of(alg, first_uses_left(f.cls), f.a) * class_sign_map(alg, f.cls.i),
          multiplication_of(alg, second_uses_left(f.cls), f.b) * class_sign_map(alg, f.cls.j)};
}

namespace detail {

// x with m lambda = M_x (up to a scalar absorbed into x).
template <Scalar S>
Element<S> split_composition_map(const HurwitzAlgebra<S>& alg, const Matrix<S>& m, bool left, int sign,
                                 const ToleranceContext& ctx) {
  Matrix<S> unsigned_map = m * class_sign_map(alg, sign);
  Element<S> x = Element<S>(unsigned_map.column(0));
  if (!matrices_close(unsigned_map, multiplication_of(alg, left, x), ctx.residual))
    fail(ErrorKind::Degenerate, "reduced map does not have the class shape");
  return normalize_projective(alg, x);
}

}  // namespace detail

/// Canonical form of a composition isotope of a quaternion algebra (exact or
/// approximate backend).
template <Scalar S>
CompCanonicalResult<S> comp_canonical(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso,
                                      const ToleranceContext& ctx = {}) {
  if (alg.dim() != 4) fail(ErrorKind::WrongDimension, "composition canonical forms need dimension 4");
  CompositionCert<S> cert = is_composition(alg, iso, ctx);
  IsotopeClass cls{cert.alpha.proper ? 1 : -1, cert.beta.proper ? 1 : -1};
  auto [a, b] = factor_proper_similitude(alg, Matrix<S>(iso.alpha * class_sign_map(alg, cls.i)), ctx);
  auto [c, d] = factor_proper_similitude(alg, Matrix<S>(iso.beta * class_sign_map(alg, cls.j)), ctx);
  Reduction<S> red = reduce_to_class_shape(alg, iso, cls, a, b, c, d, ctx);
  CompCanonicalForm<S> form{cls, detail::split_composition_map(alg, red.reduced.alpha, first_uses_left(cls), cls.i, ctx),
                            detail::split_composition_map(alg, red.reduced.beta, second_uses_left(cls), cls.j, ctx)};
  return {form, red};
}

template <Scalar S>
struct PairConjugacy {
  Element<S> s;
  S rho_a = S(1);
  S rho_b = S(1);
};

namespace detail {

// Scalars rho with x = rho y possible after conjugation: traces and norms must match.
template <Scalar S>
std::vector<S> conjugacy_scales(const HurwitzAlgebra<S>& alg, const Element<S>& x, const Element<S>& y,
                                const ToleranceContext& ctx) {
  S tx = alg.trace(x), ty = alg.trace(y);
  double scale = std::max(1.0, to_double(y.max_abs()));
  if (!is_zero(ty, ctx, scale)) return {tx / ty};
  if (!is_zero(tx, ctx, scale)) return {};
  S ratio = alg.norm(x) / alg.norm(y);
  if constexpr (is_exact_v<S>) {
    Rational root;
    if (!rational_sqrt(ratio, root)) return {};
    return {root, -root};
  } else {
    if (!(ratio > 0)) return {};
    return {std::sqrt(ratio), -std::sqrt(ratio)};
  }
}

}  // namespace detail

/// s with s a s^{-1} = rho_a a' and s b s^{-1} = rho_b b' for scalars rho_a, rho_b.
template <Scalar S>
PairConjugacy<S> pair_conjugacy(const HurwitzAlgebra<S>& alg, const std::pair<Element<S>, Element<S>>& p1,
                                const std::pair<Element<S>, Element<S>>& p2, const ToleranceContext& ctx = {}) {
  require_quaternion(alg.dim());
  for (const auto* x : {&p1.first, &p1.second, &p2.first, &p2.second})
    if (!alg.is_invertible(*x, ctx)) fail(ErrorKind::NotInvertible, "pair element has zero norm");
  const auto& [a, b] = p1;
  const auto& [a2, b2] = p2;
  for (const S& ra : detail::conjugacy_scales(alg, a, a2, ctx)) {
    for (const S& rb : detail::conjugacy_scales(alg, b, b2, ctx)) {
      Matrix<S> sys(8, 4);
      Matrix<S> ba = alg.right_matrix(a) - alg.left_matrix(a2) * ra;
      Matrix<S> bb = alg.right_matrix(b) - alg.left_matrix(b2) * rb;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          sys(r, c) = ba(r, c);
          sys(r + 4, c) = bb(r, c);
        }
      auto basis = nullspace(sys);
      // The norm cannot vanish on every v_i and v_i + v_j unless it vanishes on the span.
      std::vector<Element<S>> candidates;
      for (size_t i = 0; i < basis.size(); ++i) candidates.push_back(Element<S>(basis[i]));
      for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j)
          candidates.push_back(Element<S>(basis[i]) + Element<S>(basis[j]));
      for (const auto& cand : candidates) {
        if (!alg.is_invertible(cand, ctx)) continue;
        Element<S> s = normalize_projective(alg, cand);
        Element<S> si = alg.inverse(s, ctx);
        Element<S> ea = alg.mul(alg.mul(s, a), si) - a2 * ra;
        Element<S> eb = alg.mul(alg.mul(s, b), si) - b2 * rb;
        bool ok;
        if constexpr (is_exact_v<S>) {
          ok = ea.is_zero() && eb.is_zero();
        } else {
          double sc = std::max({1.0, a.max_abs(), b.max_abs()});
          ok = ea.max_abs() <= ctx.residual * sc && eb.max_abs() <= ctx.residual * sc;
        }
        if (ok) return {s, ra, rb};
      }
    }
  }
  fail(ErrorKind::NotConjugate, "no simultaneous conjugation relates the pairs");
}

/// Composition forms are isomorphic iff the classes agree and the pairs are conjugate.
template <Scalar S>
std::optional<PairConjugacy<S>> comp_iso_test(const HurwitzAlgebra<S>& alg, const CompCanonicalForm<S>& f1,
                                              const CompCanonicalForm<S>& f2, const ToleranceContext& ctx = {}) {
  if (!(f1.cls == f2.cls)) return std::nullopt;
  try {
    return pair_conjugacy(alg, {f1.a, f1.b}, {f2.a, f2.b}, ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotConjugate) return std::nullopt;
    throw;
  }
}

}  // namespace hurwitz
