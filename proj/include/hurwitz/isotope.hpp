#pragma once

// Principal isotopes A_{alpha,beta} with product x o y = alpha(x) beta(y).

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>

#include "hurwitz/algebra.hpp"
#include "hurwitz/linear_maps.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/random.hpp"
#include "hurwitz/triality.hpp"

namespace hurwitz {

template <Scalar S>
struct Isotope {
  Matrix<S> alpha;
  Matrix<S> beta;
};

template <Scalar S>
Isotope<S> make_isotope(const HurwitzAlgebra<S>& alg, Matrix<S> alpha, Matrix<S> beta,
                        const ToleranceContext& ctx = {}) {
  int l = alg.dim();
  for (const auto* m : {&alpha, &beta})
    if (m->rows() != l || m->cols() != l) fail(ErrorKind::AlgebraMismatch, "map dimension differs from algebra");
  if (!is_invertible(alpha, ctx)) fail(ErrorKind::Singular, "alpha is singular");
  if (!is_invertible(beta, ctx)) fail(ErrorKind::Singular, "beta is singular");
  return {std::move(alpha), std::move(beta)};
}

template <Scalar S>
Element<S> isotope_mul(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, const Element<S>& x,
                       const Element<S>& y) {
  return alg.mul(alg.apply(iso.alpha, x), alg.apply(iso.beta, y));
}

/// Largest coordinate deviation of phi(x o y) - phi(x) o' phi(y) over basis pairs.
template <Scalar S>
S isomorphism_residual(const HurwitzAlgebra<S>& alg, const Isotope<S>& from, const Isotope<S>& to,
                       const Matrix<S>& phi) {
  S worst(0);
  int l = alg.dim();
  std::vector<Element<S>> images;
  for (int i = 0; i < l; ++i) images.push_back(Element<S>(phi.column(i)));
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) {
      Element<S> lhs = alg.apply(phi, isotope_mul(alg, from, alg.basis(i), alg.basis(j)));
      Element<S> rhs = isotope_mul(alg, to, images[static_cast<size_t>(i)], images[static_cast<size_t>(j)]);
      S d = (lhs - rhs).max_abs();
      if (d > worst) worst = d;
    }
  return worst;
}

/// Identity element b a of A_{R_a^{-1}, L_b^{-1}}; NotUnital when alpha^{-1}
/// is not a right multiplication or beta^{-1} not a left multiplication.
template <Scalar S>
Element<S> find_identity(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, const ToleranceContext& ctx = {}) {
  Matrix<S> ai = inverse(iso.alpha, ctx);
  Matrix<S> bi = inverse(iso.beta, ctx);
  Element<S> a = Element<S>(ai.column(0));
  Element<S> b = Element<S>(bi.column(0));
  if (!matrices_close(ai, alg.right_matrix(a), ctx.residual))
    fail(ErrorKind::NotUnital, "alpha^{-1} is not a right multiplication");
  if (!matrices_close(bi, alg.left_matrix(b), ctx.residual))
    fail(ErrorKind::NotUnital, "beta^{-1} is not a left multiplication");
  if (!alg.is_invertible(a, ctx) || !alg.is_invertible(b, ctx))
    fail(ErrorKind::NotUnital, "multiplication candidates have zero norm");
  Element<S> e = alg.mul(b, a);
  for (int i = 0; i < alg.dim(); ++i) {
    Element<S> x = alg.basis(i);
    Element<S> l = isotope_mul(alg, iso, e, x), r = isotope_mul(alg, iso, x, e);
    bool ok;
    if constexpr (is_exact_v<S>) {
      ok = l == x && r == x;
    } else {
      double scale = std::max(1.0, to_double(e.max_abs()));
      ok = (l - x).max_abs() <= ctx.residual * scale && (r - x).max_abs() <= ctx.residual * scale;
    }
    if (!ok) fail(ErrorKind::NotUnital, "identity candidate fails on e_" + std::to_string(i));
  }
  return e;
}

/// rho = n(u)^{-1} for the identity u, so that rho n_A is multiplicative for o.
template <Scalar S>
S unital_isotope_norm(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, const ToleranceContext& ctx = {}) {
  Element<S> u = find_identity(alg, iso, ctx);
  S n = alg.norm(u);
  if (n == S(0) || is_zero(n, ctx, to_double(u.max_abs()) * to_double(u.max_abs())))
    fail(ErrorKind::IsotropicIdentity, "identity element has zero norm");
  return S(1) / n;
}

template <Scalar S>
struct TransportResult {
  Isotope<S> target;
  Matrix<S> phi;
  Matrix<S> phi1;
  Matrix<S> phi2;
  S residual = S(0);
};

/// Moves (alpha, beta) along phi: (phi1 alpha phi^{-1}, phi2 beta phi^{-1}).
/// phi must be proper in dimension >= 4; the triple must verify.
template <Scalar S>
TransportResult<S> transport(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, const TrialityTriple<S>& t,
                             const ToleranceContext& ctx = {}) {
  SimilitudeCert<S> cert = similitude_check(alg, t.phi, ctx);
  if (alg.dim() >= 4 && !cert.proper) fail(ErrorKind::ImproperSimilitude, "transport needs a proper similitude");
  S tri = verify_triality(alg, t, ctx);
  bool tri_ok;
  if constexpr (is_exact_v<S>) {
    tri_ok = tri == S(0);
  } else {
    tri_ok = tri <= ctx.residual * detail::product_scale(alg, t.phi);
  }
  if (!tri_ok) fail(ErrorKind::TrialityMismatch, "triple does not verify (deviation " + to_string(tri) + ")");
  Matrix<S> inv = inverse(t.phi, ctx);
  TransportResult<S> r{{t.phi1 * iso.alpha * inv, t.phi2 * iso.beta * inv}, t.phi, t.phi1, t.phi2, S(0)};
  r.residual = isomorphism_residual(alg, iso, r.target, t.phi);
  bool ok;
  if constexpr (is_exact_v<S>) {
    ok = r.residual == S(0);
  } else {
    double scale = std::max({1.0, to_double(max_abs(iso.alpha)) * to_double(max_abs(iso.beta)),
                             detail::product_scale(alg, t.phi)});
    ok = r.residual <= ctx.residual * scale * scale;
  }
  if (!ok) fail(ErrorKind::TrialityMismatch, "transported isotope fails the isomorphism check");
  return r;
}

/// (R_w^{-1} alpha, L_w beta): the same multiplication for w in N(A)*.
template <Scalar S>
Isotope<S> nuclear_action(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, const Element<S>& w,
                          const ToleranceContext& ctx = {}) {
  return {alg.right_matrix(alg.inverse(w, ctx)) * iso.alpha, alg.left_matrix(w) * iso.beta};
}

/// w in N(A)* with (alpha1, beta1) = (R_w^{-1} alpha2, L_w beta2); Distinct otherwise.
template <Scalar S>
Element<S> same_isotope(const HurwitzAlgebra<S>& alg, const Isotope<S>& i1, const Isotope<S>& i2,
                        const ToleranceContext& ctx = {}) {
  Matrix<S> m = i2.alpha * inverse(i1.alpha, ctx);
  Element<S> w = Element<S>(m.column(0));
  if (!alg.is_invertible(w, ctx)) fail(ErrorKind::Distinct, "candidate w has zero norm");
  if (!matrices_close(m, alg.right_matrix(w), ctx.residual))
    fail(ErrorKind::Distinct, "alpha2 alpha1^{-1} is not a right multiplication");
  if (!matrices_close(Matrix<S>(i1.beta * inverse(i2.beta, ctx)), alg.left_matrix(w), ctx.residual))
    fail(ErrorKind::Distinct, "beta1 beta2^{-1} differs from L_w");
  if (!alg.in_nucleus(w, ctx)) fail(ErrorKind::Distinct, "w is not in the nucleus");
  return w;
}

/// Determinant cosets of (alpha, beta). The exponent is max(2, l/2): the
/// determinant of a triality component differs from det(phi) by a factor in
/// k*^{l/2}, so this is the finest power that transport preserves.
template <Scalar S>
struct DoubleSign {
  PowerCoset<S> first;
  PowerCoset<S> second;
  friend bool operator==(const DoubleSign&, const DoubleSign&) = default;
};

inline int double_sign_exponent(int dim) { return std::max(2, dim / 2); }

template <Scalar S>
DoubleSign<S> double_sign(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso) {
  if (alg.dim() < 2) fail(ErrorKind::Dim1, "double sign needs dimension >= 2");
  if (alg.is_split_binary()) fail(ErrorKind::SplitBinaryAlgebra, "algebra is k x k");
  int e = double_sign_exponent(alg.dim());
  return {coset_rep(determinant(iso.alpha), e), coset_rep(determinant(iso.beta), e)};
}

template <Scalar S>
struct CompositionCert {
  SimilitudeCert<S> alpha;
  SimilitudeCert<S> beta;
  /// n = scale * n_A with scale = mu(alpha) mu(beta).
  S norm_scale = S(1);
  S residual = S(0);
};

/// Succeeds iff alpha and beta are similitudes; then n(x o y) = n(x) n(y) for
/// n = mu(alpha) mu(beta) n_A, checked on seeded random pairs.
template <Scalar S>
CompositionCert<S> is_composition(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso,
                                  const ToleranceContext& ctx = {}, int pairs = 20, std::uint64_t seed = 1) {
  auto certify = [&](const Matrix<S>& m, const char* name) {
    try {
      return similitude_check(alg, m, ctx);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NotSimilitude || e.kind() == ErrorKind::Singular)
        fail(ErrorKind::NotComposition, std::string(name) + " is not a similitude");
      throw;
    }
  };
  CompositionCert<S> c{certify(iso.alpha, "alpha"), certify(iso.beta, "beta"), S(1), S(0)};
  c.norm_scale = c.alpha.multiplier * c.beta.multiplier;
  Rng rng(seed);
  for (int k = 0; k < pairs; ++k) {
    Element<S> x = random_element(alg, rng), y = random_element(alg, rng);
    S lhs = c.norm_scale * alg.norm(isotope_mul(alg, iso, x, y));
    S rhs = c.norm_scale * alg.norm(x) * c.norm_scale * alg.norm(y);
    S d = abs_value(S(lhs - rhs));
    if constexpr (!is_exact_v<S>) d = d / std::max(1.0, std::fabs(rhs));
    if (d > c.residual) c.residual = d;
  }
  bool ok;
  if constexpr (is_exact_v<S>) {
    ok = c.residual == S(0);
  } else {
    ok = c.residual <= ctx.residual;
  }
  if (!ok) fail(ErrorKind::NotComposition, "composition norm self-check failed");
  return c;
}

}  // namespace hurwitz
