#pragma once

// Quaternion-specific tools: inner automorphisms, the factorisation of proper
// similitudes as L_p R_q, canonical forms of isotopes of Euclidean quaternions
// and the isomorphism test between such forms.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hurwitz/algebra.hpp"
#include "hurwitz/isotope.hpp"
#include "hurwitz/linear_maps.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/random.hpp"
#include "hurwitz/triality.hpp"

namespace hurwitz {

inline constexpr const char* kNormalizationTag = "projective-v1";

/// Projective representative. Exact: first nonzero coordinate scaled to 1.
/// Approx: unit norm (coordinate length when the norm vanishes), then the
/// first coordinate above 1e-9 * max|x| made positive.
template <Scalar S>
Element<S> normalize_projective(const HurwitzAlgebra<S>& alg, Element<S> x) {
  if (x.is_zero()) fail(ErrorKind::InvalidArgument, "cannot normalise the zero element");
  if constexpr (is_exact_v<S>) {
    for (int i = 0; i < x.dim(); ++i)
      if (!x[i].is_zero()) return x * (Rational(1) / x[i]);
    return x;
  } else {
    double n = alg.norm(x);
    double len = 0;
    for (double c : x.coords()) len += c * c;
    double scale = n > 1e-300 ? std::sqrt(n) : std::sqrt(len);
    x = x * (1.0 / scale);
    double m = x.max_abs();
    for (int i = 0; i < x.dim(); ++i)
      if (std::fabs(x[i]) > 1e-9 * m) {
        if (x[i] < 0) x = -x;
        break;
      }
    return x;
  }
}

inline void require_quaternion(int dim) {
  if (dim != 4) fail(ErrorKind::WrongDimension, "operation needs a four-dimensional algebra");
}

/// Inner conjugation c_s = L_s R_{s^{-1}}.
template <Scalar S>
Matrix<S> inner_conjugation(const HurwitzAlgebra<S>& alg, const Element<S>& s, const ToleranceContext& ctx = {}) {
  return alg.left_matrix(s) * alg.right_matrix(alg.inverse(s, ctx));
}

/// p with psi = c_p, from the homogeneous system p e_j - psi(e_j) p = 0.
/// psi = I is the degenerate case and yields e_0.
template <Scalar S>
Element<S> inner_conj_solve(const HurwitzAlgebra<S>& alg, const Matrix<S>& psi, const ToleranceContext& ctx = {}) {
  require_quaternion(alg.dim());
  if (!is_invertible(psi, ctx)) fail(ErrorKind::Singular, "psi is singular");
  Matrix<S> sys(16, 4);
  for (int j = 0; j < 4; ++j) {
    Matrix<S> block = alg.right_matrix(alg.basis(j)) - alg.left_matrix(Element<S>(psi.column(j)));
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) sys(4 * j + r, c) = block(r, c);
  }
  auto null = nullspace(sys);
  if (null.empty()) fail(ErrorKind::NotInner, "psi is not an inner automorphism");
  if (null.size() > 1) {
    if (matrices_close(psi, Matrix<S>::identity(4), ctx.residual)) return alg.one();
    fail(ErrorKind::NotInner, "solution space of dimension " + std::to_string(null.size()));
  }
  Element<S> p = normalize_projective(alg, Element<S>(null.front()));
  if (!alg.is_invertible(p, ctx)) fail(ErrorKind::NotInner, "solution has zero norm");
  if (!matrices_close(inner_conjugation(alg, p, ctx), psi, ctx.residual))
    fail(ErrorKind::NotInner, "c_p does not reproduce psi");
  return p;
}

/// phi = L_p R_q for a proper similitude of a quaternion algebra. p is the
/// normalised solution of c_p = phi(.) phi(1)^{-1} and q = p^{-1} phi(1).
template <Scalar S>
std::pair<Element<S>, Element<S>> factor_proper_similitude(const HurwitzAlgebra<S>& alg, const Matrix<S>& phi,
                                                           const ToleranceContext& ctx = {}) {
  require_quaternion(alg.dim());
  Element<S> u = Element<S>(phi.column(0));
  if (!alg.is_invertible(u, ctx)) fail(ErrorKind::NotInvertible, "phi(1) has zero norm");
  Matrix<S> psi = alg.right_matrix(alg.inverse(u, ctx)) * phi;
  Element<S> p = inner_conj_solve(alg, psi, ctx);
  Element<S> q = alg.mul(alg.inverse(p, ctx), u);
  if (!matrices_close(Matrix<S>(alg.left_matrix(p) * alg.right_matrix(q)), phi, ctx.residual))
    fail(ErrorKind::NotInner, "L_p R_q does not reproduce phi");
  return {p, q};
}

/// Unit quaternions (p, q) with zeta = L_p R_q; the sign of (p, q) is fixed by
/// the first significant coordinate of p being positive.
inline std::pair<Element<double>, Element<double>> so4_factor(const HurwitzAlgebra<double>& alg,
                                                              const Matrix<double>& zeta,
                                                              const ToleranceContext& ctx = {}) {
  require_quaternion(alg.dim());
  if (!alg.euclidean()) fail(ErrorKind::NotEuclidean, "so4_factor needs Euclidean quaternions");
  SimilitudeCert<double> cert;
  try {
    cert = similitude_check(alg, zeta, ctx);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NotSimilitude || e.kind() == ErrorKind::Singular)
      fail(ErrorKind::NotSpecialOrthogonal, "map is not orthogonal");
    throw;
  }
  if (std::fabs(cert.multiplier - 1) > ctx.residual || !cert.proper)
    fail(ErrorKind::NotSpecialOrthogonal, "map is not special orthogonal");
  auto [p, q] = factor_proper_similitude(alg, zeta, ctx);
  double np = std::sqrt(alg.norm(p));
  p = p * (1 / np);
  q = q * np;
  double resid = max_abs_diff(Matrix<double>(alg.left_matrix(p) * alg.right_matrix(q)), zeta);
  if (resid > ctx.residual) fail(ErrorKind::NotInner, "factorisation residual " + to_string(resid));
  return {p, q};
}

// ---------------------------------------------------------------------------
// Reduction to normal forms.
//
// Normal-form shapes per class (i, j), with D, E the shape factors and kappa
// the conjugation:
//   ( 1, 1)  (L_a D,       R_b E)
//   (-1, 1)  (R_a D kappa, R_b E)
//   ( 1,-1)  (L_a D,       L_b E kappa)
//   (-1,-1)  (L_a D kappa, R_b E kappa)
// The residual symmetry is s -> (s a s^-1, s b s^-1, c_s D c_s^-1, c_s E c_s^-1).

struct IsotopeClass {
  int i = 1;
  int j = 1;
  friend bool operator==(const IsotopeClass&, const IsotopeClass&) = default;
};

inline bool first_uses_left(IsotopeClass c) { return !(c.i == -1 && c.j == 1); }
inline bool second_uses_left(IsotopeClass c) { return c.i == 1 && c.j == -1; }

template <Scalar S>
Matrix<S> class_sign_map(const HurwitzAlgebra<S>& alg, int sign) {
  return sign < 0 ? alg.kappa() : Matrix<S>::identity(alg.dim());
}

template <Scalar S>
struct Reduction {
  IsotopeClass cls;
  Element<S> nuclear;     // w of the nuclear action applied first
  TrialityTriple<S> move; // group element and its triality pair applied second
  Isotope<S> reduced;
};

/// Given alpha = L_a R_b (..) lambda and beta = L_c R_d (..) mu, applies the
/// nuclear action and one group element that bring (alpha, beta) to the shape
/// of its class.
template <Scalar S>
Reduction<S> reduce_to_class_shape(const HurwitzAlgebra<S>& alg, const Isotope<S>& iso, IsotopeClass cls,
                                   const Element<S>& a, const Element<S>& b, const Element<S>& c,
                                   const Element<S>& d, const ToleranceContext& ctx = {}) {
  Matrix<S> id = Matrix<S>::identity(alg.dim());
  Element<S> w;
  Matrix<S> phi, phi1, phi2;
  if (cls.i == 1 && cls.j == 1) {
    w = alg.inverse(c, ctx);
    phi = alg.right_matrix(alg.mul(b, c));
    phi1 = id;
    phi2 = phi;
  } else if (cls.i == -1 && cls.j == 1) {
    w = alg.inverse(c, ctx);
    phi = alg.right_matrix(alg.inverse(a, ctx));
    phi1 = id;
    phi2 = phi;
  } else if (cls.i == 1 && cls.j == -1) {
    w = b;
    phi = alg.left_matrix(alg.inverse(d, ctx));
    phi1 = phi;
    phi2 = id;
  } else {
    w = alg.inverse(c, ctx);
    phi = alg.left_matrix(alg.inverse(alg.mul(b, c), ctx));
    phi1 = phi;
    phi2 = id;
  }
  Isotope<S> moved = nuclear_action(alg, iso, w, ctx);
  TrialityTriple<S> t{phi, phi1, phi2, S(0)};
  TransportResult<S> r = transport(alg, moved, t, ctx);
  return {cls, w, t, r.target};
}

/// L_x or R_x.
template <Scalar S>
Matrix<S> multiplication_of(const HurwitzAlgebra<S>& alg, bool left, const Element<S>& x) {
  return left ? alg.left_matrix(x) : alg.right_matrix(x);
}

struct QuatCanonicalForm {
  IsotopeClass cls;
  Element<double> a;
  Element<double> b;
  Matrix<double> delta;    // symmetric positive definite, det 1
  Matrix<double> epsilon;  // symmetric positive definite, det 1
};

struct QuatCanonicalResult {
  QuatCanonicalForm form;
  Reduction<double> reduction;
  /// Deviation of the rebuilt form from the reduced pair, after removing the
  /// positive scalars taken out of the shape factors.
  double residual = 0;
};

/// Isotope with the maps of a canonical form.
inline Isotope<double> rebuild(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f) {
  Matrix<double> lambda = class_sign_map(alg, f.cls.i), mu = class_sign_map(alg, f.cls.j);
  return {multiplication_of(alg, first_uses_left(f.cls), f.a) * f.delta * lambda,
          multiplication_of(alg, second_uses_left(f.cls), f.b) * f.epsilon * mu};
}

namespace detail {

inline double det_root(const Matrix<double>& m) {
  double det = determinant(m);
  if (!(det > 0)) fail(ErrorKind::NotSymmetric, "shape factor is not positive definite");
  return std::pow(det, 1.0 / m.rows());
}

// Splits a reduced map m = M_x D lambda into (x normalised, D with det 1).
inline std::pair<Element<double>, Matrix<double>> split_reduced(const HurwitzAlgebra<double>& alg,
                                                                const Matrix<double>& m, bool left, int sign,
                                                                const ToleranceContext& ctx) {
  PolarFactors pf = polar_decompose(alg, m, ctx);
  if (pf.lambda_is_kappa != (sign < 0)) fail(ErrorKind::Degenerate, "reduction changed the determinant sign");
  Element<double> x = Element<double>(pf.zeta.column(0));
  Matrix<double> expected = multiplication_of(alg, left, x);
  if (max_abs_diff(expected, pf.zeta) > ctx.residual)
    fail(ErrorKind::Degenerate, "reduced rotation does not have the class shape");
  Matrix<double> shape = pf.delta * (1.0 / det_root(pf.delta));
  for (int r = 0; r < shape.rows(); ++r)
    for (int c = r + 1; c < shape.cols(); ++c) shape(r, c) = shape(c, r) = 0.5 * (shape(r, c) + shape(c, r));
  return {normalize_projective(alg, x), shape};
}

// Largest deviation between m1 and a positive multiple of m2 (scale from m2).
inline double projective_deviation(const Matrix<double>& m1, const Matrix<double>& m2) {
  double num = 0, den = 0;
  for (int i = 0; i < m1.rows(); ++i)
    for (int j = 0; j < m1.cols(); ++j) {
      num += m1(i, j) * m2(i, j);
      den += m2(i, j) * m2(i, j);
    }
  double t = num / den;
  Matrix<double> scaled = m2 * t;
  return max_abs_diff(m1, scaled) / std::max(1e-300, max_abs(m1));
}

}  // namespace detail

/// Canonical form of an isotope of Euclidean quaternions: polar factors,
/// rotation factorisation, one nuclear and one group move into the class
/// shape, shape factors scaled to determinant 1, elements normalised.
inline QuatCanonicalResult quaternion_canonical(const HurwitzAlgebra<double>& alg, const Isotope<double>& iso,
                                                const ToleranceContext& ctx = {}) {
  require_quaternion(alg.dim());
  if (!alg.euclidean()) fail(ErrorKind::NotEuclidean, "quaternion canonical forms need a Euclidean norm");
  PolarFactors pa = polar_decompose(alg, iso.alpha, ctx);
  PolarFactors pb = polar_decompose(alg, iso.beta, ctx);
  IsotopeClass cls{pa.lambda_is_kappa ? -1 : 1, pb.lambda_is_kappa ? -1 : 1};
  auto [a, b] = so4_factor(alg, pa.zeta, ctx);
  auto [c, d] = so4_factor(alg, pb.zeta, ctx);
  Reduction<double> red = reduce_to_class_shape(alg, iso, cls, a, b, c, d, ctx);

  QuatCanonicalResult out{{cls, {}, {}, {}, {}}, red, 0};
  auto [fa, fd] = detail::split_reduced(alg, red.reduced.alpha, first_uses_left(cls), cls.i, ctx);
  auto [fb, fe] = detail::split_reduced(alg, red.reduced.beta, second_uses_left(cls), cls.j, ctx);
  out.form.a = fa;
  out.form.b = fb;
  out.form.delta = fd;
  out.form.epsilon = fe;

  Isotope<double> rebuilt = rebuild(alg, out.form);
  out.residual = std::max(detail::projective_deviation(red.reduced.alpha, rebuilt.alpha),
                          detail::projective_deviation(red.reduced.beta, rebuilt.beta));
  if (out.residual > ctx.residual) fail(ErrorKind::Degenerate, "canonical form does not rebuild the reduced isotope");
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism test between canonical forms.

enum class Verdict { Isomorphic, NotIsomorphic, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Isomorphic: return "isomorphic";
    case Verdict::NotIsomorphic: return "not-isomorphic";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

struct QuatIsoResult {
  Verdict verdict = Verdict::NotIsomorphic;
  std::optional<Element<double>> witness;
  double residual = std::numeric_limits<double>::infinity();
};

struct QuatIsoOptions {
  int angle_samples = 1024;
  int multistart = 64;
  std::uint64_t seed = 0x15070;
  /// Best residual above this is a definite negative verdict.
  double reject_above = 1e-4;
};

namespace detail {

// Residual of s as a witness between forms, minimised over the signs of a and b.
inline double witness_residual(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f1,
                               const QuatCanonicalForm& f2, const Element<double>& s) {
  if (!(alg.norm(s) > 1e-300)) return std::numeric_limits<double>::infinity();
  Element<double> su = s * (1 / std::sqrt(alg.norm(s)));
  Element<double> si = alg.inverse(su);
  Matrix<double> cs = alg.left_matrix(su) * alg.right_matrix(si);
  Matrix<double> csi = alg.left_matrix(si) * alg.right_matrix(su);
  auto signed_gap = [&](const Element<double>& x, const Element<double>& y) {
    Element<double> cx = alg.apply(cs, x);
    return std::min((cx - y).max_abs(), (cx + y).max_abs());
  };
  double r = std::max(signed_gap(f1.a, f2.a), signed_gap(f1.b, f2.b));
  r = std::max(r, max_abs_diff(Matrix<double>(cs * f1.delta * csi), f2.delta));
  r = std::max(r, max_abs_diff(Matrix<double>(cs * f1.epsilon * csi), f2.epsilon));
  return r;
}

// Residual vector for least squares over s = sum t_k v_k.
inline std::vector<double> witness_vector(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f1,
                                          const QuatCanonicalForm& f2, const Element<double>& s, int sa, int sb) {
  Element<double> su = s * (1 / std::sqrt(alg.norm(s)));
  Element<double> si = alg.inverse(su);
  Matrix<double> cs = alg.left_matrix(su) * alg.right_matrix(si);
  Matrix<double> csi = alg.left_matrix(si) * alg.right_matrix(su);
  std::vector<double> r;
  Element<double> da = alg.apply(cs, f1.a) - f2.a * static_cast<double>(sa);
  Element<double> db = alg.apply(cs, f1.b) - f2.b * static_cast<double>(sb);
  for (int k = 0; k < 4; ++k) r.push_back(da[k]);
  for (int k = 0; k < 4; ++k) r.push_back(db[k]);
  Matrix<double> dd = cs * f1.delta * csi - f2.delta;
  Matrix<double> de = cs * f1.epsilon * csi - f2.epsilon;
  for (double x : dd.data()) r.push_back(x);
  for (double x : de.data()) r.push_back(x);
  return r;
}

inline Element<double> combine(const std::vector<std::vector<double>>& basis, const std::vector<double>& t) {
  Element<double> s = Element<double>::zero(4);
  for (size_t k = 0; k < basis.size(); ++k)
    for (int i = 0; i < 4; ++i) s[i] += t[k] * basis[k][static_cast<size_t>(i)];
  return s;
}

// Levenberg-Marquardt with a forward-difference Jacobian in the coefficients t.
inline std::vector<double> refine_witness(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f1,
                                          const QuatCanonicalForm& f2, const std::vector<std::vector<double>>& basis,
                                          std::vector<double> t, int sa, int sb, int iterations = 40) {
  size_t k = basis.size();
  auto eval = [&](const std::vector<double>& tt) {
    Element<double> s = combine(basis, tt);
    if (!(alg.norm(s) > 1e-200)) return std::vector<double>();
    return witness_vector(alg, f1, f2, s, sa, sb);
  };
  auto normalise = [&](std::vector<double>& tt) {
    double n = 0;
    for (double x : tt) n += x * x;
    n = std::sqrt(n);
    if (n > 0)
      for (double& x : tt) x /= n;
  };
  normalise(t);
  std::vector<double> r = eval(t);
  if (r.empty()) return t;
  double cost = sum_sq(r), damping = 1e-3;
  for (int it = 0; it < iterations && cost > 1e-30; ++it) {
    Matrix<double> jac(static_cast<int>(r.size()), static_cast<int>(k));
    const double h = 1e-7;
    for (size_t c = 0; c < k; ++c) {
      std::vector<double> tp = t;
      tp[c] += h;
      std::vector<double> rp = eval(tp);
      if (rp.empty()) return t;
      for (size_t i = 0; i < r.size(); ++i) jac(static_cast<int>(i), static_cast<int>(c)) = (rp[i] - r[i]) / h;
    }
    Matrix<double> jtj = jac.transpose() * jac;
    std::vector<double> jtr = jac.transpose().apply(r);
    bool improved = false;
    for (int attempt = 0; attempt < 10 && !improved; ++attempt) {
      Matrix<double> sys = jtj;
      for (size_t c = 0; c < k; ++c) sys(static_cast<int>(c), static_cast<int>(c)) += damping * (1 + jtj(static_cast<int>(c), static_cast<int>(c)));
      std::vector<double> step;
      try {
        step = inverse(sys, ToleranceContext{1e-300, 1e-8}).apply(jtr);
      } catch (const Error&) {
        damping *= 10;
        continue;
      }
      std::vector<double> trial = t;
      for (size_t c = 0; c < k; ++c) trial[c] -= step[c];
      normalise(trial);
      std::vector<double> rt = eval(trial);
      if (!rt.empty() && sum_sq(rt) < cost) {
        t = trial;
        r = rt;
        cost = sum_sq(rt);
        damping = std::max(damping / 10, 1e-12);
        improved = true;
      } else {
        damping *= 10;
      }
    }
    if (!improved) break;
  }
  return t;
}

// Coefficients of the orthonormal vectors aligning eigenframes of m1 to m2.
inline std::vector<Element<double>> eigen_alignment_candidates(const HurwitzAlgebra<double>& alg,
                                                               const Matrix<double>& m1, const Matrix<double>& m2) {
  std::vector<Element<double>> out;
  EigenResult e1, e2;
  try {
    e1 = symmetric_eigen(m1);
    e2 = symmetric_eigen(m2);
  } catch (const Error&) {
    return out;
  }
  for (int mask = 0; mask < 16; ++mask) {
    Matrix<double> sgn = Matrix<double>::identity(4);
    for (int k = 0; k < 4; ++k)
      if (mask & (1 << k)) sgn(k, k) = -1;
    Matrix<double> rot = e2.vectors * sgn * e1.vectors.transpose();
    if (determinant(rot) < 0) continue;
    if (std::fabs(rot(0, 0) - 1) > 1e-3) continue;
    try {
      out.push_back(inner_conj_solve(alg, rot, ToleranceContext{1e-10, 1e-3}));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace detail

/// Searches a unit s carrying form f1 to form f2 under the residual symmetry.
inline QuatIsoResult quat_iso_test(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f1,
                                   const QuatCanonicalForm& f2, const ToleranceContext& ctx = {},
                                   const QuatIsoOptions& opts = {}) {
  require_quaternion(alg.dim());
  QuatIsoResult best;
  if (!(f1.cls == f2.cls)) return best;

  auto consider = [&](const Element<double>& s) {
    double r = detail::witness_residual(alg, f1, f2, s);
    if (r < best.residual) {
      best.residual = r;
      best.witness = normalize_projective(alg, s);
    }
    return best.residual <= ctx.residual;
  };
  auto refine_from = [&](const std::vector<std::vector<double>>& basis, std::vector<double> t, int sa, int sb) {
    t = detail::refine_witness(alg, f1, f2, basis, std::move(t), sa, sb);
    return consider(detail::combine(basis, t));
  };

  bool done = false;
  for (int sa : {1, -1}) {
    for (int sb : {1, -1}) {
      if (done) break;
      Matrix<double> sys(8, 4);
      Matrix<double> ba = alg.right_matrix(f1.a) - alg.left_matrix(f2.a) * static_cast<double>(sa);
      Matrix<double> bb = alg.right_matrix(f1.b) - alg.left_matrix(f2.b) * static_cast<double>(sb);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
          sys(r, c) = ba(r, c);
          sys(r + 4, c) = bb(r, c);
        }
      auto basis = nullspace(sys);
      size_t k = basis.size();
      if (k == 0) continue;
      if (k == 1) {
        done = refine_from(basis, {1.0}, sa, sb);
      } else if (k == 2) {
        std::vector<std::pair<double, double>> samples;
        for (int n = 0; n < opts.angle_samples; ++n) {
          double th = std::numbers::pi * n / opts.angle_samples;  // s and -s coincide
          Element<double> s = detail::combine(basis, {std::cos(th), std::sin(th)});
          samples.emplace_back(detail::witness_residual(alg, f1, f2, s), th);
        }
        std::sort(samples.begin(), samples.end());
        for (size_t n = 0; n < std::min<size_t>(8, samples.size()) && !done; ++n) {
          double th = samples[n].second;
          done = refine_from(basis, {std::cos(th), std::sin(th)}, sa, sb);
        }
      } else {
        // Large stabiliser: align eigenframes of the shape factors, then fall
        // back to seeded starts.
        std::vector<Element<double>> starts = detail::eigen_alignment_candidates(alg, f1.delta, f2.delta);
        for (auto& e : detail::eigen_alignment_candidates(alg, f1.epsilon, f2.epsilon)) starts.push_back(e);
        starts.push_back(alg.one());
        Rng rng(opts.seed);
        for (int n = 0; n < opts.multistart; ++n) starts.push_back(random_unit_element(alg, rng));
        for (const auto& s : starts) {
          if (done) break;
          std::vector<double> t(k);
          for (size_t c = 0; c < k; ++c)
            for (int i = 0; i < 4; ++i) t[c] += s[i] * basis[c][static_cast<size_t>(i)];
          done = refine_from(basis, t, sa, sb);
        }
      }
    }
  }
  if (best.residual <= ctx.residual) {
    best.verdict = Verdict::Isomorphic;
  } else if (best.residual > opts.reject_above) {
    best.verdict = Verdict::NotIsomorphic;
  } else {
    best.verdict = Verdict::Inconclusive;
  }
  return best;
}

/// The form obtained from f by the residual symmetry of a unit s.
inline QuatCanonicalForm act_on_form(const HurwitzAlgebra<double>& alg, const QuatCanonicalForm& f,
                                     const Element<double>& s) {
  Element<double> su = s * (1 / std::sqrt(alg.norm(s)));
  Matrix<double> cs = inner_conjugation(alg, su), csi = inner_conjugation(alg, alg.inverse(su));
  return {f.cls, normalize_projective(alg, alg.apply(cs, f.a)), normalize_projective(alg, alg.apply(cs, f.b)),
          cs * f.delta * csi, cs * f.epsilon * csi};
}

}  // namespace hurwitz
