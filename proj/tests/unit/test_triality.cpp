#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace hurwitz;
using testing_support::euclidean;
using testing_support::to_q;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

// Brute-force check of phi(xy) = phi1(x) phi2(y) on random exact pairs via the doubling oracle.
bool oracle_triality(const HurwitzAlgebra<Rational>& alg, const std::vector<oracle::Q>& params,
                     const TrialityTriple<Rational>& t, Rng& g) {
  for (int k = 0; k < 20; ++k) {
    auto x = random_element(alg, g), y = random_element(alg, g);
    auto lhs = to_q(alg.apply(t.phi, testing_support::from_q(oracle::cd_mul(params, to_q(x), to_q(y)))));
    auto rhs = oracle::cd_mul(params, to_q(alg.apply(t.phi1, x)), to_q(alg.apply(t.phi2, y)));
    if (lhs != rhs) return false;
  }
  return true;
}

}  // namespace

TEST(Triality, IdentityAndLeftMultiplication) {
  auto h = euclidean<Rational>(4);
  auto t = triality_components(h, Matrix<Rational>::identity(4));
  EXPECT_EQ(t.phi1, Matrix<Rational>::identity(4));
  EXPECT_EQ(t.phi2, Matrix<Rational>::identity(4));
  EXPECT_TRUE(t.residual.is_zero());

  Rng g(1);
  auto a = random_invertible_element(h, g);
  auto tl = triality_components(h, h.left_matrix(a));
  EXPECT_TRUE(verify_triality(h, tl).is_zero());
  TrialityTriple<Rational> expected{h.left_matrix(a), h.left_matrix(a), Matrix<Rational>::identity(4), Rational(0)};
  EXPECT_TRUE(verify_triality(h, expected).is_zero());
  EXPECT_EQ(triality_align(h, tl, expected), h.inverse(a));
}

TEST(Triality, ExactDimFourAgainstOracle) {
  auto h = euclidean<Rational>(4);
  std::vector<oracle::Q> params(2, -1);
  Rng g(2);
  for (int k = 0; k < 20; ++k) {
    auto t = triality_components(h, random_proper_similitude(h, g));
    EXPECT_TRUE(t.residual.is_zero());
    EXPECT_TRUE(oracle_triality(h, params, t, g));
  }
}

TEST(Triality, DimTwo) {
  auto c = HurwitzAlgebra<Rational>::cayley_dickson({Rational(-1)});
  auto t = triality_components(c, c.kappa());
  EXPECT_TRUE(verify_triality(c, t).is_zero());
}

TEST(Triality, Errors) {
  auto h = euclidean<Rational>(4);
  EXPECT_EQ(kind_of([&] { triality_components(h, h.kappa()); }), ErrorKind::ImproperSimilitude);
  auto o = euclidean<Rational>(8);
  EXPECT_EQ(kind_of([&] { triality_components(o, Matrix<Rational>::identity(8)); }), ErrorKind::BackendMismatch);
  auto r = HurwitzAlgebra<Rational>::cayley_dickson({});
  EXPECT_EQ(kind_of([&] { triality_components(r, Matrix<Rational>::identity(1)); }), ErrorKind::InvalidArgument);
}

TEST(Triality, KnownOctonionTriplesAreExact) {
  auto o = euclidean<Rational>(8);
  std::vector<oracle::Q> params(3, -1);
  Rng g(3);
  for (int k = 0; k < 10; ++k) {
    auto t = random_proper_similitude_with_triality(o, g);
    EXPECT_TRUE(verify_triality(o, t).is_zero());
    EXPECT_TRUE(oracle_triality(o, params, t, g));
  }
}

TEST(Triality, OctonionSolver) {
  auto o = euclidean<double>(8);
  Rng g(4);
  for (int k = 0; k < 10; ++k) {
    auto a = random_unit_element(o, g), b = random_unit_element(o, g);
    auto known = compose_triples(left_multiplication_triple(o, a), right_multiplication_triple(o, b));
    auto t = triality_components(o, known.phi);
    EXPECT_LT(t.residual, 1e-9);
    EXPECT_LT(verify_triality(o, t), 1e-8);
    Element<double> w = triality_align(o, known, t);
    for (int i = 1; i < 8; ++i) EXPECT_NEAR(w[i], 0.0, 1e-8);
  }
}

TEST(Triality, VerifyPerturbation) {
  auto h = euclidean<double>(4);
  auto t = triality_components(h, random_proper_similitude(h, std::uint64_t{5}));
  EXPECT_LT(verify_triality(h, t), 1e-12);
  t.phi2(1, 2) += 1e-3;
  double r = verify_triality(h, t);
  EXPECT_GT(r, 1e-5);
  EXPECT_LT(r, 1e-1);
  auto id = Matrix<double>::identity(4);
  EXPECT_EQ(verify_triality(h, TrialityTriple<double>{id, id, id, 0.0}), 0.0);
}

TEST(Triality, Align) {
  auto h = euclidean<Rational>(4);
  Rng g(6);
  auto t1 = triality_components(h, random_proper_similitude(h, g));
  EXPECT_EQ(triality_align(h, t1, t1), h.one());
  auto e1 = h.basis(1);
  TrialityTriple<Rational> t2{t1.phi, h.right_matrix(h.inverse(e1)) * t1.phi1, h.left_matrix(e1) * t1.phi2, Rational(0)};
  EXPECT_EQ(triality_align(h, t1, t2), e1);

  auto o = euclidean<Rational>(8);
  auto k1 = random_proper_similitude_with_triality(o, g);
  auto two = o.scalar(Rational(2));
  TrialityTriple<Rational> k2{k1.phi, o.right_matrix(o.inverse(two)) * k1.phi1, o.left_matrix(two) * k1.phi2,
                              Rational(0)};
  EXPECT_EQ(triality_align(o, k1, k2), two);
  TrialityTriple<Rational> k3{k1.phi, o.right_matrix(o.inverse(o.basis(1))) * k1.phi1,
                              o.left_matrix(o.basis(1)) * k1.phi2, Rational(0)};
  EXPECT_EQ(kind_of([&] { triality_align(o, k1, k3); }), ErrorKind::NotRelated);
}
