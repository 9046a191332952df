#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace hurwitz;
using testing_support::euclidean;
using testing_support::to_q;
using M = Matrix<Rational>;
using E = Element<Rational>;

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

M diag(std::initializer_list<long> d) {
  std::vector<Rational> v;
  for (long x : d) v.emplace_back(x);
  return M::diagonal(v);
}

}  // namespace

TEST(Isotope, MakeRejectsSingularAndMismatch) {
  auto h = euclidean<Rational>(4);
  EXPECT_EQ(kind_of([&] { make_isotope(h, M(4, 4), M::identity(4)); }), ErrorKind::Singular);
  EXPECT_EQ(kind_of([&] { make_isotope(h, M::identity(2), M::identity(4)); }), ErrorKind::AlgebraMismatch);
}

TEST(Isotope, MultiplicationExamples) {
  auto h = euclidean<Rational>(4);
  Isotope<Rational> id{M::identity(4), M::identity(4)};
  Rng g(1);
  for (int k = 0; k < 20; ++k) {
    E x = random_element(h, g), y = random_element(h, g);
    EXPECT_EQ(isotope_mul(h, id, x, y), h.mul(x, y));
    EXPECT_TRUE(isotope_mul(h, id, h.zero(), y).is_zero());
  }
}

TEST(Isotope, MultiplicationMatchesOracle) {
  auto o = euclidean<Rational>(8);
  std::vector<oracle::Q> params(3, -1);
  Rng g(2);
  auto iso = make_isotope(o, random_invertible(o, g), random_invertible(o, g));
  for (int k = 0; k < 20; ++k) {
    E x = random_element(o, g), y = random_element(o, g);
    auto expect = oracle::cd_mul(params, to_q(o.apply(iso.alpha, x)), to_q(o.apply(iso.beta, y)));
    EXPECT_EQ(to_q(isotope_mul(o, iso, x, y)), expect);
  }
}

TEST(Identity, Examples) {
  auto h = euclidean<Rational>(4);
  EXPECT_EQ(find_identity(h, Isotope<Rational>{M::identity(4), M::identity(4)}), h.one());
  Isotope<Rational> iso{inverse(h.right_matrix(h.basis(1))), inverse(h.left_matrix(h.basis(2)))};
  E u = find_identity(h, iso);
  EXPECT_EQ(u, -h.basis(3));
  std::vector<oracle::Q> params(2, -1);
  for (int i = 0; i < 4; ++i) {
    auto x = to_q(h.basis(i));
    EXPECT_EQ(oracle::cd_mul(params, to_q(h.apply(iso.alpha, u)), to_q(h.apply(iso.beta, h.basis(i)))), x);
  }
  EXPECT_EQ(kind_of([&] { find_identity(h, Isotope<Rational>{diag({1, 2, 1, 1}), M::identity(4)}); }),
            ErrorKind::NotUnital);
}

TEST(Identity, RandomRoundTrip) {
  Rng g(3);
  for (int dim : {4, 8}) {
    auto alg = euclidean<Rational>(dim);
    for (int k = 0; k < 10; ++k) {
      E a = random_invertible_element(alg, g), b = random_invertible_element(alg, g);
      Isotope<Rational> iso{inverse(alg.right_matrix(a)), inverse(alg.left_matrix(b))};
      EXPECT_EQ(find_identity(alg, iso), alg.mul(b, a));
    }
  }
}

TEST(UnitalNorm, Examples) {
  auto h = euclidean<Rational>(4);
  EXPECT_EQ(unital_isotope_norm(h, Isotope<Rational>{M::identity(4), M::identity(4)}), Rational(1));
  Isotope<Rational> iso{inverse(h.right_matrix(h.basis(1))), inverse(h.left_matrix(h.basis(2)))};
  EXPECT_EQ(unital_isotope_norm(h, iso), Rational(1));
  E a = h.one() + h.basis(1);
  Isotope<Rational> half{inverse(h.right_matrix(a)), M::identity(4)};
  EXPECT_EQ(unital_isotope_norm(h, half), Rational(1, 2));
}

TEST(UnitalNorm, ScaledNormIsMultiplicative) {
  auto h = euclidean<Rational>(4);
  Rng g(4);
  for (int k = 0; k < 10; ++k) {
    E a = random_invertible_element(h, g), b = random_invertible_element(h, g);
    Isotope<Rational> iso{inverse(h.right_matrix(a)), inverse(h.left_matrix(b))};
    Rational rho = unital_isotope_norm(h, iso);
    for (int t = 0; t < 10; ++t) {
      E x = random_element(h, g), y = random_element(h, g);
      EXPECT_EQ(rho * h.norm(isotope_mul(h, iso, x, y)), rho * h.norm(x) * rho * h.norm(y));
    }
  }
}

TEST(Transport, Examples) {
  auto h = euclidean<Rational>(4);
  Rng g(5);
  Isotope<Rational> iso{random_invertible(h, g), random_invertible(h, g)};
  TrialityTriple<Rational> id{M::identity(4), M::identity(4), M::identity(4), Rational(0)};
  auto r = transport(h, iso, id);
  EXPECT_EQ(r.target.alpha, iso.alpha);
  EXPECT_EQ(r.target.beta, iso.beta);

  M le1 = h.left_matrix(h.basis(1));
  TrialityTriple<Rational> t{le1, le1, M::identity(4), Rational(0)};
  auto r2 = transport(h, Isotope<Rational>{M::identity(4), M::identity(4)}, t);
  EXPECT_EQ(r2.target.alpha, M::identity(4));
  EXPECT_EQ(r2.target.beta, inverse(le1));
  EXPECT_TRUE(r2.residual.is_zero());
}

TEST(Transport, Homothety) {
  auto h = euclidean<Rational>(4);
  Rational rho(3);
  // h_rho: A_{rho I, I} -> A since rho (xy) = (rho x) y; so phi = rho I with (phi1, phi2) = (I, rho I)
  // carries (rho I, I) to (rho I * rho^{-1}, rho I * rho^{-1}) = (I, I).
  M phi = M::identity(4) * rho;
  TrialityTriple<Rational> t{phi, M::identity(4), phi, Rational(0)};
  auto r = transport(h, Isotope<Rational>{M::identity(4) * rho, M::identity(4)}, t);
  EXPECT_EQ(r.target.alpha, M::identity(4));
  EXPECT_EQ(r.target.beta, M::identity(4));
}

TEST(Transport, RejectsImproperAndMismatched) {
  auto h = euclidean<Rational>(4);
  Isotope<Rational> iso{M::identity(4), M::identity(4)};
  TrialityTriple<Rational> bad{h.kappa(), M::identity(4), M::identity(4), Rational(0)};
  EXPECT_EQ(kind_of([&] { transport(h, iso, bad); }), ErrorKind::ImproperSimilitude);
  M le1 = h.left_matrix(h.basis(1));
  TrialityTriple<Rational> wrong{le1, M::identity(4), le1, Rational(0)};
  EXPECT_EQ(kind_of([&] { transport(h, iso, wrong); }), ErrorKind::TrialityMismatch);
}

TEST(Transport, OctonionKnownTriplesExact) {
  auto o = euclidean<Rational>(8);
  Rng g(6);
  for (int k = 0; k < 5; ++k) {
    Isotope<Rational> iso{random_invertible(o, g), random_invertible(o, g)};
    auto t = random_proper_similitude_with_triality(o, g);
    EXPECT_TRUE(transport(o, iso, t).residual.is_zero());
  }
}

TEST(SameIsotope, Examples) {
  auto h = euclidean<Rational>(4);
  Rng g(7);
  Isotope<Rational> iso{random_invertible(h, g), random_invertible(h, g)};
  EXPECT_EQ(same_isotope(h, iso, iso), h.one());
  auto moved = nuclear_action(h, iso, h.basis(1));
  EXPECT_EQ(same_isotope(h, moved, iso), h.basis(1));
  // Same multiplication on every basis pair.
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      EXPECT_EQ(isotope_mul(h, moved, h.basis(i), h.basis(j)), isotope_mul(h, iso, h.basis(i), h.basis(j)));

  auto o = euclidean<Rational>(8);
  Isotope<Rational> io{random_invertible(o, g), random_invertible(o, g)};
  Isotope<Rational> mo{o.right_matrix(o.inverse(o.basis(1))) * io.alpha, o.left_matrix(o.basis(1)) * io.beta};
  EXPECT_EQ(kind_of([&] { same_isotope(o, mo, io); }), ErrorKind::Distinct);
  bool differs = false;
  for (int i = 0; i < 8 && !differs; ++i)
    for (int j = 0; j < 8 && !differs; ++j)
      differs = isotope_mul(o, mo, o.basis(i), o.basis(j)) != isotope_mul(o, io, o.basis(i), o.basis(j));
  EXPECT_TRUE(differs);
}

TEST(DoubleSign, Examples) {
  auto h = euclidean<Rational>(4);
  auto s = double_sign(h, Isotope<Rational>{M::identity(4), M::identity(4)});
  EXPECT_EQ(s.first.representative, Rational(1));
  EXPECT_EQ(s.second.representative, Rational(1));
  auto hd = euclidean<double>(4);
  auto k = double_sign(hd, Isotope<double>{hd.kappa(), Matrix<double>::identity(4)});
  EXPECT_EQ(k.first.representative, -1.0);
  EXPECT_EQ(k.second.representative, 1.0);
  auto d48 = double_sign(h, Isotope<Rational>{diag({48, 1, 1, 1}), M::identity(4)});
  EXPECT_EQ(d48.first.representative, Rational(3));
}

TEST(DoubleSign, Errors) {
  auto r = HurwitzAlgebra<Rational>::cayley_dickson({});
  EXPECT_EQ(kind_of([&] { double_sign(r, Isotope<Rational>{M::identity(1), M::identity(1)}); }), ErrorKind::Dim1);
  auto split = HurwitzAlgebra<Rational>::cayley_dickson({Rational(1)});
  EXPECT_EQ(kind_of([&] { double_sign(split, Isotope<Rational>{M::identity(2), M::identity(2)}); }),
            ErrorKind::SplitBinaryAlgebra);
}

TEST(DoubleSign, InvariantUnderTransport) {
  Rng g(8);
  for (int dim : {4, 8}) {
    auto alg = euclidean<Rational>(dim);
    for (int k = 0; k < 5; ++k) {
      Isotope<Rational> iso{random_invertible(alg, g), random_invertible(alg, g)};
      auto s = double_sign(alg, iso);
      for (int t = 0; t < 5; ++t) {
        auto tr = transport(alg, iso, random_proper_similitude_with_triality(alg, g));
        EXPECT_EQ(double_sign(alg, tr.target), s);
      }
    }
  }
}

TEST(Composition, Examples) {
  auto h = euclidean<Rational>(4);
  auto c = is_composition(h, Isotope<Rational>{h.kappa(), M::identity(4)});
  EXPECT_EQ(c.norm_scale, Rational(1));
  EXPECT_EQ(kind_of([&] { is_composition(h, Isotope<Rational>{diag({2, 1, 1, 1}), M::identity(4)}); }),
            ErrorKind::NotComposition);
  Rng g(9);
  for (int k = 0; k < 5; ++k) {
    E a = random_invertible_element(h, g), b = random_invertible_element(h, g);
    Isotope<Rational> iso{h.left_matrix(a), h.right_matrix(b)};
    auto cert = is_composition(h, iso);
    EXPECT_EQ(cert.norm_scale, h.norm(a) * h.norm(b));
    for (int t = 0; t < 100; ++t) {
      E x = random_element(h, g), y = random_element(h, g);
      auto p = to_q(isotope_mul(h, iso, x, y));
      std::vector<oracle::Q> params(2, -1);
      oracle::Q n = cert.norm_scale.raw();
      EXPECT_EQ(n * oracle::norm(params, p), n * oracle::norm(params, to_q(x)) * n * oracle::norm(params, to_q(y)));
    }
  }
}
