#pragma once

#include <vector>

#include "hurwitz/hurwitz.hpp"
#include "oracles.hpp"

namespace testing_support {

inline oracle::QVec to_q(const hurwitz::Element<hurwitz::Rational>& x) {
  oracle::QVec v;
  for (const auto& c : x.coords()) v.push_back(c.raw());
  return v;
}

inline std::vector<oracle::Q> to_q(const std::vector<hurwitz::Rational>& xs) {
  std::vector<oracle::Q> v;
  for (const auto& c : xs) v.push_back(c.raw());
  return v;
}

inline hurwitz::Element<hurwitz::Rational> from_q(const oracle::QVec& v) {
  std::vector<hurwitz::Rational> c;
  for (const auto& x : v) c.emplace_back(x);
  return hurwitz::Element<hurwitz::Rational>(c);
}

inline std::vector<std::vector<oracle::Q>> to_q(const hurwitz::Matrix<hurwitz::Rational>& m) {
  std::vector<std::vector<oracle::Q>> r(static_cast<size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r[static_cast<size_t>(i)].push_back(m(i, j).raw());
  return r;
}

template <hurwitz::Scalar S>
hurwitz::HurwitzAlgebra<S> euclidean(int dim) {
  std::vector<S> p;
  for (int d = dim; d > 1; d /= 2) p.push_back(S(-1));
  return hurwitz::HurwitzAlgebra<S>::cayley_dickson(p);
}

}  // namespace testing_support
