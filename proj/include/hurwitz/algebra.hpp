#pragma once

// Cayley-Dickson Hurwitz algebras of dimension 1, 2, 4 and 8.
//
// Doubling convention: (a,b)(c,d) = (ac + mu * conj(d) b, d a + b conj(c)),
// conj(a,b) = (conj(a), -b), n(a,b) = n(a) - mu n(b). With params (-1,-1) this
// is Hamilton's table with e1 e2 = e3. Basis: e0 is the identity and each
// doubling step appends the second-slot basis after the first, so the index bit
// t-1 records the use of parameter t.

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hurwitz/errors.hpp"
#include "hurwitz/matrix.hpp"
#include "hurwitz/scalar.hpp"

namespace hurwitz {

/// Coordinates of an algebra element in the basis e0..e_{l-1}.
template <Scalar S>
class Element {
 public:
  Element() = default;
  explicit Element(std::vector<S> coords) : coords_(std::move(coords)) {}

  static Element zero(int dim) { return Element(std::vector<S>(static_cast<size_t>(dim), S(0))); }
  static Element basis(int dim, int i) {
    Element e = zero(dim);
    e.coords_[static_cast<size_t>(i)] = S(1);
    return e;
  }

  int dim() const { return static_cast<int>(coords_.size()); }
  const std::vector<S>& coords() const { return coords_; }
  S& operator[](int i) { return coords_[static_cast<size_t>(i)]; }
  const S& operator[](int i) const { return coords_[static_cast<size_t>(i)]; }

  Element& operator+=(const Element& o) {
    check(o);
    for (size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Element& operator-=(const Element& o) {
    check(o);
    for (size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Element& operator*=(const S& s) {
    for (auto& c : coords_) c *= s;
    return *this;
  }
  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(const S& s, Element a) { return a *= s; }
  friend Element operator*(Element a, const S& s) { return a *= s; }
  friend Element operator-(Element a) { return a *= S(-1); }
  friend bool operator==(const Element&, const Element&) = default;

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != S(0)) return false;
    return true;
  }

  S max_abs() const {
    S best(0);
    for (const auto& c : coords_) {
      S a = abs_value(c);
      if (a > best) best = a;
    }
    return best;
  }

 private:
  void check(const Element& o) const {
    if (o.coords_.size() != coords_.size()) fail(ErrorKind::AlgebraMismatch, "element dimensions differ");
  }

  std::vector<S> coords_;
};

template <Scalar S>
class HurwitzAlgebra {
 public:
  /// Iterated doubling of k with the given parameters (0 to 3 of them).
  static HurwitzAlgebra cayley_dickson(std::vector<S> params) {
    if (params.size() > 3) fail(ErrorKind::InvalidArgument, "at most three Cayley-Dickson parameters");
    for (const auto& mu : params)
      if (mu == S(0)) fail(ErrorKind::ZeroParameter, "Cayley-Dickson parameters must be nonzero");
    HurwitzAlgebra alg(std::move(params));
    if constexpr (is_exact_v<S>) alg.smoke_check();
    return alg;
  }

  /// Identity and norm multiplicativity on basis pairs. A smoke test only; the
  /// full identities are property-tested.
  void smoke_check() const {
    for (int i = 0; i < dim_; ++i) {
      if (product_coeff(0, i) != S(1) || product_coeff(i, 0) != S(1))
        fail(ErrorKind::InvalidArgument, "e0 is not a two-sided identity");
      for (int j = 0; j < dim_; ++j) {
        const S& c = product_coeff(i, j);
        if (diag_[static_cast<size_t>(i ^ j)] * c * c != diag_[static_cast<size_t>(i)] * diag_[static_cast<size_t>(j)])
          fail(ErrorKind::InvalidArgument, "norm is not multiplicative on the basis");
      }
    }
  }

  int dim() const { return dim_; }
  const std::vector<S>& params() const { return params_; }

  /// Diagonal coefficients d_i of the Pfister norm sum d_i x_i^2.
  const std::vector<S>& norm_diagonal() const { return diag_; }

  /// Gram matrix of the bilinear form <x,y> = n(x+y) - n(x) - n(y); B = 2 diag(d).
  Matrix<S> gram() const {
    Matrix<S> b(dim_, dim_);
    for (int i = 0; i < dim_; ++i) b(i, i) = S(2) * diag_[static_cast<size_t>(i)];
    return b;
  }

  /// e_i e_j = product_coeff(i,j) * e_{i xor j}.
  const S& product_coeff(int i, int j) const { return coeff_[static_cast<size_t>(i * dim_ + j)]; }

  /// Structure tensor entry: coordinates of e_i e_j.
  Element<S> basis_product(int i, int j) const {
    Element<S> e = zero();
    e[i ^ j] = product_coeff(i, j);
    return e;
  }

  Element<S> zero() const { return Element<S>::zero(dim_); }
  Element<S> one() const { return Element<S>::basis(dim_, 0); }
  Element<S> basis(int i) const {
    if (i < 0 || i >= dim_) fail(ErrorKind::InvalidArgument, "basis index out of range");
    return Element<S>::basis(dim_, i);
  }
  Element<S> element(std::vector<S> coords) const {
    Element<S> e(std::move(coords));
    check(e);
    return e;
  }
  Element<S> scalar(const S& s) const { return s * one(); }

  Element<S> mul(const Element<S>& x, const Element<S>& y) const {
    check(x);
    check(y);
    Element<S> z = zero();
    for (int i = 0; i < dim_; ++i) {
      if (x[i] == S(0)) continue;
      for (int j = 0; j < dim_; ++j) {
        if (y[j] == S(0)) continue;
        z[i ^ j] += product_coeff(i, j) * x[i] * y[j];
      }
    }
    return z;
  }

  Element<S> conj(const Element<S>& x) const {
    check(x);
    Element<S> c = -x;
    c[0] = x[0];
    return c;
  }

  S norm(const Element<S>& x) const {
    check(x);
    S n(0);
    for (int i = 0; i < dim_; ++i) n += diag_[static_cast<size_t>(i)] * x[i] * x[i];
    return n;
  }

  S bilinear(const Element<S>& x, const Element<S>& y) const {
    check(x);
    check(y);
    S b(0);
    for (int i = 0; i < dim_; ++i) b += S(2) * diag_[static_cast<size_t>(i)] * x[i] * y[i];
    return b;
  }

  /// <x, 1>.
  S trace(const Element<S>& x) const { return S(2) * x[0]; }

  /// n(x)^{-1} conj(x). NotInvertible when n(x) = 0, or on the approximate
  /// backend when |n(x)| <= eq * max|x|^2.
  Element<S> inverse(const Element<S>& x, const ToleranceContext& ctx = {}) const {
    S n = norm(x);
    double scale = to_double(x.max_abs());
    if (n == S(0) || is_zero(n, ctx, scale * scale)) fail(ErrorKind::NotInvertible, "element has zero norm");
    return conj(x) * (S(1) / n);
  }

  bool is_invertible(const Element<S>& x, const ToleranceContext& ctx = {}) const {
    S n = norm(x);
    double scale = to_double(x.max_abs());
    return !(n == S(0) || is_zero(n, ctx, scale * scale));
  }

  /// Column j holds a e_j.
  Matrix<S> left_matrix(const Element<S>& a) const {
    check(a);
    Matrix<S> m(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i)
        if (a[i] != S(0)) m(i ^ j, j) += product_coeff(i, j) * a[i];
    return m;
  }

  /// Column j holds e_j a.
  Matrix<S> right_matrix(const Element<S>& a) const {
    check(a);
    Matrix<S> m(dim_, dim_);
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i < dim_; ++i)
        if (a[i] != S(0)) m(i ^ j, j) += product_coeff(j, i) * a[i];
    return m;
  }

  /// The canonical involution x -> conj(x).
  Matrix<S> kappa() const {
    Matrix<S> k = Matrix<S>::identity(dim_);
    for (int i = 1; i < dim_; ++i) k(i, i) = S(-1);
    return k;
  }

  Element<S> apply(const Matrix<S>& m, const Element<S>& x) const {
    check(x);
    if (m.rows() != dim_ || m.cols() != dim_) fail(ErrorKind::AlgebraMismatch, "map dimension differs from algebra");
    return Element<S>(m.apply(x.coords()));
  }

  /// (e_i w) e_j = e_i (w e_j) for all basis pairs.
  bool in_nucleus(const Element<S>& w, const ToleranceContext& ctx = {}) const {
    check(w);
    double scale = to_double(w.max_abs());
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        Element<S> lhs = mul(mul(basis(i), w), basis(j));
        Element<S> rhs = mul(basis(i), mul(w, basis(j)));
        for (int k = 0; k < dim_; ++k)
          if (!is_zero(S(lhs[k] - rhs[k]), ctx, scale)) return false;
      }
    return true;
  }

  /// All parameters negative: the norm is positive definite.
  bool euclidean() const {
    for (const auto& mu : params_)
      if (!(mu < S(0))) return false;
    return true;
  }

  /// Dimension two with isotropic norm, i.e. the split algebra k x k.
  bool is_split_binary() const {
    if (dim_ != 2) return false;
    // <1, -mu> is isotropic iff mu is a square.
    const S& mu = params_[0];
    if constexpr (is_exact_v<S>) {
      Rational root;
      return rational_sqrt(mu, root);
    } else {
      return mu > 0;
    }
  }

  friend bool operator==(const HurwitzAlgebra& a, const HurwitzAlgebra& b) { return a.params_ == b.params_; }

 private:
  explicit HurwitzAlgebra(std::vector<S> params)
      : dim_(1 << params.size()), params_(std::move(params)) {
    auto l = static_cast<size_t>(dim_);
    diag_.assign(l, S(1));
    for (int i = 0; i < dim_; ++i)
      for (size_t t = 0; t < params_.size(); ++t)
        if ((i >> t) & 1) diag_[static_cast<size_t>(i)] *= -params_[t];

    coeff_.assign(l * l, S(0));
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        std::vector<S> x(l, S(0)), y(l, S(0));
        x[static_cast<size_t>(i)] = S(1);
        y[static_cast<size_t>(j)] = S(1);
        std::vector<S> z = doubling_product(x, y, static_cast<int>(params_.size()));
        for (size_t k = 0; k < l; ++k) {
          if (z[k] == S(0)) continue;
          if (static_cast<int>(k) != (i ^ j)) fail(ErrorKind::InvalidArgument, "doubling produced a non-monomial product");
          coeff_[static_cast<size_t>(i * dim_ + j)] = z[k];
        }
      }
  }

  std::vector<S> doubling_conj(std::vector<S> x) const {
    for (size_t i = 1; i < x.size(); ++i) x[i] = -x[i];
    return x;
  }

  // Multiplication in the algebra obtained after `level` doubling steps.
  std::vector<S> doubling_product(const std::vector<S>& x, const std::vector<S>& y, int level) const {
    if (level == 0) return {x[0] * y[0]};
    size_t h = x.size() / 2;
    const S& mu = params_[static_cast<size_t>(level - 1)];
    std::vector<S> a(x.begin(), x.begin() + static_cast<long>(h)), b(x.begin() + static_cast<long>(h), x.end());
    std::vector<S> c(y.begin(), y.begin() + static_cast<long>(h)), d(y.begin() + static_cast<long>(h), y.end());
    std::vector<S> ac = doubling_product(a, c, level - 1);
    std::vector<S> db = doubling_product(doubling_conj(d), b, level - 1);
    std::vector<S> da = doubling_product(d, a, level - 1);
    std::vector<S> bc = doubling_product(b, doubling_conj(c), level - 1);
    std::vector<S> out(x.size());
    for (size_t k = 0; k < h; ++k) {
      out[k] = ac[k] + mu * db[k];
      out[h + k] = da[k] + bc[k];
    }
    return out;
  }

  void check(const Element<S>& x) const {
    if (x.dim() != dim_) fail(ErrorKind::AlgebraMismatch, "element does not belong to this algebra");
  }

  int dim_ = 1;
  std::vector<S> params_;
  std::vector<S> diag_;
  std::vector<S> coeff_;
};

}  // namespace hurwitz
