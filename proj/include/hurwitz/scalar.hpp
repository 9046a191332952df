#pragma once

// Ground-field scalars. Two backends: exact rationals (GMP) and IEEE doubles
// compared against an explicit tolerance context.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "hurwitz/errors.hpp"

namespace hurwitz {

class Rational {
 public:
  Rational() = default;
  Rational(int v) : q_(v) {}                 // NOLINT(google-explicit-constructor)
  Rational(long v) : q_(v) {}                // NOLINT(google-explicit-constructor)
  Rational(long long v) : q_(static_cast<long>(v)) {}  // NOLINT
  Rational(long num, long den) {
    if (den == 0) fail(ErrorKind::DivisionByZero, "zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
  }
  explicit Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }
  explicit Rational(const mpz_class& z) : q_(z) {}

  const mpq_class& raw() const { return q_; }
  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }

  int sign() const { return sgn(q_); }
  bool is_zero() const { return sgn(q_) == 0; }
  bool is_integer() const { return q_.get_den() == 1; }
  double to_double() const { return q_.get_d(); }

  /// "p/q", or "p" when the denominator is one.
  std::string str() const {
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
  }

  /// Accepts "p/q", "p" and finite decimal literals such as "-0.125" or "2.5e-3".
  static Rational parse(std::string_view text) {
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
            s.end());
    if (s.empty()) fail(ErrorKind::ParseError, "empty rational literal");
    try {
      if (auto slash = s.find('/'); slash != std::string::npos) {
        mpz_class num(s.substr(0, slash), 10);
        mpz_class den(s.substr(slash + 1), 10);
        if (den == 0) fail(ErrorKind::DivisionByZero, "zero denominator in '" + s + "'");
        return Rational(mpq_class(num, den));
      }
      std::string mantissa = s;
      long exponent = 0;
      if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        mantissa = s.substr(0, e);
        exponent = std::stol(s.substr(e + 1));
      }
      bool negative = false;
      if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) {
        negative = mantissa[0] == '-';
        mantissa.erase(0, 1);
      }
      std::string digits;
      long frac_digits = 0;
      bool seen_point = false;
      for (char c : mantissa) {
        if (c == '.') {
          if (seen_point) fail(ErrorKind::ParseError, "bad rational literal '" + s + "'");
          seen_point = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
          digits.push_back(c);
          if (seen_point) ++frac_digits;
        } else {
          fail(ErrorKind::ParseError, "bad rational literal '" + s + "'");
        }
      }
      if (digits.empty()) fail(ErrorKind::ParseError, "bad rational literal '" + s + "'");
      mpz_class num(digits, 10);
      if (negative) num = -num;
      long shift = exponent - frac_digits;
      mpz_class ten_pow;
      mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
      if (shift >= 0) return Rational(mpq_class(num * ten_pow));
      return Rational(mpq_class(num, ten_pow));
    } catch (const std::invalid_argument&) {
      fail(ErrorKind::ParseError, "bad rational literal '" + s + "'");
    } catch (const std::out_of_range&) {
      fail(ErrorKind::ParseError, "rational literal out of range '" + s + "'");
    }
  }

  Rational operator-() const { return Rational(mpq_class(-q_)); }
  Rational& operator+=(const Rational& o) { q_ += o.q_; return *this; }
  Rational& operator-=(const Rational& o) { q_ -= o.q_; return *this; }
  Rational& operator*=(const Rational& o) { q_ *= o.q_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) fail(ErrorKind::DivisionByZero, "rational division by zero");
    q_ /= o.q_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_;
};

template <class S>
concept Scalar = std::same_as<S, Rational> || std::same_as<S, double>;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <Scalar S>
constexpr std::string_view backend_name() {
  return is_exact_v<S> ? "exact" : "approx";
}

/// Relative equality and matrix-residual tolerances for the approximate backend.
struct ToleranceContext {
  double eq = 1e-10;
  double residual = 1e-8;

  void validate() const {
    if (!(eq > 0 && eq <= residual && residual < 1)) {
      fail(ErrorKind::InvalidArgument, "tolerances must satisfy 0 < eq <= residual < 1");
    }
  }

  /// Defaults, with ISOTOPE_TOL (if set) overriding the residual tolerance.
  static ToleranceContext from_env() {
    ToleranceContext ctx;
    if (const char* env = std::getenv("ISOTOPE_TOL"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      double v = std::strtod(env, &end);
      if (end == env || *end != '\0') fail(ErrorKind::ParseError, "ISOTOPE_TOL is not a number");
      ctx.residual = v;
      ctx.eq = std::min(ctx.eq, v);
    }
    ctx.validate();
    return ctx;
  }
};

inline double to_double(const Rational& x) { return x.to_double(); }
inline double to_double(double x) { return x; }

inline Rational abs(const Rational& x) { return x.sign() < 0 ? -x : x; }
inline int sign(const Rational& x) { return x.sign(); }
inline int sign(double x) { return (x > 0) - (x < 0); }

template <Scalar S>
S abs_value(const S& x) {
  if constexpr (is_exact_v<S>) {
    return abs(x);
  } else {
    return std::fabs(x);
  }
}

template <Scalar S>
S from_string(std::string_view text) {
  if constexpr (is_exact_v<S>) {
    return Rational::parse(text);
  } else {
    std::string s(text);
    if (s.find('/') != std::string::npos) return Rational::parse(s).to_double();
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      fail(ErrorKind::ParseError, "bad decimal literal '" + s + "'");
    }
    return v;
  }
}

inline std::string to_string(const Rational& x) { return x.str(); }
inline std::string to_string(double x) {
  if (x == 0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Exact: literal zero. Approx: |x| <= eq * max(1, scale).
template <Scalar S>
bool is_zero(const S& x, const ToleranceContext& ctx, double scale = 1.0) {
  if constexpr (is_exact_v<S>) {
    return x.is_zero();
  } else {
    return std::fabs(x) <= ctx.eq * std::max(1.0, scale);
  }
}

/// |x - y| <= eq * max(1, |x|, |y|) on the approximate backend; equality otherwise.
template <Scalar S>
bool near(const S& x, const S& y, const ToleranceContext& ctx) {
  if constexpr (is_exact_v<S>) {
    return x == y;
  } else {
    return std::fabs(x - y) <= ctx.eq * std::max({1.0, std::fabs(x), std::fabs(y)});
  }
}

enum class FieldOp { Add, Sub, Mul, Div, Neg, Inv };

template <Scalar S>
S field_op(const S& a, const S& b, FieldOp op) {
  switch (op) {
    case FieldOp::Add: return a + b;
    case FieldOp::Sub: return a - b;
    case FieldOp::Mul: return a * b;
    case FieldOp::Div:
      if (b == S(0)) fail(ErrorKind::DivisionByZero, "division by zero");
      return a / b;
    case FieldOp::Neg: return -a;
    case FieldOp::Inv:
      if (a == S(0)) fail(ErrorKind::DivisionByZero, "inverse of zero");
      return S(1) / a;
  }
  fail(ErrorKind::InvalidArgument, "unknown field operation");
}

template <Scalar S>
S power(S base, unsigned exponent) {
  S result(1);
  while (exponent > 0) {
    if (exponent & 1U) result = result * base;
    base = base * base;
    exponent >>= 1U;
  }
  return result;
}

namespace detail {

inline mpz_class random_base(const mpz_class& n, unsigned long salt) {
  return mpz_class(static_cast<unsigned long>(2 + salt)) % n;
}

// Brent's variant of Pollard rho; n is composite and odd.
inline mpz_class pollard_brent(const mpz_class& n) {
  for (unsigned long salt = 0;; ++salt) {
    mpz_class y = random_base(n, salt), c = 1 + salt, g = 1, r = 1, q = 1, x, ys;
    const unsigned long m = 64;
    auto f = [&](const mpz_class& v) { return mpz_class((v * v + c) % n); };
    while (g == 1) {
      x = y;
      for (mpz_class i = 0; i < r; ++i) y = f(y);
      mpz_class k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (unsigned long i = 0; i < m && k + i < r; ++i) {
          y = f(y);
          q = (q * abs(mpz_class(x - y))) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        mpz_class diff = abs(mpz_class(x - ys));
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void factor_into(mpz_class n, std::map<mpz_class, long>& out, long weight) {
  if (n < 0) n = -n;
  for (unsigned long p = 2; p < 100000; p += (p == 2 ? 1 : 2)) {
    if (n == 1) return;
    mpz_class pp = p;
    if (pp * pp > n) break;
    while (mpz_divisible_ui_p(n.get_mpz_t(), p) != 0) {
      n /= p;
      out[pp] += weight;
    }
  }
  if (n == 1) return;
  // Remaining cofactor: either prime or a product of primes >= 10^5.
  std::vector<mpz_class> stack{n};
  while (!stack.empty()) {
    mpz_class m = stack.back();
    stack.pop_back();
    if (m == 1) continue;
    if (mpz_probab_prime_p(m.get_mpz_t(), 40) != 0) {
      out[m] += weight;
      continue;
    }
    mpz_class d = pollard_brent(m);
    stack.push_back(d);
    stack.push_back(m / d);
  }
}

}  // namespace detail

/// Prime factorisation of |num/den| with denominator exponents negated.
inline std::map<mpz_class, long> factor_rational(const Rational& rho) {
  std::map<mpz_class, long> exponents;
  detail::factor_into(rho.numerator(), exponents, 1);
  detail::factor_into(rho.denominator(), exponents, -1);
  return exponents;
}

/// Element of k* / k*^l, l a positive even integer.
template <Scalar S>
struct PowerCoset {
  int exponent = 2;
  S representative = S(1);

  /// Same exponent and representatives differing by an l-th power.
  friend bool operator==(const PowerCoset& a, const PowerCoset& b) {
    if (a.exponent != b.exponent) return false;
    if constexpr (is_exact_v<S>) {
      Rational ratio = a.representative / b.representative;
      if (ratio.sign() <= 0) return false;
      auto perfect = [&](const mpz_class& z) {
        mpz_class root;
        return mpz_root(root.get_mpz_t(), z.get_mpz_t(), static_cast<unsigned long>(a.exponent)) != 0;
      };
      return perfect(ratio.numerator()) && perfect(ratio.denominator());
    } else {
      return sign(a.representative) == sign(b.representative);
    }
  }
};

/// Canonical representative of rho in k*/k*^l. Exact: sign times the product of
/// p^(e_p mod l). Approx (k = R): the sign of rho.
template <Scalar S>
PowerCoset<S> coset_rep(const S& rho, int l) {
  if (l <= 0 || l % 2 != 0) fail(ErrorKind::InvalidArgument, "coset exponent must be positive and even");
  if (rho == S(0)) fail(ErrorKind::ZeroScalar, "coset of zero");
  if constexpr (is_exact_v<S>) {
    mpz_class rep = 1;
    for (const auto& [prime, e] : factor_rational(rho)) {
      long r = ((e % l) + l) % l;
      mpz_class pw;
      mpz_pow_ui(pw.get_mpz_t(), prime.get_mpz_t(), static_cast<unsigned long>(r));
      rep *= pw;
    }
    if (rho.sign() < 0) rep = -rep;
    return {l, Rational(rep)};
  } else {
    return {l, rho > 0 ? 1.0 : -1.0};
  }
}

/// Exact square root over Q when one exists.
inline bool rational_sqrt(const Rational& x, Rational& out) {
  if (x.sign() < 0) return false;
  mpz_class n = x.numerator(), d = x.denominator(), rn, rd;
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0 || mpz_perfect_square_p(d.get_mpz_t()) == 0) return false;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  out = Rational(mpq_class(rn, rd));
  return true;
}

}  // namespace hurwitz
