#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <concepts>
#include <ostream>
#include <string>
#include <type_traits>
#include <utility>

namespace ctxfrac {

using BigRat = boost::multiprecision::cpp_rational;

// Exact rational scalar usable inside Eigen matrices.
//
// boost's cpp_rational cannot be used as an Eigen scalar directly on this
// toolchain: Eigen's scalar-promotion machinery asks whether a whole Matrix
// converts to the scalar, and that question hard-errors inside boost's
// byte-container detection.  The constructors below are constrained to
// integers and to cpp_rational itself, so the poisonous trait is never
// instantiated.
class Rational {
 public:
  Rational() : v_(0) {}
  template <std::integral I>
  Rational(I n) : v_(n) {}  // NOLINT: implicit by design, mirrors double
  template <std::integral I>
  Rational(I num, I den) : v_(num, den) {}
  template <class T>
    requires std::same_as<std::remove_cvref_t<T>, BigRat>
  explicit Rational(T&& raw) : v_(std::forward<T>(raw)) {}

  const BigRat& raw() const { return v_; }
  double to_double() const { return v_.template convert_to<double>(); }
  std::string str() const { return v_.str(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) { v_ /= o.v_; return *this; }

  friend Rational operator+(Rational a, const Rational& b) { a += b; return a; }
  friend Rational operator-(Rational a, const Rational& b) { a -= b; return a; }
  friend Rational operator*(Rational a, const Rational& b) { a *= b; return a; }
  friend Rational operator/(Rational a, const Rational& b) { a /= b; return a; }
  friend Rational operator-(const Rational& a) { return Rational(BigRat(-a.v_)); }
  friend Rational operator+(const Rational& a) { return a; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ == b.v_) return std::strong_ordering::equal;
    return std::strong_ordering::greater;
  }

  friend Rational abs(const Rational& a) { return a.v_ < 0 ? -a : a; }
  friend std::ostream& operator<<(std::ostream& os, const Rational& a) {
    return os << a.v_;
  }

 private:
  BigRat v_;
};

// Per-scalar numeric policy: the float backend works to fixed tolerances, the
// rational backend is exact and uses zero tolerances everywhere.
template <class Scalar>
struct numeric_policy;

template <>
struct numeric_policy<double> {
  static constexpr bool exact = false;
  static double validation() { return 1e-9; }   // row sums / nonnegativity
  static double feasibility() { return 1e-9; }  // LP residuals
  static double gap() { return 1e-8; }          // duality gap
  static double pivot() { return 1e-11; }       // simplex pivot threshold
  static double report() { return 1e-6; }       // certification margin
};

template <>
struct numeric_policy<Rational> {
  static constexpr bool exact = true;
  static Rational validation() { return Rational(0); }
  static Rational feasibility() { return Rational(0); }
  static Rational gap() { return Rational(0); }
  static Rational pivot() { return Rational(0); }
  static Rational report() { return Rational(0); }
};

// Scalar(num)/Scalar(den) without going through floating point for the exact
// backend; the one-stop shop for writing table constants generically.
template <class Scalar>
Scalar frac(long long num, long long den) {
  return Scalar(num) / Scalar(den);
}

inline double to_double(double x) { return x; }
inline double to_double(const Rational& x) { return x.to_double(); }

}  // namespace ctxfrac

namespace Eigen {

template <>
struct NumTraits<ctxfrac::Rational> {
  using Real = ctxfrac::Rational;
  using NonInteger = ctxfrac::Rational;
  using Literal = ctxfrac::Rational;
  using Nested = ctxfrac::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 40,
    MulCost = 40,
  };
  static ctxfrac::Rational epsilon() { return ctxfrac::Rational(0); }
  static ctxfrac::Rational dummy_precision() { return ctxfrac::Rational(0); }
  static int digits10() { return 0; }
};

}  // namespace Eigen
