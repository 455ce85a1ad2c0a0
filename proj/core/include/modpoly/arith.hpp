#pragma once

// Midpoint-radius ("ball") arithmetic over MPFR.
//
// A Ball is an MPFR midpoint plus a Mag radius. Every operation returns a
// ball that contains the exact result for all inputs in the operand balls,
// so inequality checks made on ball endpoints are certified.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>

namespace modpoly {

using Precision = mpfr_prec_t;

/// Nonnegative upper bound m * 2^e with m in [1/2, 1). Every operation rounds
/// up, so a Mag never underestimates the quantity it bounds. The exponent is
/// a long, so radii far below the double range are representable.
class Mag {
 public:
  Mag() = default;

  static Mag from_double(double x);
  static Mag pow2(long e);
  /// Upper bound on |x|.
  static Mag abs_of(mpfr_srcptr x);
  /// Upper bound on the rounding error of a round-to-nearest result x at
  /// precision p (slightly generous: one full ulp).
  static Mag ulp_of(mpfr_srcptr x, Precision p);

  bool is_zero() const { return man_ == 0.0; }
  /// Value as a double, rounded up; +inf on overflow, 0 only for zero.
  double to_double() const;
  /// Upper bound on log2 of the value; -inf for zero.
  double log2_upper() const;
  /// Writes the exact value into out (out must have >= 53 bits).
  void to_mpfr(mpfr_ptr out) const;

  Mag& operator+=(const Mag& other);
  Mag& operator*=(const Mag& other);
  friend Mag operator+(Mag a, const Mag& b) { return a += b; }
  friend Mag operator*(Mag a, const Mag& b) { return a *= b; }
  Mag mul_2exp(long e) const;

  friend bool operator<(const Mag& a, const Mag& b);
  friend bool operator<=(const Mag& a, const Mag& b) { return !(b < a); }
  friend bool operator==(const Mag& a, const Mag& b) {
    return a.man_ == b.man_ && (a.man_ == 0.0 || a.exp_ == b.exp_);
  }

 private:
  Mag(double man, long exp);
  void normalize();

  double man_ = 0.0;
  long exp_ = 0;
};

class CBall;

class Ball {
 public:
  explicit Ball(Precision prec = 64);
  Ball(Precision prec, long value);
  Ball(Precision prec, int value) : Ball(prec, static_cast<long>(value)) {}
  Ball(Precision prec, double value);
  Ball(Precision prec, const mpz_class& value);
  Ball(Precision prec, const mpq_class& value);
  /// Decimal literal such as "0.458"; the radius covers the conversion error.
  static Ball from_decimal(Precision prec, std::string_view text);
  static Ball pi(Precision prec);
  static Ball log2(Precision prec);

  Ball(const Ball& other);
  Ball(Ball&& other) noexcept;
  Ball& operator=(const Ball& other);
  Ball& operator=(Ball&& other) noexcept;
  ~Ball();

  Precision prec() const { return mpfr_get_prec(mid_); }
  mpfr_srcptr mid() const { return mid_; }
  const Mag& rad() const { return rad_; }
  bool is_exact() const { return rad_.is_zero(); }

  /// Copy rounded to another precision; the radius absorbs the rounding.
  Ball with_prec(Precision prec) const;
  void add_error(const Mag& err) { rad_ += err; }
  /// The midpoint as an exact ball.
  Ball midpoint() const;

  double to_double() const { return mpfr_get_d(mid_, MPFR_RNDN); }
  /// Certified endpoints rounded outward to double.
  double lower_double() const;
  double upper_double() const;
  Mag abs_upper() const;
  /// Lower bound on |x|, as a double rounded down (0 if the ball meets 0).
  double abs_lower_double() const;
  /// Upper bound on log2|x|; -inf only for the exact zero ball.
  double log2_abs_upper() const;

  bool contains_zero() const;
  bool certainly_positive() const;
  bool certainly_negative() const;
  bool certainly_nonnegative() const { return !certainly_negative() && lower_nonneg(); }
  bool certainly_less(const Ball& other) const;
  bool contains(const Ball& other) const;
  bool overlaps(const Ball& other) const;
  std::string to_string(int digits = 20) const;

  Ball operator-() const;
  Ball& operator+=(const Ball& b);
  Ball& operator-=(const Ball& b);
  Ball& operator*=(const Ball& b);
  Ball& operator/=(const Ball& b);
  friend Ball operator+(Ball a, const Ball& b) { return a += b; }
  friend Ball operator-(Ball a, const Ball& b) { return a -= b; }
  friend Ball operator*(Ball a, const Ball& b) { return a *= b; }
  friend Ball operator/(Ball a, const Ball& b) { return a /= b; }
  friend Ball operator*(Ball a, long k) { return a.mul_si(k); }
  friend Ball operator*(long k, Ball a) { return a.mul_si(k); }
  friend Ball operator/(Ball a, long k) { return a.div_si(k); }
  friend Ball operator+(Ball a, long k) { return a.add_si(k); }
  friend Ball operator-(Ball a, long k) { return a.add_si(-k); }

  Ball& mul_si(long k);
  Ball& div_si(long k);
  Ball& add_si(long k);
  Ball& mul_2exp(long e);

  friend Ball sqr(const Ball& x);
  friend Ball sqrt(const Ball& x);
  friend Ball exp(const Ball& x);
  friend Ball log(const Ball& x);
  friend Ball sin(const Ball& x);
  friend Ball cos(const Ball& x);
  friend Ball abs(const Ball& x);
  friend Ball pow(const Ball& x, unsigned long n);
  /// Smallest ball containing both.
  friend Ball hull(const Ball& a, const Ball& b);
  /// Certified max(a, b).
  friend Ball max(const Ball& a, const Ball& b);
  friend Ball min(const Ball& a, const Ball& b);
  friend Ball abs(const CBall& z);

 private:
  bool lower_nonneg() const;
  void round_error(int ternary) {
    if (ternary != 0) rad_ += Mag::ulp_of(mid_, prec());
  }

  mpfr_t mid_;
  Mag rad_;
};

/// Complex ball in rectangular form.
class CBall {
 public:
  explicit CBall(Precision prec = 64) : re_(prec), im_(prec) {}
  CBall(Ball re, Ball im) : re_(std::move(re)), im_(std::move(im)) {}
  CBall(Precision prec, long re) : re_(prec, re), im_(prec) {}
  CBall(Precision prec, int re) : re_(prec, re), im_(prec) {}

  /// e^{i theta}.
  static CBall expi(const Ball& theta);

  const Ball& re() const { return re_; }
  const Ball& im() const { return im_; }
  Ball& re() { return re_; }
  Ball& im() { return im_; }
  Precision prec() const { return std::max(re_.prec(), im_.prec()); }
  CBall with_prec(Precision prec) const { return {re_.with_prec(prec), im_.with_prec(prec)}; }

  /// Upper bound on the larger of the two component radii.
  Mag rad() const { return re_.rad() < im_.rad() ? im_.rad() : re_.rad(); }
  bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }

  CBall operator-() const { return {-re_, -im_}; }
  CBall conj() const { return {re_, -im_}; }
  CBall& operator+=(const CBall& b);
  CBall& operator-=(const CBall& b);
  CBall& operator*=(const CBall& b);
  CBall& operator/=(const CBall& b);
  CBall& operator*=(const Ball& b);
  CBall& operator*=(long k);
  friend CBall operator+(CBall a, const CBall& b) { return a += b; }
  friend CBall operator-(CBall a, const CBall& b) { return a -= b; }
  friend CBall operator*(CBall a, const CBall& b) { return a *= b; }
  friend CBall operator/(CBall a, const CBall& b) { return a /= b; }
  friend CBall operator*(CBall a, const Ball& b) { return a *= b; }
  friend CBall operator*(CBall a, long k) { return a *= k; }

  friend CBall sqr(const CBall& z);
  friend CBall pow(const CBall& z, unsigned long n);
  friend CBall inverse(const CBall& z);
  /// |z|^2.
  friend Ball norm(const CBall& z);
  /// |z|, Lipschitz-bounded, valid even when z meets 0.
  friend Ball abs(const CBall& z);

 private:
  Ball re_;
  Ball im_;
};

}  // namespace modpoly
