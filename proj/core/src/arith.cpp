#include "modpoly/arith.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "modpoly/errors.hpp"

namespace modpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Precision kScratchPrec = 64;

double up(double x) { return std::nextafter(x, kInf); }

// Low-precision MPFR temporary used for directed-rounding radius work.
class Scratch {
 public:
  explicit Scratch(Precision prec = kScratchPrec) { mpfr_init2(v_, prec); }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  ~Scratch() { mpfr_clear(v_); }
  mpfr_ptr get() { return v_; }
  operator mpfr_ptr() { return v_; }

 private:
  mpfr_t v_;
};

// Lower bound on |m| - r, or a DomainError when it is not positive.
void lower_gap(mpfr_ptr out, mpfr_srcptr m, const Mag& r) {
  Scratch rr;
  mpfr_abs(out, m, MPFR_RNDD);
  r.to_mpfr(rr);
  mpfr_sub(out, out, rr, MPFR_RNDD);
  if (mpfr_sgn(out) <= 0) throw DomainError("ball contains zero where a nonzero value is required");
}

Mag mag_from_mpfr_up(mpfr_srcptr x) { return Mag::abs_of(x); }

}  // namespace

// ---------------------------------------------------------------- Mag

Mag::Mag(double man, long exp) : man_(man), exp_(exp) { normalize(); }

void Mag::normalize() {
  if (man_ == 0.0) {
    exp_ = 0;
    return;
  }
  int k = 0;
  man_ = std::frexp(man_, &k);
  exp_ += k;
}

Mag Mag::from_double(double x) {
  if (!(x >= 0.0) || std::isinf(x)) throw DomainError("Mag requires a finite nonnegative value");
  return Mag(x, 0);
}

Mag Mag::pow2(long e) { return Mag(0.5, e + 1); }

Mag Mag::abs_of(mpfr_srcptr x) {
  if (mpfr_zero_p(x)) return {};
  long e = 0;
  const double d = mpfr_get_d_2exp(&e, x, MPFR_RNDA);
  return Mag(std::fabs(d), e);
}

Mag Mag::ulp_of(mpfr_srcptr x, Precision p) {
  if (mpfr_zero_p(x)) return {};
  return pow2(mpfr_get_exp(x) - p);
}

double Mag::to_double() const {
  if (is_zero()) return 0.0;
  if (exp_ > 1100) return kInf;
  if (exp_ < -1060) return std::numeric_limits<double>::denorm_min();
  return up(std::ldexp(man_, static_cast<int>(exp_)));
}

double Mag::log2_upper() const {
  if (is_zero()) return -kInf;
  return static_cast<double>(exp_) + up(std::log2(man_)) + 1e-12;
}

void Mag::to_mpfr(mpfr_ptr out) const {
  mpfr_set_d(out, man_, MPFR_RNDN);
  if (!is_zero()) mpfr_mul_2si(out, out, exp_, MPFR_RNDN);
}

Mag& Mag::operator+=(const Mag& other) {
  if (other.is_zero()) return *this;
  if (is_zero()) return *this = other;
  const long d = exp_ - other.exp_;
  if (d >= 0) {
    man_ = d > 100 ? up(man_) : up(man_ + std::ldexp(other.man_, static_cast<int>(-d)));
  } else {
    man_ = d < -100 ? up(other.man_) : up(std::ldexp(man_, static_cast<int>(d)) + other.man_);
    exp_ = other.exp_;
  }
  normalize();
  return *this;
}

Mag& Mag::operator*=(const Mag& other) {
  if (is_zero()) return *this;
  if (other.is_zero()) return *this = Mag{};
  man_ = up(man_ * other.man_);
  exp_ += other.exp_;
  normalize();
  return *this;
}

Mag Mag::mul_2exp(long e) const {
  Mag r = *this;
  if (!r.is_zero()) r.exp_ += e;
  return r;
}

bool operator<(const Mag& a, const Mag& b) {
  if (a.is_zero()) return !b.is_zero();
  if (b.is_zero()) return false;
  if (a.exp_ != b.exp_) return a.exp_ < b.exp_;
  return a.man_ < b.man_;
}

// ---------------------------------------------------------------- Ball

Ball::Ball(Precision prec) {
  mpfr_init2(mid_, prec);
  mpfr_set_zero(mid_, 1);
}

Ball::Ball(Precision prec, long value) : Ball(prec) { round_error(mpfr_set_si(mid_, value, MPFR_RNDN)); }

Ball::Ball(Precision prec, double value) : Ball(prec) {
  if (!std::isfinite(value)) throw DomainError("non-finite double converted to a ball");
  round_error(mpfr_set_d(mid_, value, MPFR_RNDN));
}

Ball::Ball(Precision prec, const mpz_class& value) : Ball(prec) {
  round_error(mpfr_set_z(mid_, value.get_mpz_t(), MPFR_RNDN));
}

Ball::Ball(Precision prec, const mpq_class& value) : Ball(prec) {
  round_error(mpfr_set_q(mid_, value.get_mpq_t(), MPFR_RNDN));
}

Ball Ball::from_decimal(Precision prec, std::string_view text) {
  const std::string s(text);
  Ball r(prec);
  char* end = nullptr;
  const int t = mpfr_strtofr(r.mid_, s.c_str(), &end, 10, MPFR_RNDN);
  if (end == s.c_str() || *end != '\0') throw DomainError("malformed decimal literal '" + s + "'");
  r.round_error(t);
  return r;
}

Ball Ball::pi(Precision prec) {
  Ball r(prec);
  r.round_error(mpfr_const_pi(r.mid_, MPFR_RNDN));
  return r;
}

Ball Ball::log2(Precision prec) {
  Ball r(prec);
  r.round_error(mpfr_const_log2(r.mid_, MPFR_RNDN));
  return r;
}

Ball::Ball(const Ball& other) : rad_(other.rad_) {
  mpfr_init2(mid_, other.prec());
  mpfr_set(mid_, other.mid_, MPFR_RNDN);
}

Ball::Ball(Ball&& other) noexcept : rad_(other.rad_) {
  mpfr_init2(mid_, MPFR_PREC_MIN);
  mpfr_swap(mid_, other.mid_);
}

Ball& Ball::operator=(const Ball& other) {
  if (this != &other) {
    mpfr_set_prec(mid_, other.prec());
    mpfr_set(mid_, other.mid_, MPFR_RNDN);
    rad_ = other.rad_;
  }
  return *this;
}

Ball& Ball::operator=(Ball&& other) noexcept {
  mpfr_swap(mid_, other.mid_);
  std::swap(rad_, other.rad_);
  return *this;
}

Ball::~Ball() { mpfr_clear(mid_); }

Ball Ball::with_prec(Precision prec) const {
  Ball r(prec);
  r.rad_ = rad_;
  r.round_error(mpfr_set(r.mid_, mid_, MPFR_RNDN));
  return r;
}

Ball Ball::midpoint() const {
  Ball r(prec());
  mpfr_set(r.mid_, mid_, MPFR_RNDN);
  return r;
}

double Ball::lower_double() const {
  Scratch lo, r;
  mpfr_set(lo, mid_, MPFR_RNDD);
  rad_.to_mpfr(r);
  mpfr_sub(lo, lo, r, MPFR_RNDD);
  return mpfr_get_d(lo, MPFR_RNDD);
}

double Ball::upper_double() const {
  Scratch hi, r;
  mpfr_set(hi, mid_, MPFR_RNDU);
  rad_.to_mpfr(r);
  mpfr_add(hi, hi, r, MPFR_RNDU);
  return mpfr_get_d(hi, MPFR_RNDU);
}

Mag Ball::abs_upper() const { return Mag::abs_of(mid_) + rad_; }

double Ball::abs_lower_double() const {
  if (contains_zero()) return 0.0;
  Scratch g;
  lower_gap(g, mid_, rad_);
  return mpfr_get_d(g, MPFR_RNDD);
}

double Ball::log2_abs_upper() const { return abs_upper().log2_upper(); }

namespace {
int cmpabs_mid_rad(mpfr_srcptr mid, const Mag& rad) {
  Scratch r;
  rad.to_mpfr(r);
  return mpfr_cmpabs(mid, r);
}
}  // namespace

bool Ball::contains_zero() const { return cmpabs_mid_rad(mid_, rad_) <= 0; }

bool Ball::certainly_positive() const { return mpfr_sgn(mid_) > 0 && cmpabs_mid_rad(mid_, rad_) > 0; }

bool Ball::certainly_negative() const { return mpfr_sgn(mid_) < 0 && cmpabs_mid_rad(mid_, rad_) > 0; }

bool Ball::lower_nonneg() const { return mpfr_sgn(mid_) >= 0 && cmpabs_mid_rad(mid_, rad_) >= 0; }

bool Ball::certainly_less(const Ball& other) const { return (other - *this).certainly_positive(); }

bool Ball::contains(const Ball& other) const {
  Ball d(std::max(prec(), other.prec()));
  const int t = mpfr_sub(d.mid_, other.mid_, mid_, MPFR_RNDN);
  Mag dist = Mag::abs_of(d.mid_) + other.rad_;
  if (t != 0) dist += Mag::ulp_of(d.mid_, d.prec());
  return dist <= rad_;
}

bool Ball::overlaps(const Ball& other) const { return (other - *this).contains_zero(); }

std::string Ball::to_string(int digits) const {
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Rg +/- %.3g", digits, mid_, rad_.to_double());
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

Ball Ball::operator-() const {
  Ball r(*this);
  mpfr_neg(r.mid_, r.mid_, MPFR_RNDN);
  return r;
}

namespace {
void widen(mpfr_ptr x, Precision p) {
  if (mpfr_get_prec(x) < p) mpfr_prec_round(x, p, MPFR_RNDN);
}
}  // namespace

Ball& Ball::operator+=(const Ball& b) {
  widen(mid_, b.prec());
  rad_ += b.rad_;
  round_error(mpfr_add(mid_, mid_, b.mid_, MPFR_RNDN));
  return *this;
}

Ball& Ball::operator-=(const Ball& b) {
  widen(mid_, b.prec());
  rad_ += b.rad_;
  round_error(mpfr_sub(mid_, mid_, b.mid_, MPFR_RNDN));
  return *this;
}

Ball& Ball::operator*=(const Ball& b) {
  widen(mid_, b.prec());
  const Mag am = Mag::abs_of(mid_);
  const Mag bm = Mag::abs_of(b.mid_);
  rad_ = am * b.rad_ + bm * rad_ + rad_ * b.rad_;
  round_error(mpfr_mul(mid_, mid_, b.mid_, MPFR_RNDN));
  return *this;
}

Ball& Ball::operator/=(const Ball& b) {
  Scratch denom;
  lower_gap(denom, b.mid_, b.rad_);
  const Mag rb = b.rad_;
  widen(mid_, b.prec());
  const int t = mpfr_div(mid_, mid_, b.mid_, MPFR_RNDN);
  Mag qabs = Mag::abs_of(mid_);
  if (t != 0) qabs += Mag::ulp_of(mid_, prec());
  const Mag num = rad_ + qabs * rb;
  if (num.is_zero()) {
    rad_ = Mag{};
  } else {
    Scratch n;
    num.to_mpfr(n);
    mpfr_div(n, n, denom, MPFR_RNDU);
    rad_ = mag_from_mpfr_up(n);
  }
  round_error(t);
  return *this;
}

Ball& Ball::mul_si(long k) {
  rad_ *= Mag::from_double(std::fabs(static_cast<double>(k)));
  round_error(mpfr_mul_si(mid_, mid_, k, MPFR_RNDN));
  return *this;
}

Ball& Ball::div_si(long k) {
  if (k == 0) throw DomainError("division by zero");
  rad_ *= Mag::from_double(up(1.0 / std::fabs(static_cast<double>(k))));
  round_error(mpfr_div_si(mid_, mid_, k, MPFR_RNDN));
  return *this;
}

Ball& Ball::add_si(long k) {
  round_error(mpfr_add_si(mid_, mid_, k, MPFR_RNDN));
  return *this;
}

Ball& Ball::mul_2exp(long e) {
  mpfr_mul_2si(mid_, mid_, e, MPFR_RNDN);
  rad_ = rad_.mul_2exp(e);
  return *this;
}

Ball sqr(const Ball& x) {
  Ball r(x.prec());
  const Mag m = Mag::abs_of(x.mid_);
  r.rad_ = (m * x.rad_).mul_2exp(1) + x.rad_ * x.rad_;
  r.round_error(mpfr_sqr(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball sqrt(const Ball& x) {
  Ball r(x.prec());
  if (x.is_exact()) {
    if (mpfr_sgn(x.mid_) < 0) throw DomainError("sqrt of a negative number");
  } else {
    Scratch lo;
    lower_gap(lo, x.mid_, x.rad_);
    if (mpfr_sgn(x.mid_) < 0) throw DomainError("sqrt of a negative number");
    mpfr_sqrt(lo, lo, MPFR_RNDD);
    Scratch n;
    x.rad_.to_mpfr(n);
    mpfr_div(n, n, lo, MPFR_RNDU);
    r.rad_ = mag_from_mpfr_up(n);
  }
  r.round_error(mpfr_sqrt(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball exp(const Ball& x) {
  Ball r(x.prec());
  if (!x.is_exact()) {
    Scratch hi, rr;
    x.rad_.to_mpfr(rr);
    mpfr_set(hi, x.mid_, MPFR_RNDU);
    mpfr_add(hi, hi, rr, MPFR_RNDU);
    mpfr_exp(hi, hi, MPFR_RNDU);
    mpfr_mul(hi, hi, rr, MPFR_RNDU);
    r.rad_ = mag_from_mpfr_up(hi);
  }
  r.round_error(mpfr_exp(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball log(const Ball& x) {
  Ball r(x.prec());
  if (mpfr_sgn(x.mid_) <= 0) throw DomainError("log of a nonpositive number");
  if (!x.is_exact()) {
    Scratch lo, n;
    lower_gap(lo, x.mid_, x.rad_);
    x.rad_.to_mpfr(n);
    mpfr_div(n, n, lo, MPFR_RNDU);
    r.rad_ = mag_from_mpfr_up(n);
  }
  r.round_error(mpfr_log(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball sin(const Ball& x) {
  Ball r(x.prec());
  r.rad_ = x.rad_;
  r.round_error(mpfr_sin(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball cos(const Ball& x) {
  Ball r(x.prec());
  r.rad_ = x.rad_;
  r.round_error(mpfr_cos(r.mid_, x.mid_, MPFR_RNDN));
  return r;
}

Ball abs(const Ball& x) {
  Ball r(x);
  mpfr_abs(r.mid_, r.mid_, MPFR_RNDN);
  return r;
}

Ball pow(const Ball& x, unsigned long n) {
  Ball result(x.prec(), 1L);
  Ball base(x);
  while (n != 0) {
    if (n & 1UL) result *= base;
    n >>= 1;
    if (n != 0) base = sqr(base);
  }
  return result;
}

Ball hull(const Ball& a, const Ball& b) {
  const Precision p = std::max(a.prec(), b.prec()) + 4;
  Scratch lo(p), hi(p), t(p), ra(kScratchPrec), rb(kScratchPrec);
  a.rad_.to_mpfr(ra);
  b.rad_.to_mpfr(rb);
  mpfr_sub(lo, a.mid_, ra, MPFR_RNDD);
  mpfr_sub(t, b.mid_, rb, MPFR_RNDD);
  mpfr_min(lo, lo, t, MPFR_RNDD);
  mpfr_add(hi, a.mid_, ra, MPFR_RNDU);
  mpfr_add(t, b.mid_, rb, MPFR_RNDU);
  mpfr_max(hi, hi, t, MPFR_RNDU);

  Ball r(p - 4);
  int tern = mpfr_add(t, lo, hi, MPFR_RNDN);
  mpfr_div_2ui(t, t, 1, MPFR_RNDN);
  tern |= mpfr_set(r.mid_, t.get(), MPFR_RNDN);
  // radius = max(hi - mid, mid - lo), rounded up
  Scratch d1(kScratchPrec), d2(kScratchPrec);
  mpfr_sub(d1, hi, r.mid_, MPFR_RNDU);
  mpfr_sub(d2, r.mid_, lo, MPFR_RNDU);
  mpfr_max(d1, d1, d2, MPFR_RNDU);
  r.rad_ = mag_from_mpfr_up(d1);
  (void)tern;
  return r;
}

Ball max(const Ball& a, const Ball& b) {
  if (a.certainly_less(b)) return b;
  if (b.certainly_less(a)) return a;
  return hull(a, b);
}

Ball min(const Ball& a, const Ball& b) {
  if (a.certainly_less(b)) return a;
  if (b.certainly_less(a)) return b;
  return hull(a, b);
}

// ---------------------------------------------------------------- CBall

CBall CBall::expi(const Ball& theta) { return {cos(theta), sin(theta)}; }

CBall& CBall::operator+=(const CBall& b) {
  re_ += b.re_;
  im_ += b.im_;
  return *this;
}

CBall& CBall::operator-=(const CBall& b) {
  re_ -= b.re_;
  im_ -= b.im_;
  return *this;
}

CBall& CBall::operator*=(const CBall& b) {
  Ball re = re_ * b.re_ - im_ * b.im_;
  Ball im = re_ * b.im_ + im_ * b.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

CBall& CBall::operator/=(const CBall& b) { return *this *= inverse(b); }

CBall& CBall::operator*=(const Ball& b) {
  re_ *= b;
  im_ *= b;
  return *this;
}

CBall& CBall::operator*=(long k) {
  re_.mul_si(k);
  im_.mul_si(k);
  return *this;
}

CBall sqr(const CBall& z) {
  Ball re = sqr(z.re_) - sqr(z.im_);
  Ball im = z.re_ * z.im_;
  im.mul_2exp(1);
  return {std::move(re), std::move(im)};
}

CBall pow(const CBall& z, unsigned long n) {
  CBall result(z.prec(), 1L);
  CBall base(z);
  while (n != 0) {
    if (n & 1UL) result *= base;
    n >>= 1;
    if (n != 0) base = sqr(base);
  }
  return result;
}

Ball norm(const CBall& z) { return sqr(z.re_) + sqr(z.im_); }

CBall inverse(const CBall& z) {
  const Ball n = norm(z);
  return {z.re_ / n, -z.im_ / n};
}

Ball abs(const CBall& z) {
  Ball r(z.prec());
  r.rad_ = z.re_.rad_ + z.im_.rad_;
  r.round_error(mpfr_hypot(r.mid_, z.re_.mid_, z.im_.mid_, MPFR_RNDN));
  return r;
}

}  // namespace modpoly
