#include "modpoly/modfunc.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

#include "modpoly/errors.hpp"

namespace modpoly::modfunc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;
constexpr long kMaxReductionSteps = 100000;
constexpr long kUnlimitedTerms = std::numeric_limits<long>::max();
// zeta(3) < 1.2021 bounds sigma_3(n) / n^3.
constexpr double kZeta3Upper = 1.2021;

// Upper bound on log2|q| for q = exp(2 pi i tau).
double log2_nome_upper(const Ball& im) {
  const double lo = im.lower_double();
  if (!(lo > 0.0)) throw BudgetExceeded("Im(tau) is not certifiably positive");
  return -(2.0 * kPi / kLn2) * lo * (1.0 - 1e-12);
}

// Bits of |j| at a reduced point: |j| <= |1/q| + 744 + O(|q|).
long magnitude_bits(const Ball& im) {
  return static_cast<long>(std::ceil(2.0 * kPi / kLn2 * im.upper_double())) + 12;
}

struct Nome {
  CBall q;
  double log2_abs;
};

Nome nome(const TauPoint& tau, Precision prec) {
  Ball two_pi = Ball::pi(prec);
  two_pi.mul_2exp(1);
  const Ball modulus = exp(-(two_pi * tau.im()));
  return {CBall::expi(two_pi * tau.re()) * modulus, log2_nome_upper(tau.im())};
}

// Smallest T with 240 sum_{n>T} sigma_3(n) |q|^n <= 2^-(prec+8). For n > T
// the terms n^3 |q|^n shrink by at least rho = ((T+2)/(T+1))^3 |q| <= 1/2,
// so the tail is at most twice its first term.
long e4_terms(double lq, Precision prec) {
  const double c = std::log2(240.0 * kZeta3Upper) + 1.0;
  const double goal = -(static_cast<double>(prec) + 8.0);
  for (long t = 1; t < 100'000'000; ++t) {
    const double t1 = static_cast<double>(t + 1);
    if (3.0 * std::log2((t1 + 1.0) / t1) + lq > -1.0) continue;
    if (c + 3.0 * std::log2(t1) + t1 * lq <= goal) return t;
  }
  throw BudgetExceeded("E4 series does not converge at this point");
}

double e4_tail_log2(long t, double lq) {
  const double t1 = static_cast<double>(t + 1);
  return std::log2(240.0 * kZeta3Upper) + 1.0 + 3.0 * std::log2(t1) + t1 * lq + 1e-9;
}

std::vector<long> sigma3_table(long t) {
  std::vector<long> s(static_cast<std::size_t>(t) + 1, 0);
  for (long d = 1; d <= t; ++d) {
    const long d3 = d * d * d;
    for (long m = d; m <= t; m += d) s[static_cast<std::size_t>(m)] += d3;
  }
  return s;
}

void add_complex_error(CBall& z, double log2_err) {
  const Mag e = Mag::pow2(static_cast<long>(std::ceil(log2_err)));
  z.re().add_error(e);
  z.im().add_error(e);
}

// prod_{n>=1} (1 - q^n) = sum_{k in Z} (-1)^k q^{k(3k-1)/2}, summed until the
// remaining exponents (all >= the next pentagonal number g) contribute at
// most |q|^g / (1 - |q|) <= 2^-(prec+8).
CBall euler_product(const CBall& q, double lq, Precision prec, long max_k) {
  if (!(lq < -1e-6)) throw BudgetExceeded("|q| too close to 1 for the eta product");
  const double tail_scale = -std::log2(-std::expm1(lq * kLn2)) + 1e-9;
  const double goal = -(static_cast<double>(prec) + 8.0);
  CBall sum(prec, 1);
  CBall power = q;  // q^{k(3k-1)/2}
  CBall qk = q;     // q^k
  const CBall q3 = q * q * q;
  CBall step = q3 * q;  // q^{3k+1}
  long k = 1;
  double g = 1.0;
  while (g * lq + tail_scale > goal) {
    if (k > max_k) throw BudgetExceeded("eta product needs more terms than the budget allows");
    const CBall term = power + power * qk;
    if (k & 1) {
      sum -= term;
    } else {
      sum += term;
    }
    power *= step;
    step *= q3;
    qk *= q;
    g += 3.0 * static_cast<double>(k) + 1.0;
    ++k;
  }
  add_complex_error(sum, g * lq + tail_scale);
  return sum;
}

CBall pow24(const CBall& p) {
  const CBall p3 = sqr(p) * p;
  return sqr(sqr(sqr(p3)));
}

CBall delta_from_nome(const Nome& n, Precision prec, long max_k) {
  return n.q * pow24(euler_product(n.q, n.log2_abs, prec, max_k));
}

CBall e4_series(const Nome& n, Precision prec, long max_terms) {
  const long t = e4_terms(n.log2_abs, prec);
  if (t > max_terms) throw BudgetExceeded("E4 series needs " + std::to_string(t) + " terms, budget allows " +
                                          std::to_string(max_terms));
  const auto s3 = sigma3_table(t);
  CBall acc(prec, s3[static_cast<std::size_t>(t)]);
  for (long i = t - 1; i >= 1; --i) {
    acc *= n.q;
    acc.re().add_si(s3[static_cast<std::size_t>(i)]);
  }
  acc *= n.q;
  acc *= 240L;
  acc.re().add_si(1);
  add_complex_error(acc, e4_tail_log2(t, n.log2_abs));
  return acc;
}

// j = E4^3 / Delta at a point with Im(tau) large enough for fast series.
CBall j_at_reduced(const TauPoint& tau, Precision prec, long max_terms) {
  const Nome n = nome(tau, prec);
  if (n.log2_abs > -4.0) throw BudgetExceeded("point is not reduced");
  const CBall e4 = e4_series(n, prec, max_terms);
  return sqr(e4) * e4 / delta_from_nome(n, prec, kUnlimitedTerms);
}

SL2Matrix multiply(const SL2Matrix& x, const SL2Matrix& y) {
  auto dot = [](std::int64_t p, std::int64_t q, std::int64_t r, std::int64_t s) {
    std::int64_t u = 0;
    std::int64_t v = 0;
    std::int64_t w = 0;
    if (__builtin_mul_overflow(p, q, &u) || __builtin_mul_overflow(r, s, &v) || __builtin_add_overflow(u, v, &w)) {
      throw BudgetExceeded("reduction matrix entries overflow 64 bits");
    }
    return w;
  };
  return {dot(x.a, y.a, x.b, y.c), dot(x.a, y.b, x.b, y.d), dot(x.c, y.a, x.d, y.c), dot(x.c, y.b, x.d, y.d)};
}

bool is_exact_value(const Ball& x, long v) { return x.is_exact() && mpfr_cmp_si(x.mid(), v) == 0; }

ReducedPair reduce_impl(const TauPoint& tau, Precision working, BoundaryPolicy policy) {
  const Precision prec = std::max(tau.prec(), working);
  Ball x = tau.re().with_prec(prec);
  Ball y = tau.im().with_prec(prec);
  SL2Matrix m;
  const SL2Matrix s_matrix{0, -1, 1, 0};
  const Ball half = Ball(prec, 1L) / 2L;

  auto translate = [&](std::int64_t n) {
    x.add_si(-n);
    m = multiply(SL2Matrix{1, -n, 0, 1}, m);
  };
  auto ambiguous = [&](const char* what) {
    if (policy == BoundaryPolicy::Strict) {
      throw BudgetExceeded(std::string("cannot certify reduction boundary (") + what + "); raise precision");
    }
  };

  for (long step = 0;; ++step) {
    if (step > kMaxReductionSteps) throw BudgetExceeded("reduction did not terminate");
    const double xd = x.to_double();
    if (std::fabs(xd) > 4.0e15) throw BudgetExceeded("Re(tau) too large to reduce");
    // Coarse step only outside [-1/2, 1/2]; the certified checks below
    // settle points near the edges, and rounding here could undo them.
    if (std::fabs(xd) > 0.5) translate(static_cast<std::int64_t>(std::ceil(xd - 0.5)));
    if ((x - half).certainly_positive()) {
      translate(1);
      continue;
    }
    if ((x + half).certainly_negative()) {
      translate(-1);
      continue;
    }
    const Ball r2 = sqr(x) + sqr(y);
    const Ball r2m1 = r2 - 1L;
    if (r2m1.certainly_negative()) {
      x = -x / r2;
      y = y / r2;
      m = multiply(s_matrix, m);
      continue;
    }
    const bool on_circle = is_exact_value(r2, 1);
    const bool off_circle = r2m1.certainly_positive();
    if (!on_circle && !off_circle) {
      ambiguous("|tau| = 1");
      break;
    }
    const Ball x_plus_half = x + half;
    if (x_plus_half.is_exact() && mpfr_zero_p(x_plus_half.mid())) {
      translate(-1);
      continue;
    }
    if (x_plus_half.contains_zero()) {
      ambiguous("Re(tau) = -1/2");
      break;
    }
    if (!x.is_exact() && (x - half).contains_zero()) {
      ambiguous("Re(tau) = 1/2");
      break;
    }
    if (on_circle) {
      if (x.certainly_negative()) {
        x = -x;
        m = multiply(s_matrix, m);
      } else if (!x.certainly_nonnegative()) {
        ambiguous("sign of Re(tau) on |tau| = 1");
      }
    }
    break;
  }
  return {TauPoint(std::move(x), std::move(y)), m};
}

TauPoint reduced_at(const TauPoint& tau, const SL2Matrix& g, Precision prec) {
  const TauPoint hi = tau.with_prec(std::max(prec, tau.prec()));
  return g.is_identity() ? hi : apply(g, hi);
}

CBall eval_j_impl(const TauPoint& tau, Precision working, long max_terms) {
  const ReducedPair rp = reduce_impl(tau, working, BoundaryPolicy::Tolerant);
  const Precision prec = working + magnitude_bits(rp.tau_tilde.im());
  return j_at_reduced(reduced_at(tau, rp.transform, prec), prec, max_terms);
}

void check_target(const CBall& z, const PrecisionBudget& budget, const char* what) {
  if (budget.target_abs_error() < z.rad()) {
    throw BudgetExceeded(std::string(what) + ": error bound 2^" + std::to_string(z.rad().log2_upper()) +
                         " exceeds target 2^-" + std::to_string(budget.target_bits()));
  }
}

}  // namespace

// ------------------------------------------------------------------ TauPoint

TauPoint::TauPoint(Ball re, Ball im) : re_(std::move(re)), im_(std::move(im)) {
  if (!im_.certainly_positive()) throw DomainError("tau must lie in the upper half-plane");
}

TauPoint TauPoint::from_doubles(double re, double im, Precision prec) {
  return {Ball(prec, re), Ball(prec, im)};
}

TauPoint TauPoint::from_decimal(std::string_view re, std::string_view im, Precision prec) {
  return {Ball::from_decimal(prec, re), Ball::from_decimal(prec, im)};
}

// ------------------------------------------------------------------ PrecisionBudget

PrecisionBudget::PrecisionBudget(long working_bits, long target_bits)
    : working_bits_(working_bits), target_bits_(target_bits) {
  if (working_bits < 16) throw DomainError("working precision must be at least 16 bits");
  // Worst reduced point is Im(tau) = sqrt(3)/2, where |j| needs ~20 extra bits.
  const double lq = -kPi * std::sqrt(3.0) / kLn2;
  series_terms_ = e4_terms(lq, working_bits + 21) + 2;
}

PrecisionBudget PrecisionBudget::for_target_bits(long target_bits) { return {target_bits + 128, target_bits}; }

PrecisionBudget PrecisionBudget::for_digits(long digits) {
  return for_target_bits(static_cast<long>(std::ceil(static_cast<double>(digits) * 3.3219280948873623)));
}

// ------------------------------------------------------------------ SL2 action

CBall automorphy_factor(const SL2Matrix& g, const TauPoint& tau) {
  CBall z = tau.value() * static_cast<long>(g.c);
  z.re().add_si(static_cast<long>(g.d));
  return z;
}

TauPoint apply(const SL2Matrix& g, const TauPoint& tau) {
  CBall num = tau.value() * static_cast<long>(g.a);
  num.re().add_si(static_cast<long>(g.b));
  const CBall w = num / automorphy_factor(g, tau);
  return {w.re(), w.im()};
}

ReducedPair reduce_to_fundamental_domain(const TauPoint& tau, const PrecisionBudget& budget, BoundaryPolicy policy) {
  return reduce_impl(tau, budget.working_bits(), policy);
}

// ------------------------------------------------------------------ evaluation

CBall eval_delta_unreduced(const TauPoint& tau, Precision prec) {
  return delta_from_nome(nome(tau.with_prec(std::max(prec, tau.prec())), prec), prec, kUnlimitedTerms);
}

CBall eval_delta(const TauPoint& tau, const PrecisionBudget& budget) {
  const Precision prec = budget.working_bits();
  const ReducedPair rp = reduce_impl(tau, prec, BoundaryPolicy::Tolerant);
  const TauPoint reduced = reduced_at(tau, rp.transform, prec);
  const Nome n = nome(reduced, prec);
  CBall delta = delta_from_nome(n, prec, budget.series_terms());
  if (!rp.transform.is_identity()) {
    // Delta(g tau) = (c tau + d)^12 Delta(tau)
    delta /= pow(automorphy_factor(rp.transform, tau.with_prec(prec)), 12);
  }
  check_target(delta, budget, "eval_delta");
  return delta;
}

CBall eval_j_ball(const TauPoint& tau, Precision working_bits) {
  return eval_j_impl(tau, working_bits, kUnlimitedTerms);
}

CBall eval_j(const TauPoint& tau, const PrecisionBudget& budget) {
  CBall j = eval_j_impl(tau, budget.working_bits(), budget.series_terms());
  check_target(j, budget, "eval_j");
  return j;
}

CBall eval_j_eta_quotient(const TauPoint& tau, const PrecisionBudget& budget) {
  const ReducedPair rp = reduce_impl(tau, budget.working_bits(), BoundaryPolicy::Tolerant);
  const Precision prec = budget.working_bits() + magnitude_bits(rp.tau_tilde.im());
  const TauPoint reduced = reduced_at(tau, rp.transform, prec);
  const Nome n = nome(reduced, prec);
  const CBall q2 = sqr(n.q);
  const CBall ratio = euler_product(q2, 2.0 * n.log2_abs, prec, kUnlimitedTerms) /
                      euler_product(n.q, n.log2_abs, prec, kUnlimitedTerms);
  const CBall t = n.q * pow24(ratio);
  CBall u = t * 256L;
  u.re().add_si(1);
  CBall j = sqr(u) * u / t;
  check_target(j, budget, "eval_j_eta_quotient");
  return j;
}

// ------------------------------------------------------------------ inverse on the path

namespace {

enum class Piece { Arc, Segment };

TauPoint path_point(Piece piece, const Ball& x) {
  if (piece == Piece::Arc) return {cos(x), sin(x)};
  return {Ball(x.prec()), x};
}

Ball third_pi(Precision prec) { return Ball::pi(prec) / 3L; }
Ball half_pi(Precision prec) { return Ball::pi(prec) / 2L; }

std::once_flag g_monotone_once;
bool g_monotone_ok = false;

void ensure_monotone() {
  std::call_once(g_monotone_once,
                 [] { g_monotone_ok = check_gamma_monotone(1000, PrecisionBudget::for_target_bits(64)); });
  if (!g_monotone_ok) throw Error("j is not certifiably monotone along the path; inversion untrusted");
}

}  // namespace

bool check_gamma_monotone(std::size_t samples_per_piece, const PrecisionBudget& budget) {
  if (samples_per_piece < 2) return true;
  const Precision prec = budget.working_bits();
  const long steps = static_cast<long>(samples_per_piece) - 1;
  auto increasing = [&](Piece piece, const Ball& start, const Ball& width) {
    Ball prev(prec);
    for (long k = 0; k <= steps; ++k) {
      const Ball x = start + width * k / steps;
      Ball value = eval_j_ball(path_point(piece, x), prec).re();
      if (k > 0 && !prev.certainly_less(value)) return false;
      prev = std::move(value);
    }
    return true;
  };
  const Ball arc_start = third_pi(prec);
  const Ball arc_width = half_pi(prec) - arc_start;
  return increasing(Piece::Arc, arc_start, arc_width) && increasing(Piece::Segment, Ball(prec, 1L), Ball(prec, 2L));
}

TauPoint j_inverse_on_gamma(double v, const PrecisionBudget& budget) {
  return j_inverse_on_gamma(Ball(std::max<Precision>(budget.working_bits(), 64), v), budget);
}

TauPoint j_inverse_on_gamma(const Ball& v, const PrecisionBudget& budget) {
  if (v.certainly_negative()) throw DomainError("j takes only nonnegative values on the path");
  ensure_monotone();

  const double vd = std::max(0.0, v.to_double());
  const Precision prec = budget.working_bits() + static_cast<long>(std::ceil(std::log2(std::max(1.0, vd)))) + 8;
  if (v.is_exact() && mpfr_zero_p(v.mid())) return {Ball(prec, 1L) / 2L, sqrt(Ball(prec, 3L)) / 2L};
  if (is_exact_value(v, 1728)) return {Ball(prec), Ball(prec, 1L)};

  const Piece piece = vd <= 1728.0 ? Piece::Arc : Piece::Segment;
  auto f = [&](const Ball& x) { return eval_j_ball(path_point(piece, x), prec) - CBall(v, Ball(prec)); };

  Ball lo = piece == Piece::Arc ? third_pi(prec).midpoint() : Ball(prec, 1L);
  Ball hi = piece == Piece::Arc ? half_pi(prec).midpoint() : Ball(prec, 2L);
  Ball flo = f(lo).re().midpoint();
  Ball fhi = f(hi).re().midpoint();
  if (piece == Piece::Segment) {
    while (!fhi.certainly_positive()) {
      lo = hi;
      flo = fhi;
      hi = hi * 2L;
      fhi = f(hi).re().midpoint();
      if (hi.to_double() > 1e9) throw BudgetExceeded("value too large to invert");
    }
  }

  const Mag target = budget.target_abs_error();
  int retained_lo = 0;
  int retained_hi = 0;
  const long max_iter = 8 * prec + 200;
  for (long iter = 0; iter < max_iter; ++iter) {
    Ball x(prec);
    const bool bisect = (iter % 4) == 3;
    if (!bisect && (fhi - flo).certainly_positive()) {
      x = ((lo * fhi - hi * flo) / (fhi - flo)).midpoint();
    }
    if (bisect || !(lo.certainly_less(x) && x.certainly_less(hi))) x = ((lo + hi) / 2L).midpoint();

    const CBall fx = f(x);
    if (abs(fx).abs_upper() <= target) return path_point(piece, x);
    if (fx.re().contains_zero() || target < fx.rad()) {
      throw BudgetExceeded("cannot certify |j(tau) - v| within the target at this precision");
    }
    if (fx.re().certainly_negative()) {
      lo = x;
      flo = fx.re().midpoint();
      retained_lo = 0;
      if (++retained_hi >= 2) fhi = fhi / 2L;
    } else {
      hi = x;
      fhi = fx.re().midpoint();
      retained_hi = 0;
      if (++retained_lo >= 2) flo = flo / 2L;
    }
  }
  throw BudgetExceeded("j inversion did not converge");
}

}  // namespace modpoly::modfunc
