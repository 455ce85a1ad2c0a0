#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "modpoly/errors.hpp"
#include "modpoly/modfunc.hpp"

using namespace modpoly;
using namespace modpoly::modfunc;

namespace {

// |z - w| <= tol, with both enclosures' radii counted against z.
bool close(const CBall& z, const CBall& w, double tol) {
  const Ball d = abs(z - w);
  return d.upper_double() <= tol;
}

bool close_real(const CBall& z, const mpz_class& v, double tol) {
  const Precision p = z.prec();
  return close(z, CBall(Ball(p, v), Ball(p, 0L)), tol);
}

// Delta(i) = Gamma(1/4)^24 / (2^24 pi^18), evaluated directly with MPFR.
double delta_i_oracle(mpfr_prec_t prec, mpfr_t out) {
  mpfr_t g, pi;
  mpfr_inits2(prec, g, pi, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_ui(g, 1, MPFR_RNDN);
  mpfr_div_ui(g, g, 4, MPFR_RNDN);
  mpfr_gamma(g, g, MPFR_RNDN);
  mpfr_pow_ui(g, g, 24, MPFR_RNDN);
  mpfr_const_pi(pi, MPFR_RNDN);
  mpfr_pow_ui(pi, pi, 18, MPFR_RNDN);
  mpfr_div(g, g, pi, MPFR_RNDN);
  mpfr_div_2ui(g, g, 24, MPFR_RNDN);
  mpfr_set(out, g, MPFR_RNDN);
  const double d = mpfr_get_d(g, MPFR_RNDN);
  mpfr_clears(g, pi, static_cast<mpfr_ptr>(nullptr));
  return d;
}

// re_num/re_den + i sqrt(disc)/im_den.
TauPoint cm_point(long re_num, long re_den, long disc, long im_den, Precision prec) {
  Ball im = sqrt(Ball(prec, disc)) / im_den;
  return {Ball(prec, mpq_class(re_num, re_den)), im};
}

SL2Matrix random_sl2(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dist(-10, 10);
  while (true) {
    const long c = dist(rng), d = dist(rng);
    if (std::gcd(c, d) != 1) continue;
    // Solve a d - b c = 1 with small a, b.
    for (long a = -10; a <= 10; ++a) {
      for (long b = -10; b <= 10; ++b) {
        if (a * d - b * c == 1) return {a, b, c, d};
      }
    }
  }
}

}  // namespace

TEST_CASE("TauPoint requires Im > 0") {
  CHECK_THROWS_AS(TauPoint::from_doubles(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(TauPoint::from_doubles(0.3, -1.0), DomainError);
  Ball im(64, 0L);
  im.add_error(Mag::pow2(-10));
  CHECK_THROWS_AS(TauPoint(Ball(64, 0L), im), DomainError);
  CHECK_NOTHROW(TauPoint::from_decimal("0.1", "1e-5", 128));
}

TEST_CASE("PrecisionBudget") {
  const auto b = PrecisionBudget::for_target_bits(100);
  CHECK(b.working_bits() == 228);
  CHECK(b.target_bits() == 100);
  CHECK(b.series_terms() > 0);
  CHECK(PrecisionBudget::for_digits(50).target_bits() >= 166);
  CHECK(b.doubled().working_bits() == 456);
}

TEST_CASE("Delta at i against the Gamma-function closed form") {
  const auto budget = PrecisionBudget::for_target_bits(200);
  const CBall d = eval_delta(TauPoint::from_doubles(0.0, 1.0, 400), budget);
  mpfr_t oracle;
  mpfr_init2(oracle, 400);
  const double approx = delta_i_oracle(400, oracle);
  {
    mpfr_t diff;
    mpfr_init2(diff, 400);
    mpfr_sub(diff, d.re().mid(), oracle, MPFR_RNDN);
    CHECK(std::abs(mpfr_get_d(diff, MPFR_RNDN)) < 1e-100);
    mpfr_clear(diff);
  }
  mpfr_clear(oracle);
  CHECK(std::abs(approx - 1.78537e-3) < 1e-8);
  CHECK(d.im().contains_zero());
  CHECK(d.re().certainly_positive());
}

TEST_CASE("Delta far up the imaginary axis is dominated by q") {
  const auto budget = PrecisionBudget::for_target_bits(400);
  const Precision p = budget.working_bits();
  const CBall d = eval_delta(TauPoint(Ball(p, 0L), Ball(p, 10L)), budget);
  Ball q = Ball::pi(p) * -20L;
  q = exp(q);
  const Ball rel = abs(d.re() / q - 1L);
  CHECK(rel.upper_double() < 1e-20);
}

TEST_CASE("Delta and j are invariant under translation") {
  const auto budget = PrecisionBudget::for_target_bits(150);
  const Precision p = budget.working_bits();
  const TauPoint t = TauPoint::from_decimal("0.123", "0.91", p);
  const TauPoint t1(t.re() + 1L, t.im());
  CHECK(close(eval_delta(t, budget), eval_delta(t1, budget), std::ldexp(1.0, -148)));
  CHECK(close(eval_j(t, budget), eval_j(t1, budget), std::ldexp(1.0, -148)));
}

TEST_CASE("j at CM points") {
  const auto budget = PrecisionBudget::for_target_bits(100);
  const Precision p = budget.working_bits();
  const double tol = std::ldexp(1.0, -100);
  CHECK(close_real(eval_j(TauPoint(Ball(p, 0L), Ball(p, 1L)), budget), 1728, tol));
  CHECK(close_real(eval_j(cm_point(1, 2, 3, 2, p), budget), 0, tol));
  CHECK(close_real(eval_j(cm_point(0, 1, 2, 1, p), budget), 8000, tol));
  CHECK(close_real(eval_j(TauPoint(Ball(p, 0L), Ball(p, 2L)), budget), 287496, tol));
  CHECK(close_real(eval_j(cm_point(0, 1, 3, 1, p), budget), 54000, tol));
  CHECK(close_real(eval_j(cm_point(1, 2, 7, 2, p), budget), -3375, tol));
  CHECK(close_real(eval_j(cm_point(1, 2, 11, 2, p), budget), -32768, tol));
  const mpz_class j163 = -mpz_class(640320) * 640320 * 640320;
  CHECK(close_real(eval_j(cm_point(1, 2, 163, 2, p), budget), j163, tol));
}

TEST_CASE("j at 3i exceeds e^{6 pi} + 700") {
  const auto budget = PrecisionBudget::for_target_bits(80);
  const Precision p = budget.working_bits();
  const CBall j = eval_j(TauPoint(Ball(p, 0L), Ball(p, 3L)), budget);
  CHECK(j.im().contains_zero());
  const Ball floor = exp(Ball::pi(p) * 6L) + 700L;
  CHECK(floor.certainly_less(j.re()));
}

TEST_CASE("eta quotient agrees with E4^3 / Delta") {
  const auto budget = PrecisionBudget::for_target_bits(120);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.87, 2.5);
  for (int k = 0; k < 20; ++k) {
    const TauPoint t = TauPoint::from_doubles(re(rng), im(rng), budget.working_bits());
    CHECK(close(eval_j(t, budget), eval_j_eta_quotient(t, budget), std::ldexp(1.0, -118)));
  }
}

TEST_CASE("reduction examples") {
  const auto budget = PrecisionBudget::for_target_bits(100);
  const Precision p = budget.working_bits();
  {
    const auto r = reduce_to_fundamental_domain(TauPoint(Ball(p, 5L), Ball(p, 1L)), budget);
    CHECK(r.transform == SL2Matrix{1, -5, 0, 1});
    CHECK(r.tau_tilde.re().contains_zero());
    CHECK((r.tau_tilde.im() - 1L).contains_zero());
  }
  {
    const auto r = reduce_to_fundamental_domain(TauPoint(Ball(p, 0L), Ball(p, mpq_class(1, 4))), budget);
    CHECK(r.tau_tilde.re().contains_zero());
    CHECK((r.tau_tilde.im() - 4L).contains_zero());
    CHECK(r.transform.c != 0);
  }
  {
    const auto r =
        reduce_to_fundamental_domain(TauPoint(Ball(p, mpq_class(1, 2)), Ball(p, mpq_class(1, 2))), budget);
    CHECK(r.tau_tilde.re().contains_zero());
    CHECK((r.tau_tilde.im() - 1L).contains_zero());
  }
}

TEST_CASE("reduction terminates just past the right edge") {
  const auto budget = PrecisionBudget::for_target_bits(100);
  const Precision p = budget.working_bits();
  const Ball x = Ball(p, mpq_class(1, 2)) + Ball(p, mpq_class(1, mpz_class(1) << 57));
  for (const BoundaryPolicy policy : {BoundaryPolicy::Tolerant, BoundaryPolicy::Strict}) {
    const auto r = reduce_to_fundamental_domain(TauPoint(x, Ball(p, 2L)), budget, policy);
    CHECK(r.transform == SL2Matrix{1, -1, 0, 1});
    CHECK(r.tau_tilde.re().certainly_negative());
  }
}

TEST_CASE("reduction properties on random points") {
  const auto budget = PrecisionBudget::for_target_bits(100);
  const Precision p = budget.working_bits();
  const Ball half_sqrt3 = sqrt(Ball(p, 3L)) / 2L;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> re(-30.0, 30.0), lim(-8.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const TauPoint t = TauPoint::from_doubles(re(rng), std::pow(10.0, lim(rng)), p);
    const auto r = reduce_to_fundamental_domain(t, budget, BoundaryPolicy::Tolerant);
    const TauPoint& u = r.tau_tilde;
    CHECK(!u.im().certainly_less(half_sqrt3));
    CHECK(!(norm(u.value()) - 1L).certainly_negative());
    CHECK(!(u.re() * 2L + 1L).certainly_negative());
    CHECK(!(Ball(p, 1L) - u.re() * 2L).certainly_negative());
    const auto& g = r.transform;
    CHECK(g.a * g.d - g.b * g.c == 1);
    const TauPoint back = apply(g, t);
    CHECK(back.re().overlaps(u.re()));
    CHECK(back.im().overlaps(u.im()));
    const auto again = reduce_to_fundamental_domain(u, budget, BoundaryPolicy::Tolerant);
    CHECK(again.transform.is_identity());
  }
}

TEST_CASE("strict reduction refuses uncertain boundary points") {
  const auto budget = PrecisionBudget::for_target_bits(64);
  Ball re(192, mpq_class(1, 2));
  re.add_error(Mag::pow2(-100));
  const TauPoint t(re, Ball(192, 2L));
  CHECK_THROWS_AS(reduce_to_fundamental_domain(t, budget), BudgetExceeded);
  CHECK_NOTHROW(reduce_to_fundamental_domain(t, budget, BoundaryPolicy::Tolerant));
}

TEST_CASE("j invariance under random SL2(Z) at 50 digits") {
  const auto budget = PrecisionBudget::for_digits(50);
  const Precision p = budget.working_bits();
  const double tol = 2 * budget.target_abs_error().to_double();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.9, 2.0);
  for (int k = 0; k < 40; ++k) {
    const TauPoint t = TauPoint::from_doubles(re(rng), im(rng), p);
    const SL2Matrix g = random_sl2(rng);
    const TauPoint gt = apply(g, t);
    const CBall j0 = eval_j(t, budget);
    const CBall j1 = eval_j(gt, budget);
    CHECK(close(j0, j1, tol));
  }
}

TEST_CASE("weight-12 law for Delta") {
  const auto budget = PrecisionBudget::for_target_bits(200);
  const Precision p = budget.working_bits();
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> re(-0.5, 0.5), im(0.9, 1.6);
  for (int k = 0; k < 25; ++k) {
    const TauPoint t = TauPoint::from_doubles(re(rng), im(rng), p);
    const SL2Matrix g = random_sl2(rng);
    const CBall lhs = eval_delta(apply(g, t), budget);
    const CBall rhs = pow(automorphy_factor(g, t), 12) * eval_delta(t, budget);
    const Ball rel = abs(lhs - rhs) / abs(rhs);
    CHECK(rel.upper_double() < 1e-40);
  }
}

TEST_CASE("unreduced Delta matches reduced evaluation") {
  const auto budget = PrecisionBudget::for_target_bits(150);
  const Precision p = budget.working_bits();
  const TauPoint t = TauPoint::from_decimal("0.31", "0.4", p);
  const CBall a = eval_delta_unreduced(t, p);
  const CBall b = eval_delta(t, budget);
  CHECK((abs(a - b) / abs(b)).upper_double() < 1e-35);
}

TEST_CASE("inverse of j along the path") {
  const auto budget = PrecisionBudget::for_target_bits(100);
  const Precision p = budget.working_bits();
  {
    const TauPoint t = j_inverse_on_gamma(0.0, budget);
    CHECK((t.re() * 2L - 1L).contains_zero());
    CHECK((sqr(t.im()) * 4L - 3L).contains_zero());
  }
  {
    const TauPoint t = j_inverse_on_gamma(1728.0, budget);
    CHECK(t.re().contains_zero());
    CHECK((t.im() - 1L).contains_zero());
  }
  // e^{1.257 i} is the preimage of 2L = 332.96, not of L = 166.48.
  for (const auto& [v, theta_expected] : {std::pair{166.48, 1.2098}, std::pair{332.96, 1.257}}) {
    const TauPoint t = j_inverse_on_gamma(v, budget);
    const double theta = std::atan2(t.im().to_double(), t.re().to_double());
    CHECK(std::abs(theta - theta_expected) < 5e-4);
    CHECK((norm(t.value()) - 1L).abs_upper().to_double() < 1e-25);
  }
  for (double v : {1.0, 100.0, 332.96, 1000.0, 1727.0, 1729.0, 5000.0, 1e6}) {
    const Ball vb(p, v);
    const TauPoint t = j_inverse_on_gamma(vb, budget);
    const CBall j = eval_j(t, budget);
    const double err = abs(j - CBall(vb, Ball(p, 0L))).upper_double();
    CHECK(err <= std::ldexp(1.0, -98));
    if (v > 1728) CHECK(t.re().contains_zero());
  }
  CHECK_THROWS_AS(j_inverse_on_gamma(-1.0, budget), DomainError);
}

TEST_CASE("j is monotone along both pieces of the path") {
  CHECK(check_gamma_monotone(1000, PrecisionBudget::for_target_bits(64)));
}
