#include "modpoly/bounds.hpp"

#include <cmath>
#include <numbers>
#include <limits>
#include <optional>

#include "modpoly/errors.hpp"
#include "modpoly/parallel.hpp"

namespace modpoly::bounds {

namespace {

using modfunc::BoundaryPolicy;
using ntheory::CycMatrix;

Ball decimal(Precision prec, const char* text) { return Ball::from_decimal(prec, text); }

Ball log_n(Precision prec, std::uint64_t n) { return log(Ball(prec, mpz_class(std::to_string(n)))); }

Ball log_max1(const Ball& x) { return log(max(Ball(x.prec(), 1L), x)); }

// gamma tau = (a tau + b) / d.
TauPoint cyc_apply(const CycMatrix& g, const TauPoint& tau, Precision prec) {
  const TauPoint t = tau.with_prec(std::max(prec, tau.prec()));
  const auto a = static_cast<long>(g.a);
  const auto b = static_cast<long>(g.b);
  const auto d = static_cast<long>(g.d);
  return {(t.re() * a + b) / d, t.im() * a / d};
}

double lower(const Ball& x) { return x.lower_double(); }

void require_n(std::uint64_t n, std::uint64_t min, const char* what) {
  if (n < min) throw DomainError(std::string(what) + " requires n >= " + std::to_string(min));
}

}  // namespace

// ------------------------------------------------------------------ constants

TauConstants tau_constants(const TauPoint& tau, const PrecisionBudget& budget) {
  const Precision prec = budget.working_bits();
  const Ball abs_delta = abs(modfunc::eval_delta(tau, budget));
  const Ball im6 = pow(tau.im().with_prec(prec), 6);
  Ball a = decimal(prec, "0.458") - log(abs_delta * im6) / 6L;
  Ball b = decimal(prec, "2.199") - log(abs_delta);
  return {tau, std::move(a), std::move(b)};
}

void BoundParams::validate() const {
  if (n0 < 3) throw DomainError("N0 must be at least 3");
  if (!(l > 1.0)) throw DomainError("L must exceed 1");
  if (max_iterations <= 0) throw DomainError("max_iterations must be positive");
  if (!(convergence_tol > 0.0)) throw DomainError("convergence_tol must be positive");
}

CSequence c_sequence(const BoundParams& params, const TauConstants& constants, const PrecisionBudget& budget,
                     int n_steps) {
  params.validate();
  if (n_steps < 0) throw DomainError("n_steps must be nonnegative");
  const Precision prec = budget.working_bits();
  const Ball ln0 = log_n(prec, params.n0);
  const Ball lln0 = log(ln0);
  const Ball base = constants.a + log(Ball(prec, 6L));

  CSequence out;
  Ball c = constants.a + log(constants.b / ln0 + 12L);
  out.values.push_back(c);
  Ball best = c;
  bool converged = false;
  for (int k = 1; !(converged && k > n_steps); ++k) {
    if (!converged && k > params.max_iterations) {
      throw NonConvergence("c-recursion did not reach tolerance within " + std::to_string(params.max_iterations) +
                           " iterations");
    }
    Ball next = base + log((lln0 + c) / ln0 + 1L);
    if (!converged && abs(next - c).upper_double() < params.convergence_tol) {
      converged = true;
      out.iterations = k;
    }
    best = min(best, next);
    if (k <= n_steps) out.values.push_back(next);
    c = std::move(next);
  }
  out.c_inf = std::move(best);
  return out;
}

CSequence c_sequence(const BoundParams& params, const TauPoint& tau, const PrecisionBudget& budget, int n_steps) {
  return c_sequence(params, tau_constants(tau, budget), budget, n_steps);
}

const char* to_string(TauConvention convention) {
  return convention == TauConvention::JEqualsL ? "j(tau)=L" : "j(tau)=2L";
}

ConstantResult theorem1_constant(const BoundParams& params, const PrecisionBudget& budget,
                                 TauConvention convention) {
  params.validate();
  const Precision prec = budget.working_bits();
  const double v = convention == TauConvention::JEqualsL ? params.l : 2.0 * params.l;
  const TauPoint tau = modfunc::j_inverse_on_gamma(Ball(prec, v), budget);
  TauConstants constants = tau_constants(tau, budget);
  CSequence seq = c_sequence(params, constants, budget, 0);
  const Ball l(prec, params.l);
  Ball interp = ((log(l) + 1L) / l + Ball::log2(prec) * 4L) / 6L;
  Ball value = seq.c_inf + interp;
  return {std::move(value), convention, std::move(constants), std::move(seq), std::move(interp)};
}

ConventionReport resolve_tau_convention(const PrecisionBudget& budget) {
  const BoundParams params;
  const double vl = theorem1_constant(params, budget, TauConvention::JEqualsL).value.to_double();
  const double v2l = theorem1_constant(params, budget, TauConvention::JEqualsTwoL).value.to_double();
  constexpr double kStated = 4.436;
  constexpr double kTol = 0.002;
  const double dl = std::fabs(vl - kStated);
  const double d2l = std::fabs(v2l - kStated);
  TauConvention adopted = d2l <= dl ? TauConvention::JEqualsTwoL : TauConvention::JEqualsL;
  if ((dl <= kTol) != (d2l <= kTol)) adopted = dl <= kTol ? TauConvention::JEqualsL : TauConvention::JEqualsTwoL;
  return {vl, v2l, adopted, std::min(dl, d2l) <= kTol};
}

OptimizeResult optimize_l(const BoundParams& params, double lo, double hi, const PrecisionBudget& budget,
                          TauConvention convention) {
  if (!(lo > 1.0) || !(hi >= lo)) throw DomainError("search interval must lie in (1, inf) with lo <= hi");
  auto objective = [&](double l) {
    BoundParams p = params;
    p.l = l;
    return theorem1_constant(p, budget, convention).value.to_double();
  };

  std::vector<double> grid;
  for (double x = lo; x < hi; x += 1.0) grid.push_back(x);
  grid.push_back(hi);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { values[i] = objective(grid[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;

  double a = best > 0 ? grid[best - 1] : grid[best];
  double b = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > 0.02) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = objective(x2);
    }
  }
  const double mid = (a + b) / 2.0;
  const double fmid = objective(mid);
  if (values[best] < fmid) return {grid[best], values[best]};
  return {mid, fmid};
}

// ------------------------------------------------------------------ closed forms

double theorem1_bound(std::uint64_t n) {
  require_n(n, 2, "theorem1_bound");
  const double ln = std::log(static_cast<double>(n));
  return 6.0 * static_cast<double>(ntheory::psi(n)) *
         (ln - 2.0 * ntheory::lambda_exact(n).to_double() + std::log(ln) + 4.436);
}

double brsu_bound(std::uint64_t l) {
  if (!ntheory::is_prime(l)) throw DomainError("brsu_bound requires a prime, got " + std::to_string(l));
  const double x = static_cast<double>(l);
  const double ll = std::log(x);
  return 6.0 * x * ll + 16.0 * x + 14.0 * std::sqrt(x) * ll;
}

double paz2019_bound(std::uint64_t n) {
  require_n(n, 1, "paz2019_bound");
  const double ln = std::log(static_cast<double>(n));
  const double p = static_cast<double>(ntheory::psi(n));
  const double lp = std::log(p);
  return p * (6.0 * ln + lp + 6.0 * std::log(12.0 * ln + 2.0 * lp + 25.2) + 15.7);
}

double cohen_main_term(std::uint64_t n) {
  require_n(n, 1, "cohen_main_term");
  return 6.0 * static_cast<double>(ntheory::psi(n)) *
         (std::log(static_cast<double>(n)) - 2.0 * ntheory::kappa_exact(n).to_double());
}

double limit_bound(std::uint64_t n0) {
  require_n(n0, 3, "limit_bound");
  const double l = std::log(static_cast<double>(n0));
  return 3.293 * l / (l - 1.0) + std::log(l) / (l - 1.0) + 0.46537;
}

BoundReport bound_report(std::uint64_t n) {
  require_n(n, 2, "bound_report");
  BoundReport r{n, theorem1_bound(n), std::nullopt, paz2019_bound(n), cohen_main_term(n), std::nullopt};
  if (ntheory::is_prime(n)) r.brsu = brsu_bound(n);
  if (n >= 3) {
    const double ln = std::log(static_cast<double>(n));
    r.limit_bound = 6.0 * static_cast<double>(ntheory::psi(n)) *
                    (ln - 2.0 * ntheory::lambda_exact(n).to_double() + std::log(ln) + limit_bound(n));
  }
  return r;
}

// ------------------------------------------------------------------ S_N and the proof chain

Ball compute_sn(std::uint64_t n, const TauPoint& tau, const PrecisionBudget& budget) {
  require_n(n, 1, "compute_sn");
  const Precision prec = budget.working_bits();
  const auto system = ntheory::enumerate_cn(n);
  std::vector<std::optional<Ball>> terms(system.matrices.size());
  parallel_for(terms.size(), [&](std::size_t i) {
    const CBall j = modfunc::eval_j_ball(cyc_apply(system.matrices[i], tau, prec), prec);
    terms[i] = log_max1(abs(j));
  });
  Ball sum(prec);
  for (const auto& t : terms) sum += *t;
  return sum;
}

GammaMargins gamma_margins(std::uint64_t n, const CycMatrix& gamma, const TauPoint& tau,
                           const PrecisionBudget& budget) {
  if (gamma.a * gamma.d != n) throw DomainError("matrix does not belong to C_N");
  const Precision prec = budget.working_bits();
  const TauPoint tg = cyc_apply(gamma, tau, prec);
  const auto rp = modfunc::reduce_to_fundamental_domain(tg, budget, BoundaryPolicy::Tolerant);
  // log(|j| + 970.8)/2pi - Im exceeds zero only by about 36|q|, so that
  // margin is evaluated with log2(1/|q|) extra bits.
  const Precision wide =
      prec + static_cast<Precision>(std::ceil(2.0 * std::numbers::pi * rp.tau_tilde.im().to_double() / std::log(2.0))) +
      32;
  const TauPoint tg_wide = cyc_apply(gamma, tau, wide);
  const auto rp_wide = modfunc::reduce_to_fundamental_domain(tg_wide, PrecisionBudget(wide, budget.target_bits()),
                                                             BoundaryPolicy::Tolerant);
  const Ball abs_j_wide = abs(modfunc::eval_j_ball(tg_wide, wide));
  Ball two_pi_wide = Ball::pi(wide);
  two_pi_wide.mul_2exp(1);
  const Ball abs_j = abs_j_wide.with_prec(prec);
  const Ball abs_dt = abs(modfunc::eval_delta_unreduced(rp.tau_tilde, prec));
  Ball two_pi = Ball::pi(prec);
  two_pi.mul_2exp(1);
  // With (A B; C D) the reducing transform, Im(reduced) <= N Im(tau) is
  // |m tau + k|^2 >= 1 for the integers m = C a, k = C b + D d. The slack
  // log|m tau + k|^2 is computed from tau directly so the equality cases
  // (C = 0, or tau on the unit circle) come out exactly zero.
  const auto& t = rp.transform;
  const mpz_class m = mpz_class(static_cast<long>(t.c)) * static_cast<unsigned long>(gamma.a);
  const mpz_class k = mpz_class(static_cast<long>(t.c)) * static_cast<unsigned long>(gamma.b) +
                      mpz_class(static_cast<long>(t.d)) * static_cast<unsigned long>(gamma.d);
  const Ball mb(prec, m);
  const CBall lin(tau.re() * mb + Ball(prec, k), tau.im() * mb);
  return {
      log(norm(lin)),
      (log(abs_j_wide + decimal(wide, "970.8")) / two_pi_wide - rp_wide.tau_tilde.im()).with_prec(prec),
      log(decimal(prec, "9.02")) - log(max(abs_dt, abs_j * abs_dt)),
  };
}

bool ProofChainReport::all_passed() const {
  for (const auto& c : clauses)
    if (!c.passed) return false;
  return true;
}

namespace {

struct GammaData {
  Ball log_im_gamma;
  Ball log_im_tilde;
  Ball log_abs_delta;
  CBall delta;
  Ball log_abs_delta_tilde;
  Ball log_max1_j;
  CBall j;
  Ball cim_residual;
  CBall weight12_residual;
  Ball im_scaling_residual;
  GammaMargins margins;
};

GammaData gamma_data(std::uint64_t n, const CycMatrix& g, const TauPoint& tau, const PrecisionBudget& budget) {
  const Precision prec = budget.working_bits();
  const TauPoint tg = cyc_apply(g, tau, prec);
  const auto rp = modfunc::reduce_to_fundamental_domain(tg, budget, BoundaryPolicy::Tolerant);
  const CBall cfac = modfunc::automorphy_factor(rp.transform, tg);
  const Ball log_im_gamma = log(tg.im());
  const Ball log_im_tilde = log(rp.tau_tilde.im());
  const CBall delta = modfunc::eval_delta_unreduced(tg, prec + 64).with_prec(prec);
  const CBall delta_tilde = modfunc::eval_delta_unreduced(rp.tau_tilde, prec);
  const CBall j = modfunc::eval_j_ball(tg, prec);

  const CBall tau_c = tau.with_prec(prec).value();
  CBall num = tau_c * static_cast<long>(g.a);
  num.re().add_si(static_cast<long>(g.b));
  const CBall w = num / CBall(prec, static_cast<long>(g.d));

  return {
      log_im_gamma,
      log_im_tilde,
      log(abs(delta)),
      delta,
      log(abs(delta_tilde)),
      log_max1(abs(j)),
      j,
      -log(abs(cfac)) - (log_im_tilde - log_im_gamma) / 2L,
      delta_tilde - pow(cfac, 12) * delta,
      w.im() * static_cast<long>(g.d) - tau.im().with_prec(prec) * static_cast<long>(g.a),
      gamma_margins(n, g, tau, budget),
  };
}

// Worst residual over a family of identities that must each enclose zero.
struct ResidualAcc {
  double worst = 0.0;
  bool all_zero = true;

  void add(const Ball& r) {
    worst = std::max(worst, r.abs_upper().to_double());
    all_zero = all_zero && r.contains_zero();
  }
  void add(const CBall& r) {
    add(r.re());
    add(r.im());
  }
};

struct ClauseBuilder {
  std::vector<ClauseResult>& out;

  void identity(const std::string& name, const ResidualAcc& acc) { out.push_back({name, true, acc.worst, acc.all_zero}); }
  void identity(const std::string& name, const Ball& residual) {
    ResidualAcc acc;
    acc.add(residual);
    identity(name, acc);
  }
  void inequality(const std::string& name, const Ball& slack) {
    const double v = lower(slack);
    out.push_back({name, false, v, slack.certainly_nonnegative()});
  }
};

// log binom(n, floor(n/2)), enclosed.
Ball log_central_binomial(std::uint64_t n, Precision prec) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, n / 2);
  return log(Ball(prec, c));
}

}  // namespace

ProofChainReport verify_proof_chain(std::uint64_t n, const TauPoint& tau, const PrecisionBudget& budget,
                                    bool throw_on_violation) {
  require_n(n, 1, "verify_proof_chain");
  const Precision prec = budget.working_bits();
  if (!modfunc::reduce_to_fundamental_domain(tau, budget, BoundaryPolicy::Tolerant).transform.is_identity()) {
    throw DomainError("verify_proof_chain requires a reduced tau");
  }
  const auto system = ntheory::enumerate_cn(n);
  const std::uint64_t psi = ntheory::psi(n);
  const auto psi_l = static_cast<long>(psi);

  std::vector<std::optional<GammaData>> data(system.matrices.size());
  parallel_for(data.size(), [&](std::size_t i) { data[i] = gamma_data(n, system.matrices[i], tau, budget); });

  ProofChainReport report{n, {}};
  ClauseBuilder add{report.clauses};

  const Ball im = tau.im().with_prec(prec);
  const Ball log_im = log(im);
  const CBall delta = modfunc::eval_delta_unreduced(tau, prec + 64).with_prec(prec);
  const Ball log_abs_delta = log(abs(delta));
  const Ball log_delta_im6 = log_abs_delta + log_im * 6L;
  const Ball ln = log_n(prec, n);
  const Ball lambda = ntheory::lambda_exact(n).evaluate(prec);

  Ball sn(prec);
  Ball sum_log_delta(prec);
  Ball sum_log_im_gamma(prec);
  Ball sum_log_im_tilde(prec);
  CBall product(prec, 1L);
  ResidualAcc cim, cdelta, scaling, w12;
  std::optional<Ball> ail, paz_im, paz_delta;
  for (const auto& d : data) {
    sn += d->log_max1_j;
    sum_log_delta += d->log_abs_delta;
    sum_log_im_gamma += d->log_im_gamma;
    sum_log_im_tilde += d->log_im_tilde;
    product *= d->delta;
    cim.add(d->cim_residual);
    cdelta.add(d->log_abs_delta - (d->log_abs_delta_tilde + (d->log_im_tilde - d->log_im_gamma) * 6L));
    scaling.add(d->im_scaling_residual);
    w12.add(d->weight12_residual);
    ail = ail ? min(*ail, d->margins.ail) : d->margins.ail;
    paz_im = paz_im ? min(*paz_im, d->margins.paz_im) : d->margins.paz_im;
    paz_delta = paz_delta ? min(*paz_delta, d->margins.paz_delta) : d->margins.paz_delta;
  }

  add.identity("Im-scaling", scaling);
  add.identity("cIm", cim);
  add.identity("weight-12", w12);
  add.identity("cDelta", cdelta);

  // Product identity: prod Delta(gamma tau) = (-Delta(tau))^psi, to relative error 1e-30.
  {
    const CBall target = pow(-delta, psi);
    const Ball rel = abs(product - target) / abs(target);
    const double v = rel.upper_double();
    report.clauses.push_back({"delta-product", true, v, v <= 1e-30});
  }
  add.identity("delta-product-log", sum_log_delta - log_abs_delta * psi_l);
  {
    const bool exact = ntheory::sum_log_d_over_a(system) ==
                       (ntheory::LogCombo::log_of(n) - ntheory::lambda_exact(n) * mpq_class(2)) * mpq_class(psi_l);
    report.clauses.push_back({"im-sum-exact", true, exact ? 0.0 : 1.0, exact});
  }
  add.identity("im-sum", -sum_log_im_gamma - (ln - lambda * 2L - log_im) * psi_l);

  add.inequality("im-growth", *ail);
  add.inequality("im-vs-log-j", *paz_im);
  add.inequality("delta-vs-j", *paz_delta);

  // Height of Phi_N(X, j(tau)) = prod (X - j_gamma) against its Mahler measure.
  {
    std::vector<CBall> coeffs{CBall(prec, 1L)};
    for (const auto& d : data) {
      std::vector<CBall> next(coeffs.size() + 1, CBall(prec));
      for (std::size_t k = 0; k < coeffs.size(); ++k) {
        next[k + 1] += coeffs[k];
        next[k] -= coeffs[k] * d->j;
      }
      coeffs = std::move(next);
    }
    Ball hmax(prec, 1L);
    for (const auto& c : coeffs) hmax = max(hmax, abs(c));
    const Ball h = log(hmax);
    add.inequality("mahler", sn + log_central_binomial(psi, prec) - h);
    add.inequality("mahler-psi-log2", sn + Ball::log2(prec) * psi_l - h);
  }

  add.inequality("halfway", (ln - lambda * 2L + decimal(prec, "0.367")) * (6 * psi_l) + sum_log_im_tilde * 6L -
                                log_delta_im6 * psi_l - sn);
  add.inequality("crude", (ln * 12L + decimal(prec, "2.199") - log_abs_delta) * psi_l - sn);
  if (sn.certainly_positive()) {
    const Ball rhs = (ln - lambda * 2L + log(sn / psi_l) + decimal(prec, "0.458")) * (6 * psi_l) -
                     log_delta_im6 * psi_l;
    add.inequality("sn-average", rhs - sn);
  } else {
    report.clauses.push_back({"sn-average", false, -std::numeric_limits<double>::infinity(), false});
  }

  if (n > 3) {
    BoundParams params;
    params.n0 = n - 1;
    const TauConstants constants{tau, decimal(prec, "0.458") - log_delta_im6 / 6L,
                                 decimal(prec, "2.199") - log_abs_delta};
    const CSequence seq = c_sequence(params, constants, budget, 10);
    const Ball base = (ln - lambda * 2L + log(ln)) * (6 * psi_l);
    std::optional<Ball> worst;
    for (const auto& c : seq.values) {
      const Ball slack = base + c * (6 * psi_l) - sn;
      worst = worst ? min(*worst, slack) : slack;
    }
    add.inequality("induction", *worst);
  }

  if (throw_on_violation) {
    for (const auto& c : report.clauses)
      if (!c.passed) throw ViolationFound(c.clause, c.value);
  }
  return report;
}

}  // namespace modpoly::bounds
