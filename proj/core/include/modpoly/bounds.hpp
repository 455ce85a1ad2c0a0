#pragma once

// Explicit height bounds for modular polynomials and numerical checks of the
// analytic inequalities they rest on.
//
// Notation: a(tau), b(tau) and the recursion c_n(tau) bound
// S_N(tau) = sum_{gamma in C_N} log max(1, |j(gamma tau)|) via
//   S_N(tau) <= 6 psi(N) [log N - 2 lambda_N + log log N + c_n(tau)]  (N > N0),
// and the interpolation step adds psi(N) ((log L + 1)/L + 4 log 2).

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modpoly/arith.hpp"
#include "modpoly/modfunc.hpp"
#include "modpoly/ntheory.hpp"

namespace modpoly::bounds {

using modfunc::PrecisionBudget;
using modfunc::TauPoint;

struct TauConstants {
  TauPoint tau;
  /// 0.458 - log(|Delta(tau)| Im(tau)^6) / 6
  Ball a;
  /// 2.199 - log|Delta(tau)|
  Ball b;
};

TauConstants tau_constants(const TauPoint& tau, const PrecisionBudget& budget);

struct BoundParams {
  std::uint64_t n0 = 400;
  double l = 166.48;
  int max_iterations = 100;
  double convergence_tol = 1e-6;

  /// Throws DomainError unless n0 >= 3, l > 1 and the limits are positive.
  void validate() const;
};

struct CSequence {
  /// c_0 .. c_{n_steps}.
  std::vector<Ball> values;
  /// Minimum over the computed prefix, taken once successive terms differ by
  /// less than the tolerance.
  Ball c_inf;
  /// Number of recursion steps taken to reach the tolerance.
  int iterations = 0;
};

/// c_0 = a + log(12 + b / log N0), c_{n+1} = a + log 6 + log(1 + (log log N0 + c_n) / log N0).
/// Throws NonConvergence if max_iterations steps do not reach the tolerance.
CSequence c_sequence(const BoundParams& params, const TauConstants& constants, const PrecisionBudget& budget,
                     int n_steps);
CSequence c_sequence(const BoundParams& params, const TauPoint& tau, const PrecisionBudget& budget, int n_steps);

/// Which point of the real path the constant is evaluated at.
enum class TauConvention {
  /// j(tau) = L
  JEqualsL,
  /// j(tau) = 2L, the upper end of the interpolation interval
  JEqualsTwoL,
};

const char* to_string(TauConvention convention);

struct ConstantResult {
  Ball value;
  TauConvention convention;
  TauConstants constants;
  CSequence sequence;
  /// ((log L + 1)/L + 4 log 2) / 6
  Ball interpolation_term;
};

/// c_inf(tau_L) + ((log L + 1)/L + 4 log 2)/6.
ConstantResult theorem1_constant(const BoundParams& params, const PrecisionBudget& budget,
                                 TauConvention convention = TauConvention::JEqualsTwoL);

struct ConventionReport {
  double value_l;
  double value_two_l;
  TauConvention adopted;
  /// Whether the adopted value lies within 0.002 of 4.436.
  bool within_tolerance;
};

/// Evaluates the N0 = 400, L = 166.48 constant under both conventions and
/// adopts the one matching 4.436 within 0.002, else the closer one.
ConventionReport resolve_tau_convention(const PrecisionBudget& budget);

struct OptimizeResult {
  double l;
  double constant;
};

/// Unit-step grid over [lo, hi], then golden-section refinement to +-0.01
/// around the best grid point.
OptimizeResult optimize_l(const BoundParams& params, double lo, double hi, const PrecisionBudget& budget,
                          TauConvention convention = TauConvention::JEqualsTwoL);

/// 6 psi(n) [log n - 2 lambda_n + log log n + 4.436]; n >= 2.
double theorem1_bound(std::uint64_t n);
/// 6 l log l + 16 l + 14 sqrt(l) log l; l prime.
double brsu_bound(std::uint64_t l);
/// psi [6 log N + log psi + 6 log(12 log N + 2 log psi + 25.2) + 15.7].
double paz2019_bound(std::uint64_t n);
/// 6 psi(n) (log n - 2 kappa_n), the main term of the asymptotic.
double cohen_main_term(std::uint64_t n);
/// 3.293 l/(l-1) + log(l)/(l-1) + 0.46537 with l = log n0; n0 >= 3.
double limit_bound(std::uint64_t n0);

struct BoundReport {
  std::uint64_t n;
  double theorem1;
  std::optional<double> brsu;
  double paz2019;
  double cohen_main_term;
  /// 6 psi(n) [log n - 2 lambda_n + log log n + limit_bound(n)], the bound
  /// valid for N >= N0 taken with N0 = n; present for n >= 3.
  std::optional<double> limit_bound;
};

BoundReport bound_report(std::uint64_t n);

/// S_N(tau), summed in C_N enumeration order.
Ball compute_sn(std::uint64_t n, const TauPoint& tau, const PrecisionBudget& budget);

/// Per-matrix estimates that hold for tau in F.
struct GammaMargins {
  /// log N - (log Im(reduced gamma tau) - log Im(tau))
  Ball ail;
  /// log(|j| + 970.8) / 2 pi - Im(reduced gamma tau)
  Ball paz_im;
  /// log 9.02 - log max(|Delta~|, |j Delta~|)
  Ball paz_delta;
};

GammaMargins gamma_margins(std::uint64_t n, const ntheory::CycMatrix& gamma, const TauPoint& tau,
                           const PrecisionBudget& budget);

struct ClauseResult {
  std::string clause;
  /// Identities report a certified upper bound on the residual (relative for
  /// the product identity); inequalities a certified lower bound on the slack.
  bool identity;
  double value;
  bool passed;
};

struct ProofChainReport {
  std::uint64_t n;
  std::vector<ClauseResult> clauses;
  bool all_passed() const;
};

/// Checks every identity and inequality of the argument at a reduced tau.
/// Throws ViolationFound for the first failing clause when throw_on_violation.
ProofChainReport verify_proof_chain(std::uint64_t n, const TauPoint& tau, const PrecisionBudget& budget,
                                    bool throw_on_violation = true);

}  // namespace modpoly::bounds
