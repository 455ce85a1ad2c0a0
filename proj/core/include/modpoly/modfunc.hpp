#pragma once

// Certified evaluation of the discriminant Delta and the j-invariant on the
// upper half-plane, reduction to the standard fundamental domain, and the
// inverse of j along the real-valued path (unit arc from e^{i pi/3} to i,
// then the imaginary axis upward).
//
// Delta is normalized as q prod (1 - q^n)^24, i.e. without the (2 pi)^12
// factor of the elliptic-curve discriminant.

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "modpoly/arith.hpp"

namespace modpoly::modfunc {

/// A point of the upper half-plane. Construction checks Im > 0.
class TauPoint {
 public:
  TauPoint(Ball re, Ball im);
  static TauPoint from_doubles(double re, double im, Precision prec = 128);
  static TauPoint from_decimal(std::string_view re, std::string_view im, Precision prec);

  const Ball& re() const { return re_; }
  const Ball& im() const { return im_; }
  CBall value() const { return {re_, im_}; }
  Precision prec() const { return std::max(re_.prec(), im_.prec()); }
  TauPoint with_prec(Precision prec) const { return {re_.with_prec(prec), im_.with_prec(prec)}; }

 private:
  Ball re_;
  Ball im_;
};

/// Working precision plus an absolute accuracy contract of 2^-target_bits.
/// Immutable; safe to share between threads.
class PrecisionBudget {
 public:
  PrecisionBudget(long working_bits, long target_bits);
  /// Default policy: 128 guard bits above the target.
  static PrecisionBudget for_target_bits(long target_bits);
  static PrecisionBudget for_digits(long digits);

  long working_bits() const { return working_bits_; }
  long target_bits() const { return target_bits_; }
  Mag target_abs_error() const { return Mag::pow2(-target_bits_); }
  /// Upper bound on q-series length at any reduced point under this budget.
  long series_terms() const { return series_terms_; }
  PrecisionBudget doubled() const { return {2 * working_bits_, 2 * target_bits_}; }

 private:
  long working_bits_;
  long target_bits_;
  long series_terms_;
};

/// Integer matrix (a b; c d) with determinant 1.
struct SL2Matrix {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 1;
  friend bool operator==(const SL2Matrix&, const SL2Matrix&) = default;
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
};

/// (a tau + b) / (c tau + d).
TauPoint apply(const SL2Matrix& g, const TauPoint& tau);
/// c tau + d.
CBall automorphy_factor(const SL2Matrix& g, const TauPoint& tau);

struct ReducedPair {
  TauPoint tau_tilde;
  SL2Matrix transform;
};

/// How reduction treats a point whose ball straddles the boundary of F.
enum class BoundaryPolicy {
  /// Throw BudgetExceeded; the caller should retry at higher precision.
  Strict,
  /// Accept either representative. j, |Delta| Im^6 and similar invariants do
  /// not depend on the choice.
  Tolerant,
};

/// Gauss reduction into F = { |tau| >= 1, -1/2 < Re tau <= 1/2, Re tau >= 0
/// when |tau| = 1 }. The returned transform is exact.
ReducedPair reduce_to_fundamental_domain(const TauPoint& tau, const PrecisionBudget& budget,
                                         BoundaryPolicy policy = BoundaryPolicy::Strict);

/// Delta(tau) within budget.target_abs_error(); reduces first.
CBall eval_delta(const TauPoint& tau, const PrecisionBudget& budget);
/// j(tau) = E4^3 / Delta at the reduced point, within budget.target_abs_error().
CBall eval_j(const TauPoint& tau, const PrecisionBudget& budget);
/// j via the level-2 eta quotient t = Delta(2 tau) / Delta(tau):
/// j = (1 + 256 t)^3 / t. An independent route used to cross-check eval_j.
CBall eval_j_eta_quotient(const TauPoint& tau, const PrecisionBudget& budget);

/// Unchecked j: reduces tolerantly and evaluates with working_bits of relative
/// precision (plus the bits needed for |j|). The returned ball is still a
/// certified enclosure; only the accuracy contract is not enforced.
CBall eval_j_ball(const TauPoint& tau, Precision working_bits);
/// Delta from its q-product at tau itself, without reduction. Requires
/// |q| < 1; cost grows like 1/Im(tau).
CBall eval_delta_unreduced(const TauPoint& tau, Precision prec);

/// The point of the path on which j is real and nonnegative with j(tau) = v.
TauPoint j_inverse_on_gamma(const Ball& v, const PrecisionBudget& budget);
TauPoint j_inverse_on_gamma(double v, const PrecisionBudget& budget);

/// Samples j at evenly spaced points along both pieces of the path and checks
/// that consecutive values are certifiably increasing.
bool check_gamma_monotone(std::size_t samples_per_piece, const PrecisionBudget& budget);

}  // namespace modpoly::modfunc
