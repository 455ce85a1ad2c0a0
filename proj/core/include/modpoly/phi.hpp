#pragma once

// Classical modular polynomials Phi_N(X, Y) by evaluation and interpolation:
// for nodes tau_k the polynomial Phi_N(X, j(tau_k)) = prod_{gamma in C_N}
// (X - j(gamma tau_k)) is expanded numerically, each X-coefficient is then
// interpolated in Y through the values j(tau_k), and every result is rounded
// to an integer with a certified margin.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "modpoly/arith.hpp"
#include "modpoly/modfunc.hpp"

namespace modpoly::phi {

using modfunc::PrecisionBudget;
using modfunc::TauPoint;

/// Sparse integer polynomial sum c_{ij} X^i Y^j. For N >= 2 only i >= j is
/// stored and coefficient(j, i) == coefficient(i, j) is implied; level 1
/// stores X - Y literally.
class BivariatePoly {
 public:
  using Key = std::pair<unsigned, unsigned>;

  BivariatePoly() = default;
  explicit BivariatePoly(std::uint64_t n) : n_(n) {}
  /// X - Y.
  static BivariatePoly phi1();

  std::uint64_t n() const { return n_; }
  bool symmetric() const { return n_ >= 2; }

  /// Coefficient of X^i Y^j, including implied symmetric partners.
  mpz_class coefficient(unsigned i, unsigned j) const;
  /// Sets the coefficient of X^i Y^j (and of X^j Y^i when symmetric). Zero
  /// removes the entry.
  void set(unsigned i, unsigned j, const mpz_class& c);
  /// Stored entries: i >= j when symmetric.
  const std::map<Key, mpz_class>& stored() const { return coeffs_; }
  /// All nonzero coefficients with symmetric partners expanded.
  std::map<Key, mpz_class> expanded() const;
  unsigned degree_x() const;

  /// Degree psi(N) in X, monic in X. Throws ConsistencyError otherwise.
  void validate() const;

  friend bool operator==(const BivariatePoly& a, const BivariatePoly& b) {
    return a.n_ == b.n_ && a.coeffs_ == b.coeffs_;
  }

 private:
  std::uint64_t n_ = 0;
  std::map<Key, mpz_class> coeffs_;
};

struct InterpolationPlan {
  std::uint64_t n;
  std::uint64_t psi;
  /// (2k+1)/(4(psi+1)) + i for k = 0..psi.
  std::vector<TauPoint> nodes;
  PrecisionBudget budget;
  /// Upper bound on the height of Phi_N used to size the precision.
  double height_cap;
  long slack_bits;
};

/// Working bits: ceil(height_cap / log 2) + psi ceil(log2(psi + 1)) + slack_bits.
InterpolationPlan plan(std::uint64_t n, long slack_bits = 64);

struct PhiResult {
  BivariatePoly poly;
  /// Largest distance to the rounded integer (real and imaginary part,
  /// radius included) over all coefficients of the successful attempt.
  double max_residual = 0.0;
  long slack_bits = 0;
  long working_bits = 0;
  int attempts = 0;
  /// log2 of the smallest |j(tau_k) - j(tau_l)|, a conditioning diagnostic.
  double min_log2_node_separation = 0.0;
};

/// Computes Phi_N, doubling the slack up to three times when a coefficient
/// cannot be rounded with certified residual below 1/4. Throws
/// PrecisionExhausted after the last retry.
PhiResult compute_phi(std::uint64_t n, long slack_bits = 64);
BivariatePoly phi_polynomial(std::uint64_t n, long slack_bits = 64);

/// log max |c|.
double height(const BivariatePoly& p);

struct BValues {
  double b_lambda;
  double b_kappa;
};

/// h = 6 psi (log N - 2 lambda_N + b_lambda) = 6 psi (log N - 2 kappa_N + b_kappa).
BValues b_values(std::uint64_t n, const BivariatePoly& p);

/// Coefficients in X of p(X, y), index = power of X.
std::vector<CBall> specialize(const BivariatePoly& p, const CBall& y, const PrecisionBudget& budget);
/// p(x, y).
CBall evaluate(const BivariatePoly& p, const CBall& x, const CBall& y, const PrecisionBudget& budget);

/// |Phi_N(j(gamma tau), j(tau))| / (1 + max |c|) for gamma = (a b; 0 d) in
/// C_N. Precision is chosen so the rounding error is around 2^-accuracy_bits
/// on this normalized scale.
Ball root_residual(const BivariatePoly& phi_n, std::uint64_t a, std::uint64_t b, std::uint64_t d,
                   const TauPoint& tau, long accuracy_bits);

/// Phi_p == (X^p - Y)(X - Y^p) mod p, coefficientwise.
bool kronecker_check(std::uint64_t p, const BivariatePoly& phi_p);

/// S_N(tau) + log binom(psi, floor(psi/2)) - h(Phi_N(X, j(tau))). Nonnegative
/// up to the ball radius.
Ball mahler_consistency(const BivariatePoly& phi_n, const TauPoint& tau, const PrecisionBudget& budget);

}  // namespace modpoly::phi
