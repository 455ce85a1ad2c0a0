#pragma once

// Exact integer and rational number theory: factorization, Dedekind psi,
// the prime sums lambda_N and kappa_N, and the matrix set C_N of cyclic
// N-isogenies.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <vector>

#include "modpoly/arith.hpp"

namespace modpoly::ntheory {

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod p^e with primes strictly increasing.
struct Factorization {
  std::uint64_t n = 1;
  std::vector<PrimePower> factors;
};

Factorization factorize(std::uint64_t n);
bool is_prime(std::uint64_t n);

/// psi(n) = n prod_{p | n} (1 + 1/p).
std::uint64_t psi(std::uint64_t n);

/// Exact linear combination sum_p r_p log p with rational r_p. Zero
/// coefficients are never stored, so structural equality is value equality.
class LogCombo {
 public:
  LogCombo() = default;

  /// log n as a combination of log p.
  static LogCombo log_of(std::uint64_t n);

  void add(std::uint64_t prime, const mpq_class& coeff);
  const std::map<std::uint64_t, mpq_class>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  mpq_class coefficient(std::uint64_t prime) const;

  LogCombo& operator+=(const LogCombo& other);
  LogCombo& operator-=(const LogCombo& other);
  LogCombo& operator*=(const mpq_class& k);
  friend LogCombo operator+(LogCombo a, const LogCombo& b) { return a += b; }
  friend LogCombo operator-(LogCombo a, const LogCombo& b) { return a -= b; }
  friend LogCombo operator*(LogCombo a, const mpq_class& k) { return a *= k; }
  friend LogCombo operator*(const mpq_class& k, LogCombo a) { return a *= k; }
  friend bool operator==(const LogCombo& a, const LogCombo& b) { return a.terms_ == b.terms_; }

  /// Certified enclosure of the value at the given precision.
  Ball evaluate(Precision prec) const;
  double to_double() const;

 private:
  std::map<std::uint64_t, mpq_class> terms_;
};

/// lambda_N = sum_{p^e || N} (p^e - 1) / (p^{e-1} (p^2 - 1)) log p.
LogCombo lambda_exact(std::uint64_t n);
/// kappa_N = sum_{p | N} log p / p.
LogCombo kappa_exact(std::uint64_t n);

/// Upper-triangular matrix (a b; 0 d) with ad = N, 0 <= b < d, gcd(a,b,d) = 1.
struct CycMatrix {
  std::uint64_t a;
  std::uint64_t b;
  std::uint64_t d;
  friend auto operator<=>(const CycMatrix&, const CycMatrix&) = default;
};

struct CycSystem {
  std::uint64_t n = 1;
  std::vector<CycMatrix> matrices;
};

/// All of C_N, ordered lexicographically in (a, b).
CycSystem enumerate_cn(std::uint64_t n);

/// sum over C_N of log(d/a), exactly.
LogCombo sum_log_d_over_a(const CycSystem& system);

}  // namespace modpoly::ntheory
