#include "modpoly/ntheory.hpp"

#include <numeric>

#include "modpoly/errors.hpp"

namespace modpoly::ntheory {

Factorization factorize(std::uint64_t n) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  Factorization f;
  f.n = n;
  std::uint64_t m = n;
  auto strip = [&](std::uint64_t p) {
    unsigned e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e > 0) f.factors.push_back({p, e});
  };
  strip(2);
  for (std::uint64_t p = 3; p <= m / p; p += 2) strip(p);
  if (m > 1) f.factors.push_back({m, 1});
  return f;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  const auto f = factorize(n);
  return f.factors.size() == 1 && f.factors[0].exponent == 1;
}

std::uint64_t psi(std::uint64_t n) {
  std::uint64_t r = n;
  for (const auto& [p, e] : factorize(n).factors) r = r / p * (p + 1);
  return r;
}

// ------------------------------------------------------------------ LogCombo

LogCombo LogCombo::log_of(std::uint64_t n) {
  LogCombo c;
  for (const auto& [p, e] : factorize(n).factors) c.add(p, mpq_class(e));
  return c;
}

void LogCombo::add(std::uint64_t prime, const mpq_class& coeff) {
  if (coeff == 0) return;
  auto [it, inserted] = terms_.try_emplace(prime, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

mpq_class LogCombo::coefficient(std::uint64_t prime) const {
  const auto it = terms_.find(prime);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

LogCombo& LogCombo::operator+=(const LogCombo& other) {
  for (const auto& [p, r] : other.terms_) add(p, r);
  return *this;
}

LogCombo& LogCombo::operator-=(const LogCombo& other) {
  for (const auto& [p, r] : other.terms_) add(p, -r);
  return *this;
}

LogCombo& LogCombo::operator*=(const mpq_class& k) {
  if (k == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [p, r] : terms_) r *= k;
  return *this;
}

Ball LogCombo::evaluate(Precision prec) const {
  Ball sum(prec);
  for (const auto& [p, r] : terms_) {
    sum += Ball(prec, r) * log(Ball(prec, mpz_class(static_cast<unsigned long>(p))));
  }
  return sum;
}

double LogCombo::to_double() const { return evaluate(64).to_double(); }

LogCombo lambda_exact(std::uint64_t n) {
  LogCombo c;
  for (const auto& [p, e] : factorize(n).factors) {
    const mpz_class pz(static_cast<unsigned long>(p));
    mpz_class pe, pe1;
    mpz_pow_ui(pe.get_mpz_t(), pz.get_mpz_t(), e);
    mpz_pow_ui(pe1.get_mpz_t(), pz.get_mpz_t(), e - 1);
    mpq_class r(pe - 1, pe1 * (pz * pz - 1));
    r.canonicalize();
    c.add(p, r);
  }
  return c;
}

LogCombo kappa_exact(std::uint64_t n) {
  LogCombo c;
  for (const auto& [p, e] : factorize(n).factors) {
    mpq_class r(1, static_cast<unsigned long>(p));
    c.add(p, r);
  }
  return c;
}

// ------------------------------------------------------------------ C_N

CycSystem enumerate_cn(std::uint64_t n) {
  if (n == 0) throw DomainError("enumerate_cn: n must be positive");
  CycSystem s;
  s.n = n;
  s.matrices.reserve(psi(n));
  for (std::uint64_t a = 1; a <= n; ++a) {
    if (n % a != 0) continue;
    const std::uint64_t d = n / a;
    const std::uint64_t g = std::gcd(a, d);
    for (std::uint64_t b = 0; b < d; ++b) {
      if (std::gcd(g, b) == 1) s.matrices.push_back({a, b, d});
    }
  }
  return s;
}

LogCombo sum_log_d_over_a(const CycSystem& system) {
  // log(d/a) has integer coefficients, and matrices sharing the same a share
  // the same d, so count per a and accumulate valuations exactly.
  std::map<std::uint64_t, std::pair<std::uint64_t, long long>> per_a;
  for (const auto& m : system.matrices) {
    auto& slot = per_a[m.a];
    slot.first = m.d;
    ++slot.second;
  }
  std::map<std::uint64_t, long long> acc;
  for (const auto& [a, entry] : per_a) {
    const auto& [d, count] = entry;
    for (const auto& [p, e] : factorize(d).factors) acc[p] += count * e;
    for (const auto& [p, e] : factorize(a).factors) acc[p] -= count * e;
  }
  LogCombo c;
  for (const auto& [p, v] : acc) c.add(p, mpq_class(static_cast<long>(v)));
  return c;
}

}  // namespace modpoly::ntheory
