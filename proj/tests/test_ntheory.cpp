#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <tuple>

#include "modpoly/ntheory.hpp"

using namespace modpoly::ntheory;

namespace {

// Independent oracles: naive trial division and the defining product.
std::vector<std::pair<std::uint64_t, unsigned>> naive_factor(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; n > 1; ++p) {
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) out.emplace_back(p, e);
  }
  return out;
}

std::uint64_t naive_psi(std::uint64_t n) {
  std::uint64_t num = n, den = 1;
  for (auto [p, e] : naive_factor(n)) {
    num *= p + 1;
    den *= p;
  }
  return num / den;
}

std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> brute_cn(std::uint64_t n) {
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t a = 1; a <= n; ++a)
    for (std::uint64_t d = 1; d <= n; ++d)
      if (a * d == n)
        for (std::uint64_t b = 0; b < d; ++b)
          if (std::gcd(std::gcd(a, b), d) == 1) out.emplace(a, b, d);
  return out;
}

LogCombo combo(std::initializer_list<std::pair<std::uint64_t, mpq_class>> terms) {
  LogCombo c;
  for (const auto& [p, r] : terms) c.add(p, r);
  return c;
}

double float_lambda(std::uint64_t n) {
  double s = 0;
  for (auto [p, e] : naive_factor(n)) {
    const double pe = std::pow(double(p), e);
    s += (pe - 1) / (pe / p * (double(p) * p - 1)) * std::log(double(p));
  }
  return s;
}

double float_kappa(std::uint64_t n) {
  double s = 0;
  for (auto [p, e] : naive_factor(n)) s += std::log(double(p)) / p;
  return s;
}

}  // namespace

TEST_CASE("factorize") {
  CHECK(factorize(1).factors.empty());
  const auto f12 = factorize(12);
  REQUIRE(f12.factors.size() == 2);
  CHECK(f12.factors[0] == PrimePower{2, 2});
  CHECK(f12.factors[1] == PrimePower{3, 1});
  const auto f997 = factorize(997);
  REQUIRE(f997.factors.size() == 1);
  CHECK(f997.factors[0] == PrimePower{997, 1});
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    const auto f = factorize(n);
    const auto g = naive_factor(n);
    REQUIRE(f.factors.size() == g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(f.factors[k].prime == g[k].first);
      CHECK(f.factors[k].exponent == g[k].second);
    }
    CHECK(is_prime(n) == (g.size() == 1 && g[0].second == 1));
  }
  const std::uint64_t big = 4294967291ULL;  // largest prime below 2^32
  CHECK(is_prime(big));
  CHECK(factorize(big * 3).factors.size() == 2);
}

TEST_CASE("psi values and multiplicativity") {
  CHECK(psi(1) == 1);
  CHECK(psi(2) == 3);
  CHECK(psi(400) == 720);
  for (std::uint64_t n = 1; n <= 2000; ++n) CHECK(psi(n) == naive_psi(n));
  for (std::uint64_t m = 1; m <= 200; ++m)
    for (std::uint64_t n = 1; n <= 200; ++n)
      if (std::gcd(m, n) == 1) REQUIRE(psi(m * n) == psi(m) * psi(n));
}

TEST_CASE("lambda and kappa") {
  CHECK(lambda_exact(1).empty());
  CHECK(kappa_exact(1).empty());
  CHECK(lambda_exact(2) == combo({{2, mpq_class(1, 3)}}));
  CHECK(lambda_exact(12) == combo({{2, mpq_class(1, 2)}, {3, mpq_class(1, 4)}}));
  CHECK(kappa_exact(2) == combo({{2, mpq_class(1, 2)}}));
  CHECK(kappa_exact(12) == combo({{2, mpq_class(1, 2)}, {3, mpq_class(1, 3)}}));
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    CHECK(std::abs(lambda_exact(n).to_double() - float_lambda(n)) < 1e-12);
    CHECK(std::abs(kappa_exact(n).to_double() - float_kappa(n)) < 1e-12);
  }
}

TEST_CASE("LogCombo algebra and evaluation") {
  LogCombo a = combo({{2, mpq_class(1, 3)}, {5, mpq_class(2)}});
  LogCombo b = combo({{2, mpq_class(-1, 3)}});
  const LogCombo s = a + b;
  CHECK(s.terms().size() == 1);
  CHECK(s.coefficient(2) == 0);
  CHECK((a - a).empty());
  CHECK(LogCombo::log_of(12) == combo({{2, mpq_class(2)}, {3, mpq_class(1)}}));
  const modpoly::Ball v = LogCombo::log_of(12).evaluate(200);
  CHECK(v.overlaps(log(modpoly::Ball(200, 12L))));
  CHECK(std::abs((a * mpq_class(3)).to_double() - (std::log(2.0) + 6 * std::log(5.0))) < 1e-12);
}

TEST_CASE("C_N enumeration") {
  const auto c1 = enumerate_cn(1);
  REQUIRE(c1.matrices.size() == 1);
  CHECK(c1.matrices[0] == CycMatrix{1, 0, 1});
  const auto c2 = enumerate_cn(2);
  REQUIRE(c2.matrices.size() == 3);
  CHECK(c2.matrices[0] == CycMatrix{1, 0, 2});
  CHECK(c2.matrices[1] == CycMatrix{1, 1, 2});
  CHECK(c2.matrices[2] == CycMatrix{2, 0, 1});
  CHECK(enumerate_cn(6).matrices.size() == 12);
  for (std::uint64_t n = 1; n <= 120; ++n) {
    const auto sys = enumerate_cn(n);
    std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> got;
    for (const auto& g : sys.matrices) got.emplace(g.a, g.b, g.d);
    CHECK(got == brute_cn(n));
    CHECK(std::is_sorted(sys.matrices.begin(), sys.matrices.end()));
  }
  for (std::uint64_t n = 1; n <= 5000; ++n) REQUIRE(enumerate_cn(n).matrices.size() == psi(n));
}

TEST_CASE("sum of log(d/a) over C_N") {
  CHECK(sum_log_d_over_a(enumerate_cn(1)).empty());
  CHECK(sum_log_d_over_a(enumerate_cn(2)) == combo({{2, mpq_class(1)}}));
  for (std::uint64_t n : {12ULL, 30ULL, 64ULL, 97ULL, 360ULL}) {
    const LogCombo expect = (LogCombo::log_of(n) - lambda_exact(n) * mpq_class(2)) * mpq_class(psi(n));
    CHECK(sum_log_d_over_a(enumerate_cn(n)) == expect);
  }
}

TEST_CASE("lambda - kappa bracket on a prefix") {
  for (std::uint64_t n = 1; n <= 20000; ++n) {
    const double v = (lambda_exact(n) - kappa_exact(n)).to_double();
    REQUIRE(v > -0.385);
    REQUIRE(v < 0.186);
  }
}
