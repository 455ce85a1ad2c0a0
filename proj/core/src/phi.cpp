#include "modpoly/phi.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "modpoly/bounds.hpp"
#include "modpoly/errors.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/parallel.hpp"

namespace modpoly::phi {

// ------------------------------------------------------------------ BivariatePoly

BivariatePoly BivariatePoly::phi1() {
  BivariatePoly p(1);
  p.coeffs_[{1, 0}] = 1;
  p.coeffs_[{0, 1}] = -1;
  return p;
}

mpz_class BivariatePoly::coefficient(unsigned i, unsigned j) const {
  if (symmetric() && i < j) std::swap(i, j);
  const auto it = coeffs_.find({i, j});
  return it == coeffs_.end() ? mpz_class(0) : it->second;
}

void BivariatePoly::set(unsigned i, unsigned j, const mpz_class& c) {
  if (symmetric() && i < j) std::swap(i, j);
  if (c == 0) {
    coeffs_.erase({i, j});
  } else {
    coeffs_[{i, j}] = c;
  }
}

std::map<BivariatePoly::Key, mpz_class> BivariatePoly::expanded() const {
  std::map<Key, mpz_class> out;
  for (const auto& [key, c] : coeffs_) {
    out[key] = c;
    if (symmetric()) out[{key.second, key.first}] = c;
  }
  return out;
}

unsigned BivariatePoly::degree_x() const {
  unsigned d = 0;
  for (const auto& [key, c] : coeffs_) d = std::max(d, key.first);
  return d;
}

void BivariatePoly::validate() const {
  if (n_ == 0) throw ConsistencyError("polynomial level must be positive");
  const auto psi = static_cast<unsigned>(ntheory::psi(n_));
  if (degree_x() != psi) {
    throw ConsistencyError("degree in X is " + std::to_string(degree_x()) + ", expected psi(" + std::to_string(n_) +
                           ") = " + std::to_string(psi));
  }
  for (unsigned j = 1; j <= psi; ++j) {
    if (coefficient(psi, j) != 0) {
      throw ConsistencyError("polynomial is not monic in X (X^" + std::to_string(psi) + " Y^" + std::to_string(j) +
                             " has coefficient " + coefficient(psi, j).get_str() + ")");
    }
  }
  if (coefficient(psi, 0) != 1) throw ConsistencyError("leading coefficient in X must be 1");
}

// ------------------------------------------------------------------ plan

InterpolationPlan plan(std::uint64_t n, long slack_bits) {
  if (n < 1) throw DomainError("level must be positive");
  if (slack_bits < 0) throw DomainError("slack must be nonnegative");
  const std::uint64_t psi = ntheory::psi(n);
  const double cap = n >= 2 ? bounds::theorem1_bound(n) : 0.0;
  const long cond = static_cast<long>(psi) * static_cast<long>(std::ceil(std::log2(static_cast<double>(psi + 1))));
  const long bits = static_cast<long>(std::ceil(cap / std::log(2.0))) + cond + slack_bits;
  const long working = std::max(bits, 64L);

  std::vector<TauPoint> nodes;
  nodes.reserve(psi + 1);
  for (std::uint64_t k = 0; k <= psi; ++k) {
    const mpq_class x(mpz_class(std::to_string(2 * k + 1)), mpz_class(std::to_string(4 * (psi + 1))));
    nodes.emplace_back(Ball(working, x), Ball(working, 1L));
  }
  return {n, psi, std::move(nodes), PrecisionBudget(working, 2), cap, slack_bits};
}

// ------------------------------------------------------------------ interpolation

namespace {

// Multiplies the coefficient vector (index = power) by (X - r) in place.
void mul_linear(std::vector<CBall>& c, const CBall& r) {
  const std::size_t m = c.size();
  c.push_back(c[m - 1]);
  for (std::size_t k = m - 1; k >= 1; --k) c[k] = c[k - 1] - r * c[k];
  c[0] = -(r * c[0]);
}

bool round_certified(const CBall& z, mpz_class& out, double& residual) {
  mpfr_get_z(out.get_mpz_t(), z.re().mid(), MPFR_RNDN);
  const Ball diff = z.re() - Ball(z.re().prec(), out);
  residual = std::max(diff.abs_upper().to_double(), z.im().abs_upper().to_double());
  return residual < 0.25;
}

struct AttemptOutcome {
  std::optional<BivariatePoly> poly;
  double max_residual = 0.0;
  double min_log2_separation = std::numeric_limits<double>::infinity();
  long working_bits = 0;
};

AttemptOutcome attempt(std::uint64_t n, long slack_bits) {
  const InterpolationPlan pl = plan(n, slack_bits);
  const Precision prec = pl.budget.working_bits();
  const auto system = ntheory::enumerate_cn(n);
  const std::size_t deg = pl.psi;
  const std::size_t m = deg + 1;
  const std::size_t per_node = system.matrices.size();

  AttemptOutcome out;
  out.working_bits = prec;

  std::vector<std::optional<CBall>> y(m);
  std::vector<std::optional<CBall>> roots(m * per_node);
  parallel_for(m * (per_node + 1), [&](std::size_t idx) {
    const std::size_t k = idx / (per_node + 1);
    const std::size_t g = idx % (per_node + 1);
    const TauPoint& tau = pl.nodes[k];
    if (g == per_node) {
      y[k] = modfunc::eval_j_ball(tau, prec);
      return;
    }
    const auto& mat = system.matrices[g];
    const TauPoint tg((tau.re() * static_cast<long>(mat.a) + static_cast<long>(mat.b)) / static_cast<long>(mat.d),
                      tau.im() * static_cast<long>(mat.a) / static_cast<long>(mat.d));
    roots[k * per_node + g] = modfunc::eval_j_ball(tg, prec);
  });

  // Phi_N(X, y_k) coefficients, index = power of X.
  std::vector<std::vector<CBall>> e(m);
  parallel_for(m, [&](std::size_t k) {
    std::vector<CBall> c{CBall(prec, 1L)};
    for (std::size_t g = 0; g < per_node; ++g) mul_linear(c, *roots[k * per_node + g]);
    e[k] = std::move(c);
  });

  // inv[k][l] = 1 / (y_k - y_l), l < k.
  std::vector<std::vector<CBall>> inv(m);
  std::vector<double> sep(m, std::numeric_limits<double>::infinity());
  parallel_for(m, [&](std::size_t k) {
    inv[k].reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
      const CBall diff = *y[k] - *y[l];
      sep[k] = std::min(sep[k], std::log2(std::max(abs(diff).abs_lower_double(), 1e-300)));
      inv[k].push_back(inverse(diff));
    }
  });
  for (double s : sep) out.min_log2_separation = std::min(out.min_log2_separation, s);

  std::vector<std::vector<mpz_class>> raw(m, std::vector<mpz_class>(m));
  std::vector<double> residual(m, 0.0);
  std::vector<char> ok(m, 1);
  parallel_for(m, [&](std::size_t i) {
    std::vector<CBall> c(m, CBall(prec));
    for (std::size_t k = 0; k < m; ++k) c[k] = e[k][i];
    for (std::size_t l = 1; l < m; ++l)
      for (std::size_t k = m - 1; k >= l; --k) c[k] = (c[k] - c[k - 1]) * inv[k][k - l];
    // Newton form to monomials: q = c_deg; q = q (Y - y_k) + c_k for k = deg-1..0.
    std::vector<CBall> q{c[deg]};
    for (std::size_t kk = deg; kk-- > 0;) {
      mul_linear(q, *y[kk]);
      q[0] += c[kk];
    }
    for (std::size_t j = 0; j < m; ++j) {
      double r = 0.0;
      if (!round_certified(q[j], raw[i][j], r)) ok[i] = 0;
      residual[i] = std::max(residual[i], r);
    }
  });
  for (double r : residual) out.max_residual = std::max(out.max_residual, r);
  for (char flag : ok)
    if (!flag) return out;

  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (raw[i][j] != raw[j][i]) {
        throw ConsistencyError("interpolated Phi_" + std::to_string(n) + " is not symmetric at (" +
                               std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  BivariatePoly p(n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= i; ++j) p.set(static_cast<unsigned>(i), static_cast<unsigned>(j), raw[i][j]);
  p.validate();
  out.poly = std::move(p);
  return out;
}

}  // namespace

PhiResult compute_phi(std::uint64_t n, long slack_bits) {
  if (n < 1) throw DomainError("level must be positive");
  if (n == 1) return {BivariatePoly::phi1(), 0.0, slack_bits, 0, 0, 0.0};
  constexpr int kMaxRetries = 3;
  AttemptOutcome last;
  long slack = slack_bits;
  for (int a = 0; a <= kMaxRetries; ++a, slack *= 2) {
    last = attempt(n, slack);
    if (last.poly) {
      return {std::move(*last.poly), last.max_residual, slack, last.working_bits, a + 1, last.min_log2_separation};
    }
    if (slack == 0) slack = 1;
  }
  throw PrecisionExhausted("Phi_" + std::to_string(n) + ": coefficients not certifiably integral at " +
                           std::to_string(last.working_bits) + " bits (max residual " +
                           std::to_string(last.max_residual) + ", min node separation 2^" +
                           std::to_string(last.min_log2_separation) + ")");
}

BivariatePoly phi_polynomial(std::uint64_t n, long slack_bits) { return compute_phi(n, slack_bits).poly; }

// ------------------------------------------------------------------ derived quantities

double height(const BivariatePoly& p) {
  if (p.stored().empty()) throw DomainError("height of the zero polynomial");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [key, c] : p.stored()) {
    long e = 0;
    const double d = mpz_get_d_2exp(&e, c.get_mpz_t());
    best = std::max(best, std::log(std::fabs(d)) + static_cast<double>(e) * std::log(2.0));
  }
  return best;
}

BValues b_values(std::uint64_t n, const BivariatePoly& p) {
  if (n < 2) throw DomainError("b_values requires n >= 2");
  const double base = height(p) / (6.0 * static_cast<double>(ntheory::psi(n))) - std::log(static_cast<double>(n));
  return {base + 2.0 * ntheory::lambda_exact(n).to_double(), base + 2.0 * ntheory::kappa_exact(n).to_double()};
}

std::vector<CBall> specialize(const BivariatePoly& p, const CBall& y, const PrecisionBudget& budget) {
  const Precision prec = budget.working_bits();
  std::map<unsigned, std::map<unsigned, mpz_class>> rows;
  unsigned dx = 0;
  for (const auto& [key, c] : p.expanded()) {
    rows[key.first][key.second] = c;
    dx = std::max(dx, key.first);
  }
  std::vector<CBall> out(dx + 1, CBall(prec));
  const CBall yy = y.with_prec(std::max(prec, y.prec()));
  for (const auto& [i, row] : rows) {
    CBall acc(prec);
    for (unsigned j = row.rbegin()->first + 1; j-- > 0;) {
      acc = acc * yy;
      const auto it = row.find(j);
      if (it != row.end()) acc.re() += Ball(prec, it->second);
    }
    out[i] = std::move(acc);
  }
  return out;
}

CBall evaluate(const BivariatePoly& p, const CBall& x, const CBall& y, const PrecisionBudget& budget) {
  const auto coeffs = specialize(p, y, budget);
  CBall acc(budget.working_bits());
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

Ball root_residual(const BivariatePoly& phi_n, std::uint64_t a, std::uint64_t b, std::uint64_t d,
                   const TauPoint& tau, long accuracy_bits) {
  if (a * d != phi_n.n() || b >= d) throw DomainError("matrix does not belong to C_N");
  const Precision base = accuracy_bits + 64;
  const TauPoint t = tau.with_prec(std::max<Precision>(base, tau.prec()));
  const TauPoint tg((t.re() * static_cast<long>(a) + static_cast<long>(b)) / static_cast<long>(d),
                    t.im() * static_cast<long>(a) / static_cast<long>(d));
  const CBall x0 = modfunc::eval_j_ball(tg, base);
  const CBall y0 = modfunc::eval_j_ball(t, base);
  const auto deg = static_cast<double>(phi_n.degree_x());
  // Terms reach max|c| |x|^deg |y|^deg; the result is compared against max|c|.
  const double magnitude = deg * (std::max(0.0, abs(x0).log2_abs_upper()) + std::max(0.0, abs(y0).log2_abs_upper()));
  const Precision prec = base + static_cast<long>(std::ceil(magnitude)) + 64;
  const PrecisionBudget budget(prec, accuracy_bits);
  // Recompute gamma tau at full precision: an error in tau is amplified by
  // the size of the terms.
  const TauPoint tp = tau.with_prec(std::max<Precision>(prec, tau.prec()));
  const TauPoint tgp((tp.re() * static_cast<long>(a) + static_cast<long>(b)) / static_cast<long>(d),
                     tp.im() * static_cast<long>(a) / static_cast<long>(d));
  const CBall x = modfunc::eval_j_ball(tgp, prec);
  const CBall y = modfunc::eval_j_ball(tp, prec);
  const Ball value = abs(evaluate(phi_n, x, y, budget));
  mpz_class cmax = 0;
  for (const auto& [key, c] : phi_n.stored()) cmax = std::max(cmax, mpz_class(abs(c)));
  return value / (Ball(prec, cmax) + 1L);
}

bool kronecker_check(std::uint64_t p, const BivariatePoly& phi_p) {
  if (!ntheory::is_prime(p)) throw DomainError("kronecker_check requires a prime");
  if (phi_p.n() != p) throw DomainError("polynomial level does not match p");
  const auto u = static_cast<unsigned>(p);
  // (X^p - Y)(X - Y^p) = X^{p+1} - X^p Y^p - X Y + Y^{p+1}
  std::map<BivariatePoly::Key, mpz_class> diff = phi_p.expanded();
  diff[{u + 1, 0}] -= 1;
  diff[{u, u}] += 1;
  diff[{1, 1}] += 1;
  diff[{0, u + 1}] -= 1;
  for (const auto& [key, c] : diff)
    if (mpz_divisible_ui_p(c.get_mpz_t(), p) == 0) return false;
  return true;
}

Ball mahler_consistency(const BivariatePoly& phi_n, const TauPoint& tau, const PrecisionBudget& budget) {
  const std::uint64_t n = phi_n.n();
  const std::uint64_t psi = ntheory::psi(n);
  const Precision prec = budget.working_bits();
  const CBall y = modfunc::eval_j_ball(tau, prec);
  const double log2_y = std::max(1.0, abs(y).log2_abs_upper());
  const long extra = static_cast<long>(std::ceil(height(phi_n) / std::log(2.0)) +
                                       static_cast<double>(psi) * std::ceil(log2_y)) +
                     64;
  const PrecisionBudget wide(prec + extra, budget.target_bits());
  const auto coeffs = specialize(phi_n, y.with_prec(prec + extra), wide);
  Ball hmax(prec + extra, 1L);
  for (const auto& c : coeffs) hmax = max(hmax, abs(c));
  mpz_class binom;
  mpz_bin_uiui(binom.get_mpz_t(), psi, psi / 2);
  return bounds::compute_sn(n, tau, budget) + log(Ball(prec, binom)) - log(hmax).with_prec(prec);
}

}  // namespace modpoly::phi
