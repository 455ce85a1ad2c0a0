#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "modpoly/bounds.hpp"
#include "modpoly/errors.hpp"
#include "modpoly/io.hpp"
#include "modpoly/modfunc.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/parallel.hpp"
#include "modpoly/phi.hpp"

namespace modpoly::cli {

namespace {

namespace fs = std::filesystem;
using modfunc::PrecisionBudget;
using modfunc::TauPoint;

std::string num(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string num(const Ball& b, int digits) { return num(b.to_double(), digits); }

// Point used by verify for root and proof-chain checks: 1/8 + 9i/8, exact
// in binary and interior to F.
TauPoint verify_tau(Precision prec) { return {Ball(prec, mpq_class(1, 8)), Ball(prec, mpq_class(9, 8))}; }

// ------------------------------------------------------------------ bound

struct BoundArgs {
  std::uint64_t n = 0;
  int digits = 6;
};

int run_bound(const BoundArgs& a, std::ostream& out) {
  const auto r = bounds::bound_report(a.n);
  out << "N = " << r.n << "\n";
  out << "psi(N) = " << ntheory::psi(r.n) << "\n";
  out << "theorem1 = " << num(r.theorem1, a.digits) << "\n";
  out << "pazuki2019 = " << num(r.paz2019, a.digits) << "\n";
  out << "broker_sutherland = " << (r.brsu ? num(*r.brsu, a.digits) : std::string("n/a (N not prime)")) << "\n";
  out << "cohen_main_term = " << num(r.cohen_main_term, a.digits) << "\n";
  out << "limit_bound(N0=N) = " << (r.limit_bound ? num(*r.limit_bound, a.digits) : std::string("n/a (N < 3)"))
      << "\n";
  return 0;
}

// ------------------------------------------------------------------ constant

struct ConstantArgs {
  std::uint64_t n0 = 400;
  double l = 166.48;
  bool optimize = false;
  double lo = 10.0;
  double hi = 2000.0;
  std::string convention = "2L";
  bool compare = false;
  int digits = 6;
};

int run_constant(const ConstantArgs& a, std::ostream& out) {
  bounds::BoundParams params;
  params.n0 = a.n0;
  params.l = a.l;
  const auto convention =
      a.convention == "L" ? bounds::TauConvention::JEqualsL : bounds::TauConvention::JEqualsTwoL;
  const auto budget = PrecisionBudget::for_target_bits(64);

  if (a.optimize) {
    const auto best = bounds::optimize_l(params, a.lo, a.hi, PrecisionBudget(96, 40), convention);
    out << "optimize_l over [" << num(a.lo, a.digits) << ", " << num(a.hi, a.digits) << "]: L* = "
        << num(best.l, a.digits) << ", constant* = " << num(best.constant, a.digits) << "\n";
    params.l = best.l;
  }
  const auto r = bounds::theorem1_constant(params, budget, convention);
  const auto trace = bounds::c_sequence(params, r.constants, budget, r.sequence.iterations);
  const double theta = std::atan2(r.constants.tau.im().to_double(), r.constants.tau.re().to_double());

  out << "N0 = " << params.n0 << "\n";
  out << "L = " << num(params.l, a.digits) << "\n";
  out << "convention = " << bounds::to_string(convention) << "\n";
  out << "tau = e^(i*" << num(theta, a.digits) << ")"
      << (r.constants.tau.re().certainly_positive() || r.constants.tau.re().certainly_negative()
              ? ""
              : " (imaginary axis)")
      << " = " << num(r.constants.tau.re(), a.digits) << " + " << num(r.constants.tau.im(), a.digits) << "i\n";
  out << "a(tau) = " << num(r.constants.a, a.digits) << "\n";
  out << "b(tau) = " << num(r.constants.b, a.digits) << "\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k)
    out << "c_" << k << " = " << num(trace.values[k], a.digits) << "\n";
  out << "c_inf = " << num(r.sequence.c_inf, a.digits) << "\n";
  out << "interpolation term = " << num(r.interpolation_term, a.digits) << "\n";
  out << "constant = " << num(r.value, a.digits) << "\n";
  out << "limit_bound(N0) = " << num(bounds::limit_bound(params.n0), a.digits) << "\n";
  if (a.compare) {
    const auto c = bounds::resolve_tau_convention(budget);
    out << "convention check (N0=400, L=166.48): j(tau)=L -> " << num(c.value_l, a.digits) << ", j(tau)=2L -> "
        << num(c.value_two_l, a.digits) << "; adopted " << bounds::to_string(c.adopted)
        << (c.within_tolerance ? " (within 0.002 of 4.436)" : " (neither within 0.002 of 4.436)") << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ phi

struct PhiArgs {
  std::uint64_t n = 0;
  std::string out_path;
  long slack = 64;
  int digits = 6;
};

int run_phi(const PhiArgs& a, std::ostream& out) {
  const auto r = phi::compute_phi(a.n, a.slack);
  out << "N = " << a.n << "\n";
  out << "psi(N) = " << ntheory::psi(a.n) << "\n";
  out << "h(Phi_N) = " << num(phi::height(r.poly), a.digits) << "\n";
  if (a.n >= 2) {
    const auto b = phi::b_values(a.n, r.poly);
    out << "b_lambda = " << num(b.b_lambda, a.digits) << "\n";
    out << "b_kappa = " << num(b.b_kappa, a.digits) << "\n";
  } else {
    out << "b_lambda = n/a (N < 2)\n";
    out << "b_kappa = n/a (N < 2)\n";
  }
  out << "working_bits = " << r.working_bits << "\n";
  out << "max_residual = " << num(r.max_residual, 3) << "\n";
  if (a.out_path.empty()) {
    out << "\n";
    io::write_phi(r.poly, out);
  } else {
    io::write_phi(r.poly, fs::path(a.out_path));
    out << "wrote " << a.out_path << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  std::uint64_t n_max = 0;
  std::string reference;
  int digits = 6;
};

std::vector<std::string> verify_level(std::uint64_t n, const VerifyArgs& a) {
  std::vector<std::string> failures;
  auto fail = [&](const std::string& what) { failures.push_back(what); };
  try {
    const auto system = ntheory::enumerate_cn(n);
    if (system.matrices.size() != ntheory::psi(n)) fail("#C_N != psi(N)");
    if (!(ntheory::sum_log_d_over_a(system) ==
          (ntheory::LogCombo::log_of(n) - ntheory::lambda_exact(n) * mpq_class(2)) * mpq_class(ntheory::psi(n)))) {
      fail("sum log(d/a) != psi(N)(log N - 2 lambda_N)");
    }

    const auto r = phi::compute_phi(n);
    r.poly.validate();
    if (r.max_residual >= 0.25) fail("rounding residual " + num(r.max_residual, 3));
    const std::string text = io::format_phi(r.poly);
    if (n >= 2 && io::format_phi(phi::compute_phi(n, 2 * r.slack_bits).poly) != text) {
      fail("recomputation at doubled slack differs");
    }
    if (ntheory::is_prime(n) && !phi::kronecker_check(n, r.poly)) fail("Kronecker congruence fails");
    if (n >= 2) {
      const double h = phi::height(r.poly);
      if (!(h <= bounds::theorem1_bound(n))) fail("h(Phi_N) exceeds the main height bound");
      const double bl = phi::b_values(n, r.poly).b_lambda;
      if (!(bl < 2.1)) fail("b_lambda = " + num(bl, a.digits) + " >= 2.1");
    }

    const TauPoint tau = verify_tau(256);
    for (const auto& g : system.matrices) {
      if (n > 10 && !(g.a == n && g.d == 1)) continue;
      const Ball res = phi::root_residual(r.poly, g.a, g.b, g.d, tau, 96);
      if (!(res.upper_double() < 1e-20)) {
        fail("Phi_N(j(gamma tau), j(tau)) not ~ 0 for (" + std::to_string(g.a) + "," + std::to_string(g.b) + "," +
             std::to_string(g.d) + ")");
      }
    }
    if (n >= 2) {
      const auto chain = bounds::verify_proof_chain(n, tau, PrecisionBudget::for_target_bits(128), false);
      for (const auto& c : chain.clauses)
        if (!c.passed) fail("proof-chain clause " + c.clause + " (value " + num(c.value, 3) + ")");
    }

    if (!a.reference.empty()) {
      const fs::path ref = fs::path(a.reference) / ("phi_j_" + std::to_string(n) + ".txt");
      if (fs::exists(ref)) {
        try {
          if (io::format_phi(io::read_phi(ref, n)) != text) fail("differs from reference " + ref.string());
        } catch (const Error& e) {
          fail(std::string("reference ") + ref.string() + ": " + e.kind() + ": " + e.what());
        }
      }
    }
  } catch (const Error& e) {
    fail(std::string(e.kind()) + ": " + e.what());
  }
  return failures;
}

int run_verify(const VerifyArgs& a, std::ostream& out) {
  if (a.n_max < 1) throw DomainError("--n-max must be at least 1");
  if (!a.reference.empty() && !fs::is_directory(a.reference)) throw IoError(a.reference, "not a directory");
  std::uint64_t failed = 0;
  for (std::uint64_t n = 1; n <= a.n_max; ++n) {
    const auto failures = verify_level(n, a);
    if (failures.empty()) {
      out << "N=" << n << " ok\n";
      continue;
    }
    ++failed;
    out << "N=" << n << " FAIL:";
    for (std::size_t k = 0; k < failures.size(); ++k) out << (k ? "; " : " ") << failures[k];
    out << "\n";
  }
  out << "verify: " << a.n_max << " levels, " << failed << " failed\n";
  return failed == 0 ? 0 : 1;
}

// ------------------------------------------------------------------ figure

struct FigureArgs {
  std::uint64_t n_max = 0;
  std::string out_path;
  int digits = 6;
};

int run_figure(const FigureArgs& a, std::ostream& out) {
  if (a.n_max < 2) throw DomainError("--n-max must be at least 2");
  std::vector<io::FigureRow> rows;
  for (std::uint64_t n = 2; n <= a.n_max; ++n) {
    rows.push_back(io::make_figure_row(n, phi::phi_polynomial(n)));
    out << "N=" << n << " h=" << num(rows.back().h_phi, a.digits) << " b_lambda=" << num(rows.back().b_lambda, a.digits)
        << " b_kappa=" << num(rows.back().b_kappa, a.digits) << "\n";
  }
  io::emit_figure_csv(rows, fs::path(a.out_path));
  fs::path script = a.out_path;
  script.replace_extension(".gp");
  out << "wrote " << a.out_path << " and " << script.string() << "\n";
  return 0;
}

// ------------------------------------------------------------------ check-identities

struct IdentityArgs {
  std::uint64_t n = 0;
  std::string tau;
  long digits = 50;
};

int run_identities(const IdentityArgs& a, std::ostream& out, std::ostream& err) {
  const auto comma = a.tau.find(',');
  if (comma == std::string::npos) throw DomainError("--tau must be RE,IM");
  const auto budget = PrecisionBudget::for_digits(a.digits);
  const TauPoint tau = TauPoint::from_decimal(a.tau.substr(0, comma), a.tau.substr(comma + 1), budget.working_bits());
  const auto reduced = modfunc::reduce_to_fundamental_domain(tau, budget, modfunc::BoundaryPolicy::Tolerant);
  const TauPoint& t = reduced.tau_tilde;
  out << "N = " << a.n << "\n";
  out << "tau = " << num(t.re(), 15) << " + " << num(t.im(), 15) << "i";
  if (!reduced.transform.is_identity()) {
    out << " (reduced by (" << reduced.transform.a << " " << reduced.transform.b << "; " << reduced.transform.c
        << " " << reduced.transform.d << "))";
  }
  out << "\n";
  const auto report = bounds::verify_proof_chain(a.n, t, budget, false);
  char line[256];
  for (const auto& c : report.clauses) {
    std::snprintf(line, sizeof line, "%-18s %-10s %-13s %s\n", c.clause.c_str(), c.identity ? "residual" : "margin",
                  num(c.value, 6).c_str(), c.passed ? "pass" : "FAIL");
    out << line;
  }
  for (const auto& c : report.clauses) {
    if (!c.passed) {
      const ViolationFound v(c.clause, c.value);
      err << "error: " << v.kind() << ": " << v.what() << "\n";
      return 1;
    }
  }
  return 0;
}

std::string one_line(std::string s) {
  for (char& ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical modular polynomials and their explicit height bounds", "modpoly"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: MODPOLY_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "Print every explicit height bound for Phi_N");
  bound->add_option("--n", bound_args.n, "Level N >= 2")->required();
  bound->add_option("--digits", bound_args.digits, "Significant digits")->capture_default_str();

  ConstantArgs constant_args;
  auto* constant = app.add_subcommand("constant", "Compute the constant of the main bound for a given N0");
  constant->add_option("--n0", constant_args.n0, "N0 >= 3")->required();
  constant->add_option("--l", constant_args.l, "Interpolation parameter L > 1")->capture_default_str();
  constant->add_flag("--optimize", constant_args.optimize, "Minimize over L first");
  constant->add_option("--lo", constant_args.lo, "Lower end of the L search interval")->capture_default_str();
  constant->add_option("--hi", constant_args.hi, "Upper end of the L search interval")->capture_default_str();
  constant->add_option("--convention", constant_args.convention, "Evaluation point: j(tau)=2L or j(tau)=L")
      ->check(CLI::IsMember({"2L", "L"}))
      ->capture_default_str();
  constant->add_flag("--compare-conventions", constant_args.compare, "Also report both conventions at N0=400");
  constant->add_option("--digits", constant_args.digits, "Significant digits")->capture_default_str();

  PhiArgs phi_args;
  auto* phi_cmd = app.add_subcommand("phi", "Compute Phi_N exactly");
  phi_cmd->add_option("--n", phi_args.n, "Level N >= 1")->required();
  phi_cmd->add_option("--out", phi_args.out_path, "Output file (default: standard output)");
  phi_cmd->add_option("--slack", phi_args.slack, "Extra precision bits")->capture_default_str();
  phi_cmd->add_option("--digits", phi_args.digits, "Significant digits")->capture_default_str();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Run the property suite for 1 <= N <= M");
  verify->add_option("--n-max", verify_args.n_max, "Largest level M")->required();
  verify->add_option("--reference", verify_args.reference, "Directory with phi_j_<N>.txt reference files");
  verify->add_option("--digits", verify_args.digits, "Significant digits")->capture_default_str();

  FigureArgs figure_args;
  auto* figure = app.add_subcommand("figure", "Write b_lambda/b_kappa data and a gnuplot script");
  figure->add_option("--n-max", figure_args.n_max, "Largest level M >= 2")->required();
  figure->add_option("--out", figure_args.out_path, "CSV path; the script goes next to it as .gp")->required();
  figure->add_option("--digits", figure_args.digits, "Significant digits in the log")->capture_default_str();

  IdentityArgs identity_args;
  auto* identities = app.add_subcommand("check-identities", "Check the identities and inequalities at one tau");
  identities->add_option("--n", identity_args.n, "Level N >= 1")->required();
  identities->add_option("--tau", identity_args.tau, "Point as RE,IM (decimal)")->required();
  identities->add_option("--digits", identity_args.digits, "Evaluation accuracy in decimal digits")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  if (threads > 0) set_thread_count(threads);
  try {
    if (*bound) return run_bound(bound_args, out);
    if (*constant) return run_constant(constant_args, out);
    if (*phi_cmd) return run_phi(phi_args, out);
    if (*verify) return run_verify(verify_args, out);
    if (*figure) return run_figure(figure_args, out);
    if (*identities) return run_identities(identity_args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace modpoly::cli
