#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "modpoly/bounds.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = MODPOLY_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "modpoly");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = modpoly::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (l == line) return true;
  return false;
}

bool single_error_line(const std::string& err) {
  return err.rfind("error: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("modpoly_test_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("bound") {
  const auto r = run({"bound", "--n", "2"});
  CHECK(r.code == 0);
  CHECK(has_line(r.out, "theorem1 = 77.4097"));
  CHECK(has_line(r.out, "broker_sutherland = 54.0414"));
  const auto r6 = run({"bound", "--n", "6", "--digits", "10"});
  CHECK(has_line(r6.out, "broker_sutherland = n/a (N not prime)"));
}

TEST_CASE("constant") {
  const auto r = run({"constant", "--n0", "400", "--l", "166.48"});
  CHECK(r.code == 0);
  modpoly::bounds::BoundParams p;
  const double v = modpoly::bounds::theorem1_constant(p, modpoly::modfunc::PrecisionBudget::for_target_bits(64))
                       .value.to_double();
  char expect[64];
  std::snprintf(expect, sizeof expect, "constant = %.6g", v);
  CHECK(has_line(r.out, expect));
  CHECK(has_line(r.out, "limit_bound(N0) = 4.77678"));
  CHECK(r.out.find("c_0 = ") != std::string::npos);
}

TEST_CASE("phi") {
  const auto r1 = run({"phi", "--n", "1"});
  CHECK(r1.code == 0);
  CHECK(has_line(r1.out, "h(Phi_N) = 0"));
  CHECK(r1.out.find("[1,0] 1\n[0,1] -1\n") != std::string::npos);

  const fs::path dir = temp_dir("phi");
  const auto r2 = run({"phi", "--n", "2", "--out", (dir / "p2.txt").string()});
  CHECK(r2.code == 0);
  CHECK(has_line(r2.out, "h(Phi_N) = 32.6902"));
  CHECK(has_line(r2.out, "b_lambda = 1.58507"));
  std::ifstream a(dir / "p2.txt"), b(kData / "phi_j_2.txt");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("verify with references, then with a corrupted reference") {
  const auto ok = run({"verify", "--n-max", "10", "--reference", kData.string()});
  CHECK(ok.code == 0);
  CHECK(has_line(ok.out, "N=3 ok"));
  CHECK(has_line(ok.out, "verify: 10 levels, 0 failed"));

  const fs::path dir = temp_dir("verify");
  fs::copy_file(kData / "phi_j_2.txt", dir / "phi_j_2.txt");
  {
    std::ofstream out(dir / "phi_j_3.txt");
    std::ifstream in(kData / "phi_j_3.txt");
    for (std::string line; std::getline(in, line);) {
      if (line == "[2,2] 2587918086") line = "[2,2] 2587918087";
      out << line << "\n";
    }
  }
  const auto bad = run({"verify", "--n-max", "3", "--reference", dir.string()});
  CHECK(bad.code != 0);
  CHECK(has_line(bad.out, "N=2 ok"));
  CHECK(bad.out.find("N=3 FAIL") != std::string::npos);
}

TEST_CASE("figure") {
  const fs::path dir = temp_dir("figure");
  const auto r = run({"figure", "--n-max", "4", "--out", (dir / "fig.csv").string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "fig.csv"));
  CHECK(fs::exists(dir / "fig.gp"));
}

TEST_CASE("check-identities") {
  const auto r = run({"check-identities", "--n", "6", "--tau", "0.3333,1.3333", "--digits", "40"});
  CHECK(r.code == 0);
  CHECK(r.out.find("delta-product ") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
  const auto un = run({"check-identities", "--n", "4", "--tau", "3.2,0.2", "--digits", "40"});
  CHECK(un.code == 0);
  CHECK(un.out.find("reduced by") != std::string::npos);
}

TEST_CASE("thread count does not change results") {
  const auto a = run({"--threads", "1", "phi", "--n", "7"});
  const auto b = run({"--threads", "3", "phi", "--n", "7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("errors are single machine-readable lines") {
  const auto u = run({"nonsense"});
  CHECK(u.code != 0);
  CHECK(single_error_line(u.err));
  const auto m = run({"bound"});
  CHECK(m.code != 0);
  CHECK(single_error_line(m.err));
  const auto d = run({"bound", "--n", "1"});
  CHECK(d.code != 0);
  CHECK(d.err.rfind("error: domain_error: ", 0) == 0);
  CHECK(single_error_line(d.err));
  const auto t = run({"check-identities", "--n", "3", "--tau", "0.1;1", "--digits", "30"});
  CHECK(t.code != 0);
  CHECK(single_error_line(t.err));
  const auto v = run({"verify", "--n-max", "2", "--reference", "/nonexistent_dir"});
  CHECK(v.err.rfind("error: io_error: ", 0) == 0);
  const auto h = run({"--help"});
  CHECK(h.code == 0);
  CHECK(h.out.find("check-identities") != std::string::npos);
}
