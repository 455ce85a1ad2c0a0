#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "modpoly/bounds.hpp"
#include "modpoly/errors.hpp"
#include "modpoly/io.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/phi.hpp"

using namespace modpoly;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MODPOLY_TEST_DATA_DIR;

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "modpoly_test_io";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("canonical format") {
  CHECK(io::format_phi(phi::BivariatePoly::phi1()) == "[1,0] 1\n[0,1] -1\n");
  const std::string t2 = io::format_phi(phi::phi_polynomial(2));
  const auto l2 = lines_of(t2);
  REQUIRE(l2.size() == 7);
  CHECK(l2.front() == "[3,0] 1");
  CHECK(l2.back() == "[0,0] -157464000000000");
  CHECK(t2.back() == '\n');
  CHECK(t2 == slurp(kData / "phi_j_2.txt"));
}

TEST_CASE("round trip") {
  for (std::uint64_t n = 1; n <= 8; ++n) {
    const auto p = phi::phi_polynomial(n);
    const std::string text = io::format_phi(p);
    CHECK(io::parse_phi(text, n) == p);
    CHECK(io::format_phi(io::parse_phi(text, n)) == text);
  }
  const fs::path path = temp_dir() / "phi_j_5.txt";
  const auto p5 = phi::phi_polynomial(5);
  io::write_phi(p5, path);
  CHECK(io::read_phi(path, 5) == p5);
}

TEST_CASE("level inference") {
  CHECK(io::parse_phi("[1,0] 1\n[0,1] -1\n").n() == 1);
  CHECK(io::parse_phi(io::format_phi(phi::phi_polynomial(2))).n() == 2);
  // psi(4) = psi(5) = 6.
  CHECK_THROWS_AS(io::parse_phi(io::format_phi(phi::phi_polynomial(5))), ConsistencyError);
}

TEST_CASE("tolerant dialect") {
  const auto p3 = io::read_phi(kData / "phi_j_3.txt", 3);
  CHECK(p3 == phi::phi_polynomial(3));
  const std::string messy = "  [ 0 , 0 ]   -157464000000000\n\n[1,0] 8748000000\n[0,1] 8748000000\n[3,0] 1\n"
                            "[2,2] -1\n[1,2] 1488\n[2,0]\t-162000\n[1,1] 40773375\n";
  CHECK(io::parse_phi(messy) == phi::phi_polynomial(2));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(io::parse_phi("[3,0] 1\n[2,2] -1\n[2,1] 1488\n[1,2] 1489\n", 2), ConsistencyError);
  try {
    io::parse_phi("[1,0] 1\n[0,1 -1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(io::parse_phi("[1,0] 1\n[0,1] -1x\n"), ParseError);
  CHECK_THROWS_AS(io::parse_phi("[a,0] 1\n"), ParseError);
  CHECK_THROWS_AS(io::parse_phi("[1,0] 2\n[0,1] -1\n", 1), ConsistencyError);
  CHECK_THROWS_AS(io::read_phi(temp_dir() / "missing.txt", 2), IoError);
  CHECK_THROWS_AS(io::write_phi(phi::BivariatePoly::phi1(), fs::path("/nonexistent_dir/x/phi.txt")), IoError);
}

TEST_CASE("figure data") {
  std::vector<io::FigureRow> rows;
  CHECK(io::format_figure_csv(rows) == "N,psi,lambda,kappa,h_phi,bound_thm1,b_lambda,b_kappa\n");
  rows.push_back(io::make_figure_row(3, phi::phi_polynomial(3)));
  rows.push_back(io::make_figure_row(2, phi::phi_polynomial(2)));
  const auto lines = lines_of(io::format_figure_csv(rows));
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].rfind("2,3,", 0) == 0);
  CHECK(lines[2].rfind("3,4,", 0) == 0);

  // Recompute row 2 from the polynomial and ntheory alone.
  const auto p2 = phi::phi_polynomial(2);
  const double h = phi::height(p2);
  const double lam = ntheory::lambda_exact(2).to_double();
  const double kap = ntheory::kappa_exact(2).to_double();
  const double bl = h / 18 - std::log(2.0) + 2 * lam;
  const double bk = h / 18 - std::log(2.0) + 2 * kap;
  char expect[512];
  std::snprintf(expect, sizeof expect, "2,3,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g", lam, kap, h,
                bounds::theorem1_bound(2), bl, bk);
  CHECK(lines[1] == expect);

  const fs::path csv = temp_dir() / "fig.csv";
  io::emit_figure_csv(rows, csv);
  CHECK(slurp(csv) == io::format_figure_csv(rows));
  const std::string gp = slurp(temp_dir() / "fig.gp");
  CHECK(gp.find("'fig.csv'") != std::string::npos);
  CHECK(gp.find("using 1:7") != std::string::npos);
  CHECK(gp.find("using 1:8") != std::string::npos);
}
