#pragma once

// Text formats for modular polynomials and figure data.
//
// Polynomial files hold one monomial per line as "[i,j] c". The canonical
// form written here lists only i >= j (the symmetric partners are implied),
// sorted by i then j, both descending, with a trailing newline. The reader
// also accepts any line order, extra whitespace around tokens, blank lines,
// and entries given as (i,j), (j,i) or both.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "modpoly/phi.hpp"

namespace modpoly::io {

struct PhiFileRecord {
  unsigned i;
  unsigned j;
  mpz_class c;
};

/// Canonical text of p.
std::string format_phi(const phi::BivariatePoly& p);
void write_phi(const phi::BivariatePoly& p, std::ostream& out);
/// Throws IoError naming the path on failure.
void write_phi(const phi::BivariatePoly& p, const std::filesystem::path& path);

/// Records in file order. Throws ParseError with the 1-based line number.
std::vector<PhiFileRecord> parse_records(std::string_view text);

/// Parses and validates a polynomial of level n. With n = 0 the level is
/// inferred from the degree, which fails when several levels share psi.
/// Throws ParseError, or ConsistencyError for disagreeing duplicates and
/// structurally invalid content.
phi::BivariatePoly parse_phi(std::string_view text, std::uint64_t n = 0);
phi::BivariatePoly read_phi(std::istream& in, std::uint64_t n = 0);
phi::BivariatePoly read_phi(const std::filesystem::path& path, std::uint64_t n = 0);

struct FigureRow {
  std::uint64_t n;
  std::uint64_t psi;
  double lambda;
  double kappa;
  double h_phi;
  double bound_thm1;
  double b_lambda;
  double b_kappa;
};

FigureRow make_figure_row(std::uint64_t n, const phi::BivariatePoly& p);

/// CSV with header N,psi,lambda,kappa,h_phi,bound_thm1,b_lambda,b_kappa,
/// rows sorted by N, doubles printed with 12 significant digits.
std::string format_figure_csv(std::vector<FigureRow> rows);
/// gnuplot script plotting b_lambda (bold) and b_kappa (grey) from csv_name.
std::string format_figure_script(const std::string& csv_name);
/// Writes the CSV to path and the plot script next to it with extension .gp.
void emit_figure_csv(const std::vector<FigureRow>& rows, const std::filesystem::path& path);

}  // namespace modpoly::io
