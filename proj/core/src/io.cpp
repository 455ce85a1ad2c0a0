#include "modpoly/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>

#include "modpoly/bounds.hpp"
#include "modpoly/errors.hpp"
#include "modpoly/ntheory.hpp"

namespace modpoly::io {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t number) : s_(line), line_(number) {}

  PhiFileRecord parse() {
    expect('[');
    const unsigned i = parse_index();
    expect(',');
    const unsigned j = parse_index();
    expect(']');
    skip_ws();
    const std::size_t start = pos_;
    if (pos_ < s_.size() && s_[pos_] == '-') ++pos_;
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected an integer coefficient");
    mpz_class c(std::string(s_.substr(start, pos_ - start)), 10);
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing text");
    return {i, j, std::move(c)};
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  void expect(char ch) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != ch) fail(std::string("expected '") + ch + "'");
    ++pos_;
  }

  unsigned parse_index() {
    skip_ws();
    unsigned long v = 0;
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<unsigned long>(s_[pos_] - '0');
      if (v > 1'000'000'000UL) fail("exponent too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected a nonnegative exponent");
    return static_cast<unsigned>(v);
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::uint64_t infer_level(unsigned degree) {
  std::optional<std::uint64_t> found;
  for (std::uint64_t n = 2; n <= degree; ++n) {
    if (ntheory::psi(n) != degree) continue;
    if (found) {
      throw ConsistencyError("level is ambiguous for degree " + std::to_string(degree) + " (" +
                             std::to_string(*found) + " or " + std::to_string(n) + "); pass it explicitly");
    }
    found = n;
  }
  if (!found) throw ConsistencyError("no level has psi equal to the degree " + std::to_string(degree));
  return *found;
}

}  // namespace

std::string format_phi(const phi::BivariatePoly& p) {
  std::vector<std::pair<phi::BivariatePoly::Key, mpz_class>> entries(p.stored().begin(), p.stored().end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::string out;
  for (const auto& [key, c] : entries) {
    out += '[' + std::to_string(key.first) + ',' + std::to_string(key.second) + "] " + c.get_str() + '\n';
  }
  return out;
}

void write_phi(const phi::BivariatePoly& p, std::ostream& out) {
  out << format_phi(p);
  if (!out) throw IoError("<stream>", "write failed");
}

void write_phi(const phi::BivariatePoly& p, const std::filesystem::path& path) { write_file(path, format_phi(p)); }

std::vector<PhiFileRecord> parse_records(std::string_view text) {
  std::vector<PhiFileRecord> records;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    records.push_back(LineParser(line, number).parse());
  }
  return records;
}

phi::BivariatePoly parse_phi(std::string_view text, std::uint64_t n) {
  const auto records = parse_records(text);
  if (records.empty()) throw ConsistencyError("file contains no monomials");

  // Level 1 is the only asymmetric case.
  const bool asymmetric = n == 1 || (n == 0 && std::all_of(records.begin(), records.end(), [](const auto& r) {
                                       return r.i + r.j == 1;
                                     }));
  std::map<phi::BivariatePoly::Key, std::pair<mpz_class, std::size_t>> seen;
  unsigned degree = 0;
  std::size_t number = 0;
  for (const auto& r : records) {
    ++number;
    phi::BivariatePoly::Key key{r.i, r.j};
    if (!asymmetric && key.first < key.second) std::swap(key.first, key.second);
    degree = std::max({degree, r.i, r.j});
    const auto [it, inserted] = seen.emplace(key, std::make_pair(r.c, number));
    if (!inserted && it->second.first != r.c) {
      throw ConsistencyError("coefficient of [" + std::to_string(r.i) + "," + std::to_string(r.j) + "] (" +
                             r.c.get_str() + ") disagrees with entry " + std::to_string(it->second.second) + " (" +
                             it->second.first.get_str() + ")");
    }
  }

  const std::uint64_t level = asymmetric ? 1 : (n != 0 ? n : infer_level(degree));
  if (level == 1) {
    phi::BivariatePoly p(1);
    for (const auto& [key, v] : seen) p.set(key.first, key.second, v.first);
    if (!(p == phi::BivariatePoly::phi1())) throw ConsistencyError("level 1 polynomial must be X - Y");
    return p;
  }
  phi::BivariatePoly p(level);
  for (const auto& [key, v] : seen) p.set(key.first, key.second, v.first);
  p.validate();
  return p;
}

phi::BivariatePoly read_phi(std::istream& in, std::uint64_t n) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_phi(text, n);
}

phi::BivariatePoly read_phi(const std::filesystem::path& path, std::uint64_t n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  return read_phi(in, n);
}

FigureRow make_figure_row(std::uint64_t n, const phi::BivariatePoly& p) {
  const auto b = phi::b_values(n, p);
  return {n,
          ntheory::psi(n),
          ntheory::lambda_exact(n).to_double(),
          ntheory::kappa_exact(n).to_double(),
          phi::height(p),
          bounds::theorem1_bound(n),
          b.b_lambda,
          b.b_kappa};
}

std::string format_figure_csv(std::vector<FigureRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const FigureRow& a, const FigureRow& b) { return a.n < b.n; });
  std::string out = "N,psi,lambda,kappa,h_phi,bound_thm1,b_lambda,b_kappa\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%llu,%llu,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<unsigned long long>(r.n), static_cast<unsigned long long>(r.psi), r.lambda, r.kappa,
                  r.h_phi, r.bound_thm1, r.b_lambda, r.b_kappa);
    out += buf;
  }
  return out;
}

std::string format_figure_script(const std::string& csv_name) {
  std::ostringstream s;
  s << "# b_lambda(N) and b_kappa(N) with h(Phi_N) = 6 psi(N) [log N - 2 lambda_N + b_lambda(N)]\n"
    << "#                                      = 6 psi(N) [log N - 2 kappa_N + b_kappa(N)]\n"
    << "set datafile separator ','\n"
    << "set key top right\n"
    << "set xlabel 'N'\n"
    << "set ylabel 'b(N)'\n"
    << "set grid\n"
    << "plot '" << csv_name << "' every ::1 using 1:7 with lines lw 3 lc rgb 'black' title 'b_lambda', \\\n"
    << "     '' every ::1 using 1:8 with lines lw 1 lc rgb 'gray' title 'b_kappa'\n";
  return s.str();
}

void emit_figure_csv(const std::vector<FigureRow>& rows, const std::filesystem::path& path) {
  write_file(path, format_figure_csv(rows));
  std::filesystem::path script = path;
  script.replace_extension(".gp");
  write_file(script, format_figure_script(path.filename().string()));
}

}  // namespace modpoly::io
