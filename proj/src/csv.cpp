#include "asyncisac/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

#include "asyncisac/errors.hpp"

namespace asyncisac {

namespace {

constexpr const char* kHeader = "snr_db,bound_name_or_metric,value,stderr,trials,seed";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_number(std::string s, int line) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t");
  s = first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw DomainError("no results to write");
  std::ostringstream buf;
  buf << std::setprecision(17) << kHeader << '\n';
  for (const ResultRow& r : rows) {
    buf << r.snr_db << ',' << r.metric << ',' << r.value << ',';
    if (r.stderr_of_value) buf << *r.stderr_of_value;
    buf << ',' << r.trials << ',' << r.seed << '\n';
  }
  out << buf.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw DomainError("no results to write");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(out, rows);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<ResultRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw IoError("csv: missing or unexpected header");
  std::vector<ResultRow> rows;
  int n = 1;
  while (std::getline(in, line)) {
    ++n;
    const std::vector<std::string> f = split(line);
    if (f.size() != 6) throw IoError("csv line " + std::to_string(n) + ": expected 6 fields");
    ResultRow r;
    r.snr_db = parse_number<double>(f[0], n);
    r.metric = f[1];
    r.value = parse_number<double>(f[2], n);
    if (!f[3].empty()) r.stderr_of_value = parse_number<double>(f[3], n);
    r.trials = parse_number<std::int64_t>(f[4], n);
    r.seed = parse_number<std::uint64_t>(f[5], n);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_csv(in);
}

CsiBlock read_csi_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    for (const std::string& f : split(line)) values.push_back(parse_number<double>(f, n));
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw IoError("csi file is empty");
  const std::size_t cols = rows.front().size();
  if (cols < 2 || cols % 2 != 0) throw IoError("csi line 1: expected an even number of columns (2T)");
  CsiBlock h;
  h.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols / 2));
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].size() != cols) throw IoError("csi line " + std::to_string(m + 1) + ": ragged row");
    for (std::size_t t = 0; t < cols / 2; ++t) {
      h.data(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t)) = {rows[m][2 * t], rows[m][2 * t + 1]};
    }
  }
  return h;
}

CsiBlock read_csi_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_csi_csv(in);
}

void write_csi_csv(std::ostream& out, const CsiBlock& h) {
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (Eigen::Index m = 0; m < h.data.rows(); ++m) {
    for (Eigen::Index t = 0; t < h.data.cols(); ++t) {
      if (t > 0) buf << ',';
      buf << h.data(m, t).real() << ',' << h.data(m, t).imag();
    }
    buf << '\n';
  }
  out << buf.str();
}

}  // namespace asyncisac
