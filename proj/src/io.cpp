#include "cohertest/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace cohertest {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path, std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  return in;
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  if (!in) throw ConfigError("truncated CPNL file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

double get_f64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) throw ConfigError("truncated CPNL file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

std::string format_full(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

void write_panel_csv(const Panel& panel, const std::string& path) {
  auto out = open_out(path, std::ios::out);
  out << "m,n,re,im\n";
  for (int ch = 0; ch < panel.m; ++ch)
    for (int t = 0; t < panel.n; ++t) {
      const cplx v = panel.at(ch, t);
      out << ch << ',' << t << ',' << format_full(v.real()) << ','
          << format_full(v.imag()) << '\n';
    }
  if (!out) throw ConfigError("failed writing " + path);
}

Panel read_panel_csv(const std::string& path) {
  auto in = open_in(path, std::ios::in);
  std::string line;
  if (!std::getline(in, line) || line.rfind("m,n,re,im", 0) != 0)
    throw ConfigError("panel CSV must start with header m,n,re,im");
  struct Entry {
    int ch, t;
    cplx v;
  };
  std::vector<Entry> entries;
  int max_ch = -1, max_t = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    Entry e;
    char comma;
    double re, im;
    if (!(ss >> e.ch >> comma >> e.t >> comma >> re >> comma >> im))
      throw ConfigError("bad panel CSV row: " + line);
    e.v = cplx(re, im);
    max_ch = std::max(max_ch, e.ch);
    max_t = std::max(max_t, e.t);
    entries.push_back(e);
  }
  if (entries.empty()) throw ConfigError("panel CSV has no data rows");
  Panel panel(max_ch + 1, max_t + 1);
  if (entries.size() != panel.data.size())
    throw ConfigError("panel CSV is not a complete m x n grid");
  for (const Entry& e : entries) panel.at(e.ch, e.t) = e.v;
  return panel;
}

void write_panel_cpnl(const Panel& panel, const std::string& path) {
  auto out = open_out(path, std::ios::binary);
  out.write("CPNL", 4);
  put_u32(out, static_cast<std::uint32_t>(panel.m));
  put_u32(out, static_cast<std::uint32_t>(panel.n));
  for (const cplx& v : panel.data) {
    put_f64(out, v.real());
    put_f64(out, v.imag());
  }
  if (!out) throw ConfigError("failed writing " + path);
}

Panel read_panel_cpnl(const std::string& path) {
  auto in = open_in(path, std::ios::binary);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "CPNL", 4) != 0)
    throw ConfigError("not a CPNL file: " + path);
  const std::uint32_t m = get_u32(in);
  const std::uint32_t n = get_u32(in);
  if (m < 1 || n < 1 || static_cast<std::uint64_t>(m) * n > (1ULL << 32))
    throw ConfigError("CPNL dimensions out of range");
  Panel panel(static_cast<int>(m), static_cast<int>(n));
  for (cplx& v : panel.data) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    v = cplx(re, im);
  }
  return panel;
}

Panel read_panel(const std::string& path) {
  {
    auto in = open_in(path, std::ios::binary);
    char magic[4] = {};
    in.read(magic, 4);
    if (in && std::memcmp(magic, "CPNL", 4) == 0) return read_panel_cpnl(path);
  }
  return read_panel_csv(path);
}

void write_hermitian_csv(const Eigen::MatrixXcd& matrix, const std::string& path) {
  auto out = open_out(path, std::ios::out);
  out << "i,j,re,im\n";
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j)
      out << i << ',' << j << ',' << format_full(matrix(i, j).real()) << ','
          << format_full(matrix(i, j).imag()) << '\n';
  if (!out) throw ConfigError("failed writing " + path);
}

std::string mc_report_csv(const McReport& report, bool full_precision,
                          bool include_timing) {
  std::ostringstream out;
  out << "n,dgp,statistic,calibration,rate,reps,failures,wall_seconds\n";
  for (const McRow& row : report.rows) {
    const std::string rate =
        full_precision ? format_full(row.rate) : format_short(row.rate);
    const double wall = include_timing ? row.wall_seconds : 0.0;
    out << row.n << ',' << row.dgp << ',' << row.statistic << ',' << row.calibration
        << ',' << rate << ',' << row.reps << ',' << row.failures << ','
        << (include_timing ? format_short(wall) : "0") << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw ConfigError("failed writing " + path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace cohertest
