#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "field.hpp"

namespace hmhd {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Field file: "HMHD1\0\0\0", u32 N, u32 components, u32 dealias rule, u32 real flags (bit per
// component), f64 L, then N^3 complex coefficients per component in row-major order. Little endian.
namespace io_detail {
constexpr char magic[8] = {'H', 'M', 'H', 'D', '1', 0, 0, 0};

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) throw IoError("truncated field file");
  return v;
}
}  // namespace io_detail

inline void write_fields(const std::string& path, const std::vector<const SpectralField*>& comps) {
  if (comps.empty()) throw IoError("nothing to write");
  const Grid& g = comps[0]->grid;
  for (auto* c : comps) require_same_grid(g, c->grid);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(io_detail::magic, 8);
  std::uint32_t flags = 0;
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (comps[i]->real) flags |= 1u << i;
  io_detail::put(os, std::uint32_t(g.N));
  io_detail::put(os, std::uint32_t(comps.size()));
  io_detail::put(os, std::uint32_t(g.rule));
  io_detail::put(os, flags);
  io_detail::put(os, g.L);
  for (auto* c : comps) os.write(reinterpret_cast<const char*>(c->c.data()), std::streamsize(c->c.size() * sizeof(cplx)));
  if (!os) throw IoError("write failed: " + path);
}

inline void write_field(const std::string& path, const SpectralVectorField& v) {
  write_fields(path, {&v[0], &v[1], &v[2]});
}
inline void write_field(const std::string& path, const SpectralField& f) { write_fields(path, {&f}); }

inline std::vector<SpectralField> read_fields(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char m[8];
  if (!is.read(m, 8) || std::memcmp(m, io_detail::magic, 8) != 0) throw IoError(path + " is not a field file");
  const auto N = io_detail::get<std::uint32_t>(is);
  const auto nc = io_detail::get<std::uint32_t>(is);
  const auto rule = io_detail::get<std::uint32_t>(is);
  const auto flags = io_detail::get<std::uint32_t>(is);
  const double L = io_detail::get<double>(is);
  if (nc == 0 || nc > 32 || rule > 1) throw IoError(path + ": corrupt header");
  Grid g;
  try {
    g = Grid(L, int(N), DealiasRule(rule));
  } catch (const ConfigError& e) {
    throw IoError(path + ": " + e.what());
  }
  std::vector<SpectralField> out;
  for (std::uint32_t i = 0; i < nc; ++i) {
    SpectralField f(g, (flags >> i) & 1u);
    if (!is.read(reinterpret_cast<char*>(f.c.data()), std::streamsize(f.c.size() * sizeof(cplx))))
      throw IoError("truncated field file " + path);
    out.push_back(std::move(f));
  }
  return out;
}

/// RFC-4180 CSV: CRLF line ends, fields quoted when they hold a comma, quote or line break.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), cols_(header.size()) {
    if (header.empty()) throw IoError("CSV header must not be empty");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != cols_) throw IoError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                                             std::to_string(cols_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << quote(cells[i]);
    }
    os_ << "\r\n";
  }

  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + '"';
  }

  static std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }
  static std::string num(long long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }
  static std::string num(bool v) { return v ? "true" : "false"; }

 private:
  std::ostream& os_;
  std::size_t cols_;
};

/// Splits RFC-4180 text into rows of cells.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(cell));
      cell.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      cell += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (any) {
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace hmhd
