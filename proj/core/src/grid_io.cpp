#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "oap/error.hpp"
#include "oap/grid.hpp"
#include "oap/text.hpp"

namespace oap {

namespace {

constexpr std::string_view kMagic = "OAPGRID 1";

std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) out.push_back(line.substr(start, pos - start));
  }
  return out;
}

bool next_line(std::istream& in, std::string& line, int& lineno) {
  if (!std::getline(in, line)) return false;
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

Vec3 read_triple(std::istream& in, int& lineno, const char* what) {
  std::string line;
  if (!next_line(in, line, lineno)) {
    throw ParseError("line " + std::to_string(lineno + 1) + ": missing " + what);
  }
  const auto t = tokens(line);
  if (t.size() != 3) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what +
                     " needs 3 numbers, found " + std::to_string(t.size()));
  }
  Vec3 v;
  for (int a = 0; a < 3; ++a) {
    const auto x = parse_number(t[a]);
    if (!x) {
      throw ParseError("line " + std::to_string(lineno) + ": " + what +
                       " has non-numeric token '" + std::string(t[a]) + "'");
    }
    v[a] = *x;
  }
  return v;
}

}  // namespace

void save_grid(const DetectionGrid& grid, std::ostream& out) {
  const GridSpec& s = grid.spec();
  const Vec3& e = grid.ego_position();
  out << kMagic << '\n'
      << grid.nx() << ' ' << grid.ny() << ' ' << grid.nz() << '\n'
      << format_number(s.x_min) << ' ' << format_number(s.y_min) << ' '
      << format_number(s.z_min) << '\n'
      << format_number(s.dx) << ' ' << format_number(s.dy) << ' '
      << format_number(s.dz) << '\n'
      << format_number(e.x()) << ' ' << format_number(e.y()) << ' '
      << format_number(e.z()) << '\n';
  // One x-plane per line keeps files diffable without affecting parsing.
  const std::size_t per_line = static_cast<std::size_t>(grid.ny()) * grid.nz();
  const auto values = grid.values();
  for (std::size_t n = 0; n < values.size(); ++n) {
    out << format_number(values[n]);
    out << (((n + 1) % per_line == 0) ? '\n' : ' ');
  }
}

void save_grid(const DetectionGrid& grid, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  save_grid(grid, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

DetectionGrid load_grid(std::istream& in) {
  int lineno = 0;
  std::string line;
  if (!next_line(in, line, lineno) || line != kMagic) {
    throw ParseError("line 1: expected header '" + std::string(kMagic) + "'");
  }
  if (!next_line(in, line, lineno)) throw ParseError("line 2: missing dimensions");
  const auto dims = tokens(line);
  if (dims.size() != 3) {
    throw ParseError("line 2: dimensions need 3 integers, found " +
                     std::to_string(dims.size()));
  }
  long n[3];
  for (int a = 0; a < 3; ++a) {
    auto [ptr, ec] =
        std::from_chars(dims[a].data(), dims[a].data() + dims[a].size(), n[a]);
    if (ec != std::errc{} || ptr != dims[a].data() + dims[a].size() || n[a] < 2) {
      throw ParseError("line 2: dimension '" + std::string(dims[a]) +
                       "' must be an integer >= 2");
    }
  }
  const Vec3 origin = read_triple(in, lineno, "origin");
  const Vec3 spacing = read_triple(in, lineno, "spacing");
  const Vec3 ego = read_triple(in, lineno, "ego position");

  GridSpec spec;
  spec.x_min = origin.x();
  spec.y_min = origin.y();
  spec.z_min = origin.z();
  spec.dx = spacing.x();
  spec.dy = spacing.y();
  spec.dz = spacing.z();
  spec.x_max = spec.x_min + (n[0] - 1) * spec.dx;
  spec.y_max = spec.y_min + (n[1] - 1) * spec.dy;
  spec.z_max = spec.z_min + (n[2] - 1) * spec.dz;
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw ParseError(std::string("lines 3-4: ") + e.what());
  }
  if (spec.nx() != n[0] || spec.ny() != n[1] || spec.nz() != n[2]) {
    throw ParseError("lines 2-4: dimensions inconsistent with spacing");
  }

  const std::size_t expected = static_cast<std::size_t>(n[0]) * n[1] * n[2];
  std::vector<double> values;
  values.reserve(expected);
  while (next_line(in, line, lineno)) {
    for (auto tok : tokens(line)) {
      const auto v = parse_number(tok);
      if (!v) {
        throw ParseError("line " + std::to_string(lineno) + ": value #" +
                         std::to_string(values.size()) + " '" +
                         std::string(tok) + "' is not a number");
      }
      if (!(*v >= 0.0 && *v <= 1.0)) {
        throw ParseError("line " + std::to_string(lineno) + ": value #" +
                         std::to_string(values.size()) + " = " +
                         std::string(tok) + " is outside [0, 1]");
      }
      if (values.size() == expected) {
        throw ParseError("line " + std::to_string(lineno) +
                         ": more values than the declared " +
                         std::to_string(n[0]) + "x" + std::to_string(n[1]) +
                         "x" + std::to_string(n[2]));
      }
      values.push_back(*v);
    }
  }
  if (values.size() != expected) {
    throw ParseError("declared " + std::to_string(n[0]) + "x" +
                     std::to_string(n[1]) + "x" + std::to_string(n[2]) + " = " +
                     std::to_string(expected) + " values, found " +
                     std::to_string(values.size()));
  }
  return DetectionGrid(spec, std::move(values), ego);
}

DetectionGrid load_grid(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "' for reading");
  return load_grid(in);
}

}  // namespace oap
