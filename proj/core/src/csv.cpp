#include "oap/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "oap/error.hpp"
#include "oap/text.hpp"

namespace oap {

namespace {

void expect_header(const CsvTable& t, const std::vector<std::string>& want) {
  if (t.header != want) {
    std::string joined;
    for (const auto& h : want) joined += (joined.empty() ? "" : ",") + h;
    throw ParseError("expected CSV header '" + joined + "'");
  }
}

}  // namespace

void write_csv(const CsvTable& table, std::ostream& out) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << table.header[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << format_number(row[c]);
    }
    out << '\n';
  }
}

void write_csv(const CsvTable& table, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  write_csv(table, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw ParseError("line 1: missing CSV header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto h : split(line, ',')) t.header.emplace_back(h);
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      throw ParseError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw ParseError("line " + std::to_string(lineno) + ", column '" +
                         t.header[c] + "': '" + std::string(cells[c]) +
                         "' is not a number");
      }
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open '" + file.string() + "' for reading");
  return read_csv(in);
}

CsvTable path_table(const ApproachPath& path) {
  CsvTable t{{"x", "y", "z", "p_d"}, {}};
  for (std::size_t i = 0; i < path.positions.size(); ++i) {
    const Vec3& p = path.positions[i];
    t.rows.push_back({p.x(), p.y(), p.z(), path.p_d[i]});
  }
  return t;
}

CsvTable trajectory_table(const VehicleTrajectory& trajectory) {
  CsvTable t{{"t", "x", "y", "z", "yaw", "pitch"}, {}};
  for (const auto& s : trajectory.samples) {
    t.rows.push_back({s.t, s.position.x(), s.position.y(), s.position.z(), s.yaw, s.pitch});
  }
  return t;
}

CsvTable envelope_table(const RoadEnvelope& envelope) {
  CsvTable t{{"s", "cx", "cy", "cz", "half_width", "violation_flag"}, {}};
  for (std::size_t i = 0; i < envelope.centerline.size(); ++i) {
    const Vec3& c = envelope.centerline[i];
    t.rows.push_back({envelope.station[i], c.x(), c.y(), c.z(), envelope.half_width,
                      static_cast<double>(envelope.violation_flags[i])});
  }
  return t;
}

VehicleTrajectory trajectory_from_table(const CsvTable& table) {
  expect_header(table, {"t", "x", "y", "z", "yaw", "pitch"});
  VehicleTrajectory out;
  for (const auto& r : table.rows) {
    out.samples.push_back({r[0], Vec3{r[1], r[2], r[3]}, r[4], r[5]});
  }
  return out;
}

PathPoints path_from_table(const CsvTable& table) {
  expect_header(table, {"x", "y", "z", "p_d"});
  PathPoints out;
  for (const auto& r : table.rows) {
    out.positions.emplace_back(r[0], r[1], r[2]);
    out.p_d.push_back(r[3]);
  }
  return out;
}

}  // namespace oap
