#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "oap/pathfind.hpp"
#include "oap/transform.hpp"

namespace oap {

/// Numeric table with a header row. Numbers are written in shortest
/// round-trip form, so read_csv(write_csv(t)) == t bit for bit.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::filesystem::path& file);

/// Throws ParseError naming the line for ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& file);

/// Columns x,y,z,p_d; one row per node from v_1 to v_N.
CsvTable path_table(const ApproachPath& path);
/// Columns t,x,y,z,yaw,pitch.
CsvTable trajectory_table(const VehicleTrajectory& trajectory);
/// Columns s,cx,cy,cz,half_width,violation_flag; one row per centerline sample.
CsvTable envelope_table(const RoadEnvelope& envelope);

/// Inverse of trajectory_table. The speed is not stored and is left at 0.
/// Throws ParseError when the header does not match.
VehicleTrajectory trajectory_from_table(const CsvTable& table);

/// Positions and P_D of a path table (nodes and cost are not stored).
struct PathPoints {
  std::vector<Vec3> positions;
  std::vector<double> p_d;
};
PathPoints path_from_table(const CsvTable& table);

}  // namespace oap
