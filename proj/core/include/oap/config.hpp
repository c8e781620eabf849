#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oap/grid.hpp"
#include "oap/searchspace.hpp"
#include "oap/transform.hpp"

namespace oap {

/// Everything a pipeline run needs. Exactly one of `sensors` and `grid_file`
/// is set after parsing.
struct PipelineConfig {
  std::optional<SensorSetup> sensors;
  std::optional<std::filesystem::path> grid_file;
  GridSpec grid = GridSpec::fine();
  MotorwayDesignClass design;
  Vec3 start{200.0, -20.0, 2.0};   // v_1, challenger start (m)
  Vec3 ego = kDefaultEgoPosition;  // v_N
  std::vector<double> k_j{0.25};
  MotionLimits motion;
  TransformSettings transform;
  double half_width = 10.875;  // road envelope half-width (m)
  std::filesystem::path output_dir = "out";
  bool emit_plots = false;

  /// Cross-field checks; throws ConfigError with the field path.
  void validate() const;
};

/// Parses a JSON document. Relative `grid_file` paths are resolved against
/// `base_dir`. Unknown keys are rejected. Throws ConfigError, with the
/// dotted field path, for malformed or invalid input.
PipelineConfig parse_config(std::string_view json_text,
                            const std::filesystem::path& base_dir = {});

/// Throws IoError when the file cannot be read.
PipelineConfig load_config(const std::filesystem::path& file);

/// Parses "0.1,0.25,0.5". Throws ConfigError (field "kj") on a bad token.
std::vector<double> parse_k_list(std::string_view text);

}  // namespace oap
