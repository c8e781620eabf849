#pragma once

#include "oap/grid.hpp"

namespace oap {

/// Bundled front-facing sensor suite used by the default configuration:
/// long-range radar, mid-range radar, camera, lidar and two corner radars.
/// Every sensor uses the quadratic range decay.
SensorSetup reference_sensor_setup();

}  // namespace oap
