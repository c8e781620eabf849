#include "oap/reference_setup.hpp"

#include <numbers>

namespace oap {

namespace {

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

SensorSpec sensor(Vec3 mount, double azimuth_deg, double half_angle_deg,
                  double elevation_deg, double range, double p_peak) {
  SensorSpec s;
  s.mount = mount;
  s.azimuth_center = deg(azimuth_deg);
  s.azimuth_half_angle = deg(half_angle_deg);
  s.elevation_half_angle = deg(elevation_deg);
  s.max_range = range;
  s.p_peak = p_peak;
  s.decay = 2.0;
  return s;
}

}  // namespace

SensorSetup reference_sensor_setup() {
  SensorSetup setup;
  setup.sensors = {
      sensor({3.8, 0.0, 0.5}, 0.0, 9.0, 10.0, 170.0, 0.45),   // long-range radar
      sensor({3.8, 0.0, 0.5}, 0.0, 35.0, 15.0, 150.0, 0.75),   // mid-range radar
      sensor({2.0, 0.0, 1.3}, 0.0, 29.0, 20.0, 80.0, 0.70),   // camera
      sensor({3.9, 0.0, 0.6}, 0.0, 70.0, 15.0, 40.0, 0.90),    // lidar
      sensor({3.6, 0.8, 0.5}, 45.0, 60.0, 15.0, 40.0, 0.40),   // corner radar left
      sensor({3.6, -0.8, 0.5}, -45.0, 60.0, 15.0, 40.0, 0.40), // corner radar right
  };
  setup.attenuation = 1.0;
  return setup;
}

}  // namespace oap
