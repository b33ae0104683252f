#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "tiltgest/calibration.hpp"
#include "tiltgest/direction.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/preprocess.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

/// Angle between the sensor's +z axis and the measured gravity, [0, 180].
struct TiltAngle {
  double degrees = 0.0;

  friend constexpr auto operator<=>(const TiltAngle&, const TiltAngle&) = default;
};

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// atan(sqrt(x^2 + y^2) / z), with the sign of z selecting the quadrant so
/// upside-down poses map to (90, 180].
inline TiltAngle tilt_angle(const Vec3& p) {
  if (p.x == 0.0 && p.y == 0.0 && p.z == 0.0) throw Error(Errc::ZeroVector, "");
  return {std::atan2(std::hypot(p.x, p.y), p.z) * kRadToDeg};
}

struct LevelBoundaries {
  double dead_zone_deg = 15.0;
  double l1_max_deg = 40.0;
  double l2_max_deg = 65.0;

  friend bool operator==(const LevelBoundaries&, const LevelBoundaries&) = default;

  void validate() const {
    if (!(0.0 < dead_zone_deg && dead_zone_deg < l1_max_deg &&
          l1_max_deg < l2_max_deg && l2_max_deg < 90.0))
      throw Error(Errc::InvalidConfig, "level_boundaries",
                  "need 0 < dead_zone < l1_max < l2_max < 90");
  }
};

/// 0 inside the dead zone, otherwise the tilt level 1..3.
inline int quantize_level(TiltAngle angle, const LevelBoundaries& b) {
  if (angle.degrees <= b.dead_zone_deg) return 0;
  if (angle.degrees <= b.l1_max_deg) return 1;
  if (angle.degrees <= b.l2_max_deg) return 2;
  return 3;
}

struct Classification {
  Direction label = Direction::Steady;
  int level = 1;
  double distance = 0.0;
  TiltAngle angle;

  friend bool operator==(const Classification&, const Classification&) = default;
};

/// Nearest calibrated centroid by Euclidean distance. Ties go to Steady, then
/// to the earliest calibrated point. When `levels` is given, a tilt
/// direction's level comes from the query angle instead of the winning
/// centroid.
inline Classification classify(const CalibrationSet& set, const StablePoint& p,
                               const std::optional<LevelBoundaries>& levels = {}) {
  if (!set.steady() || set.points().empty()) throw Error(Errc::EmptySet, "");

  Classification out;
  out.label = Direction::Steady;
  out.level = 1;
  out.distance = distance(p.centroid, *set.steady());
  for (const auto& cp : set.points()) {
    const double d = distance(p.centroid, cp.centroid);
    if (d < out.distance) {
      out.distance = d;
      out.label = cp.label;
      out.level = cp.level;
    }
  }

  const bool zero = p.centroid.x == 0.0 && p.centroid.y == 0.0 && p.centroid.z == 0.0;
  out.angle = zero ? TiltAngle{} : tilt_angle(p.centroid);
  if (levels && out.label != Direction::Steady)
    out.level = std::max(1, quantize_level(out.angle, *levels));
  return out;
}

}  // namespace tiltgest
