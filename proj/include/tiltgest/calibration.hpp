#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltgest/direction.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/preprocess.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

struct CalibratedPoint {
  Direction label = Direction::Right;
  int level = 1;
  Vec3 centroid;

  friend bool operator==(const CalibratedPoint&, const CalibratedPoint&) = default;
};

/// Minimum admissible distance between calibrated centroids.
inline double virtual_border(double max_g, int n_directions) {
  if (!(max_g > 0.0) || !std::isfinite(max_g))
    throw Error(Errc::InvalidArgument, "max_g", "must be finite and > 0");
  if (n_directions < 1)
    throw Error(Errc::InvalidArgument, "n_directions", "must be >= 1");
  return max_g / static_cast<double>(n_directions);
}

/// Steady centroid plus direction centroids, all pairwise further apart than
/// the virtual border. Values are immutable; the free functions below return
/// updated copies and leave the input untouched on error.
class CalibrationSet {
 public:
  CalibrationSet() = default;

  /// Border fixed at creation from the declared direction count.
  static CalibrationSet create(double max_g, int n_directions,
                               bool levels_enabled = false) {
    return CalibrationSet(max_g, tiltgest::virtual_border(max_g, n_directions),
                          levels_enabled);
  }

  static CalibrationSet with_border(double max_g, double border,
                                    bool levels_enabled = false) {
    if (!(border > 0.0) || !std::isfinite(border))
      throw Error(Errc::InvalidArgument, "virtual_border", "must be finite and > 0");
    if (!(max_g > 0.0) || !std::isfinite(max_g))
      throw Error(Errc::InvalidArgument, "max_g", "must be finite and > 0");
    return CalibrationSet(max_g, border, levels_enabled);
  }

  const std::optional<Vec3>& steady() const { return steady_; }
  const std::vector<CalibratedPoint>& points() const { return points_; }
  double virtual_border() const { return border_; }
  double max_g() const { return max_g_; }
  bool levels_enabled() const { return levels_enabled_; }

  bool contains(Direction label, int level) const {
    for (const auto& p : points_)
      if (p.label == label && p.level == level) return true;
    return false;
  }

  /// Nearest centroid (steady first, then insertion order) strictly closer
  /// than the border to `c`, ignoring the entry at `skip` (-1 is steady).
  std::optional<Direction> border_conflict(const Vec3& c,
                                           std::optional<int> skip = {}) const {
    std::optional<Direction> nearest;
    double best = std::numeric_limits<double>::infinity();
    auto consider = [&](Direction label, const Vec3& other) {
      const double d = distance(c, other);
      if (d <= border_ && d < best) {
        best = d;
        nearest = label;
      }
    };
    if (steady_ && skip != -1) consider(Direction::Steady, *steady_);
    for (int i = 0; i < static_cast<int>(points_.size()); ++i)
      if (skip != i) consider(points_[i].label, points_[i].centroid);
    return nearest;
  }

  friend bool operator==(const CalibrationSet&, const CalibrationSet&) = default;

 private:
  CalibrationSet(double max_g, double border, bool levels)
      : border_(border), max_g_(max_g), levels_enabled_(levels) {}

  friend CalibrationSet calibrate_steady(const CalibrationSet&, const StablePoint&,
                                         bool);
  friend CalibrationSet try_add_direction(const CalibrationSet&, Direction, int,
                                          const StablePoint&);

  std::optional<Vec3> steady_;
  std::vector<CalibratedPoint> points_;
  double border_ = 1.0;
  double max_g_ = 1.0;
  bool levels_enabled_ = false;
};

/// Sets the steady centroid. Existing direction points must stay outside
/// the border of the new steady pose.
inline CalibrationSet calibrate_steady(const CalibrationSet& set,
                                       const StablePoint& p,
                                       bool recalibrate = false) {
  if (set.steady_ && *set.steady_ == p.centroid) return set;
  if (set.steady_ && !recalibrate)
    throw Error(Errc::SteadyAlreadyCalibrated, "",
                "pass recalibrate to replace the steady pose");
  if (!is_finite(p.centroid))
    throw Error(Errc::InvalidArgument, "centroid", "must be finite");
  if (auto hit = set.border_conflict(p.centroid, -1))
    throw Error(Errc::BorderViolation, std::string(to_string(*hit)),
                "steady pose is within the virtual border");
  CalibrationSet out = set;
  out.steady_ = p.centroid;
  return out;
}

inline CalibrationSet try_add_direction(const CalibrationSet& set, Direction label,
                                        int level, const StablePoint& p) {
  if (label == Direction::Steady)
    throw Error(Errc::InvalidArgument, "label", "use calibrate_steady for Steady");
  if (level < 1 || level > kMaxLevel)
    throw Error(Errc::InvalidArgument, "level", "must be in 1..3");
  if (level != 1 && !set.levels_enabled_)
    throw Error(Errc::InvalidArgument, "level", "levels are not enabled for this set");
  if (!set.steady_) throw Error(Errc::SteadyMissing, "");
  if (set.contains(label, level))
    throw Error(Errc::DuplicateLabel,
                std::string(to_string(label)) + ":" + std::to_string(level));
  if (!is_finite(p.centroid))
    throw Error(Errc::InvalidArgument, "centroid", "must be finite");
  if (auto hit = set.border_conflict(p.centroid))
    throw Error(Errc::BorderViolation, std::string(to_string(*hit)),
                "pose is within the virtual border");
  CalibrationSet out = set;
  out.points_.push_back({label, level, p.centroid});
  return out;
}

// ---------------------------------------------------------------------------
// Persistence: {steady, max_g, virtual_border, levels, points:[{label, level, centroid}]}

inline nlohmann::json vec_to_json(const Vec3& v) { return {v.x, v.y, v.z}; }

inline Vec3 vec_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number())
    throw Error(Errc::ParseError, what, "expected [x, y, z]");
  Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (!is_finite(v)) throw Error(Errc::ParseError, what, "non-finite component");
  return v;
}

inline nlohmann::ordered_json to_json(const CalibrationSet& set) {
  nlohmann::ordered_json j;
  j["steady"] = set.steady() ? vec_to_json(*set.steady()) : nlohmann::json(nullptr);
  j["max_g"] = set.max_g();
  j["virtual_border"] = set.virtual_border();
  j["levels"] = set.levels_enabled();
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : set.points())
    j["points"].push_back(nlohmann::ordered_json{{"label", to_string(p.label)},
                                                 {"level", p.level},
                                                 {"centroid", vec_to_json(p.centroid)}});
  return j;
}

inline std::string dump_calibration(const CalibrationSet& set) {
  return to_json(set).dump(2) + "\n";
}

/// Rebuilds a set through the calibration operations, so a file that breaks
/// the border invariant is rejected.
inline CalibrationSet calibration_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::ParseError, "calibration", "expected object");
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw Error(Errc::ParseError, key, "expected number");
    return j[key].get<double>();
  };
  const bool levels = j.value("levels", false);
  CalibrationSet set =
      CalibrationSet::with_border(number("max_g"), number("virtual_border"), levels);
  if (j.contains("steady") && !j["steady"].is_null())
    set = calibrate_steady(set, StablePoint{vec_from_json(j["steady"], "steady")});
  if (j.contains("points")) {
    if (!j["points"].is_array()) throw Error(Errc::ParseError, "points", "expected array");
    for (const auto& p : j["points"]) {
      if (!p.is_object() || !p.contains("label") || !p["label"].is_string())
        throw Error(Errc::ParseError, "points", "entry needs a label");
      const Direction label = direction_from_name(p["label"].get<std::string>());
      const int level = p.value("level", 1);
      if (!p.contains("centroid")) throw Error(Errc::ParseError, "centroid", "missing");
      set = try_add_direction(set, label, level,
                              StablePoint{vec_from_json(p["centroid"], "centroid")});
    }
  }
  return set;
}

inline CalibrationSet parse_calibration(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, "calibration", e.what());
  }
  return calibration_from_json(j);
}

}  // namespace tiltgest
