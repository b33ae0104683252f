#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "tiltgest/error.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

enum class Direction {
  Steady,
  Up,
  Down,
  Left,
  Right,
  UpLeft,
  UpRight,
  DownLeft,
  DownRight,
};

inline constexpr std::array<Direction, 8> kTiltDirections = {
    Direction::Right,    Direction::UpRight, Direction::Up,
    Direction::UpLeft,   Direction::Left,    Direction::DownLeft,
    Direction::Down,     Direction::DownRight,
};

inline constexpr int kMaxLevel = 3;

constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::Steady: return "Steady";
    case Direction::Up: return "Up";
    case Direction::Down: return "Down";
    case Direction::Left: return "Left";
    case Direction::Right: return "Right";
    case Direction::UpLeft: return "UpLeft";
    case Direction::UpRight: return "UpRight";
    case Direction::DownLeft: return "DownLeft";
    case Direction::DownRight: return "DownRight";
  }
  return "Steady";
}

constexpr std::optional<Direction> parse_direction(std::string_view name) {
  constexpr std::array<Direction, 9> all = {
      Direction::Steady,  Direction::Up,       Direction::Down,
      Direction::Left,    Direction::Right,    Direction::UpLeft,
      Direction::UpRight, Direction::DownLeft, Direction::DownRight,
  };
  for (Direction d : all)
    if (to_string(d) == name) return d;
  return std::nullopt;
}

inline Direction direction_from_name(std::string_view name) {
  if (auto d = parse_direction(name)) return *d;
  throw Error(Errc::UnknownDirection, std::string(name));
}

/// Azimuth of a tilt direction in degrees, counter-clockwise from +x (Right).
constexpr double azimuth_deg(Direction d) {
  switch (d) {
    case Direction::Right: return 0.0;
    case Direction::UpRight: return 45.0;
    case Direction::Up: return 90.0;
    case Direction::UpLeft: return 135.0;
    case Direction::Left: return 180.0;
    case Direction::DownLeft: return 225.0;
    case Direction::Down: return 270.0;
    case Direction::DownRight: return 315.0;
    case Direction::Steady: return 0.0;
  }
  return 0.0;
}

/// Unit gravity reading for a sensor tilted `tilt_deg` away from flat
/// towards `azimuth` (degrees).
inline Vec3 tilt_pose(double azimuth, double tilt_deg) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double s = std::sin(tilt_deg * rad);
  return {s * std::cos(azimuth * rad), s * std::sin(azimuth * rad),
          std::cos(tilt_deg * rad)};
}

inline Vec3 tilt_pose(Direction d, double tilt_deg) {
  if (d == Direction::Steady) return {0.0, 0.0, 1.0};
  return tilt_pose(azimuth_deg(d), tilt_deg);
}

}  // namespace tiltgest
