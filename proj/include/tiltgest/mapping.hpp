#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tiltgest/classify.hpp"
#include "tiltgest/direction.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/trace_io.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

// ---------------------------------------------------------------------------
// Events

struct DirectGesture {
  Direction label = Direction::Right;
  int level = 1;
  friend bool operator==(const DirectGesture&, const DirectGesture&) = default;
};

struct SequenceGesture {
  std::vector<Direction> labels;
  friend bool operator==(const SequenceGesture&, const SequenceGesture&) = default;
};

struct PointerMove {
  double dx = 0.0;
  double dy = 0.0;
  double x = 0.0;  // cursor after the move
  double y = 0.0;
  friend bool operator==(const PointerMove&, const PointerMove&) = default;
};

enum class ClickKind { Tap, Shake };

struct Click {
  ClickKind kind = ClickKind::Tap;
  friend bool operator==(const Click&, const Click&) = default;
};

/// Diagnostic: a tilt sequence grew past the configured maximum.
struct SequenceOverflow {
  std::vector<Direction> labels;
  friend bool operator==(const SequenceOverflow&, const SequenceOverflow&) = default;
};

using EventPayload =
    std::variant<DirectGesture, SequenceGesture, PointerMove, Click, SequenceOverflow>;

struct GestureEvent {
  std::int64_t t = 0;
  EventPayload payload;

  friend bool operator==(const GestureEvent&, const GestureEvent&) = default;
};

/// A classification stamped with the time of the stable window it came from.
struct TimedClassification {
  std::int64_t t = 0;
  Classification c;
};

inline std::string_view to_string(ClickKind k) {
  return k == ClickKind::Tap ? "tap" : "shake";
}

inline nlohmann::ordered_json labels_to_json(const std::vector<Direction>& labels) {
  auto arr = nlohmann::ordered_json::array();
  for (Direction d : labels) arr.push_back(to_string(d));
  return arr;
}

/// `{"t":..., "type":"direct"|"sequence"|"pointer"|"click"|"diagnostic", ...}`
inline nlohmann::ordered_json to_json(const GestureEvent& e) {
  nlohmann::ordered_json j;
  j["t"] = e.t;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DirectGesture>) {
          j["type"] = "direct";
          j["label"] = to_string(p.label);
          j["level"] = p.level;
        } else if constexpr (std::is_same_v<T, SequenceGesture>) {
          j["type"] = "sequence";
          j["labels"] = labels_to_json(p.labels);
        } else if constexpr (std::is_same_v<T, PointerMove>) {
          j["type"] = "pointer";
          j["dx"] = p.dx;
          j["dy"] = p.dy;
          j["x"] = p.x;
          j["y"] = p.y;
        } else if constexpr (std::is_same_v<T, Click>) {
          j["type"] = "click";
          j["kind"] = to_string(p.kind);
        } else {
          j["type"] = "diagnostic";
          j["kind"] = "sequence_overflow";
          j["labels"] = labels_to_json(p.labels);
        }
      },
      e.payload);
  return j;
}

// ---------------------------------------------------------------------------
// Direct mapping

enum class TriggerMode { SingleTilt, DoubleTilt };

inline constexpr std::int64_t kDefaultPairingWindowMs = 1500;

/// One event per steady-to-steady excursion. An excursion is identified by
/// its first non-Steady classification; consecutive Steady classifications
/// count as a single return.
///
/// SingleTilt emits at the onset of an excursion. DoubleTilt emits at the
/// onset of the second of two consecutive excursions with the same gesture
/// whose onsets lie within the pairing window; a different gesture becomes
/// the new first half.
class DirectDispatcher {
 public:
  explicit DirectDispatcher(TriggerMode mode = TriggerMode::SingleTilt,
                            std::int64_t pairing_window_ms = kDefaultPairingWindowMs)
      : mode_(mode), window_(pairing_window_ms) {
    if (pairing_window_ms < 0)
      throw Error(Errc::InvalidConfig, "pairing_window_ms", "must be >= 0");
  }

  std::optional<GestureEvent> step(const TimedClassification& tc) {
    const Classification& c = tc.c;
    if (c.label == Direction::Steady) {
      armed_ = true;
      return std::nullopt;
    }
    if (!armed_) return std::nullopt;
    armed_ = false;

    const DirectGesture g{c.label, c.level};
    if (mode_ == TriggerMode::SingleTilt) return GestureEvent{tc.t, g};

    if (pending_ && pending_->gesture == g && tc.t - pending_->t <= window_) {
      pending_.reset();
      return GestureEvent{tc.t, g};
    }
    pending_ = Pending{g, tc.t};
    return std::nullopt;
  }

  TriggerMode mode() const { return mode_; }

 private:
  struct Pending {
    DirectGesture gesture;
    std::int64_t t = 0;
  };

  TriggerMode mode_;
  std::int64_t window_;
  bool armed_ = false;
  std::optional<Pending> pending_;
};

// ---------------------------------------------------------------------------
// Tilt sequences

inline constexpr std::size_t kDefaultMaxSequence = 8;

class SequenceTracker {
 public:
  enum class Phase { Idle, Building };

  explicit SequenceTracker(std::size_t max_length = kDefaultMaxSequence)
      : max_(max_length) {
    if (max_length == 0) throw Error(Errc::InvalidConfig, "max_sequence", "must be >= 1");
  }

  Phase phase() const { return buffer_.empty() ? Phase::Idle : Phase::Building; }
  const std::vector<Direction>& buffer() const { return buffer_; }

  /// A held direction contributes once; the return to Steady completes the
  /// sequence.
  std::optional<GestureEvent> step(const TimedClassification& tc) {
    const Direction label = tc.c.label;
    if (label == Direction::Steady) {
      if (buffer_.empty()) return std::nullopt;
      GestureEvent e{tc.t, SequenceGesture{std::move(buffer_)}};
      buffer_.clear();
      return e;
    }
    if (!buffer_.empty() && buffer_.back() == label) return std::nullopt;
    buffer_.push_back(label);
    if (buffer_.size() > max_) {
      GestureEvent e{tc.t, SequenceOverflow{std::move(buffer_)}};
      buffer_.clear();
      return e;
    }
    return std::nullopt;
  }

 private:
  std::size_t max_;
  std::vector<Direction> buffer_;
};

// ---------------------------------------------------------------------------
// Pointer movement

enum class PointerMethod { AngleDisplacement, ThresholdSpeed };

inline constexpr double kReferenceWidth = 1024.0;
inline constexpr double kReferenceHeight = 768.0;

struct PointerConfig {
  int screen_w = 1024;
  int screen_h = 768;
  double gain = 0.5;  // px per degree beyond the dead zone, per tick
  double dead_zone_deg = 5.0;
  PointerMethod method = PointerMethod::AngleDisplacement;
  std::int64_t tick_ms = 20;
  // ThresholdSpeed only.
  double threshold_g = 0.1;
  double speed_gain = 40.0;  // px per g of excess, per tick

  friend bool operator==(const PointerConfig&, const PointerConfig&) = default;

  void validate() const {
    if (screen_w <= 0 || screen_h <= 0)
      throw Error(Errc::InvalidConfig, "screen", "dimensions must be positive");
    if (!(gain > 0.0) || !std::isfinite(gain))
      throw Error(Errc::InvalidConfig, "gain", "must be > 0");
    if (!(dead_zone_deg >= 0.0 && dead_zone_deg < 90.0))
      throw Error(Errc::InvalidConfig, "dead_zone_deg", "must be in [0, 90)");
    if (tick_ms < 0) throw Error(Errc::InvalidConfig, "tick_ms", "must be >= 0");
    if (!(threshold_g >= 0.0) || !std::isfinite(threshold_g))
      throw Error(Errc::InvalidConfig, "threshold_g", "must be >= 0");
    if (!(speed_gain > 0.0) || !std::isfinite(speed_gain))
      throw Error(Errc::InvalidConfig, "speed_gain", "must be > 0");
  }
};

/// Per-axis tilt angle, atan(|a| / |az|) in degrees; 90 when az is zero.
inline double axis_tilt_deg(double a, double az) {
  return std::atan2(std::abs(a), std::abs(az)) * kRadToDeg;
}

namespace detail {
inline double sign(double v) { return (v > 0.0) - (v < 0.0); }
}  // namespace detail

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
};

/// Unclamped displacement for one tick. Right tilt (+ax) moves +x; up tilt
/// (+ay) moves -y since screen rows grow downward.
inline Displacement pointer_displacement(const Vec3& a, const PointerConfig& cfg) {
  const double sx = cfg.screen_w / kReferenceWidth;
  const double sy = cfg.screen_h / kReferenceHeight;
  Displacement d;
  if (cfg.method == PointerMethod::AngleDisplacement) {
    const double ex = std::max(0.0, axis_tilt_deg(a.x, a.z) - cfg.dead_zone_deg);
    const double ey = std::max(0.0, axis_tilt_deg(a.y, a.z) - cfg.dead_zone_deg);
    d.dx = cfg.gain * detail::sign(a.x) * ex * sx;
    d.dy = -cfg.gain * detail::sign(a.y) * ey * sy;
  } else {
    const double ex = std::max(0.0, std::abs(a.x) - cfg.threshold_g);
    const double ey = std::max(0.0, std::abs(a.y) - cfg.threshold_g);
    d.dx = cfg.speed_gain * detail::sign(a.x) * ex * sx;
    d.dy = -cfg.speed_gain * detail::sign(a.y) * ey * sy;
  }
  return d;
}

/// Cursor integrator. Starts at the screen centre and stays inside
/// [0, screen_w) x [0, screen_h); reported deltas are the applied ones.
class PointerTracker {
 public:
  explicit PointerTracker(PointerConfig cfg = {})
      : cfg_(cfg),
        x_(cfg.screen_w / 2.0),
        y_(cfg.screen_h / 2.0) {
    cfg_.validate();
  }

  double x() const { return x_; }
  double y() const { return y_; }

  GestureEvent step(const Vec3& a, std::int64_t t) {
    const Displacement d = pointer_displacement(a, cfg_);
    const double nx = std::clamp(x_ + d.dx, 0.0, max_x());
    const double ny = std::clamp(y_ + d.dy, 0.0, max_y());
    PointerMove m{nx - x_, ny - y_, nx, ny};
    x_ = nx;
    y_ = ny;
    last_tick_ = t;
    return {t, m};
  }

  /// Rate-limited feed for raw samples: at most one move per `tick_ms`.
  std::optional<GestureEvent> sample(const AccelSample& s) {
    if (last_tick_ && s.t - *last_tick_ < cfg_.tick_ms) return std::nullopt;
    return step(s.accel(), s.t);
  }

 private:
  double max_x() const { return std::nextafter(static_cast<double>(cfg_.screen_w), 0.0); }
  double max_y() const { return std::nextafter(static_cast<double>(cfg_.screen_h), 0.0); }

  PointerConfig cfg_;
  double x_;
  double y_;
  std::optional<std::int64_t> last_tick_;
};

// ---------------------------------------------------------------------------
// Tap and shake

struct TapConfig {
  double spike_g = 0.8;
  std::int64_t settle_ms = 100;
  std::int64_t shake_window_ms = 500;
  std::size_t shake_min_spikes = 3;
};

/// Click detector over raw samples.
///
/// A spike starts when consecutive samples differ by more than `spike_g`
/// (norm of the difference vector) and ends once the signal is back within
/// `spike_g` of the pre-spike sample; it only counts if that happens within
/// `settle_ms`. Its polarity is the sign of the dominant axis of the jump.
/// Spikes with alternating polarity on the same axis, all within
/// `shake_window_ms` of the first, form a run; a run of `shake_min_spikes`
/// emits one Shake and swallows its spikes. Otherwise each spike is
/// reported as a Tap once its run closes.
class TapDetector {
 public:
  explicit TapDetector(TapConfig cfg = {}) : cfg_(cfg) {
    if (!(cfg.spike_g > 0.0)) throw Error(Errc::InvalidConfig, "spike_g", "must be > 0");
    if (cfg.shake_min_spikes < 2)
      throw Error(Errc::InvalidConfig, "shake_min_spikes", "must be >= 2");
  }

  std::vector<GestureEvent> push(const AccelSample& s) {
    std::vector<GestureEvent> out;
    const Vec3 a = s.accel();
    expire(s.t, out);

    if (active_) {
      if (distance(a, active_->baseline) <= cfg_.spike_g) {
        add_spike(Spike{active_->t, active_->axis, active_->polarity}, out);
        active_.reset();
      } else if (s.t - active_->t > cfg_.settle_ms) {
        active_.reset();  // a pose change, not a click
      }
    } else if (prev_ && distance(a, *prev_) > cfg_.spike_g) {
      const Vec3 jump = a - *prev_;
      const double c[3] = {jump.x, jump.y, jump.z};
      int axis = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(c[i]) > std::abs(c[axis])) axis = i;
      active_ = Active{s.t, *prev_, axis, c[axis] > 0.0 ? 1 : -1};
    }
    prev_ = a;
    return out;
  }

  /// Flushes any pending run at end of stream.
  std::vector<GestureEvent> finish() {
    std::vector<GestureEvent> out;
    close_run(out);
    return out;
  }

 private:
  struct Spike {
    std::int64_t t = 0;
    int axis = 0;
    int polarity = 1;
  };
  struct Active {
    std::int64_t t = 0;
    Vec3 baseline;
    int axis = 0;
    int polarity = 1;
  };

  void expire(std::int64_t now, std::vector<GestureEvent>& out) {
    if (!run_.empty() && now - run_.front().t > cfg_.shake_window_ms) close_run(out);
  }

  void close_run(std::vector<GestureEvent>& out) {
    if (!shaken_)
      for (const auto& sp : run_) out.push_back({sp.t, Click{ClickKind::Tap}});
    run_.clear();
    shaken_ = false;
  }

  void add_spike(const Spike& sp, std::vector<GestureEvent>& out) {
    const bool extends = !run_.empty() && run_.back().axis == sp.axis &&
                         run_.back().polarity == -sp.polarity &&
                         sp.t - run_.front().t <= cfg_.shake_window_ms;
    if (!extends) close_run(out);
    run_.push_back(sp);
    if (!shaken_ && run_.size() >= cfg_.shake_min_spikes) {
      shaken_ = true;
      out.push_back({sp.t, Click{ClickKind::Shake}});
    }
  }

  TapConfig cfg_;
  std::optional<Vec3> prev_;
  std::optional<Active> active_;
  std::vector<Spike> run_;
  bool shaken_ = false;
};

}  // namespace tiltgest
