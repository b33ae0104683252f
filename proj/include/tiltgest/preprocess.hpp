#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tiltgest/error.hpp"
#include "tiltgest/trace_io.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

/// Mean of a held pose window, the classifier's input.
struct StablePoint {
  Vec3 centroid;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;

  friend bool operator==(const StablePoint&, const StablePoint&) = default;
};

struct PreprocessConfig {
  std::size_t window_size = 6;
  double stddev_threshold = 0.05;  // g
  std::int64_t dwell_ms = 200;

  friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;

  void validate() const {
    if (window_size < 2)
      throw Error(Errc::InvalidConfig, "window_size", "must be >= 2");
    if (!(stddev_threshold > 0.0))
      throw Error(Errc::InvalidConfig, "stddev_threshold", "must be > 0");
    if (dwell_ms < 0) throw Error(Errc::InvalidConfig, "dwell_ms", "must be >= 0");
  }
};

namespace detail {

// Per-axis population variance written as the mean squared pairwise
// difference, so identical samples give exactly zero.
inline double pairwise_variance(std::span<const AccelSample> w,
                                double AccelSample::*axis) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const double d = w[i].*axis - w[j].*axis;
      sum += d * d;
    }
  const double n = static_cast<double>(w.size());
  return sum / (n * n);
}

}  // namespace detail

/// Euclidean norm of the per-axis population standard deviations.
inline double window_stddev(std::span<const AccelSample> window,
                            std::size_t window_size) {
  if (window.size() != window_size)
    throw Error(Errc::WrongWindowLength, std::to_string(window.size()),
                "expected " + std::to_string(window_size) + " samples");
  return std::sqrt(detail::pairwise_variance(window, &AccelSample::ax) +
                   detail::pairwise_variance(window, &AccelSample::ay) +
                   detail::pairwise_variance(window, &AccelSample::az));
}

/// Arithmetic mean anchored at the first sample; exact for identical samples.
inline Vec3 window_mean(std::span<const AccelSample> window) {
  const Vec3 first = window.front().accel();
  Vec3 acc;
  for (const auto& s : window) acc += s.accel() - first;
  return first + acc * (1.0 / static_cast<double>(window.size()));
}

/// Streaming stable-pose detector.
///
/// A window is stable when its stddev is within the threshold. An episode is
/// a run of stable windows whose centroids stay within 2x threshold of the
/// episode's first centroid; it yields one StablePoint once it has lasted
/// `dwell_ms` (measured from the first stable window's first sample).
class StableDetector {
 public:
  explicit StableDetector(PreprocessConfig cfg = {}) : cfg_(cfg) { cfg_.validate(); }

  const PreprocessConfig& config() const { return cfg_; }

  std::optional<StablePoint> push(const AccelSample& s) {
    window_.push_back(s);
    if (window_.size() > cfg_.window_size) window_.pop_front();
    if (window_.size() < cfg_.window_size) return std::nullopt;

    const std::vector<AccelSample> w(window_.begin(), window_.end());
    if (window_stddev(w, cfg_.window_size) > cfg_.stddev_threshold) {
      episode_.reset();
      return std::nullopt;
    }

    const Vec3 centroid = window_mean(w);
    const std::int64_t t_start = w.front().t;
    const std::int64_t t_end = w.back().t;

    if (episode_ &&
        distance(centroid, episode_->anchor) > 2.0 * cfg_.stddev_threshold)
      episode_.reset();
    if (!episode_) episode_ = Episode{centroid, t_start, false};

    if (!episode_->emitted && t_end - episode_->since >= cfg_.dwell_ms) {
      episode_->emitted = true;
      return StablePoint{centroid, t_start, t_end};
    }
    return std::nullopt;
  }

  void reset() {
    window_.clear();
    episode_.reset();
  }

 private:
  struct Episode {
    Vec3 anchor;
    std::int64_t since = 0;
    bool emitted = false;
  };

  PreprocessConfig cfg_;
  std::deque<AccelSample> window_;
  std::optional<Episode> episode_;
};

inline std::vector<StablePoint> detect_stable(std::span<const AccelSample> samples,
                                              const PreprocessConfig& cfg = {}) {
  StableDetector detector(cfg);
  std::vector<StablePoint> out;
  for (const auto& s : samples)
    if (auto p = detector.push(s)) out.push_back(*p);
  return out;
}

}  // namespace tiltgest
