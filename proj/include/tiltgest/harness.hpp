#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "tiltgest/calibration.hpp"
#include "tiltgest/classify.hpp"
#include "tiltgest/direction.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/mapping.hpp"
#include "tiltgest/preprocess.hpp"
#include "tiltgest/trace_io.hpp"

namespace tiltgest {

/// Circular-menu selection task: each trial shows one of `n_targets` items.
struct TargetSession {
  int n_targets = 4;
  int trials = 100;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_targets != 4 && n_targets != 8 && n_targets != 12 && n_targets != 16)
      throw Error(Errc::InvalidArgument, "n_targets", "must be one of 4, 8, 12, 16");
    if (trials < 1) throw Error(Errc::InvalidArgument, "trials", "must be >= 1");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
      throw Error(Errc::InvalidArgument, "sigma", "must be finite and >= 0");
  }
};

struct SessionResult {
  int n_targets = 0;
  double sigma = 0.0;
  int trials = 0;
  int hits = 0;
  int errors = 0;
  double accuracy = 0.0;
  double mean_time_ms = 0.0;  // over hits
  std::uint64_t seed = 0;

  friend bool operator==(const SessionResult&, const SessionResult&) = default;
};

/// Synthetic subject movement for one trial (version 1): hold steady, ramp
/// linearly to the target pose, hold, ramp back and rest.
struct ExcursionModel {
  double steady_ms = 400.0;
  double ramp_ms = 300.0;
  double hold_ms = 300.0;
  double return_ms = 300.0;
  double rest_ms = 300.0;
  double tremor_amp = 0.0;
  double rate_hz = kDefaultRateHz;
};

struct BenchConfig {
  ExcursionModel excursion;
  /// Stable-pose detection for the synthetic subjects. The threshold sits
  /// above the window spread of sigma 0.08 white noise (about 1.6 sigma on
  /// average) and below half the level-1 chord, which the episode drift
  /// rule needs to separate a level-1 hold from steady.
  PreprocessConfig preprocess{6, 0.2, 200};
  double max_g = 1.0;
  /// Tilt of level-1 and level-2 targets, degrees from flat.
  std::array<double, 2> level_tilt_deg{30.0, 60.0};
  /// Spread n targets over n azimuths instead of 8 azimuths x levels.
  bool pure_azimuth = false;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct Target {
  Direction label = Direction::Right;
  int level = 1;
  Vec3 pose;
};

/// Target poses for an n-target session, ordered by azimuth (level 1
/// before level 2 on the same azimuth). 4 uses the cardinal directions,
/// 8 all directions; 12 adds a second tilt level on the cardinals and 16 on
/// every direction.
inline std::vector<Target> target_layout(int n, const BenchConfig& cfg) {
  TargetSession{n, 1, 0.0, 0}.validate();
  std::vector<Target> out;
  const double t1 = cfg.level_tilt_deg[0];
  const double t2 = cfg.level_tilt_deg[1];
  if (cfg.pure_azimuth) {
    for (int i = 0; i < n; ++i) {
      const double az = 360.0 * i / n;
      out.push_back({kTiltDirections[i % 8], 1 + i / 8, tilt_pose(az, t1)});
    }
    return out;
  }
  for (Direction d : kTiltDirections) {
    const bool cardinal = d == Direction::Right || d == Direction::Up ||
                          d == Direction::Left || d == Direction::Down;
    if (n == 4 && !cardinal) continue;
    out.push_back({d, 1, tilt_pose(d, t1)});
    if (n == 16 || (n == 12 && cardinal)) out.push_back({d, 2, tilt_pose(d, t2)});
  }
  return out;
}

namespace detail {

inline std::optional<StablePoint> first_stable_point(const Vec3& pose,
                                                     const BenchConfig& cfg) {
  PoseScript script;
  script.segments = {{pose, cfg.excursion.steady_ms + 200.0, 0.0}};
  script.rate_hz = cfg.excursion.rate_hz;
  const Trace t = synth_script(script);
  const auto points = detect_stable(t.samples, cfg.preprocess);
  if (points.empty()) return std::nullopt;
  return points.front();
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Calibrates steady and every target pose from noiseless holds.
inline CalibrationSet auto_calibrate(const std::vector<Target>& layout,
                                     const BenchConfig& cfg) {
  bool levels = false;
  for (const auto& t : layout) levels |= t.level > 1;
  const int n = static_cast<int>(layout.size());
  try {
    CalibrationSet set = CalibrationSet::create(cfg.max_g, n, levels);
    auto steady = detail::first_stable_point({0.0, 0.0, 1.0}, cfg);
    if (!steady) throw Error(Errc::NoStablePose, "Steady");
    set = calibrate_steady(set, *steady);
    for (const auto& t : layout) {
      auto p = detail::first_stable_point(t.pose, cfg);
      if (!p) throw Error(Errc::NoStablePose, std::string(to_string(t.label)));
      set = try_add_direction(set, t.label, t.level, *p);
    }
    return set;
  } catch (const Error& e) {
    throw Error(Errc::CalibrationFailed, std::to_string(n), e.what());
  }
}

struct TrialOutcome {
  bool hit = false;
  std::int64_t time_ms = 0;
};

/// Adds white noise drawn in the target's azimuth frame (a rotation about z
/// of isotropic noise, so the distribution is unchanged). Trials that share
/// a seed then see the same noise relative to their target, which keeps
/// blocks with different target layouts comparable.
inline void add_target_frame_noise(Trace& trace, double sigma, double azimuth_rad,
                                   std::uint64_t seed) {
  if (sigma <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  const double c = std::cos(azimuth_rad);
  const double s = std::sin(azimuth_rad);
  for (auto& sample : trace.samples) {
    const double u = gauss(rng);
    const double v = gauss(rng);
    const double w = gauss(rng);
    sample.ax += c * u - s * v;
    sample.ay += s * u + c * v;
    sample.az += w;
  }
}

/// Runs one excursion towards `target` through detection, classification
/// and single-tilt dispatch. Time runs from leaving steady to the event.
inline TrialOutcome run_trial(const CalibrationSet& set, const Target& target,
                              double sigma, std::uint64_t noise_seed,
                              const BenchConfig& cfg) {
  const ExcursionModel& m = cfg.excursion;
  const Vec3 flat{0.0, 0.0, 1.0};
  PoseScript script;
  script.segments = {{flat, m.steady_ms, 0.0},
                     {target.pose, m.hold_ms, m.ramp_ms},
                     {flat, m.rest_ms, m.return_ms}};
  script.tremor_amp = m.tremor_amp;
  script.rate_hz = m.rate_hz;
  Trace trace = synth_script(script);
  add_target_frame_noise(trace, sigma, std::atan2(target.pose.y, target.pose.x),
                         noise_seed);

  StableDetector detector(cfg.preprocess);
  DirectDispatcher dispatcher(TriggerMode::SingleTilt);
  for (const auto& s : trace.samples) {
    const auto p = detector.push(s);
    if (!p) continue;
    const auto e = dispatcher.step({p->t_end, classify(set, *p)});
    if (!e) continue;
    const auto& g = std::get<DirectGesture>(e->payload);
    TrialOutcome out;
    out.hit = g.label == target.label && g.level == target.level;
    out.time_ms = e->t - static_cast<std::int64_t>(m.steady_ms);
    return out;
  }
  return {};
}

/// Deterministic for a fixed session and config.
///
/// Trial i draws one uniform u_i from the session seed and picks target
/// floor(u_i * n) of the azimuth-ordered layout; its noise seed depends only
/// on (seed, i). Blocks with different n therefore aim at matching azimuths
/// under the same noise.
inline SessionResult run_target_session(const TargetSession& s,
                                        const BenchConfig& cfg = {}) {
  s.validate();
  const auto layout = target_layout(s.n_targets, cfg);
  const CalibrationSet set = auto_calibrate(layout, cfg);

  std::mt19937_64 target_rng(s.seed);
  std::vector<std::size_t> targets(static_cast<std::size_t>(s.trials));
  for (auto& t : targets) {
    const double u = static_cast<double>(target_rng() >> 11) * 0x1.0p-53;
    t = std::min(layout.size() - 1,
                 static_cast<std::size_t>(u * static_cast<double>(layout.size())));
  }

  std::vector<TrialOutcome> outcomes(targets.size());
  unsigned threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
  threads = std::clamp(threads, 1u, 16u);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < targets.size(); i += stride)
      outcomes[i] = run_trial(set, layout[targets[i]], s.noise_sigma,
                              detail::splitmix64(s.seed ^ (i + 1)), cfg);
  };
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k, threads);
  }

  SessionResult r;
  r.n_targets = s.n_targets;
  r.sigma = s.noise_sigma;
  r.trials = s.trials;
  r.seed = s.seed;
  std::int64_t total_time = 0;
  for (const auto& o : outcomes) {
    if (o.hit) {
      ++r.hits;
      total_time += o.time_ms;
    }
  }
  r.errors = r.trials - r.hits;
  r.accuracy = static_cast<double>(r.hits) / r.trials;
  r.mean_time_ms = r.hits ? static_cast<double>(total_time) / r.hits : 0.0;
  return r;
}

inline nlohmann::ordered_json to_json(const SessionResult& r) {
  nlohmann::ordered_json j;
  j["n_targets"] = r.n_targets;
  j["sigma"] = r.sigma;
  j["trials"] = r.trials;
  j["hits"] = r.hits;
  j["errors"] = r.errors;
  j["accuracy"] = r.accuracy;
  j["mean_time_ms"] = r.mean_time_ms;
  j["seed"] = r.seed;
  return j;
}

inline constexpr const char* kBenchCsvHeader =
    "n_targets,sigma,trials,hits,errors,accuracy,mean_time_ms,seed";

inline std::string to_csv_row(const SessionResult& r) {
  return std::to_string(r.n_targets) + "," + detail::format_double(r.sigma) + "," +
         std::to_string(r.trials) + "," + std::to_string(r.hits) + "," +
         std::to_string(r.errors) + "," + detail::format_double(r.accuracy) + "," +
         detail::format_double(r.mean_time_ms) + "," + std::to_string(r.seed);
}

}  // namespace tiltgest
