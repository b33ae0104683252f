#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tiltgest/error.hpp"
#include "tiltgest/vec3.hpp"

namespace tiltgest {

/// One accelerometer reading; `t` in milliseconds, axes in g.
struct AccelSample {
  std::int64_t t = 0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  Vec3 accel() const { return {ax, ay, az}; }

  friend bool operator==(const AccelSample&, const AccelSample&) = default;
};

inline constexpr double kDefaultRateHz = 100.0;

struct Trace {
  std::vector<AccelSample> samples;
  double rate_hz = kDefaultRateHz;

  friend bool operator==(const Trace&, const Trace&) = default;
};

namespace detail {

/// Shortest round-trip decimal form; integral values keep a trailing ".0".
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

inline bool is_comment(std::string_view line) {
  const auto first = line.find_first_not_of(" \t");
  return first != std::string_view::npos && line[first] == '#';
}

}  // namespace detail

/// Reads a JSON Lines trace. Blank lines and `#` comments are skipped; an
/// optional `{"rate_hz": ...}` header may appear as the first record. Any bad
/// record rejects the whole input.
inline Trace parse_trace(std::istream& in) {
  using nlohmann::json;
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool seen_record = false;

  auto malformed = [&](const std::string& why) {
    return Error(Errc::MalformedRecord, std::to_string(line_no), why);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line) || detail::is_comment(line)) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error&) {
      throw malformed("not valid JSON");
    }
    if (!obj.is_object()) throw malformed("record is not an object");

    if (!seen_record && obj.size() == 1 && obj.contains("rate_hz")) {
      const auto& r = obj["rate_hz"];
      if (!r.is_number() || !std::isfinite(r.get<double>()) ||
          r.get<double>() <= 0.0)
        throw malformed("rate_hz must be a positive number");
      trace.rate_hz = r.get<double>();
      seen_record = true;
      continue;
    }
    seen_record = true;

    if (obj.size() != 4) throw malformed("expected exactly keys t, ax, ay, az");
    AccelSample s;
    const auto t = obj.find("t");
    if (t == obj.end() || !t->is_number_integer())
      throw malformed("t must be an integer");
    s.t = t->get<std::int64_t>();
    if (s.t < 0) throw malformed("t must be non-negative");

    auto axis = [&](const char* key) {
      const auto it = obj.find(key);
      if (it == obj.end() || !it->is_number())
        throw malformed(std::string(key) + " must be a number");
      const double v = it->get<double>();
      if (!std::isfinite(v)) throw malformed(std::string(key) + " is not finite");
      return v;
    };
    s.ax = axis("ax");
    s.ay = axis("ay");
    s.az = axis("az");

    if (!trace.samples.empty() && s.t < trace.samples.back().t)
      throw Error(Errc::NonMonotoneTimestamp, std::to_string(line_no));
    trace.samples.push_back(s);
  }

  if (trace.samples.empty()) throw Error(Errc::EmptyTrace, "");
  return trace;
}

inline Trace parse_trace(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_trace(in);
}

inline std::string serialize_sample(const AccelSample& s) {
  std::string out = "{\"t\":" + std::to_string(s.t);
  out += ",\"ax\":" + detail::format_double(s.ax);
  out += ",\"ay\":" + detail::format_double(s.ay);
  out += ",\"az\":" + detail::format_double(s.az);
  out += "}";
  return out;
}

/// Canonical form: rate header, then one sample per line.
inline std::string serialize_trace(const Trace& trace) {
  std::string out = "{\"rate_hz\":" + detail::format_double(trace.rate_hz) + "}\n";
  for (const auto& s : trace.samples) {
    out += serialize_sample(s);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis

/// Frequency of the synthetic hand-tremor sinusoid.
inline constexpr double kTremorHz = 8.0;

struct SynthSpec {
  Vec3 direction{0.0, 0.0, 1.0};
  double noise_sigma = 0.0;
  double duration_ms = 1000.0;
  double rate_hz = kDefaultRateHz;
  double tremor_amp = 0.0;
  std::uint64_t seed = 0;
  std::int64_t t0_ms = 0;
};

/// One leg of a pose script: ramp linearly from the previous pose to `pose`
/// over `ramp_ms`, then hold it for `hold_ms`.
struct PoseSegment {
  Vec3 pose{0.0, 0.0, 1.0};
  double hold_ms = 0.0;
  double ramp_ms = 0.0;
};

struct PoseScript {
  std::vector<PoseSegment> segments;
  double noise_sigma = 0.0;
  double rate_hz = kDefaultRateHz;
  double tremor_amp = 0.0;
  std::uint64_t seed = 0;
  std::int64_t t0_ms = 0;
};

inline std::size_t synth_sample_count(double duration_ms, double rate_hz) {
  return static_cast<std::size_t>(std::floor(duration_ms / 1000.0 * rate_hz));
}

namespace detail {

inline void check_noise_params(double noise_sigma, double rate_hz,
                               double tremor_amp, std::int64_t t0_ms) {
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw Error(Errc::InvalidSpec, "noise_sigma", "must be finite and >= 0");
  if (!(rate_hz > 0.0) || !std::isfinite(rate_hz))
    throw Error(Errc::InvalidSpec, "rate_hz", "must be finite and > 0");
  if (!(tremor_amp >= 0.0) || !std::isfinite(tremor_amp))
    throw Error(Errc::InvalidSpec, "tremor_amp", "must be finite and >= 0");
  if (t0_ms < 0) throw Error(Errc::InvalidSpec, "t0_ms", "must be >= 0");
}

/// Adds noise and tremor to a noiseless pose sequence sampled at `rate_hz`.
class SampleSynthesizer {
 public:
  SampleSynthesizer(double noise_sigma, double rate_hz, double tremor_amp,
                    std::uint64_t seed, std::int64_t t0_ms)
      : sigma_(noise_sigma),
        rate_hz_(rate_hz),
        tremor_(tremor_amp),
        t0_(t0_ms),
        rng_(seed) {}

  AccelSample make(std::size_t index, const Vec3& pose) {
    const double t_ms = static_cast<double>(index) * 1000.0 / rate_hz_;
    const double t_sec = t_ms / 1000.0;
    AccelSample s;
    s.t = t0_ + static_cast<std::int64_t>(std::floor(t_ms));
    Vec3 v = pose;
    if (tremor_ > 0.0) {
      constexpr double two_pi = 2.0 * std::numbers::pi;
      const double phase = two_pi * kTremorHz * t_sec;
      v += Vec3{tremor_ * std::sin(phase), tremor_ * std::sin(phase + two_pi / 3.0),
                tremor_ * std::sin(phase + 2.0 * two_pi / 3.0)};
    }
    if (sigma_ > 0.0) {
      v.x += noise_(rng_) * sigma_;
      v.y += noise_(rng_) * sigma_;
      v.z += noise_(rng_) * sigma_;
    }
    s.ax = v.x;
    s.ay = v.y;
    s.az = v.z;
    return s;
  }

 private:
  double sigma_;
  double rate_hz_;
  double tremor_;
  std::int64_t t0_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
};

}  // namespace detail

inline void validate(const SynthSpec& spec) {
  if (!is_finite(spec.direction) || std::abs(norm(spec.direction) - 1.0) > 1e-9)
    throw Error(Errc::InvalidSpec, "direction", "must be a unit vector");
  if (!(spec.duration_ms > 0.0) || !std::isfinite(spec.duration_ms))
    throw Error(Errc::InvalidSpec, "duration_ms", "must be finite and > 0");
  detail::check_noise_params(spec.noise_sigma, spec.rate_hz, spec.tremor_amp,
                             spec.t0_ms);
}

/// A held pose with optional white noise and tremor. Deterministic per seed.
inline Trace synth_trace(const SynthSpec& spec) {
  validate(spec);
  Trace trace;
  trace.rate_hz = spec.rate_hz;
  const std::size_t n = synth_sample_count(spec.duration_ms, spec.rate_hz);
  trace.samples.reserve(n);
  detail::SampleSynthesizer synth(spec.noise_sigma, spec.rate_hz,
                                  spec.tremor_amp, spec.seed, spec.t0_ms);
  for (std::size_t i = 0; i < n; ++i)
    trace.samples.push_back(synth.make(i, spec.direction));
  return trace;
}

/// Multi-pose trace: each segment ramps from the previous pose (the first
/// segment starts from its own pose) and then holds. Sample count is
/// floor(total_ms / 1000 * rate_hz).
inline Trace synth_script(const PoseScript& script) {
  detail::check_noise_params(script.noise_sigma, script.rate_hz,
                             script.tremor_amp, script.t0_ms);
  if (script.segments.empty())
    throw Error(Errc::InvalidSpec, "segments", "at least one pose required");

  std::vector<double> ends;  // cumulative segment end times, ms
  double total = 0.0;
  for (const auto& seg : script.segments) {
    if (!is_finite(seg.pose) || norm(seg.pose) == 0.0)
      throw Error(Errc::InvalidSpec, "pose", "must be finite and non-zero");
    if (!(seg.hold_ms >= 0.0) || !(seg.ramp_ms >= 0.0) ||
        !std::isfinite(seg.hold_ms) || !std::isfinite(seg.ramp_ms))
      throw Error(Errc::InvalidSpec, "hold_ms", "durations must be finite and >= 0");
    total += seg.ramp_ms + seg.hold_ms;
    ends.push_back(total);
  }
  if (!(total > 0.0)) throw Error(Errc::InvalidSpec, "duration_ms", "must be > 0");

  auto pose_at = [&](double t_ms) {
    std::size_t k = 0;
    while (k + 1 < ends.size() && t_ms >= ends[k]) ++k;
    const auto& seg = script.segments[k];
    const double seg_start = ends[k] - seg.ramp_ms - seg.hold_ms;
    const double into = t_ms - seg_start;
    if (k == 0 || seg.ramp_ms <= 0.0 || into >= seg.ramp_ms) return seg.pose;
    const Vec3& from = script.segments[k - 1].pose;
    const double f = into / seg.ramp_ms;
    return from + (seg.pose - from) * f;
  };

  Trace trace;
  trace.rate_hz = script.rate_hz;
  const std::size_t n = synth_sample_count(total, script.rate_hz);
  trace.samples.reserve(n);
  detail::SampleSynthesizer synth(script.noise_sigma, script.rate_hz,
                                  script.tremor_amp, script.seed, script.t0_ms);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_ms = static_cast<double>(i) * 1000.0 / script.rate_hz;
    trace.samples.push_back(synth.make(i, pose_at(t_ms)));
  }
  return trace;
}

}  // namespace tiltgest
