#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tiltgest/tiltgest.hpp"

namespace tiltgest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

inline constexpr double kDefaultPoseTiltDeg = 30.0;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Trace read_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, path, "cannot open trace");
  try {
    return parse_trace(in);
  } catch (const Error& e) {
    throw Error(e.code(), e.detail(), path);
  }
}

inline void write_output(const std::string& path, const std::string& text,
                         std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(Errc::InvalidArgument, path, "cannot write file");
  f << text;
}

/// "x,y,z" (normalized) or a direction name with optional "@tilt_deg".
inline Vec3 parse_pose(const std::string& text) {
  if (!text.empty() && (std::isdigit(static_cast<unsigned char>(text[0])) ||
                        text[0] == '-' || text[0] == '+' || text[0] == '.')) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        v.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw Error(Errc::InvalidArgument, text, "pose component is not a number");
      }
    }
    if (v.size() != 3) throw Error(Errc::InvalidArgument, text, "pose needs x,y,z");
    const Vec3 p{v[0], v[1], v[2]};
    const double n = norm(p);
    if (!(n > 0.0) || !std::isfinite(n))
      throw Error(Errc::InvalidArgument, text, "pose must be non-zero");
    return p * (1.0 / n);
  }
  const auto at = text.find('@');
  const Direction d = direction_from_name(text.substr(0, at));
  double tilt = kDefaultPoseTiltDeg;
  if (at != std::string::npos) {
    try {
      tilt = std::stod(text.substr(at + 1));
    } catch (const std::exception&) {
      throw Error(Errc::InvalidArgument, text, "tilt after @ is not a number");
    }
  }
  return tilt_pose(d, tilt);
}

/// "POSE:HOLD_MS"
inline PoseSegment parse_segment(const std::string& text, double ramp_ms) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos)
    throw Error(Errc::InvalidArgument, text, "expected POSE:HOLD_MS");
  PoseSegment seg;
  seg.pose = parse_pose(text.substr(0, colon));
  try {
    seg.hold_ms = std::stod(text.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, text, "hold time is not a number");
  }
  seg.ramp_ms = ramp_ms;
  return seg;
}

inline StablePoint first_stable(const std::string& path, const PreprocessConfig& cfg) {
  const Trace t = read_trace(path);
  const auto points = detect_stable(t.samples, cfg);
  if (points.empty()) throw Error(Errc::NoStablePose, path);
  return points.front();
}

struct SynthOptions {
  std::string direction = "0,0,1";
  std::vector<std::string> poses;
  double ramp_ms = 0.0;
  double sigma = 0.0;
  double duration_ms = 1000.0;
  double rate_hz = kDefaultRateHz;
  double tremor = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline void run_synth(const SynthOptions& o, std::ostream& out) {
  Trace trace;
  if (o.poses.empty()) {
    SynthSpec spec;
    spec.direction = parse_pose(o.direction);
    spec.noise_sigma = o.sigma;
    spec.duration_ms = o.duration_ms;
    spec.rate_hz = o.rate_hz;
    spec.tremor_amp = o.tremor;
    spec.seed = o.seed;
    trace = synth_trace(spec);
  } else {
    PoseScript script;
    for (std::size_t i = 0; i < o.poses.size(); ++i)
      script.segments.push_back(parse_segment(o.poses[i], i == 0 ? 0.0 : o.ramp_ms));
    script.noise_sigma = o.sigma;
    script.rate_hz = o.rate_hz;
    script.tremor_amp = o.tremor;
    script.seed = o.seed;
    trace = synth_script(script);
  }
  write_output(o.out, serialize_trace(trace), out);
}

struct CalibrateOptions {
  std::string steady;
  std::vector<std::string> poses;  // LABEL[:LEVEL]=TRACE
  int directions = 0;
  double max_g = 1.0;
  bool levels = false;
  std::string profile;
  std::string out;
};

inline void run_calibrate(const CalibrateOptions& o, std::ostream& out) {
  PreprocessConfig pre;
  if (!o.profile.empty()) pre = load_profile(o.profile).preprocess;
  const int n = o.directions > 0 ? o.directions : static_cast<int>(o.poses.size());
  CalibrationSet set = CalibrationSet::create(o.max_g, std::max(n, 1), o.levels);
  set = calibrate_steady(set, first_stable(o.steady, pre));
  for (const auto& spec : o.poses) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::InvalidArgument, spec, "expected LABEL[:LEVEL]=TRACE");
    std::string label = spec.substr(0, eq);
    int level = 1;
    if (const auto colon = label.find(':'); colon != std::string::npos) {
      try {
        level = std::stoi(label.substr(colon + 1));
      } catch (const std::exception&) {
        throw Error(Errc::InvalidArgument, spec, "level is not an integer");
      }
      label = label.substr(0, colon);
    }
    set = try_add_direction(set, direction_from_name(label), level,
                            first_stable(spec.substr(eq + 1), pre));
  }
  write_output(o.out, dump_calibration(set), out);
}

struct ClassifyOptions {
  std::string trace;
  std::string calibration;
  std::string profile;
};

inline void run_classify(const ClassifyOptions& o, std::ostream& out) {
  const CalibrationSet set = parse_calibration(read_file(o.calibration));
  PreprocessConfig pre;
  std::optional<LevelBoundaries> levels;
  if (!o.profile.empty()) {
    const auto p = load_profile(o.profile);
    pre = p.preprocess;
    if (p.levels_enabled) levels = p.level_boundaries;
  }
  const Trace trace = read_trace(o.trace);
  for (const auto& p : detect_stable(trace.samples, pre)) {
    const Classification c = classify(set, p, levels);
    nlohmann::ordered_json j;
    j["t_start"] = p.t_start;
    j["t_end"] = p.t_end;
    j["label"] = to_string(c.label);
    j["level"] = c.level;
    j["distance"] = c.distance;
    j["angle"] = c.angle.degrees;
    j["centroid"] = vec_to_json(p.centroid);
    out << j.dump() << "\n";
  }
}

struct ReplayOptions {
  std::string trace;
  std::string calibration;
  std::string profile;
  bool stats = false;
};

inline void run_replay(const ReplayOptions& o, std::ostream& out, std::ostream& err) {
  Engine engine(load_profile(o.profile), parse_calibration(read_file(o.calibration)));
  const Trace trace = read_trace(o.trace);
  for (const auto& line : engine.run(trace.samples)) out << to_json(line).dump() << "\n";
  if (o.stats) {
    const auto& s = engine.stats();
    err << "samples=" << s.samples << " stable_points=" << s.stable_points
        << " events=" << s.events << " commands=" << s.commands
        << " unmatched=" << s.unmatched << "\n";
  }
}

struct BenchOptions {
  std::vector<int> targets{4};
  double sigma = 0.0;
  int trials = 100;
  std::uint64_t seed = 0;
  std::string csv;
  double threshold = BenchConfig{}.preprocess.stddev_threshold;
  bool pure_azimuth = false;
  unsigned threads = 0;
};

inline void run_bench(const BenchOptions& o, std::ostream& out) {
  BenchConfig cfg;
  cfg.preprocess.stddev_threshold = o.threshold;
  cfg.pure_azimuth = o.pure_azimuth;
  cfg.threads = o.threads;
  std::vector<SessionResult> results;
  for (int n : o.targets)
    results.push_back(run_target_session({n, o.trials, o.sigma, o.seed}, cfg));
  for (const auto& r : results) out << to_json(r).dump() << "\n";
  if (!o.csv.empty()) {
    std::string text;
    bool fresh = true;
    if (o.csv != "-") {
      std::ifstream probe(o.csv);
      fresh = !probe || probe.peek() == std::ifstream::traits_type::eof();
    }
    if (fresh) text += std::string(kBenchCsvHeader) + "\n";
    for (const auto& r : results) text += to_csv_row(r) + "\n";
    if (o.csv == "-") {
      out << text;
    } else {
      std::ofstream f(o.csv, std::ios::app);
      if (!f) throw Error(Errc::InvalidArgument, o.csv, "cannot write file");
      f << text;
    }
  }
}

/// Entry point of the `tiltgest` tool. Exit 0 on success, 1 on usage
/// errors, 2 on data errors.
inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
  CLI::App app{"Tilt-gesture recognition: synthesize, calibrate, classify, replay, bench"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic trace (JSON Lines)");
  synth_cmd->add_option("--direction", synth.direction,
                        "Held pose: x,y,z or LABEL[@tilt_deg]");
  synth_cmd->add_option("--pose", synth.poses,
                        "Pose script leg POSE:HOLD_MS (repeatable, overrides --direction)");
  synth_cmd->add_option("--ramp", synth.ramp_ms, "Ramp time between script poses, ms");
  synth_cmd->add_option("--sigma", synth.sigma, "Per-axis Gaussian noise, g");
  synth_cmd->add_option("--duration", synth.duration_ms, "Duration of a held pose, ms");
  synth_cmd->add_option("--rate", synth.rate_hz, "Sample rate, Hz");
  synth_cmd->add_option("--tremor", synth.tremor, "8 Hz tremor amplitude, g");
  synth_cmd->add_option("--seed", synth.seed, "RNG seed");
  synth_cmd->add_option("-o,--out", synth.out, "Output file (default stdout)");

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Build a calibration file from pose traces");
  cal_cmd->add_option("--steady", cal.steady, "Trace of the steady pose")->required();
  cal_cmd->add_option("--pose", cal.poses, "LABEL[:LEVEL]=TRACE (repeatable)");
  cal_cmd->add_option("--directions", cal.directions,
                      "Declared direction count for the virtual border (default: number of poses)");
  cal_cmd->add_option("--max-g", cal.max_g, "Maximum acceleration magnitude, g");
  cal_cmd->add_flag("--levels", cal.levels, "Allow levels 2 and 3");
  cal_cmd->add_option("--profile", cal.profile, "Profile supplying preprocessing settings");
  cal_cmd->add_option("-o,--out", cal.out, "Output file (default stdout)");

  ClassifyOptions cls;
  auto* cls_cmd = app.add_subcommand("classify", "Classify every stable pose of a trace");
  cls_cmd->add_option("--trace", cls.trace, "Trace file")->required();
  cls_cmd->add_option("--calibration", cls.calibration, "Calibration file")->required();
  cls_cmd->add_option("--profile", cls.profile, "Profile supplying preprocessing and levels");

  ReplayOptions rep;
  auto* rep_cmd = app.add_subcommand("replay", "Replay a trace into events and commands");
  rep_cmd->add_option("--trace", rep.trace, "Trace file")->required();
  rep_cmd->add_option("--calibration", rep.calibration, "Calibration file")->required();
  rep_cmd->add_option("--profile", rep.profile, "Mapping profile")->required();
  rep_cmd->add_flag("--stats", rep.stats, "Print pipeline counters to stderr");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the circular-menu target benchmark");
  bench_cmd->add_option("--targets", bench.targets, "Target count: 4, 8, 12 or 16 (repeatable)")
      ->check(CLI::IsMember({4, 8, 12, 16}));
  bench_cmd->add_option("--sigma", bench.sigma, "Per-axis noise, g");
  bench_cmd->add_option("--trials", bench.trials, "Trials per block")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "Session seed");
  bench_cmd->add_option("--csv", bench.csv, "Append CSV rows to this file ('-' for stdout)");
  bench_cmd->add_option("--threshold", bench.threshold, "Stable-window stddev threshold, g");
  bench_cmd->add_flag("--pure-azimuth", bench.pure_azimuth,
                      "Spread targets over n azimuths instead of using tilt levels");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) run_synth(synth, out);
    if (*cal_cmd) run_calibrate(cal, out);
    if (*cls_cmd) run_classify(cls, out);
    if (*rep_cmd) run_replay(rep, out, err);
    if (*bench_cmd) run_bench(bench, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace tiltgest::cli
