#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tiltgest/calibration.hpp"
#include "tiltgest/classify.hpp"
#include "tiltgest/mapping.hpp"
#include "tiltgest/preprocess.hpp"
#include "tiltgest/profiles.hpp"
#include "tiltgest/trace_io.hpp"

namespace tiltgest {

/// One line of replay output.
struct EngineOutput {
  GestureEvent event;
  std::string mode;
  std::optional<Command> command;
};

inline nlohmann::ordered_json to_json(const EngineOutput& o) {
  auto j = to_json(o.event);
  j["mode"] = o.mode;
  if (o.command) j["command"] = o.command->name;
  return j;
}

struct EngineStats {
  std::size_t samples = 0;
  std::size_t stable_points = 0;
  std::size_t events = 0;
  std::size_t commands = 0;
  std::size_t unmatched = 0;
};

/// Full recognition pipeline for one profile and calibration: stable-pose
/// detection, classification, then the mapping scheme of the active mode.
///
/// Profiles with a pointer section run the pointer and click detectors on
/// raw samples. Otherwise a mode containing sequence entries runs the
/// sequence tracker (a one-element sequence falls back to the matching
/// direct entry) and any other mode runs the direct dispatcher. Both trackers
/// see every classification so their steady/excursion state stays current
/// across mode switches.
class Engine {
 public:
  Engine(MappingProfile profile, CalibrationSet calibration)
      : profile_(std::move(profile)),
        calibration_(std::move(calibration)),
        detector_(profile_.preprocess),
        direct_(profile_.trigger, profile_.pairing_window_ms),
        sequence_(profile_.max_sequence),
        mode_(profile_.initial_mode()) {
    if (!calibration_.steady() || calibration_.points().empty())
      throw Error(Errc::EmptySet, "", "calibration needs a steady pose and a direction");
    if (profile_.pointer) pointer_.emplace(*profile_.pointer);
    bool explicit_levels = false;
    for (const auto& p : calibration_.points()) explicit_levels |= p.level > 1;
    if (profile_.levels_enabled && !explicit_levels) {
      profile_.level_boundaries.validate();
      levels_ = profile_.level_boundaries;
    }
  }

  const std::string& mode() const { return mode_; }
  const EngineStats& stats() const { return stats_; }
  const MappingProfile& profile() const { return profile_; }

  std::vector<EngineOutput> push(const AccelSample& s) {
    std::vector<EngineOutput> out;
    ++stats_.samples;
    if (pointer_) {
      if (auto e = pointer_->sample(s)) emit(*e, out);
      for (auto& e : taps_.push(s)) emit(e, out);
      return out;
    }
    if (auto p = detector_.push(s)) {
      ++stats_.stable_points;
      handle(TimedClassification{p->t_end, classify(calibration_, *p, levels_)}, out);
    }
    return out;
  }

  std::vector<EngineOutput> finish() {
    std::vector<EngineOutput> out;
    if (pointer_)
      for (auto& e : taps_.finish()) emit(e, out);
    return out;
  }

  std::vector<EngineOutput> run(std::span<const AccelSample> samples) {
    std::vector<EngineOutput> out;
    for (const auto& s : samples)
      for (auto& o : push(s)) out.push_back(std::move(o));
    for (auto& o : finish()) out.push_back(std::move(o));
    return out;
  }

 private:
  void handle(const TimedClassification& tc, std::vector<EngineOutput>& out) {
    auto direct = direct_.step(tc);
    auto seq = sequence_.step(tc);
    const ProfileMode& mode = profile_.mode(mode_);
    if (mode.uses_sequences()) {
      if (seq) emit(as_lookup(*seq, mode), out);
    } else if (direct) {
      emit(*direct, out);
    }
  }

  GestureEvent as_lookup(GestureEvent e, const ProfileMode& mode) const {
    const auto* s = std::get_if<SequenceGesture>(&e.payload);
    if (!s || s->labels.size() != 1) return e;
    for (const auto& entry : mode.entries)
      if (entry.gesture == GestureKey{*s}) return e;
    return {e.t, DirectGesture{s->labels.front(), 1}};
  }

  void emit(GestureEvent e, std::vector<EngineOutput>& out) {
    ++stats_.events;
    EngineOutput o{std::move(e), mode_, std::nullopt};
    o.command = resolve(profile_, mode_, o.event);
    if (o.command) {
      ++stats_.commands;
      const std::string next = mode_switch(profile_, mode_, o.event);
      if (next != mode_) {
        mode_ = next;
        sequence_ = SequenceTracker(profile_.max_sequence);
      }
    } else if (gesture_key(o.event)) {
      ++stats_.unmatched;
    }
    out.push_back(std::move(o));
  }

  MappingProfile profile_;
  CalibrationSet calibration_;
  StableDetector detector_;
  DirectDispatcher direct_;
  SequenceTracker sequence_;
  std::optional<PointerTracker> pointer_;
  TapDetector taps_;
  std::optional<LevelBoundaries> levels_;
  std::string mode_;
  EngineStats stats_;
};

}  // namespace tiltgest
