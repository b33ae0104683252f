#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "tiltgest/classify.hpp"
#include "tiltgest/direction.hpp"
#include "tiltgest/error.hpp"
#include "tiltgest/mapping.hpp"
#include "tiltgest/preprocess.hpp"

namespace tiltgest {

/// Lookup key of a profile entry: a direct (label, level) or a label sequence.
using GestureKey = std::variant<DirectGesture, SequenceGesture>;

struct ProfileEntry {
  GestureKey gesture;
  std::string command;
  std::string description;

  friend bool operator==(const ProfileEntry&, const ProfileEntry&) = default;
};

/// Switches to mode `to` when `command` is resolved in the owning mode.
struct ModeTransition {
  std::string command;
  std::string to;

  friend bool operator==(const ModeTransition&, const ModeTransition&) = default;
};

struct ProfileMode {
  std::string name;
  std::vector<ProfileEntry> entries;
  std::vector<ModeTransition> transitions;

  bool uses_sequences() const {
    for (const auto& e : entries)
      if (std::holds_alternative<SequenceGesture>(e.gesture)) return true;
    return false;
  }

  friend bool operator==(const ProfileMode&, const ProfileMode&) = default;
};

struct Command {
  std::string name;
  std::int64_t t = 0;

  friend bool operator==(const Command&, const Command&) = default;
};

struct MappingProfile {
  std::string app_name;
  TriggerMode trigger = TriggerMode::SingleTilt;
  bool levels_enabled = false;
  std::vector<ProfileMode> modes;  // declaration order; the first is initial
  std::optional<PointerConfig> pointer;
  // Engine tuning, each optional in the file.
  PreprocessConfig preprocess;
  LevelBoundaries level_boundaries;
  std::int64_t pairing_window_ms = kDefaultPairingWindowMs;
  std::size_t max_sequence = kDefaultMaxSequence;

  const ProfileMode* find_mode(std::string_view name) const {
    for (const auto& m : modes)
      if (m.name == name) return &m;
    return nullptr;
  }

  const ProfileMode& mode(std::string_view name) const {
    if (const auto* m = find_mode(name)) return *m;
    throw Error(Errc::UnknownMode, std::string(name));
  }

  const std::string& initial_mode() const { return modes.front().name; }

  friend bool operator==(const MappingProfile&, const MappingProfile&) = default;
};

// ---------------------------------------------------------------------------
// Resolution

inline std::optional<GestureKey> gesture_key(const GestureEvent& e) {
  if (const auto* d = std::get_if<DirectGesture>(&e.payload)) return GestureKey{*d};
  if (const auto* s = std::get_if<SequenceGesture>(&e.payload)) return GestureKey{*s};
  return std::nullopt;
}

/// Exact-match lookup of the event in `mode_name`.
inline std::optional<Command> resolve(const MappingProfile& profile,
                                      std::string_view mode_name,
                                      const GestureEvent& event) {
  const ProfileMode& mode = profile.mode(mode_name);
  const auto key = gesture_key(event);
  if (!key) return std::nullopt;
  for (const auto& entry : mode.entries)
    if (entry.gesture == *key) return Command{entry.command, event.t};
  return std::nullopt;
}

/// Mode after `event` has been handled in `current_mode`.
inline std::string mode_switch(const MappingProfile& profile,
                               const std::string& current_mode,
                               const GestureEvent& event) {
  const auto* mode = profile.find_mode(current_mode);
  if (!mode) return current_mode;
  const auto cmd = resolve(profile, current_mode, event);
  if (!cmd) return current_mode;
  for (const auto& tr : mode->transitions)
    if (tr.command == cmd->name) return tr.to;
  return current_mode;
}

// ---------------------------------------------------------------------------
// JSON schema
//
// {
//   "app": "slideshow",
//   "trigger": "single" | "double",
//   "levels": false,
//   "modes": {
//     "<name>": {
//       "entries": [{"gesture": {"kind": "direct", "label": "Right", "level": 1},
//                    "command": "Next", "description": "..."},
//                   {"gesture": {"kind": "sequence", "labels": ["Up", "Right"]},
//                    "command": "..."}],
//       "transitions": [{"command": "View picture", "to": "editing"}]
//     }
//   },
//   "pointer": {"screen_w": 1024, "screen_h": 768, "gain": 0.5,
//               "dead_zone_deg": 5, "method": "angle" | "threshold",
//               "tick_ms": 20, "threshold_g": 0.1, "speed_gain": 40},
//   "preprocess": {"window_size": 6, "stddev_threshold": 0.05, "dwell_ms": 200},
//   "level_boundaries": {"dead_zone_deg": 15, "l1_max_deg": 40, "l2_max_deg": 65},
//   "pairing_window_ms": 1500,
//   "max_sequence": 8
// }

namespace detail {

using ojson = nlohmann::ordered_json;

[[noreturn]] inline void schema_error(const std::string& where, const std::string& why) {
  throw Error(Errc::ParseError, where, why);
}

template <class T>
T field(const ojson& obj, const char* key, const std::string& where, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    schema_error(where + "." + key, "wrong type");
  }
}

inline Direction label_field(const ojson& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "direction name must be a string");
  return direction_from_name(j.get<std::string>());
}

inline GestureKey gesture_from_json(const ojson& g, const std::string& where) {
  if (!g.is_object()) schema_error(where, "gesture must be an object");
  const std::string kind = field<std::string>(g, "kind", where, "");
  if (kind == "direct") {
    if (!g.contains("label")) schema_error(where, "direct gesture needs a label");
    DirectGesture d{label_field(g["label"], where + ".label"),
                    field<int>(g, "level", where, 1)};
    if (d.label == Direction::Steady) schema_error(where, "Steady is not a gesture");
    if (d.level < 1 || d.level > kMaxLevel) schema_error(where, "level must be 1..3");
    return d;
  }
  if (kind == "sequence") {
    if (!g.contains("labels") || !g["labels"].is_array() || g["labels"].empty())
      schema_error(where, "sequence gesture needs a non-empty labels array");
    SequenceGesture s;
    for (const auto& l : g["labels"]) {
      s.labels.push_back(label_field(l, where + ".labels"));
      if (s.labels.back() == Direction::Steady)
        schema_error(where, "Steady cannot appear in a sequence");
    }
    return s;
  }
  schema_error(where + ".kind", "expected \"direct\" or \"sequence\"");
}

inline std::string gesture_key_string(const GestureKey& k) {
  if (const auto* d = std::get_if<DirectGesture>(&k))
    return std::string(to_string(d->label)) + ":" + std::to_string(d->level);
  std::string out;
  for (Direction l : std::get<SequenceGesture>(k).labels) {
    if (!out.empty()) out += ">";
    out += to_string(l);
  }
  return out;
}

inline ojson gesture_to_json(const GestureKey& k) {
  if (const auto* d = std::get_if<DirectGesture>(&k))
    return ojson{{"kind", "direct"}, {"label", to_string(d->label)}, {"level", d->level}};
  return ojson{{"kind", "sequence"},
               {"labels", labels_to_json(std::get<SequenceGesture>(k).labels)}};
}

inline PointerConfig pointer_from_json(const ojson& p) {
  const std::string w = "pointer";
  if (!p.is_object()) schema_error(w, "expected object");
  PointerConfig c;
  c.screen_w = field<int>(p, "screen_w", w, c.screen_w);
  c.screen_h = field<int>(p, "screen_h", w, c.screen_h);
  c.gain = field<double>(p, "gain", w, c.gain);
  c.dead_zone_deg = field<double>(p, "dead_zone_deg", w, c.dead_zone_deg);
  c.tick_ms = field<std::int64_t>(p, "tick_ms", w, c.tick_ms);
  c.threshold_g = field<double>(p, "threshold_g", w, c.threshold_g);
  c.speed_gain = field<double>(p, "speed_gain", w, c.speed_gain);
  const std::string method = field<std::string>(p, "method", w, "angle");
  if (method == "angle")
    c.method = PointerMethod::AngleDisplacement;
  else if (method == "threshold")
    c.method = PointerMethod::ThresholdSpeed;
  else
    schema_error(w + ".method", "expected \"angle\" or \"threshold\"");
  c.validate();
  return c;
}

}  // namespace detail

inline MappingProfile profile_from_json(const nlohmann::ordered_json& j) {
  using detail::field;
  using detail::schema_error;
  if (!j.is_object()) schema_error("profile", "expected object");

  MappingProfile p;
  p.app_name = field<std::string>(j, "app", "profile", "");
  if (p.app_name.empty()) schema_error("app", "required");

  const std::string trigger = field<std::string>(j, "trigger", "profile", "single");
  if (trigger == "single")
    p.trigger = TriggerMode::SingleTilt;
  else if (trigger == "double")
    p.trigger = TriggerMode::DoubleTilt;
  else
    schema_error("trigger", "expected \"single\" or \"double\"");

  p.levels_enabled = field<bool>(j, "levels", "profile", false);
  p.pairing_window_ms =
      field<std::int64_t>(j, "pairing_window_ms", "profile", p.pairing_window_ms);
  if (p.pairing_window_ms < 0) schema_error("pairing_window_ms", "must be >= 0");
  const auto max_seq = field<std::int64_t>(j, "max_sequence", "profile",
                                           static_cast<std::int64_t>(p.max_sequence));
  if (max_seq < 1) schema_error("max_sequence", "must be >= 1");
  p.max_sequence = static_cast<std::size_t>(max_seq);

  if (j.contains("preprocess")) {
    const auto& pp = j["preprocess"];
    if (!pp.is_object()) schema_error("preprocess", "expected object");
    const auto ws = field<std::int64_t>(pp, "window_size", "preprocess", 6);
    if (ws < 2) schema_error("preprocess.window_size", "must be >= 2");
    p.preprocess.window_size = static_cast<std::size_t>(ws);
    p.preprocess.stddev_threshold =
        field<double>(pp, "stddev_threshold", "preprocess", p.preprocess.stddev_threshold);
    p.preprocess.dwell_ms = field<std::int64_t>(pp, "dwell_ms", "preprocess", p.preprocess.dwell_ms);
    p.preprocess.validate();
  }
  if (j.contains("level_boundaries")) {
    const auto& lb = j["level_boundaries"];
    if (!lb.is_object()) schema_error("level_boundaries", "expected object");
    auto& b = p.level_boundaries;
    b.dead_zone_deg = field<double>(lb, "dead_zone_deg", "level_boundaries", b.dead_zone_deg);
    b.l1_max_deg = field<double>(lb, "l1_max_deg", "level_boundaries", b.l1_max_deg);
    b.l2_max_deg = field<double>(lb, "l2_max_deg", "level_boundaries", b.l2_max_deg);
    b.validate();
  }
  if (j.contains("pointer") && !j["pointer"].is_null())
    p.pointer = detail::pointer_from_json(j["pointer"]);

  if (!j.contains("modes") || !j["modes"].is_object() || j["modes"].empty())
    schema_error("modes", "at least one mode required");
  for (const auto& [name, m] : j["modes"].items()) {
    const std::string where = "modes." + name;
    if (!m.is_object()) schema_error(where, "expected object");
    ProfileMode mode;
    mode.name = name;
    std::vector<std::string> seen;
    if (m.contains("entries")) {
      if (!m["entries"].is_array()) schema_error(where + ".entries", "expected array");
      for (const auto& e : m["entries"]) {
        if (!e.is_object() || !e.contains("gesture"))
          schema_error(where + ".entries", "entry needs a gesture");
        ProfileEntry entry;
        entry.gesture = detail::gesture_from_json(e["gesture"], where + ".gesture");
        entry.command = field<std::string>(e, "command", where, "");
        entry.description = field<std::string>(e, "description", where, "");
        if (entry.command.empty()) schema_error(where + ".command", "must be non-empty");
        if (!p.levels_enabled)
          if (const auto* d = std::get_if<DirectGesture>(&entry.gesture); d && d->level != 1)
            schema_error(where, "levels are disabled for this profile");
        const std::string key = detail::gesture_key_string(entry.gesture);
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
          throw Error(Errc::DuplicateGestureKey, key, "in mode " + name);
        seen.push_back(key);
        mode.entries.push_back(std::move(entry));
      }
    }
    if (m.contains("transitions")) {
      if (!m["transitions"].is_array()) schema_error(where + ".transitions", "expected array");
      for (const auto& t : m["transitions"])
        mode.transitions.push_back({field<std::string>(t, "command", where, ""),
                                    field<std::string>(t, "to", where, "")});
    }
    p.modes.push_back(std::move(mode));
  }
  for (const auto& m : p.modes)
    for (const auto& t : m.transitions)
      if (!p.find_mode(t.to)) throw Error(Errc::UnknownMode, t.to, "transition target");
  return p;
}

inline MappingProfile parse_profile(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::ParseError, "profile", e.what());
  }
  return profile_from_json(j);
}

inline MappingProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, path, "cannot open profile");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str());
}

inline nlohmann::ordered_json to_json(const MappingProfile& p) {
  using detail::ojson;
  ojson j;
  j["app"] = p.app_name;
  j["trigger"] = p.trigger == TriggerMode::DoubleTilt ? "double" : "single";
  j["levels"] = p.levels_enabled;
  j["modes"] = ojson::object();
  for (const auto& m : p.modes) {
    ojson mj;
    mj["entries"] = ojson::array();
    for (const auto& e : m.entries) {
      ojson ej{{"gesture", detail::gesture_to_json(e.gesture)}, {"command", e.command}};
      if (!e.description.empty()) ej["description"] = e.description;
      mj["entries"].push_back(ej);
    }
    mj["transitions"] = ojson::array();
    for (const auto& t : m.transitions)
      mj["transitions"].push_back({{"command", t.command}, {"to", t.to}});
    j["modes"][m.name] = mj;
  }
  if (p.pointer) {
    const auto& c = *p.pointer;
    j["pointer"] = {{"screen_w", c.screen_w},
                    {"screen_h", c.screen_h},
                    {"gain", c.gain},
                    {"dead_zone_deg", c.dead_zone_deg},
                    {"method", c.method == PointerMethod::AngleDisplacement ? "angle" : "threshold"},
                    {"tick_ms", c.tick_ms},
                    {"threshold_g", c.threshold_g},
                    {"speed_gain", c.speed_gain}};
  }
  j["preprocess"] = {{"window_size", p.preprocess.window_size},
                     {"stddev_threshold", p.preprocess.stddev_threshold},
                     {"dwell_ms", p.preprocess.dwell_ms}};
  j["level_boundaries"] = {{"dead_zone_deg", p.level_boundaries.dead_zone_deg},
                           {"l1_max_deg", p.level_boundaries.l1_max_deg},
                           {"l2_max_deg", p.level_boundaries.l2_max_deg}};
  j["pairing_window_ms"] = p.pairing_window_ms;
  j["max_sequence"] = p.max_sequence;
  return j;
}

}  // namespace tiltgest
