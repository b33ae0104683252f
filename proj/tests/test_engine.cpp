#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tiltgest;
using testsupport::profile_path;
using D = Direction;
using testsupport::Script;

namespace {

struct Replay {
  std::vector<EngineOutput> out;
  std::string final_mode;
  EngineStats stats;

  std::vector<std::string> commands() const {
    std::vector<std::string> c;
    for (const auto& o : out)
      if (o.command) c.push_back(o.command->name);
    return c;
  }
};

Replay replay(const std::string& profile, const Script& s) {
  Engine engine(load_profile(profile_path(profile)), testsupport::eight_way());
  Replay r;
  r.out = engine.run(s.samples());
  r.final_mode = engine.mode();
  r.stats = engine.stats();
  return r;
}

using Commands = std::vector<std::string>;

}  // namespace

// slideshow: double tilt per operation
TEST(GoldenSlideshow, EveryRow) {
  const std::pair<D, const char*> rows[] = {{D::Right, "Next"},
                                            {D::Left, "Previous"},
                                            {D::Up, "Home"},
                                            {D::Down, "End"},
                                            {D::DownRight, "Close"}};
  for (const auto& [dir, cmd] : rows) {
    const auto r = replay("slideshow.json", Script().twice(dir));
    ASSERT_EQ(r.out.size(), 1u) << cmd;
    EXPECT_EQ(r.commands(), Commands{cmd});
  }
}

TEST(GoldenSlideshow, SingleTiltDoesNothing) {
  EXPECT_TRUE(replay("slideshow.json", Script().move({D::Right})).out.empty());
}

TEST(GoldenSlideshow, SequenceOfSlides) {
  const auto r = replay("slideshow.json", Script().twice(D::Right).twice(D::Right).twice(D::Left));
  EXPECT_EQ(r.commands(), (Commands{"Next", "Next", "Previous"}));
}

// photo browser, browsing mode
TEST(GoldenPhotoBrowser, BrowsingRows) {
  const std::pair<D, const char*> rows[] = {{D::Right, "Move right"},
                                            {D::Left, "Move left"},
                                            {D::Up, "Move up"},
                                            {D::Down, "Move down"}};
  for (const auto& [dir, cmd] : rows) {
    const auto r = replay("photobrowser.json", Script().move({dir}));
    EXPECT_EQ(r.commands(), Commands{cmd});
    EXPECT_EQ(r.final_mode, "browsing");
  }
  const auto view = replay("photobrowser.json", Script().move({D::DownRight}));
  EXPECT_EQ(view.commands(), Commands{"View picture"});
  EXPECT_EQ(view.final_mode, "editing");
}

// editing mode, entered through "View picture"
TEST(GoldenPhotoBrowser, EditingRows) {
  auto r = replay("photobrowser.json", Script().move({D::DownRight}).move({D::Up, D::Right}));
  EXPECT_EQ(r.commands(), (Commands{"View picture", "Increase brightness"}));
  EXPECT_EQ(r.out.back().mode, "editing");

  r = replay("photobrowser.json", Script().move({D::DownRight}).move({D::Up, D::Left}));
  EXPECT_EQ(r.commands(), (Commands{"View picture", "Decrease brightness"}));

  r = replay("photobrowser.json", Script().move({D::DownRight}).move({D::Down}));
  EXPECT_EQ(r.commands(), (Commands{"View picture", "Black and white filter"}));
  EXPECT_EQ(r.final_mode, "editing");

  r = replay("photobrowser.json", Script().move({D::DownRight}).move({D::Left}));
  EXPECT_EQ(r.commands(), (Commands{"View picture", "Close"}));
  EXPECT_EQ(r.final_mode, "browsing");
}

TEST(GoldenPhotoBrowser, FullSession) {
  const auto r = replay("photobrowser.json", Script()
                                                 .move({D::Right})
                                                 .move({D::DownRight})
                                                 .move({D::Up, D::Right})
                                                 .move({D::Left})
                                                 .move({D::Left}));
  EXPECT_EQ(r.commands(), (Commands{"Move right", "View picture", "Increase brightness",
                                    "Close", "Move left"}));
  EXPECT_EQ(r.stats.unmatched, 0u);
}

TEST(GoldenPhotoBrowser, UnmatchedSequenceCounted) {
  const auto r = replay("photobrowser.json",
                        Script().move({D::DownRight}).move({D::Right, D::Down}));
  EXPECT_EQ(r.commands(), Commands{"View picture"});
  EXPECT_EQ(r.stats.unmatched, 1u);
}

// flight sim: pointer direction per tilt
TEST(GoldenFlightSim, PointerRows) {
  struct Row {
    D dir;
    int sx, sy;
  };
  for (const Row& row : {Row{D::Right, 1, 0}, Row{D::Left, -1, 0}, Row{D::Up, 0, -1},
                         Row{D::Down, 0, 1}}) {
    PoseScript s;
    s.segments = {{{0, 0, 1}, 200, 0}, {tilt_pose(row.dir, 30.0), 400, 150}};
    Engine engine(load_profile(profile_path("flightsim.json")), testsupport::eight_way());
    double sum_dx = 0, sum_dy = 0;
    int moves = 0;
    for (const auto& o : engine.run(synth_script(s).samples)) {
      const auto* m = std::get_if<PointerMove>(&o.event.payload);
      ASSERT_NE(m, nullptr);
      ASSERT_TRUE(row.sx == 0 ? m->dx == 0.0 : (m->dx * row.sx >= 0.0));
      ASSERT_TRUE(row.sy == 0 ? m->dy == 0.0 : (m->dy * row.sy >= 0.0));
      sum_dx += m->dx;
      sum_dy += m->dy;
      ++moves;
    }
    EXPECT_EQ(moves, 38);
    if (row.sx) { EXPECT_GT(sum_dx * row.sx, 0.0); }
    if (row.sy) { EXPECT_GT(sum_dy * row.sy, 0.0); }
  }
}

TEST(Engine, TapThroughPointerProfile) {
  PoseScript s;
  s.segments = {{{0, 0, 1}, 1000, 0}};
  auto samples = synth_script(s).samples;
  samples[40].az += 1.5;
  Engine engine(load_profile(profile_path("flightsim.json")), testsupport::eight_way());
  int taps = 0;
  for (const auto& o : engine.run(samples))
    if (std::holds_alternative<Click>(o.event.payload)) ++taps;
  EXPECT_EQ(taps, 1);
}

TEST(Engine, LevelsFromAngle) {
  auto p = load_profile(profile_path("slideshow.json"));
  p.levels_enabled = true;
  p.trigger = TriggerMode::SingleTilt;
  p.modes[0].entries.push_back({DirectGesture{D::Right, 2}, "Skip", ""});
  PoseScript s;
  s.segments = {{{0, 0, 1}, 500, 0},
                {tilt_pose(D::Right, 50.0), 400, 150},
                {{0, 0, 1}, 400, 150},
                {tilt_pose(D::Right, 30.0), 400, 150},
                {{0, 0, 1}, 400, 150}};
  Engine engine(p, testsupport::eight_way());
  std::vector<std::string> cmds;
  for (const auto& o : engine.run(synth_script(s).samples))
    if (o.command) cmds.push_back(o.command->name);
  EXPECT_EQ(cmds, (Commands{"Skip", "Next"}));
}

TEST(Engine, OutputJson) {
  const auto r = replay("slideshow.json", Script().twice(D::Right));
  ASSERT_EQ(r.out.size(), 1u);
  const auto j = to_json(r.out[0]);
  EXPECT_EQ(j["type"], "direct");
  EXPECT_EQ(j["label"], "Right");
  EXPECT_EQ(j["command"], "Next");
  EXPECT_EQ(j["mode"], "slides");
}
