#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using namespace tiltgest;
using testsupport::tc;
using D = Direction;

namespace {

std::vector<GestureEvent> run_direct(DirectDispatcher d, const std::vector<D>& labels,
                                     std::int64_t dt = 100) {
  std::vector<GestureEvent> out;
  std::int64_t t = 0;
  for (D l : labels) {
    if (auto e = d.step(tc(l, t))) out.push_back(*e);
    t += dt;
  }
  return out;
}

std::vector<GestureEvent> run_seq(SequenceTracker& s, const std::vector<D>& labels,
                                  std::int64_t t0 = 0) {
  std::vector<GestureEvent> out;
  std::int64_t t = t0;
  for (D l : labels) {
    if (auto e = s.step(tc(l, t))) out.push_back(*e);
    t += 100;
  }
  return out;
}

std::vector<AccelSample> flat_stream(int n) {
  std::vector<AccelSample> s;
  for (int i = 0; i < n; ++i) s.push_back({i * 10, 0.0, 0.0, 1.0});
  return s;
}

std::vector<GestureEvent> run_taps(const std::vector<AccelSample>& s) {
  TapDetector det;
  std::vector<GestureEvent> out;
  for (const auto& x : s)
    for (auto& e : det.push(x)) out.push_back(e);
  for (auto& e : det.finish()) out.push_back(e);
  return out;
}

int count_kind(const std::vector<GestureEvent>& ev, ClickKind k) {
  int n = 0;
  for (const auto& e : ev)
    if (const auto* c = std::get_if<Click>(&e.payload); c && c->kind == k) ++n;
  return n;
}

}  // namespace

TEST(DirectDispatch, SingleTilt) {
  const auto ev = run_direct(DirectDispatcher(TriggerMode::SingleTilt),
                             {D::Steady, D::Right, D::Right, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<DirectGesture>(ev[0].payload), (DirectGesture{D::Right, 1}));
}

TEST(DirectDispatch, DoubleTilt) {
  const auto ev = run_direct(DirectDispatcher(TriggerMode::DoubleTilt),
                             {D::Steady, D::Right, D::Steady, D::Right, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<DirectGesture>(ev[0].payload), (DirectGesture{D::Right, 1}));
  EXPECT_EQ(ev[0].t, 300);
}

TEST(DirectDispatch, DoubleTiltMismatchResets) {
  EXPECT_TRUE(run_direct(DirectDispatcher(TriggerMode::DoubleTilt),
                         {D::Steady, D::Right, D::Steady, D::Left, D::Steady})
                  .empty());
  // the mismatched half starts a new pair
  const auto ev = run_direct(DirectDispatcher(TriggerMode::DoubleTilt),
                             {D::Steady, D::Right, D::Steady, D::Left, D::Steady, D::Left,
                              D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<DirectGesture>(ev[0].payload).label, D::Left);
}

TEST(DirectDispatch, DoubleTiltPairingWindow) {
  // onsets 1000 ms apart with dt = 500
  EXPECT_EQ(run_direct(DirectDispatcher(TriggerMode::DoubleTilt, 1500),
                       {D::Steady, D::Right, D::Steady, D::Right}, 500)
                .size(),
            1u);
  EXPECT_TRUE(run_direct(DirectDispatcher(TriggerMode::DoubleTilt, 900),
                         {D::Steady, D::Right, D::Steady, D::Right}, 500)
                  .empty());
}

TEST(DirectDispatch, NoEventBeforeFirstSteady) {
  EXPECT_TRUE(run_direct(DirectDispatcher(), {D::Right, D::Left, D::Up}).empty());
}

// Split the stream at Steady classifications; no excursion may carry more
// than one event.
TEST(DirectDispatch, AtMostOneEventPerExcursion) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> lab(0, 8);
  for (auto mode : {TriggerMode::SingleTilt, TriggerMode::DoubleTilt}) {
    int total = 0;
    for (int k = 0; k < 2000; ++k) {
      DirectDispatcher d(mode);
      int in_excursion = 0;
      std::int64_t t = 0;
      for (int i = 0; i < 60; ++i, t += 50) {
        const D l = static_cast<D>(lab(rng) < 4 ? 0 : lab(rng));
        if (l == D::Steady) in_excursion = 0;
        if (d.step(tc(l, t))) {
          ++in_excursion;
          ++total;
          ASSERT_LE(in_excursion, 1);
        }
      }
    }
    EXPECT_GT(total, 1000);
  }
}

TEST(SequenceTrack, Examples) {
  SequenceTracker s;
  auto ev = run_seq(s, {D::Up, D::Right, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<SequenceGesture>(ev[0].payload).labels, (std::vector<D>{D::Up, D::Right}));

  ev = run_seq(s, {D::Down, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<SequenceGesture>(ev[0].payload).labels, (std::vector<D>{D::Down}));

  SequenceTracker idle;
  EXPECT_TRUE(run_seq(idle, {D::Steady}).empty());
  EXPECT_EQ(idle.phase(), SequenceTracker::Phase::Idle);
}

TEST(SequenceTrack, HeldLabelCountsOnce) {
  SequenceTracker s;
  const auto ev = run_seq(s, {D::Up, D::Up, D::Up, D::Right, D::Right, D::Up, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(std::get<SequenceGesture>(ev[0].payload).labels,
            (std::vector<D>{D::Up, D::Right, D::Up}));
}

TEST(SequenceTrack, Overflow) {
  SequenceTracker s(3);
  const auto ev = run_seq(s, {D::Up, D::Right, D::Down, D::Left, D::Steady});
  ASSERT_EQ(ev.size(), 1u);
  ASSERT_TRUE(std::holds_alternative<SequenceOverflow>(ev[0].payload));
  EXPECT_EQ(std::get<SequenceOverflow>(ev[0].payload).labels.size(), 4u);
  EXPECT_EQ(s.phase(), SequenceTracker::Phase::Idle);
}

TEST(SequenceTrack, Compositional) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> lab(0, 8);
  std::uniform_int_distribution<int> len(0, 12);
  for (int k = 0; k < 2000; ++k) {
    auto gen = [&] {
      std::vector<D> v;
      for (int i = len(rng); i > 0; --i) v.push_back(static_cast<D>(lab(rng)));
      v.push_back(D::Steady);
      return v;
    };
    const auto a = gen();
    const auto b = gen();
    std::vector<D> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    SequenceTracker sa, sb, sab;
    auto ea = run_seq(sa, a);
    const auto eb = run_seq(sb, b, static_cast<std::int64_t>(a.size()) * 100);
    const auto eab = run_seq(sab, ab);
    ea.insert(ea.end(), eb.begin(), eb.end());
    ASSERT_EQ(eab, ea);
  }
}

TEST(Pointer, FlatDoesNotMove) {
  const auto d = pointer_displacement({0, 0, 1}, PointerConfig{});
  EXPECT_EQ(d.dx, 0.0);
  EXPECT_EQ(d.dy, 0.0);
  PointerConfig speed;
  speed.method = PointerMethod::ThresholdSpeed;
  const auto s = pointer_displacement({0, 0, 1}, speed);
  EXPECT_EQ(s.dx, 0.0);
  EXPECT_EQ(s.dy, 0.0);
}

TEST(Pointer, RightTiltMovesRight) {
  const auto d = pointer_displacement(tilt_pose(D::Right, 30.0), PointerConfig{});
  EXPECT_GT(d.dx, 0.0);
  EXPECT_EQ(d.dy, 0.0);
  // gain 0.5 px/deg beyond 5 deg at the reference width
  EXPECT_NEAR(d.dx, 0.5 * 25.0, 1e-9);
  const auto up = pointer_displacement(tilt_pose(D::Up, 30.0), PointerConfig{});
  EXPECT_LT(up.dy, 0.0);
  EXPECT_NEAR(up.dx, 0.0, 1e-12);
}

TEST(Pointer, ResolutionScaling) {
  PointerConfig big;
  big.screen_w = 2048;
  big.screen_h = 1536;
  const Vec3 a = tilt_pose(45.0, 30.0);
  const auto d1 = pointer_displacement(a, PointerConfig{});
  const auto d2 = pointer_displacement(a, big);
  EXPECT_NEAR(d2.dx, 2 * d1.dx, 1e-9);
  EXPECT_NEAR(d2.dy, 2 * d1.dy, 1e-9);
}

TEST(Pointer, StrictlyMonotoneAboveDeadZone) {
  for (auto method : {PointerMethod::AngleDisplacement, PointerMethod::ThresholdSpeed}) {
    PointerConfig cfg;
    cfg.method = method;
    const double start = method == PointerMethod::AngleDisplacement ? 5.0 : 6.0;
    for (D d : {D::Right, D::Left, D::Up, D::Down}) {
      double prev = -1.0;
      for (double a = start + 0.25; a < 89.9; a += 0.25) {
        const auto m = pointer_displacement(tilt_pose(d, a), cfg);
        const double mag = std::hypot(m.dx, m.dy);
        ASSERT_GT(mag, prev) << a;
        prev = mag;
      }
    }
  }
  EXPECT_GT(std::abs(pointer_displacement(tilt_pose(D::Right, 30.0), {}).dx),
            std::abs(pointer_displacement(tilt_pose(D::Right, 10.0), {}).dx));
}

TEST(Pointer, OddInEachAxis) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto method : {PointerMethod::AngleDisplacement, PointerMethod::ThresholdSpeed}) {
    PointerConfig cfg;
    cfg.method = method;
    for (int i = 0; i < 10000; ++i) {
      const Vec3 a{u(rng), u(rng), u(rng)};
      const auto d = pointer_displacement(a, cfg);
      const auto nx = pointer_displacement({-a.x, a.y, a.z}, cfg);
      const auto ny = pointer_displacement({a.x, -a.y, a.z}, cfg);
      ASSERT_EQ(nx.dx, -d.dx);
      ASSERT_EQ(nx.dy, d.dy);
      ASSERT_EQ(ny.dy, -d.dy);
      ASSERT_EQ(ny.dx, d.dx);
    }
  }
}

TEST(Pointer, StaysOnScreen) {
  PointerConfig cfg;
  cfg.screen_w = 1920;
  cfg.screen_h = 1080;
  cfg.gain = 3.0;
  PointerTracker p(cfg);
  EXPECT_EQ(p.x(), 960.0);
  EXPECT_EQ(p.y(), 540.0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000000; ++i) {
    const auto e = p.step({u(rng), u(rng), u(rng)}, i);
    const auto& m = std::get<PointerMove>(e.payload);
    if (!(m.x >= 0.0 && m.x < 1920.0 && m.y >= 0.0 && m.y < 1080.0))
      FAIL() << "left the screen at step " << i << ": " << m.x << "," << m.y;
  }
}

TEST(Pointer, SampleIsRateLimited) {
  PointerTracker p(PointerConfig{});
  int moves = 0;
  for (int t = 0; t < 1000; t += 10)
    if (p.sample({t, 0.5, 0.0, 0.866})) ++moves;
  EXPECT_EQ(moves, 50);
}

TEST(Tap, ConstantStreamNoClick) {
  EXPECT_TRUE(run_taps(flat_stream(300)).empty());
}

TEST(Tap, SingleSpike) {
  auto s = flat_stream(150);
  s[50].ax += 1.5;
  const auto ev = run_taps(s);
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(count_kind(ev, ClickKind::Tap), 1);
  EXPECT_EQ(ev[0].t, 500);
}

TEST(Tap, SpikeBelowThresholdIgnored) {
  auto s = flat_stream(150);
  s[50].ax += 0.7;
  EXPECT_TRUE(run_taps(s).empty());
}

TEST(Tap, PoseChangeIsNotATap) {
  auto s = flat_stream(150);
  for (int i = 50; i < 150; ++i) s[i] = {s[i].t, 1.0, 0.0, 0.0};
  EXPECT_TRUE(run_taps(s).empty());
}

TEST(Tap, FourAlternatingSpikesShake) {
  auto s = flat_stream(150);
  s[10].ax += 1.5;
  s[20].ax -= 1.5;
  s[30].ax += 1.5;
  s[40].ax -= 1.5;
  const auto ev = run_taps(s);
  EXPECT_EQ(count_kind(ev, ClickKind::Shake), 1);
  EXPECT_EQ(count_kind(ev, ClickKind::Tap), 0);
  EXPECT_EQ(ev.size(), 1u);
}

TEST(Tap, TwoSeparateTaps) {
  auto s = flat_stream(300);
  s[20].az += 1.5;
  s[150].az += 1.5;
  EXPECT_EQ(count_kind(run_taps(s), ClickKind::Tap), 2);
}

TEST(EventJson, Types) {
  EXPECT_EQ(to_json(GestureEvent{5, DirectGesture{D::UpLeft, 2}}).dump(),
            R"({"t":5,"type":"direct","label":"UpLeft","level":2})");
  EXPECT_EQ(to_json(GestureEvent{1, SequenceGesture{{D::Up, D::Right}}}).dump(),
            R"({"t":1,"type":"sequence","labels":["Up","Right"]})");
  EXPECT_EQ(to_json(GestureEvent{2, Click{ClickKind::Shake}}).dump(),
            R"({"t":2,"type":"click","kind":"shake"})");
  EXPECT_EQ(to_json(GestureEvent{3, PointerMove{1, -2, 3, 4}})["type"], "pointer");
}
