#include "checks/calibration.hpp"

#include <beltamp/sim/executor.hpp>
#include <beltamp/sim/svg.hpp>

#include <gtest/gtest.h>

using namespace beltamp;
using namespace beltamp::sim;

namespace {

EnvironmentSpec two_rooms() {
  return EnvironmentSpec({{"kitchen", {0, 0, 5, 5}}, {"living", {5, 0, 10, 5}}},
                         {{"table", RoomId{0}, {1, 1, 2, 2}}, {"sofa", RoomId{1}, {7, 3, 8.5, 4}}},
                         {{"box", {2.5, 1.2, 2.8, 1.8}}},
                         {{"apple", SurfaceId{0}, {1.5, 1.5, 0}}, {"remote", SurfaceId{1}, {7.5, 3.5, 0}}},
                         {{RoomId{0}, RoomId{1}, {{5, 0.5}, {5, 1.5}}}});
}

ActionInstance action(ActionKind kind, ObjectId o = {}, SurfaceId s = {}, RoomId r = {}) {
  ActionInstance a;
  a.kind = kind;
  a.object = o;
  a.surface = s;
  a.room = r;
  return a;
}

}  // namespace

TEST(Environment, RejectsBrokenLayouts) {
  EXPECT_THROW(EnvironmentSpec({}, {}, {}, {}, {}), ConfigurationError);
  EXPECT_THROW(EnvironmentSpec({{"a", {0, 0, 4, 4}}, {"b", {3, 0, 6, 4}}}, {}, {}, {}, {}), ConfigurationError);
  EXPECT_THROW(EnvironmentSpec({{"a", {0, 0, 4, 4}}}, {{"t", RoomId{0}, {3, 3, 5, 5}}}, {}, {}, {}),
               ConfigurationError);
  EXPECT_THROW(EnvironmentSpec({{"a", {0, 0, 4, 4}}}, {{"t", RoomId{0}, {1, 1, 2, 2}}}, {},
                               {{"o", SurfaceId{0}, {3, 3, 0}}}, {}),
               ConfigurationError);
  // Two rooms without a doorway are not connected.
  EXPECT_THROW(EnvironmentSpec({{"a", {0, 0, 4, 4}}, {"b", {4, 0, 8, 4}}},
                               {{"t", RoomId{0}, {1, 1, 2, 2}}, {"u", RoomId{1}, {5, 1, 6, 2}}}, {}, {}, {}),
               ConfigurationError);
}

TEST(Environment, JsonRoundTripAndNavigation) {
  const auto env = two_rooms();
  const auto j = to_json(env);
  EXPECT_EQ(j.at("schema_version"), kEnvironmentSchemaVersion);
  EXPECT_TRUE(j.contains("nav_graph"));
  const auto back = environment_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
  // Walls force the path through the doorway.
  const double d = env.nav_distance({4, 4}, {6, 4});
  EXPECT_GT(d, 2.0 + 1e-6);
  EXPECT_NEAR(env.nav_distance({1, 3}, {3, 3}), 2.0, 1e-9);
  EXPECT_THROW(environment_from_json({{"schema_version", 99}}), ConfigurationError);
}

TEST(Sensor, VisibilityExamples) {
  const auto env = two_rooms();
  const SensorConfig cfg;
  const Pose2 base{3.5, 1.5, std::numbers::pi};
  // Behind the box on the ray.
  EXPECT_FALSE(point_visible(env, cfg, base, 0.0, {2.0, 1.5}));
  // Clear ray inside the cone.
  EXPECT_TRUE(point_visible(env, cfg, base, 0.0, {1.5, 2.5}));
  // Bearing 60 degrees off the heading.
  const Pose2 east{1.0, 3.0, 0.0};
  EXPECT_FALSE(point_visible(env, cfg, east, 0.0, {1.0 + std::cos(std::numbers::pi / 3), 3.0 + std::sin(std::numbers::pi / 3)}));
  EXPECT_TRUE(point_visible(env, cfg, east, 0.0, {2.0, 3.2}));
  // Through a wall.
  EXPECT_FALSE(point_visible(env, cfg, {4.5, 4.0, 0.0}, 0.0, {6.0, 4.0}));
  // Out of range.
  EXPECT_FALSE(point_visible(env, cfg, {0.5, 4.5, 0.0}, 0.0, {4.5, 4.5}));
}

TEST(Sensor, VisibilityIsConservative) {
  // Any particle whose ray touches the box must be reported unseen.
  const auto env = two_rooms();
  const SensorConfig cfg;
  Rng rng(3);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 400, rng);
  const Pose2 base{3.5, 1.5, std::numbers::pi};
  const auto mask = visible_particles(env, cfg, RobotState{base, 0.0, {}}, b);
  std::size_t k = 0;
  for (std::size_t s = 0; s < env.num_surfaces(); ++s)
    for (const auto& p : b.particles(SurfaceId{s}))
      if (mask[k++]) {
        EXPECT_FALSE(segment_hits_rect({base.position(), p.pose.position()}, env.occluders()[0].box));
      }
}

TEST(Sensor, SenseExamples) {
  const auto env = two_rooms();
  const SensorConfig cfg;
  Rng rng(4);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 20, rng);
  belief::NoiseParams exact{0.0, 0.0, 0.1, 1.0};
  DetectorNoise noise(exact, Rng(5));
  const Pose2 base{1.5, 3.5, -std::numbers::pi / 2};
  const auto res = sense(env, env.objects(), cfg, base, head_sweep(0.0, cfg), b, {}, noise);
  ASSERT_TRUE(res.target_detected());
  EXPECT_TRUE(env.surface(SurfaceId{0}).footprint.contains(res.detections[0].pose.position()));

  // Facing the corner: nothing in view.
  const auto none = sense(env, env.objects(), cfg, {0.3, 4.7, 3 * std::numbers::pi / 4}, {0.0}, b, {}, noise);
  EXPECT_TRUE(none.detections.empty());
  EXPECT_TRUE(std::none_of(none.seen_mask.begin(), none.seen_mask.end(), [](bool x) { return x; }));
  EXPECT_TRUE(none.event.uninformative());
}

TEST(Sensor, ScriptedCoinsAreConsumedInOrder) {
  const auto env = two_rooms();
  const SensorConfig cfg;
  Rng rng(6);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 20, rng);
  NoiseScript script;
  script.false_negatives = {true};
  DetectorNoise noise(belief::NoiseParams{}, Rng(1), script);
  const Pose2 base{1.5, 3.5, -std::numbers::pi / 2};
  EXPECT_FALSE(sense(env, env.objects(), cfg, base, {0.0}, b, {}, noise).target_detected());
  EXPECT_TRUE(sense(env, env.objects(), cfg, base, {0.0}, b, {}, noise).target_detected());
}

TEST(Sensor, DetectionRateAtFullVisibility) {
  const auto r = checks::run_calibration(1.0, true, 10000, 77, belief::NoiseParams{0.01, 0.0, 0.1, 1.0});
  EXPECT_DOUBLE_EQ(r.expected, 0.99);
  EXPECT_TRUE(r.ok()) << r.observed;
}

// The false-positive coin is off in the on-surface runs so that a spurious
// report of the target cannot inflate the true-detection count.
class Calibration : public ::testing::TestWithParam<double> {};

TEST_P(Calibration, DetectorMatchesObservationModel) {
  const double v = GetParam();
  const auto hit = checks::run_calibration(v, true, 10000, 11, belief::NoiseParams{0.01, 0.0, 0.1, 1.0});
  EXPECT_TRUE(hit.ok()) << "detected: " << hit.observed << " vs " << hit.expected << " +- " << 3 * hit.sigma;
  const auto fp = checks::run_calibration(v, false, 10000, 12, belief::NoiseParams{0.01, 0.05, 0.1, 1.0});
  EXPECT_TRUE(fp.ok()) << "false positive: " << fp.observed << " vs " << fp.expected << " +- " << 3 * fp.sigma;
}

INSTANTIATE_TEST_SUITE_P(Visibility, Calibration, ::testing::Values(0.25, 0.5, 1.0));

TEST(Executor, DetectPickPlace) {
  const auto env = two_rooms();
  auto world = WorldState::from(env, {3.0, 3.0, 0.0});
  Rng rng(8);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 20, rng);
  DetectorNoise noise(belief::NoiseParams{0.0, 0.0, 0.1, 1.0}, Rng(9));

  auto pick = action(ActionKind::pick, ObjectId{0});
  pick.pb = {1.5, 1.5, 0};
  pick.bq = {3.0, 3.0, 0};
  // Not at the action's base configuration.
  ActionInstance wrong = pick;
  wrong.bq = {0.5, 0.5, 0};
  EXPECT_THROW(execute_action(env, world, wrong, nullptr, noise), ContractViolation);
  // No detect yet: AtPoseB is not established.
  EXPECT_FALSE(execute_action(env, world, pick, nullptr, noise).success);

  auto move = action(ActionKind::move);
  move.bq_from = {3.0, 3.0, 0};
  move.bq = {1.5, 2.2, -std::numbers::pi / 2};
  const auto mv = execute_action(env, world, move, nullptr, noise);
  ASSERT_TRUE(mv.success);
  EXPECT_NEAR(mv.duration_s, std::hypot(1.5, 0.8) / 0.25, 1e-9);

  auto detect = action(ActionKind::detect, ObjectId{0}, SurfaceId{0}, RoomId{0});
  detect.bq = move.bq;
  detect.ht = {-0.35, 0.0, 0.35};
  const auto det = execute_action(env, world, detect, &b, noise);
  EXPECT_TRUE(det.success);
  EXPECT_DOUBLE_EQ(det.duration_s, 6.0);

  pick.bq = move.bq;
  const auto pk = execute_action(env, world, pick, nullptr, noise);
  EXPECT_TRUE(pk.success) << pk.reason;
  EXPECT_EQ(world.robot.holding, ObjectId{0});

  auto place = action(ActionKind::place, ObjectId{0}, SurfaceId{0}, RoomId{0});
  place.bq = move.bq;
  place.pb = {1.2, 1.8, 0};
  EXPECT_TRUE(execute_action(env, world, place, nullptr, noise).success);
  EXPECT_EQ(world.objects[0].pose.x, 1.2);
  EXPECT_FALSE(world.robot.holding);
}

TEST(Executor, DetectOnEmptySurfaceMisses) {
  const auto env = two_rooms();
  auto world = WorldState::from(env, {7.75, 2.0, std::numbers::pi / 2});
  Rng rng(10);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 20, rng);
  DetectorNoise noise(belief::NoiseParams{0.0, 0.0, 0.1, 1.0}, Rng(11));
  auto detect = action(ActionKind::detect, ObjectId{0}, SurfaceId{1}, RoomId{1});
  detect.bq = world.robot.base;
  detect.ht = {0.0};
  const auto out = execute_action(env, world, detect, &b, noise);
  EXPECT_FALSE(out.success);
  EXPECT_EQ(out.reason, "target not detected");  // the remote is seen, the apple is not
}

TEST(Executor, DeterministicForFixedSeed) {
  const auto env = two_rooms();
  Rng rng(12);
  const auto b = belief::init_uniform_belief(env, ObjectId{0}, 50, rng);
  auto run = [&] {
    DetectorNoise noise(belief::NoiseParams{0.3, 0.3, 0.1, 1.0}, Rng(13));
    std::vector<std::size_t> out;
    for (int i = 0; i < 20; ++i) {
      const auto res = sense(env, env.objects(), SensorConfig{}, {1.5, 3.5, -1.5}, {0.0}, b, {}, noise);
      out.push_back(res.detections.size());
      for (const auto& d : res.detections) out.push_back(static_cast<std::size_t>(d.pose.x * 1e6));
    }
    return out;
  };
  EXPECT_EQ(run(), run());
}

TEST(Svg, RendersEnvironment) {
  const auto env = two_rooms();
  const auto svg = render_svg(env);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("table"), std::string::npos);
}
