#include "checks/planner_optimality.hpp"

#include <gtest/gtest.h>

using namespace beltamp;
using namespace beltamp::planner;

TEST(Literals, ParseAndPrint) {
  const auto l = parse_literal("  (Supported ?apple ?pb ?coffee_table), ");
  EXPECT_EQ(l.predicate, "Supported");
  ASSERT_EQ(l.args.size(), 3u);
  EXPECT_EQ(l.args[2], "coffee table");
  EXPECT_EQ(l.str(), "(Supported ?apple ?pb ?coffee_table)");
  EXPECT_EQ(parse_literal("(At apple table)").args, (std::vector<std::string>{"apple", "table"}));
  EXPECT_THROW(parse_literal("(Teleport ?apple)"), ConfigurationError);
  EXPECT_THROW(parse_literal("At apple"), ConfigurationError);
  EXPECT_EQ(parse_literals("(HandEmpty ?arm), (AtBConf ?q0)\n(IsItem ?apple)").size(), 3u);
  EXPECT_THROW(parse_literals("(HandEmpty ?arm"), ConfigurationError);
}

TEST(Literals, GoalsAndInitialState) {
  const auto env = checks::planner_env();
  const auto goals = goals_from_literals(env, parse_literals("(At ?apple ?sofa) (Found ?remote)"));
  ASSERT_EQ(goals.size(), 2u);
  EXPECT_EQ(goals[0].kind, Goal::at);
  EXPECT_EQ(goals[0].surface, SurfaceId{2});
  EXPECT_EQ(goals[1].kind, Goal::found);
  EXPECT_THROW(goals_from_literals(env, parse_literals("(Holding ?apple)")), ConfigurationError);
  EXPECT_THROW(goals_from_literals(env, parse_literals("(At ?pear ?sofa)")), ConfigurationError);

  const auto st = state_from_literals(
      env, parse_literals("(HandEmpty ?arm) (AtBConf ?q0) (Supported ?mug ?pb ?counter) (AtPoseB ?mug ?pb)"),
      {3, 2.5, 0});
  EXPECT_TRUE(st.hand_empty());
  EXPECT_EQ(st.objects[1].kind, ObjectStatus::located);
  EXPECT_EQ(st.objects[1].surface, SurfaceId{1});
  EXPECT_EQ(st.objects[0].kind, ObjectStatus::unknown);
  const auto lits = st.literals(env);
  EXPECT_TRUE(lits.count({"At", {"mug", "counter"}}));
  EXPECT_TRUE(lits.count({"HandEmpty", {"arm"}}));
  EXPECT_FALSE(lits.count({"At", {"apple", "table"}}));

  EXPECT_THROW(state_from_literals(env, parse_literals("(AtBConf ?a) (AtBConf ?b) (HandEmpty ?arm)"), {}),
               ContractViolation);
  EXPECT_THROW(state_from_literals(env, parse_literals("(AtBConf ?a)"), {}), ContractViolation);
  const auto held = state_from_literals(env, parse_literals("(Holding ?apple)"), {});
  EXPECT_EQ(held.objects[0].kind, ObjectStatus::held);
  EXPECT_TRUE(held.literals(env).count({"Holding", {"apple"}}));
}

TEST(Literals, TaskJsonRoundTrip) {
  const nlohmann::json j{{"objects", {"apple"}},
                         {"initial_literals", {"(HandEmpty ?arm)", "(AtBConf ?start)"}},
                         {"goal_literals", "(At ?apple ?coffee_table)"}};
  const auto t = task_from_json(j);
  EXPECT_EQ(t.goal.at(0).args[1], "coffee table");
  const auto back = task_from_json(to_json(t));
  EXPECT_EQ(back.initial, t.initial);
  EXPECT_EQ(back.goal, t.goal);
}

TEST(Streams, DetectCostIsReciprocalMassWithFloor) {
  EXPECT_DOUBLE_EQ(detect_cost_from_mass(0.5), 2.0);
  EXPECT_DOUBLE_EQ(detect_cost_from_mass(0.25, 3.0), 12.0);
  EXPECT_DOUBLE_EQ(detect_cost_from_mass(0.0), 1.0 / kDetectCostFloor);
  EXPECT_DOUBLE_EQ(detect_cost_from_mass(1e-9), 1.0 / kDetectCostFloor);
  Rng rng(3);
  double prev = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 1.0 - static_cast<double>(i) / 200.0;
    const double c = detect_cost_from_mass(m);
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(Streams, PoseSamplesComeFromWeightedParticles) {
  std::vector<belief::Particle> ps{{{0, 0, 0}, 0.0}, {{1, 0, 0}, 3.0}, {{2, 0, 0}, 1.0}};
  Rng rng(11);
  int ones = 0;
  for (int i = 0; i < 4000; ++i) {
    const Pose2 p = sample_pose_b(ps, rng);
    EXPECT_NE(p.x, 0.0);
    if (p.x == 1.0) ++ones;
  }
  EXPECT_NEAR(ones / 4000.0, 0.75, 0.03);
  std::vector<belief::Particle> dead{{{0, 0, 0}, 0.0}};
  EXPECT_THROW(sample_pose_b(dead, rng), StreamFailure);
}

TEST(Streams, ViewsSeeThePoseFromTheRightRoom) {
  const auto env = checks::planner_env();
  sim::SensorConfig sensor;
  const Pose2 pb{1.6, 1.45, 0};
  const auto views = view_candidates(env, sensor, pb, SurfaceId{0});
  ASSERT_FALSE(views.empty());
  bool seen_blocked = false;
  for (const auto& v : views) {
    EXPECT_EQ(env.room_at(v.bq.position()), RoomId{0});
    EXPECT_TRUE(env.line_of_sight_walls(v.bq.position(), pb.position()));
    if (v.occluded) seen_blocked = true;
    // Clear views are ranked ahead of occluded ones.
    if (seen_blocked) {
      EXPECT_TRUE(v.occluded);
    }
  }
  const auto best = inverse_visibility(env, sensor, pb, SurfaceId{0});
  EXPECT_EQ(best.bq, views.front().bq);
  const auto q = reach_config(env, pb, {4, 4, 0}, 0.8);
  ASSERT_TRUE(q);
  EXPECT_LT(distance(q->position(), pb.position()), 0.8);
}

TEST(Search, KnownObjectFetchIsMovePickMovePlace) {
  const auto env = checks::planner_env();
  const auto fx = checks::planner_fixtures(env);
  const auto& f = fx.front();
  const auto r = plan(env, f.state, f.goals, f.beliefs, f.cfg, Rng(1));
  ASSERT_TRUE(r.found);
  std::vector<ActionKind> kinds;
  for (const auto& a : r.actions) kinds.push_back(a.kind);
  EXPECT_EQ(kinds, (std::vector<ActionKind>{ActionKind::move, ActionKind::pick, ActionKind::move, ActionKind::place}));
  EXPECT_EQ(r.actions[3].surface, SurfaceId{2});
  double sum = 0.0;
  for (const auto& a : r.actions) sum += a.cost;
  EXPECT_NEAR(sum, r.cost, 1e-12);
}

TEST(Search, DetectsPreferHighBeliefMass) {
  const auto env = checks::planner_env();
  Rng rng(5);
  auto b = belief::init_uniform_belief(env, ObjectId{0}, 30, rng);
  b.set_room_belief({0.05, 0.95});
  SymbolicState st;
  st.base = {5.5, 1.0, 0};
  st.objects.assign(env.num_objects(), {});
  PlannerConfig cfg;
  const std::map<ObjectId, const belief::HierarchicalBelief*> beliefs{{ObjectId{0}, &b}};
  const std::vector<Goal> goals{{Goal::found, ObjectId{0}, {}}};
  const auto r = plan(env, st, goals, beliefs, cfg, Rng(2));
  ASSERT_TRUE(r.found);
  ASSERT_EQ(r.actions.back().kind, ActionKind::detect);
  EXPECT_EQ(r.actions.back().surface, SurfaceId{2});
  const auto p = ground(env, st, goals, beliefs, cfg, Rng(2));
  for (const auto& d : p.detects) {
    EXPECT_GT(d.mass, 0.0);
    EXPECT_DOUBLE_EQ(d.cost, detect_cost_from_mass(d.mass, cfg.c_a));
  }
}

TEST(Search, GroundingIsDeterministic) {
  const auto env = checks::planner_env();
  const auto fx = checks::planner_fixtures(env);
  for (const auto& f : fx) {
    const auto a = plan(env, f.state, f.goals, f.beliefs, f.cfg, Rng(f.seed));
    const auto b = plan(env, f.state, f.goals, f.beliefs, f.cfg, Rng(f.seed));
    ASSERT_EQ(a.actions.size(), b.actions.size()) << f.name;
    EXPECT_EQ(a.cost, b.cost) << f.name;
    for (std::size_t i = 0; i < a.actions.size(); ++i) EXPECT_EQ(to_json(a.actions[i]), to_json(b.actions[i]));
  }
}

TEST(Search, UnreachableGoalReportsNoPlan) {
  const auto env = checks::planner_env();
  SymbolicState st;
  st.base = {3, 2.5, 0};
  st.objects.assign(env.num_objects(), {});
  const std::vector<Goal> goals{{Goal::found, ObjectId{0}, {}}};
  Rng rng(1);
  auto b = belief::init_uniform_belief(env, ObjectId{0}, 10, rng);
  PlannerConfig cfg;
  cfg.node_budget = 0;
  const std::map<ObjectId, const belief::HierarchicalBelief*> beliefs{{ObjectId{0}, &b}};
  EXPECT_FALSE(plan(env, st, goals, beliefs, cfg, Rng(1)).found);
  EXPECT_THROW(plan(env, st, goals, {}, PlannerConfig{}, Rng(1)), ContractViolation);
}

TEST(Search, CostEqualsEnumeratedOptimumOnSmallFixtures) {
  const auto r = checks::run_planner_optimality_check(4);
  EXPECT_TRUE(r.ok()) << r.failure;
  EXPECT_GE(r.fixtures, 14u);
  EXPECT_GE(r.nonempty, r.fixtures - 1);
}
