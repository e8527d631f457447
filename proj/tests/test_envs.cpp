#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace refplan;
using namespace refplan::envs;

namespace {

State nav_state(double x, double y) {
  State s;
  s.values = {x, y};
  return s;
}

State nav_state3(double x, double y, double z) {
  State s;
  s.values = {x, y, z};
  return s;
}

}  // namespace

TEST_CASE("scenario json round trip preserves every field", "[envs]") {
  Scenario s = maze2d_default_scenario();
  s.generator_seed = 123;
  const Scenario back = scenario_from_json(scenario_to_json(s));
  CHECK(back.name == s.name);
  CHECK(back.workspace.bounds.lo == s.workspace.bounds.lo);
  CHECK(back.workspace.bounds.hi == s.workspace.bounds.hi);
  REQUIRE(back.workspace.boxes.size() == s.workspace.boxes.size());
  for (std::size_t i = 0; i < s.workspace.boxes.size(); ++i) {
    CHECK(back.workspace.boxes[i].lo == s.workspace.boxes[i].lo);
    CHECK(back.workspace.boxes[i].hi == s.workspace.boxes[i].hi);
  }
  REQUIRE(back.landmarks.size() == s.landmarks.size());
  REQUIRE(back.dangers.size() == s.dangers.size());
  REQUIRE(back.goals.size() == s.goals.size());
  CHECK(back.goals[0].box.lo == s.goals[0].box.lo);
  REQUIRE(back.spawns.size() == s.spawns.size());
  CHECK(back.spawns[0] == s.spawns[0]);
  CHECK(back.rewards.step == s.rewards.step);
  CHECK(back.rewards.goal == s.rewards.goal);
  CHECK(back.rewards.danger == s.rewards.danger);
  CHECK(back.step_size == s.step_size);
  CHECK(back.noise == s.noise);
  CHECK(back.generator_seed == 123);
}

TEST_CASE("registry names and presets", "[envs]") {
  for (auto id : {EnvId::lightdark, EnvId::maze2d, EnvId::random3d, EnvId::dronetag}) {
    CHECK(parse_env_id(env_name(id)) == id);
    CHECK_NOTHROW(solver_defaults(id).validate());
    CHECK(episode_limits(id).max_primitive_steps > 0);
    CHECK(episode_limits(id).max_cycles > 0);
  }
  CHECK_THROWS_AS(parse_env_id("gridworld"), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// light-dark

TEST_CASE("lightdark scenario generation respects separations", "[envs]") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Scenario s = lightdark_scenario(seed);
    const double stripe = s.noise_param("stripe_x", -1.0);
    REQUIRE(stripe >= 0.0);
    REQUIRE(s.goals.size() == 1);
    REQUIRE(s.spawns.size() == 1);
    const Config goal = s.goals[0].center();
    CHECK(std::abs(goal[0] - stripe) >= 4.0);
    CHECK(std::abs(s.spawns[0][0] - stripe) >= 4.0);
    CHECK(distance(goal, s.spawns[0]) >= 4.0);
    CHECK(s.workspace.bounds.contains(goal));
    CHECK(s.workspace.bounds.contains(s.spawns[0]));
  }

  // identical seeds reproduce identical scenarios
  const auto a = scenario_to_json(lightdark_scenario(7)).dump();
  const auto b = scenario_to_json(lightdark_scenario(7)).dump();
  CHECK(a == b);
}

TEST_CASE("lightdark noise grows away from the stripe", "[envs]") {
  Scenario s = lightdark_scenario(1);
  const LightDarkEnv env(s);
  const double stripe = env.stripe_x();
  CHECK(env.sigma_at(Config::xy(stripe, 4.0)) == Catch::Approx(0.05));
  CHECK(env.sigma_at(Config::xy(stripe + 2.0, 4.0)) == Catch::Approx(0.05 + 0.3 * 2.0));
  CHECK(env.sigma_at(Config::xy(stripe - 3.0, 1.0)) == Catch::Approx(0.05 + 0.3 * 3.0));
}

TEST_CASE("lightdark steps are deterministic cardinal moves with clamping", "[envs]") {
  Scenario s = lightdark_scenario(1);
  const LightDarkEnv env(s);
  Rng rng(101);

  const auto r = env.step(nav_state(4.0, 4.0), 0, rng);  // +x
  CHECK(r.next.values[0] == Catch::Approx(4.5));
  CHECK(r.next.values[1] == Catch::Approx(4.0));
  CHECK(r.reward == Catch::Approx(s.rewards.step));
  CHECK_FALSE(r.terminal);

  const auto clamped = env.step(nav_state(0.0, 0.2), 1, rng);  // -x against the wall
  CHECK(clamped.next.values[0] == 0.0);
}

TEST_CASE("lightdark goal entry pays exactly the goal reward", "[envs]") {
  Scenario s = lightdark_scenario(1);
  const LightDarkEnv env(s);
  const Config goal = s.goals[0].center();
  Rng rng(103);

  // approach from just outside, stepping +x into the goal box
  const auto r = env.step(nav_state(goal[0] - 0.5 - 0.25, goal[1]), 0, rng);
  REQUIRE(r.terminal);
  CHECK(r.outcome == TerminalKind::goal);
  CHECK(r.reward == s.rewards.goal);
  CHECK(r.obs.kind == ObsKind::goal_feedback);

  // terminal states absorb
  State dead = r.next;
  const auto after = env.step(dead, 0, rng);
  CHECK(after.next.terminal);
  CHECK(after.reward == 0.0);
}

TEST_CASE("lightdark observation likelihood matches the gaussian model", "[envs]") {
  Scenario s = lightdark_scenario(1);
  const LightDarkEnv env(s);
  const double stripe = env.stripe_x();

  const State at_stripe = nav_state(stripe, 4.0);
  const double sigma = env.sigma_at(Config::xy(stripe, 4.0));
  const Observation exact = Observation::read2(stripe, 4.0);
  const double expect = normal_pdf(stripe, stripe, sigma) * normal_pdf(4.0, 4.0, sigma);
  CHECK(env.observation_likelihood(exact, at_stripe, 0) == Catch::Approx(expect));

  // goal feedback is an indicator of being in the goal
  const Config goal = s.goals[0].center();
  CHECK(env.observation_likelihood(Observation::goal(), nav_state(goal[0], goal[1]), 0) == 1.0);
  CHECK(env.observation_likelihood(Observation::goal(), at_stripe, 0) == 0.0);

  // readings are impossible from terminal or goal states
  State dead = nav_state(goal[0], goal[1]);
  dead.terminal = true;
  CHECK(env.observation_likelihood(exact, dead, 0) == 0.0);
  CHECK(env.observation_likelihood(Observation::null(), dead, 0) == 1.0);
}

TEST_CASE("lightdark instances are seed deterministic", "[envs]") {
  const Scenario s = lightdark_scenario(3);
  const auto a = make_lightdark_instance(s, 42, 64);
  const auto b = make_lightdark_instance(s, 42, 64);
  CHECK(a.initial_state.values == b.initial_state.values);
  REQUIRE(a.initial_belief.size() == 64);
  for (std::size_t i = 0; i < 64; ++i)
    REQUIRE(a.initial_belief.state(i).values == b.initial_belief.state(i).values);

  const auto c = make_lightdark_instance(s, 43, 64);
  CHECK(a.initial_state.values != c.initial_state.values);
}

// ---------------------------------------------------------------------------
// maze

TEST_CASE("maze transition noise hits 0.8/0.1/0.1", "[envs]") {
  const Maze2dEnv env(maze2d_default_scenario());
  Rng rng(107);
  const int n = 20000;
  long intended = 0, north = 0, south = 0;
  for (int i = 0; i < n; ++i) {
    const ActionId realized = env.realize_action(0, rng);  // +x
    if (realized == 0) ++intended;
    if (realized == 2) ++north;
    if (realized == 3) ++south;
  }
  CHECK(intended + north + south == n);
  CHECK(testutil::freq_within_sigma(intended, n, 0.8, 4.0));
  CHECK(testutil::freq_within_sigma(north, n, 0.1, 4.0));
  CHECK(testutil::freq_within_sigma(south, n, 0.1, 4.0));
}

TEST_CASE("maze blocked moves stay in place", "[envs]") {
  const Scenario s = maze2d_default_scenario();
  const Maze2dEnv env(s);
  Rng rng(109);
  // (11.5, 20): +x leads into the wall [12,14]x[0,38]
  int stays = 0;
  for (int i = 0; i < 200; ++i) {
    const auto r = env.step(nav_state(11.5, 20.0), 0, rng);
    if (r.next.values[0] == 11.5 && r.next.values[1] == 20.0) ++stays;
    REQUIRE(s.workspace.is_valid(Config::xy(r.next.values[0], r.next.values[1])));
  }
  // lateral error moves (prob 0.2) still succeed; intended stays blocked
  CHECK(stays > 100);
}

TEST_CASE("maze terminal regions pay their schedule exactly", "[envs]") {
  const Scenario s = maze2d_default_scenario();
  const Maze2dEnv env(s);

  // danger box [31,34]x[20,26]: stand just left of it and force +x
  long dangered = 0;
  Rng rng(113);
  for (int i = 0; i < 400; ++i) {
    const auto r = env.step(nav_state(30.5, 23.0), 0, rng);
    if (r.terminal) {
      REQUIRE(r.outcome == TerminalKind::danger);
      REQUIRE(r.reward == s.rewards.danger);
      REQUIRE(r.obs.kind == ObsKind::null_obs);
      REQUIRE(r.next.terminal);
      ++dangered;
    } else {
      REQUIRE(r.reward == s.rewards.step);
    }
  }
  CHECK(dangered > 200);  // intended move enters the danger

  // goal box [46,50]x[22,28]
  long goaled = 0;
  for (int i = 0; i < 400; ++i) {
    const auto r = env.step(nav_state(45.5, 25.0), 0, rng);
    if (r.terminal) {
      REQUIRE(r.outcome == TerminalKind::goal);
      REQUIRE(r.reward == s.rewards.goal);
      REQUIRE(r.obs.kind == ObsKind::goal_feedback);
      ++goaled;
    }
  }
  CHECK(goaled > 200);
}

TEST_CASE("maze landmark readings gate the null likelihood", "[envs]") {
  const Scenario s = maze2d_default_scenario();
  const Maze2dEnv env(s);
  Rng rng(127);

  // inside landmark [16,22]x[39,50]
  const State inside = nav_state(19.0, 45.0);
  CHECK(env.in_landmark(Config::xy(19.0, 45.0)));
  CHECK(env.observation_likelihood(Observation::null(), inside, 0) == 0.0);
  CHECK(env.observation_likelihood(Observation::read2(19.0, 45.0), inside, 0) > 0.0);

  const State outside = nav_state(5.0, 25.0);
  CHECK(env.observation_likelihood(Observation::null(), outside, 0) == 1.0);
  CHECK(env.observation_likelihood(Observation::read2(5.0, 25.0), outside, 0) == 0.0);

  // stepping from inside a landmark yields a reading near the position
  const auto r = env.step(nav_state(19.0, 44.0), 2, rng);  // +y stays inside
  REQUIRE(r.obs.kind == ObsKind::reading);
  CHECK(std::abs(r.obs.value[0] - r.next.values[0]) < 1.0);
  CHECK(std::abs(r.obs.value[1] - r.next.values[1]) < 1.0);
}

TEST_CASE("maze layout is certified solvable from both spawns", "[envs]") {
  const Scenario s = maze2d_default_scenario();
  auto valid = [&](const Config& q) {
    return s.workspace.is_valid(q) && !s.in_any(s.dangers, q);
  };
  auto in_goal = [&](const Config& q) { return s.in_any(s.goals, q); };
  for (const Config& spawn : s.spawns) {
    const auto bfs = testutil::lattice_bfs(spawn, s.step_size, valid, in_goal);
    REQUIRE(bfs.reachable);
    CHECK(bfs.steps >= 50);
    CHECK(bfs.steps <= 400);
  }
  // landmarks are reachable too (disambiguation is possible)
  for (const auto& lm : s.landmarks) {
    auto in_lm = [&](const Config& q) { return lm.contains(q); };
    CHECK(testutil::lattice_bfs(s.spawns[0], s.step_size, valid, in_lm).reachable);
  }
}

TEST_CASE("maze instances split particles over spawn hypotheses", "[envs]") {
  const Scenario s = maze2d_default_scenario();
  const auto inst = make_maze2d_instance(s, 11, 100);
  REQUIRE(inst.initial_belief.size() == 100);
  int first = 0, second = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto& v = inst.initial_belief.state(i).values;
    if (v[0] == 5.0 && v[1] == 45.0) ++first;
    if (v[0] == 5.0 && v[1] == 5.0) ++second;
  }
  CHECK(first == 50);
  CHECK(second == 50);
  const bool truth_is_spawn =
      (inst.initial_state.values[1] == 45.0 || inst.initial_state.values[1] == 5.0) &&
      inst.initial_state.values[0] == 5.0;
  CHECK(truth_is_spawn);
}

// ---------------------------------------------------------------------------
// random 3d worlds

TEST_CASE("random3d generation is deterministic and well separated", "[envs]") {
  Random3dSpec spec;
  spec.seed = 5;
  const Scenario a = random3d_generate(spec);
  const Scenario b = random3d_generate(spec);
  CHECK(scenario_to_json(a).dump() == scenario_to_json(b).dump());

  CHECK(a.workspace.boxes.size() == 100);
  CHECK(a.dangers.size() == 15);
  CHECK(a.landmarks.size() == 12);
  REQUIRE(a.goals.size() == 1);
  REQUIRE(a.spawns.size() == 1);
  CHECK(manhattan(a.goals[0].center(), a.spawns[0]) >= 40.0);

  // spawn and goal are clear of obstacles
  CHECK(a.workspace.is_valid(a.spawns[0]));
  CHECK(a.workspace.is_valid(a.goals[0].center()));

  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Random3dSpec sp;
    sp.seed = seed;
    const Scenario s = random3d_generate(sp);
    CHECK(manhattan(s.goals[0].center(), s.spawns[0]) >= 40.0);
    CHECK(s.workspace.is_valid(s.spawns[0]));
  }
}

TEST_CASE("random3d certified worlds admit a lattice route", "[envs]") {
  Random3dSpec spec;
  spec.seed = 9;
  const Scenario s = random3d_generate(spec);
  auto valid = [&](const Config& q) {
    return s.workspace.is_valid(q) && !s.in_any(s.dangers, q);
  };
  auto in_goal = [&](const Config& q) { return s.in_any(s.goals, q); };
  const auto bfs = testutil::lattice_bfs(s.spawns[0], s.step_size, valid, in_goal);
  CHECK(bfs.reachable);
}

TEST_CASE("random3d error directions are uniform over the orthogonals", "[envs]") {
  Random3dSpec spec;
  spec.seed = 2;
  const Random3dEnv env(random3d_generate(spec));
  Rng rng(131);
  const int n = 40000;
  std::map<ActionId, long> counts;
  for (int i = 0; i < n; ++i) counts[env.realize_action(4, rng)] += 1;  // +z intended
  CHECK(testutil::freq_within_sigma(counts[4], n, 0.8, 4.0));
  // the four orthogonal moves (x and y axes) share the remaining 0.2
  for (ActionId a : {0, 1, 2, 3}) CHECK(testutil::freq_within_sigma(counts[a], n, 0.05, 4.0));
  CHECK(counts[5] == 0);  // never the reverse
}

TEST_CASE("random3d landmark readings are three dimensional", "[envs]") {
  Random3dSpec spec;
  spec.seed = 2;
  const Scenario s = random3d_generate(spec);
  const Random3dEnv env(s);
  const Config lm = s.landmarks[0].center();
  const State in_lm = nav_state3(lm[0], lm[1], lm[2]);
  CHECK(env.observation_likelihood(Observation::read3(lm[0], lm[1], lm[2]), in_lm, 0) > 0.0);
  CHECK(env.observation_likelihood(Observation::null(), in_lm, 0) == 0.0);
}

TEST_CASE("random3d instances start as a point mass on the spawn", "[envs]") {
  Random3dSpec spec;
  spec.seed = 4;
  const Scenario s = random3d_generate(spec);
  const auto inst = make_random3d_instance(s, 21, 50);
  REQUIRE(inst.initial_belief.size() == 50);
  for (std::size_t i = 0; i < 50; ++i)
    REQUIRE(inst.initial_belief.state(i).values == inst.initial_state.values);
  CHECK(inst.initial_state.values[0] == 25.0);
  CHECK(inst.initial_state.values[1] == 25.0);
  CHECK(inst.initial_state.values[2] == 3.0);
}

// ---------------------------------------------------------------------------
// drone tag

TEST_CASE("joint action encoding round trips", "[envs]") {
  for (ActionId id = 0; id < 1296; ++id) {
    const auto per = decode_joint_action(id, 4);
    REQUIRE(per.size() == 4);
    for (int a : per) REQUIRE((a >= 0 && a < 6));
    REQUIRE(encode_joint_action(per) == id);
  }
  CHECK(encode_joint_action({1, 0}) == 1);
  CHECK(encode_joint_action({0, 1}) == 6);
}

TEST_CASE("dronetag capture freezes the target and pays the goal reward", "[envs]") {
  Scenario s = dronetag_default_scenario();
  const DroneTagEnv env(s, 1);
  Rng rng(137);

  // +x closes to exactly the capture radius; the target must not move
  State st;
  st.values = {9.5, 10.0, 2.0, 11.5, 10.0, 2.0};
  const auto r = env.step(st, 0, rng);
  REQUIRE(r.terminal);
  CHECK(r.outcome == TerminalKind::capture);
  CHECK(r.reward == s.rewards.goal);
  CHECK(r.obs.kind == ObsKind::null_obs);
  CHECK(r.next.values[3] == 11.5);  // target frozen
  CHECK(r.next.values[4] == 10.0);

  // just outside the radius the target evades instead
  State near;
  near.values = {9.4, 10.0, 2.0, 11.5, 10.0, 2.0};
  const auto r2 = env.step(near, 0, rng);
  CHECK_FALSE(r2.terminal);
  CHECK(r2.reward == s.rewards.step);
  CHECK(r2.next.values[3] == Catch::Approx(12.0));  // fled along +x
}

TEST_CASE("dronetag evasion maximizes the post-move clearance", "[envs]") {
  Scenario s = dronetag_default_scenario();
  const DroneTagEnv env(s, 1);
  Rng rng(139);

  // drone approaches from -x; the best target move is +x
  State st;
  st.values = {10.0, 10.0, 2.0, 13.0, 10.0, 2.0};
  const auto r = env.step(st, 0, rng);  // drone to (10.5,10,2), dist 2.5
  CHECK(r.next.values[3] == Catch::Approx(13.5));
  CHECK(r.next.values[4] == Catch::Approx(10.0));

  // symmetric pincer: lateral moves tie and the lowest action id (+y) wins
  const DroneTagEnv two(s, 2);
  State pincer;
  pincer.values = {10.0, 10.0, 2.0, 18.0, 10.0, 2.0, 14.0, 10.0, 2.0};
  const ActionId squeeze = encode_joint_action({0, 1});  // +x and -x
  const auto r2 = two.step(pincer, squeeze, rng);
  CHECK(r2.next.values[6] == Catch::Approx(14.0));
  CHECK(r2.next.values[7] == Catch::Approx(10.5));  // +y
  CHECK(r2.next.values[8] == Catch::Approx(2.0));
}

TEST_CASE("dronetag target wraps in xy and clamps in z", "[envs]") {
  Scenario s = dronetag_default_scenario();
  const DroneTagEnv env(s, 1);
  Rng rng(149);

  // target near the +x boundary flees across it and reappears near 0
  State st;
  st.values = {26.0, 10.0, 2.0, 29.8, 10.0, 2.0};
  const auto r = env.step(st, 0, rng);  // drone to (26.5,10,2)
  CHECK(r.next.values[3] == Catch::Approx(0.3));
  CHECK(r.next.values[4] == Catch::Approx(10.0));

  // pushed at the ceiling, the target's z clamps to the bound
  State below;
  below.values = {10.0, 10.0, 1.5, 10.0, 10.0, 3.9};
  const auto r2 = env.step(below, 4, rng);  // drone climbs to 2.0, target flees up
  CHECK(r2.next.values[5] == Catch::Approx(4.0));
}

TEST_CASE("dronetag sensing is distance gated and shared", "[envs]") {
  Scenario s = dronetag_default_scenario();
  const DroneTagEnv env(s, 1);
  Rng rng(151);

  // far target: null observation, uniform wander
  State far;
  far.values = {1.0, 1.0, 2.0, 20.0, 20.0, 2.0};
  const auto r = env.step(far, 0, rng);
  CHECK(r.obs.kind == ObsKind::null_obs);
  CHECK(r.reward == s.rewards.step);

  // near target: noisy reading of the target position
  State near;
  near.values = {10.0, 10.0, 2.0, 13.0, 10.0, 2.0};
  const auto r2 = env.step(near, 2, rng);
  REQUIRE(r2.obs.kind == ObsKind::reading);
  CHECK(std::abs(r2.obs.value[0] - r2.next.values[3]) < 2.0);

  // likelihood gates on whether the hypothesized state is sensed
  CHECK(env.observation_likelihood(Observation::null(), far, 0) == 1.0);
  CHECK(env.observation_likelihood(r2.obs, far, 0) == 0.0);
  CHECK(env.observation_likelihood(r2.obs, r2.next, 0) > 0.0);
  CHECK(env.observation_likelihood(Observation::null(), r2.next, 0) == 0.0);
}

TEST_CASE("dronetag default scenario and instances", "[envs]") {
  const Scenario s = dronetag_default_scenario();
  CHECK(s.spawns.size() == 4);
  CHECK(s.rewards.goal == 500.0);
  CHECK(s.step_size == 0.5);

  const auto inst = make_dronetag_instance(s, 31, 40);
  const auto* env = dynamic_cast<const DroneTagEnv*>(inst.env.get());
  REQUIRE(env != nullptr);
  CHECK(env->action_count() == 1296);
  CHECK(env->state_dim() == 15);
  REQUIRE(inst.initial_state.values.size() == 15);
  REQUIRE(inst.initial_belief.size() == 40);

  // drone block is the spawn layout; target hypotheses vary per particle
  for (int d = 0; d < 4; ++d) {
    const auto base = static_cast<std::size_t>(3 * d);
    CHECK(inst.initial_state.values[base] == s.spawns[static_cast<std::size_t>(d)][0]);
  }
  bool targets_differ = false;
  for (std::size_t i = 1; i < inst.initial_belief.size(); ++i)
    targets_differ = targets_differ ||
                     inst.initial_belief.state(i).values[12] != inst.initial_belief.state(0).values[12];
  CHECK(targets_differ);

  // every particle agrees with the true drone positions
  for (std::size_t i = 0; i < inst.initial_belief.size(); ++i)
    for (std::size_t k = 0; k < 12; ++k)
      REQUIRE(inst.initial_belief.state(i).values[k] == inst.initial_state.values[k]);
}
