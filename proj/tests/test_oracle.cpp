#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace refplan;
using namespace refplan::solver;

namespace {

const std::array<double, 2> kRef{0.6, 0.4};

double exact_value(const testutil::TinyPomdp& env, double b, int max_depth, double gamma,
                   double eta) {
  return testutil::tiny_soft_value(env, b, 0, max_depth, gamma, eta, kRef);
}

}  // namespace

TEST_CASE("exact recursion reduces to the closed form at horizon one", "[oracle]") {
  testutil::TinyPomdp env;
  for (double b : {0.0, 0.3, 0.7, 1.0}) {
    const std::vector<double> q{b * env.reward[0][0] + (1.0 - b) * env.reward[1][0],
                                b * env.reward[0][1] + (1.0 - b) * env.reward[1][1]};
    const double closed = soft_value({kRef[0], kRef[1]}, q, 0.7);
    CHECK(testutil::close_rel(exact_value(env, b, 0, 0.9, 0.7), closed, 1e-12));
    // without discounting the horizon does not matter
    CHECK(testutil::close_rel(exact_value(env, b, 4, 0.0, 0.7), closed, 1e-12));
  }
}

TEST_CASE("deeper horizons change the exact value smoothly", "[oracle]") {
  testutil::TinyPomdp env;
  // rewards here are positive in expectation under the reference, so extra
  // horizon adds value
  const double v0 = exact_value(env, 1.0, 0, 0.95, 0.5);
  const double v1 = exact_value(env, 1.0, 1, 0.95, 0.5);
  const double v2 = exact_value(env, 1.0, 2, 0.95, 0.5);
  CHECK(v1 > v0);
  CHECK(v2 > v1);
  CHECK(v2 - v1 < v1 - v0);  // discounting shrinks each increment
}

TEST_CASE("search converges to the exact soft value", "[oracle]") {
  testutil::TinyPomdp env;
  auto sampler = testutil::tiny_ref_sampler(kRef[0]);
  ZeroHeuristic heuristic;

  SolverParams params;
  params.gamma = 0.95;
  params.eta = 0.5;
  params.particle_count = 64;
  params.obs_resolution = 1.0;
  params.max_macro_len = 1;

  SECTION("one level") {
    params.max_depth = 1;
    RefSolver solver(env, sampler, heuristic, params);
    const ParticleBelief belief = testutil::fresh_belief(64, 0.0);
    Rng rng(301);
    auto result = solver.plan(belief, Budget::sims(30000), rng);
    const double exact = exact_value(env, 1.0, 1, params.gamma, params.eta);
    CHECK(testutil::close_rel(result.tree.root->v, exact, 0.05));
  }

  SECTION("two levels") {
    params.max_depth = 2;
    RefSolver solver(env, sampler, heuristic, params);
    const ParticleBelief belief = testutil::fresh_belief(64, 0.0);
    Rng rng(307);
    auto result = solver.plan(belief, Budget::sims(30000), rng);
    const double exact = exact_value(env, 1.0, 2, params.gamma, params.eta);
    CHECK(testutil::close_rel(result.tree.root->v, exact, 0.1));

    // root action visits follow the reference policy
    const BeliefNode& root = *result.tree.root;
    REQUIRE(root.edges.size() == 2);
    MacroAction a0;
    a0.actions = {0};
    const long n0 = root.edges.at(a0).n;
    CHECK(testutil::freq_within_sigma(n0, root.n, kRef[0], 5.0));
  }
}
