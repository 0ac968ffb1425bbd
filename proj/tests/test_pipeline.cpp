// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <vector>

#include "adaptctl/errors.hpp"
#include "adaptctl/pipeline.hpp"

using namespace adaptctl;

namespace {

const std::filesystem::path kDataDir = ADAPTCTL_DATA_DIR;

struct Fixture {
  Scenario scenario = load_scenario(kDataDir / "scenario.txt");
  Goals goals = load_goals(kDataDir / "goals.txt");
  ParametricFormula formula = load_formula(kDataDir / "formula.txt");
};

std::vector<ManagerDatapoint> timing_surface_rows() {
  // t(g, o) = 677*exp(-3000*g) + exp(-2874*o), decreasing in both inputs
  std::vector<ManagerDatapoint> rows;
  const int side = 10;
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      double g = 0.002 * i / (side - 1);
      double o = 0.002 * j / (side - 1);
      rows.push_back({g, o, 677.0 * std::exp(-3000.0 * g) + std::exp(-2874.0 * o), 0});
    }
  return rows;
}

Goals search_goals() {
  Goals goals;
  goals.gran_range = {0.0, 0.002};
  goals.offset_range = {0.0, 0.002};
  return goals;
}

nsga2::Individual ind_of(double gene, std::vector<double> objectives) {
  nsga2::Individual ind;
  ind.genes = {gene};
  ind.objectives = std::move(objectives);
  return ind;
}

}  // namespace

TEST_CASE("default strategy actuates every sensor downward") {
  Fixture fx;
  auto strategy = default_strategy(fx.scenario, fx.goals);
  CHECK(strategy.property == "reliability");
  CHECK(strategy.goal == fx.goals.setpoint);
  CHECK(strategy.condition == effective_condition(fx.goals));
  REQUIRE(strategy.actions.size() == fx.scenario.sensors.size());
  for (const auto& action : strategy.actions) {
    CHECK(action.sign == -1.0);
    CHECK(action.scale == fx.scenario.action_scale);
  }
}

TEST_CASE("the closed loop records one sample per tick and acts with a tick of delay") {
  Fixture fx;
  ClosedLoopOptions options;
  options.ticks = 150;
  auto result = run_closed_loop(fx.scenario, fx.formula, fx.goals, PIConfig{100.0, 0.5, 5}, 1,
                                options);
  REQUIRE(result.response.samples.size() == 150);
  for (std::size_t i = 0; i < result.response.samples.size(); ++i) {
    CHECK(result.response.samples[i].first == static_cast<std::int64_t>(i));
    CHECK(result.response.samples[i].second >= 0.0);
    CHECK(result.response.samples[i].second <= 1.0);
  }
  CHECK(result.response.setpoint == fx.goals.setpoint);

  // every logged command respects the rate bounds and lands a tick later
  CHECK(!result.commands.empty());
  for (const auto& cmd : result.commands) {
    CHECK(cmd.new_rate >= fx.scenario.rate_min);
    CHECK(cmd.new_rate <= fx.scenario.rate_max);
    CHECK(cmd.tick < 150);
  }
  CHECK(result.adaptations > 0);
  CHECK(result.adaptations <= 150);
  CHECK(result.manager_invocations == 0);  // manager disabled by default
}

TEST_CASE("the closed loop is deterministic per seed") {
  Fixture fx;
  ClosedLoopOptions options;
  options.ticks = 120;
  PIConfig pi{120.0, 0.6, 5};
  auto a = run_closed_loop(fx.scenario, fx.formula, fx.goals, pi, 77, options);
  auto b = run_closed_loop(fx.scenario, fx.formula, fx.goals, pi, 77, options);
  REQUIRE(a.response.samples.size() == b.response.samples.size());
  for (std::size_t i = 0; i < a.response.samples.size(); ++i)
    CHECK(a.response.samples[i].second == b.response.samples[i].second);
  CHECK(a.adaptations == b.adaptations);

  auto c = run_closed_loop(fx.scenario, fx.formula, fx.goals, pi, 78, options);
  bool same = a.response.samples == c.response.samples;
  CHECK_FALSE(same);
}

TEST_CASE("with the manager enabled a plan is made up front") {
  Fixture fx;
  ClosedLoopOptions options;
  options.ticks = 100;
  options.manager_enabled = true;
  auto result = run_closed_loop(fx.scenario, fx.formula, fx.goals, PIConfig{100.0, 0.5, 5}, 3,
                                options);
  CHECK(result.manager_invocations == 1);
  CHECK(result.warnings.empty());
}

TEST_CASE("an unreachable setpoint surfaces as a warning, not a crash") {
  Fixture fx;
  Goals goals = fx.goals;
  goals.setpoint = 0.99;  // the formula cannot exceed 0.975
  ClosedLoopOptions options;
  options.ticks = 60;
  options.manager_enabled = true;
  auto result = run_closed_loop(fx.scenario, fx.formula, goals, PIConfig{100.0, 0.5, 5}, 3,
                                options);
  CHECK(result.manager_invocations == 1);
  REQUIRE(!result.warnings.empty());
  CHECK(result.warnings[0].find("tick 0") != std::string::npos);
}

TEST_CASE("zero gains leave the plant alone") {
  Fixture fx;
  ClosedLoopOptions options;
  options.ticks = 100;
  auto result = run_closed_loop(fx.scenario, fx.formula, fx.goals, PIConfig{0.0, 0.0, 5}, 5,
                                options);
  CHECK(result.commands.empty());
  CHECK(result.adaptations == 0);
}

TEST_CASE("manager data collection walks the grid in row-major order") {
  auto formula = ParametricFormula::parse("0.5*(p1+p2)");
  Binding current{{"p1", 0.6}, {"p2", 0.8}};
  ManagerCollectOptions options;
  options.grans = {0.5, 0.25};
  options.offsets = {0.5};
  options.repetitions = 2;
  options.time_from_steps = true;

  auto rows = collect_manager_data(formula, 0.9, current, options);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].gran == 0.5);
  CHECK(rows[0].offset == 0.5);
  CHECK(rows[0].steps == 18);
  CHECK(rows[0].time_to_solution_s == doctest::Approx(18e-6));
  CHECK(rows[1].gran == 0.25);
  CHECK(rows[1].steps == 34);
  CHECK(rows[1].time_to_solution_s == doctest::Approx(34e-6));

  options.grans.clear();
  CHECK_THROWS_AS(collect_manager_data(formula, 0.9, current, options), Error);
}

TEST_CASE("wall-clock collection still reports deterministic step counts") {
  auto formula = ParametricFormula::parse("0.5*(p1+p2)");
  Binding current{{"p1", 0.6}, {"p2", 0.8}};
  ManagerCollectOptions options;
  options.grans = {0.1};
  options.offsets = {0.25, 0.75};
  options.repetitions = 3;

  auto rows = collect_manager_data(formula, 0.9, current, options);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.steps > 0);
    CHECK(r.time_to_solution_s >= 0.0);
  }
  auto again = collect_manager_data(formula, 0.9, current, options);
  CHECK(rows[0].steps == again[0].steps);
  CHECK(rows[1].steps == again[1].steps);
}

TEST_CASE("manager tuning on an exact surface pushes both knobs to the fast corner") {
  auto rows = timing_surface_rows();
  auto result = run_manager_pipeline(rows, search_goals(), 11);

  // the surface decreases in both inputs, so the optimum sits at the top of
  // both ranges; within 1% of the span
  REQUIRE(result.tuned.gran.has_value());
  REQUIRE(result.tuned.offset.has_value());
  CHECK(*result.tuned.gran > 0.002 * 0.99);
  CHECK(*result.tuned.gran <= 0.002);
  CHECK(*result.tuned.offset > 0.002 * 0.99);
  CHECK(*result.tuned.offset <= 0.002);
  CHECK(result.warnings.empty());
  CHECK(result.model.kind == ModelKind::exp_sum_2d);
  CHECK(result.model.input_names == std::vector<std::string>{"gran", "offset"});
  CHECK(result.tuned.seed == 11);

  // the prediction at the chosen point cannot be wildly optimistic
  double t_min = rows[0].time_to_solution_s;
  for (const auto& r : rows) t_min = std::min(t_min, r.time_to_solution_s);
  CHECK(result.predicted_time <= 1.1 * t_min);
  CHECK(result.predicted_time > 0.0);
}

TEST_CASE("a constant timing surface falls back to the range midpoints") {
  std::vector<ManagerDatapoint> rows;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rows.push_back({0.1 * (i + 1), 0.2 * (j + 1), 0.5, 100});

  Goals goals;
  goals.gran_range = {0.1, 0.3};
  goals.offset_range = {0.2, 0.6};
  auto result = run_manager_pipeline(rows, goals, 1);
  REQUIRE(!result.warnings.empty());
  CHECK(result.warnings[0].find("constant") != std::string::npos);
  CHECK(*result.tuned.gran == doctest::Approx(0.2));
  CHECK(*result.tuned.offset == doctest::Approx(0.4));
  CHECK(result.predicted_time == doctest::Approx(0.5));
  // the stand-in model predicts the constant everywhere
  CHECK(predict(result.model, std::vector<double>{0.15, 0.3}) == doctest::Approx(0.5));
}

TEST_CASE("a pinned range keeps its coordinate fixed during manager tuning") {
  auto rows = timing_surface_rows();
  Goals goals = search_goals();
  goals.gran_range = {0.001, 0.001};  // no freedom on this axis
  auto result = run_manager_pipeline(rows, goals, 3);
  CHECK(*result.tuned.gran == 0.001);
  CHECK(*result.tuned.offset > 0.002 * 0.99);
}

TEST_CASE("manager tuning refuses an undersized dataset") {
  std::vector<ManagerDatapoint> three{{0.1, 0.1, 1.0, 1}, {0.2, 0.2, 2.0, 2}, {0.3, 0.3, 3.0, 3}};
  CHECK_THROWS_AS(run_manager_pipeline(three, search_goals(), 1), Error);
}

TEST_CASE("enactor data collection covers the grid kp-major under one seed") {
  Fixture fx;
  EnactorCollectOptions options;
  options.kps = {60.0, 90.0};
  options.kis = {0.2, 0.6, 1.0};
  options.iw = 5;
  options.seed = 9;
  options.ticks = 120;

  auto rows = collect_enactor_data(fx.scenario, fx.formula, fx.goals, options);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].kp == 60.0);
  CHECK(rows[0].ki == 0.2);
  CHECK(rows[1].kp == 60.0);
  CHECK(rows[1].ki == 0.6);
  CHECK(rows[3].kp == 90.0);
  CHECK(rows[3].ki == 0.2);
  for (const auto& r : rows) CHECK(r.iw == 5);

  // rerunning the collection reproduces the measurements exactly
  auto again = collect_enactor_data(fx.scenario, fx.formula, fx.goals, options);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].stable == again[i].stable);
    CHECK(rows[i].overshoot == again[i].overshoot);
    CHECK(rows[i].sse == again[i].sse);
  }

  options.kps.clear();
  CHECK_THROWS_AS(collect_enactor_data(fx.scenario, fx.formula, fx.goals, options), Error);
}

TEST_CASE("knee point picks the normalized elbow and breaks ties to the left") {
  std::vector<nsga2::Individual> front;
  front.push_back(ind_of(1.0, {0.0, 1.0}));
  front.push_back(ind_of(2.0, {1.0, 0.0}));
  front.push_back(ind_of(3.0, {0.4, 0.4}));
  CHECK(knee_point(front) == 2);

  // flat objectives discriminate nothing: distance ties, smallest gene wins
  std::vector<nsga2::Individual> flat;
  flat.push_back(ind_of(5.0, {0.3, 0.3}));
  flat.push_back(ind_of(2.0, {0.3, 0.3}));
  flat.push_back(ind_of(4.0, {0.3, 0.3}));
  CHECK(knee_point(flat) == 1);

  CHECK_THROWS_AS(knee_point({}), Error);

  // a lone member is trivially the knee
  std::vector<nsga2::Individual> one;
  one.push_back(ind_of(9.0, {1.0, 2.0}));
  CHECK(knee_point(one) == 0);
}

TEST_CASE("enactor tuning finds a planted quadratic minimum") {
  // sse has clean quadratic minima at kp=114 and ki=0.6; overshoot is flat
  std::vector<EnactorDatapoint> rows;
  for (double kp : {60.0, 90.0, 114.0, 130.0, 150.0}) {
    for (double ki : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      EnactorDatapoint r;
      r.kp = kp;
      r.ki = ki;
      r.iw = 5;
      r.stable = true;
      r.overshoot = 0.0058;
      r.sse = 1e-7 * (kp - 114.0) * (kp - 114.0) + 4e-3 * (ki - 0.6) * (ki - 0.6) + 2e-3;
      r.settling_time = 100;
      rows.push_back(r);
    }
  }

  Goals goals;  // kp in [60, 150], ki in [0.2, 1.0]
  auto result = run_enactor_pipeline(rows, goals, 21);

  REQUIRE(result.tuned.kp.has_value());
  REQUIRE(result.tuned.ki.has_value());
  CHECK(*result.tuned.kp == doctest::Approx(114.0).epsilon(0.02));
  CHECK(*result.tuned.ki == doctest::Approx(0.6).epsilon(0.02));
  CHECK(*result.tuned.iw == goals.iw);
  CHECK(result.tuned.seed == 21);

  REQUIRE(result.fits.size() == 4);
  CHECK(result.fits[0].gain == "kp");
  CHECK(result.fits[0].metric == "sse");
  CHECK(result.fits[0].model.kind == ModelKind::quadratic);
  CHECK(result.fits[0].model.input_names == std::vector<std::string>{"kp"});
  CHECK(result.fits[1].metric == "overshoot");
  // the flat overshoot curve needs no quadratic term
  CHECK(result.fits[1].model.kind == ModelKind::linear);
  CHECK(result.fits[2].gain == "ki");
  CHECK(result.fits[3].gain == "ki");

  REQUIRE(!result.kp_front.empty());
  REQUIRE(!result.ki_front.empty());
}

TEST_CASE("enactor tuning skips rows without a steady-state error in the sse fits") {
  std::vector<EnactorDatapoint> rows;
  for (double kp : {60.0, 90.0, 120.0, 150.0}) {
    for (double ki : {0.2, 0.6, 1.0}) {
      EnactorDatapoint r;
      r.kp = kp;
      r.ki = ki;
      r.iw = 5;
      r.stable = kp != 150.0;
      r.overshoot = 0.01;
      if (kp != 150.0) r.sse = 1e-3 + 1e-5 * kp;
      rows.push_back(r);
    }
  }
  // kp=150 contributes no sse points: the fit runs on the remaining gains
  auto result = run_enactor_pipeline(rows, Goals{}, 4);
  CHECK(result.tuned.kp.has_value());
}

TEST_CASE("enactor tuning demands enough grid coverage") {
  std::vector<EnactorDatapoint> rows;
  for (double kp : {60.0, 90.0, 120.0}) {
    for (double ki : {0.2, 0.6, 1.0}) {
      EnactorDatapoint r;
      r.kp = kp;
      r.ki = ki;
      r.iw = 5;
      r.stable = true;
      r.overshoot = 0.01;
      r.sse = 0.001;
      rows.push_back(r);
    }
  }
  CHECK_THROWS_AS(run_enactor_pipeline(rows, Goals{}, 1), Error);  // 3 kp values

  rows.clear();
  for (double kp : {60.0, 90.0, 120.0, 150.0}) {
    for (double ki : {0.2, 1.0}) {
      EnactorDatapoint r;
      r.kp = kp;
      r.ki = ki;
      r.iw = 5;
      r.stable = true;
      r.overshoot = 0.01;
      r.sse = 0.001;
      rows.push_back(r);
    }
  }
  CHECK_THROWS_AS(run_enactor_pipeline(rows, Goals{}, 1), Error);  // 2 ki values
}

TEST_CASE("tuned values are validated against the goal ranges before use") {
  Goals goals;
  TunedConfig tuned;
  tuned.kp = 100.0;
  tuned.ki = 0.5;
  auto pi = pi_config_from(tuned, goals);
  CHECK(pi.kp == 100.0);
  CHECK(pi.ki == 0.5);
  CHECK(pi.iw == goals.iw);  // falls back to the goals window

  tuned.iw = 7;
  CHECK(pi_config_from(tuned, goals).iw == 7);

  tuned.kp = 200.0;
  try {
    pi_config_from(tuned, goals);
    FAIL("expected Error");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("kp") != std::string::npos);
    CHECK(msg.find("200") != std::string::npos);
    CHECK(msg.find("150") != std::string::npos);
  }

  TunedConfig no_gains;
  no_gains.gran = 0.5;
  no_gains.offset = 0.5;
  CHECK_THROWS_AS(pi_config_from(no_gains, goals), Error);

  auto params = search_params_from(no_gains, goals);
  CHECK(params.gran == 0.5);
  CHECK(params.offset == 0.5);

  no_gains.offset = 1.5;
  CHECK_THROWS_AS(search_params_from(no_gains, goals), Error);
  CHECK_THROWS_AS(search_params_from(tuned, goals), Error);  // no gran/offset at all
}
