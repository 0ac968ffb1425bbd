// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

namespace {

void check_in_range(double value, const ParamRange& range, const std::string& name) {
  if (value < range.lo || value > range.hi)
    throw Error("tuned " + name + " " + format_double(value) + " outside goal range [" +
                format_double(range.lo) + ", " + format_double(range.hi) + "]");
}

bool degenerate(const ParamRange& range) { return !(range.lo < range.hi); }

// Best single-objective individual: smallest objective, ties by genes.
const nsga2::Individual& best_of(const std::vector<nsga2::Individual>& front) {
  const nsga2::Individual* best = &front.front();
  for (const auto& ind : front) {
    if (ind.objectives[0] < best->objectives[0] ||
        (ind.objectives[0] == best->objectives[0] && ind.genes < best->genes))
      best = &ind;
  }
  return *best;
}

}  // namespace

Strategy default_strategy(const Scenario& scenario, const Goals& goals) {
  Strategy strategy;
  strategy.property = goals.property;
  strategy.goal = goals.setpoint;
  strategy.condition = effective_condition(goals);
  for (const auto& sensor : scenario.sensors)
    strategy.actions.push_back({sensor.id, -1.0, scenario.action_scale});
  validate_strategy(strategy);
  return strategy;
}

ClosedLoopResult run_closed_loop(const Scenario& scenario, const ParametricFormula& formula,
                                 const Goals& goals, const PIConfig& pi, std::uint64_t seed,
                                 const ClosedLoopOptions& options) {
  validate_goals(goals);
  Simulation sim(scenario, seed);
  Enactor enactor(default_strategy(scenario, goals), pi);

  ClosedLoopResult result;
  result.response.setpoint = goals.setpoint;
  result.response.stability_margin = goals.stability_margin;

  auto plan = [&](const Binding& current, std::int64_t tick) {
    ++result.manager_invocations;
    try {
      search_for_strategy(options.search, formula, current, goals.setpoint);
      return true;
    } catch (const SolutionNotFound&) {
      result.warnings.push_back("tick " + format_int(tick) +
                                ": no variable assignment reaches the setpoint");
    } catch (const NonConvergence&) {
      result.warnings.push_back("tick " + format_int(tick) +
                                ": strategy search ran out of steps");
    }
    return false;
  };

  if (options.manager_enabled) plan(sim.nominal_reliabilities(), 0);

  const std::int64_t ticks = options.ticks > 0 ? options.ticks : scenario.ticks;
  std::vector<RateCommand> pending;
  for (std::int64_t t = 0; t < ticks; ++t) {
    Telemetry telemetry = sim.step(pending);
    pending.clear();
    const double observed = global_reliability(formula, telemetry.reliabilities);
    result.response.samples.emplace_back(telemetry.tick, observed);

    EnactResult enacted =
        enactor.enact(observed, sim.current_rates(), scenario.rate_min, scenario.rate_max);
    if (enacted.escalate) {
      ++result.escalations;
      // The loop is pinned at the rate bounds and still failing; replan and
      // give the controller a clean slate if a solution exists at all.
      if (options.manager_enabled && plan(telemetry.reliabilities, telemetry.tick))
        enactor.reset();
    }
    if (!enacted.commands.empty()) {
      ++result.adaptations;
      for (const auto& cmd : enacted.commands)
        result.commands.push_back(
            {telemetry.tick, cmd.sensor_id, sim.rate(cmd.sensor_id), cmd.new_rate, enacted.u});
      pending = enacted.commands;
    }
  }

  result.metrics = compute_metrics(result.response);
  return result;
}

std::vector<ManagerDatapoint> collect_manager_data(const ParametricFormula& formula,
                                                   double reference, const Binding& current,
                                                   const ManagerCollectOptions& options) {
  if (options.grans.empty() || options.offsets.empty())
    throw Error("collection grid is empty");
  if (options.repetitions < 1) throw Error("repetitions must be at least 1");

  std::vector<ManagerDatapoint> rows;
  for (double gran : options.grans) {
    for (double offset : options.offsets) {
      SearchParams params;
      params.gran = gran;
      params.offset = offset;
      double total_seconds = 0.0;
      std::uint64_t steps = 0;
      for (int rep = 0; rep < options.repetitions; ++rep) {
        TimedSearchResult timed = timed_search(params, formula, current, reference);
        total_seconds += timed.elapsed_seconds;
        steps = timed.outcome.steps;
      }
      ManagerDatapoint row;
      row.gran = gran;
      row.offset = offset;
      row.steps = static_cast<long long>(steps);
      row.time_to_solution_s = options.time_from_steps
                                   ? static_cast<double>(steps) * 1e-6
                                   : total_seconds / options.repetitions;
      rows.push_back(row);
    }
  }
  return rows;
}

ManagerTuneResult run_manager_pipeline(const std::vector<ManagerDatapoint>& rows,
                                       const Goals& goals, std::uint64_t seed) {
  validate_goals(goals);
  if (rows.size() < coefficient_count(ModelKind::exp_sum_2d) + 1)
    throw Error("need at least " +
                std::to_string(coefficient_count(ModelKind::exp_sum_2d) + 1) +
                " datapoints to model the search time");

  std::vector<DataPoint> points;
  points.reserve(rows.size());
  double out_lo = std::numeric_limits<double>::infinity();
  double out_hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    points.push_back({{r.gran, r.offset}, r.time_to_solution_s});
    out_lo = std::min(out_lo, r.time_to_solution_s);
    out_hi = std::max(out_hi, r.time_to_solution_s);
  }

  ManagerTuneResult result;
  result.tuned.seed = seed;

  const bool constant = (out_hi - out_lo) <= 1e-12 * std::max(1.0, std::fabs(out_hi));
  if (constant) {
    result.warnings.push_back(
        "time to solution is constant across the grid; any configuration is as good, "
        "using the range midpoints");
    result.tuned.gran = 0.5 * (goals.gran_range.lo + goals.gran_range.hi);
    result.tuned.offset = 0.5 * (goals.offset_range.lo + goals.offset_range.hi);
    result.model.kind = ModelKind::exp_sum_2d;
    result.model.coefficients = {out_hi - 1.0, 0.0, 0.0};  // a*e^0 + e^0 == a+1
    result.model.input_names = {"gran", "offset"};
    result.model.rmse = 0.0;
    result.model.n_points = points.size();
    result.predicted_time = out_hi;
    return result;
  }

  result.model = fit(points, ModelKind::exp_sum_2d, {"gran", "offset"});
  const FittedModel& model = result.model;

  const ParamRange ranges[2] = {goals.gran_range, goals.offset_range};
  std::vector<std::size_t> free_dims;
  double coords[2] = {ranges[0].lo, ranges[1].lo};
  for (std::size_t d = 0; d < 2; ++d)
    if (!degenerate(ranges[d])) free_dims.push_back(d);

  if (free_dims.empty()) {
    result.predicted_time = predict(model, coords);
  } else {
    nsga2::Problem problem;
    problem.dimension = free_dims.size();
    for (std::size_t d : free_dims) problem.bounds.push_back({ranges[d].lo, ranges[d].hi});
    problem.n_objectives = 1;
    problem.evaluate = [&](const std::vector<double>& genes) {
      double point[2] = {coords[0], coords[1]};
      for (std::size_t i = 0; i < free_dims.size(); ++i) point[free_dims[i]] = genes[i];
      return std::vector<double>{predict(model, point)};
    };
    nsga2::EAConfig config;
    config.seed = derive_seed(seed, 0);
    nsga2::OptimizeResult opt = nsga2::optimize(problem, config);
    const nsga2::Individual& best = best_of(opt.front);
    for (std::size_t i = 0; i < free_dims.size(); ++i) coords[free_dims[i]] = best.genes[i];
    result.predicted_time = best.objectives[0];
  }

  result.tuned.gran = coords[0];
  result.tuned.offset = coords[1];
  return result;
}

std::vector<EnactorDatapoint> collect_enactor_data(const Scenario& scenario,
                                                   const ParametricFormula& formula,
                                                   const Goals& goals,
                                                   const EnactorCollectOptions& options) {
  if (options.kps.empty() || options.kis.empty()) throw Error("collection grid is empty");
  if (options.iw < 1) throw Error("integral window must be at least 1");

  ClosedLoopOptions loop;
  loop.ticks = options.ticks;

  std::vector<EnactorDatapoint> rows;
  rows.reserve(options.kps.size() * options.kis.size());
  for (double kp : options.kps) {
    for (double ki : options.kis) {
      PIConfig pi{kp, ki, options.iw};
      ClosedLoopResult run = run_closed_loop(scenario, formula, goals, pi, options.seed, loop);
      EnactorDatapoint row;
      row.kp = kp;
      row.ki = ki;
      row.iw = options.iw;
      row.stable = run.metrics.stable;
      row.overshoot = run.metrics.overshoot;
      row.sse = run.metrics.steady_state_error;
      if (run.metrics.settling_time)
        row.settling_time = static_cast<long long>(*run.metrics.settling_time);
      rows.push_back(row);
    }
  }
  return rows;
}

std::size_t knee_point(const std::vector<nsga2::Individual>& front) {
  if (front.empty()) throw Error("knee point of an empty front");
  const std::size_t m = front[0].objectives.size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& ind : front) {
    for (std::size_t j = 0; j < m; ++j) {
      lo[j] = std::min(lo[j], ind.objectives[j]);
      hi[j] = std::max(hi[j], ind.objectives[j]);
    }
  }

  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < front.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double range = hi[j] - lo[j];
      // an objective flat to rounding noise does not discriminate; without
      // this the normalization would blow the noise up to full scale
      if (range <= 1e-12 * std::max({1.0, std::fabs(lo[j]), std::fabs(hi[j])})) continue;
      double z = (front[i].objectives[j] - lo[j]) / range;
      d2 += z * z;
    }
    double d = std::sqrt(d2);
    if (d < best_dist - 1e-12) {
      best = i;
      best_dist = d;
    } else if (std::fabs(d - best_dist) <= 1e-12 &&
               front[i].genes[0] < front[best].genes[0]) {
      best = i;
    }
  }
  return best;
}

EnactorTuneResult run_enactor_pipeline(const std::vector<EnactorDatapoint>& rows,
                                       const Goals& goals, std::uint64_t seed) {
  validate_goals(goals);
  std::set<double> kp_values, ki_values;
  for (const auto& r : rows) {
    kp_values.insert(r.kp);
    ki_values.insert(r.ki);
  }
  if (kp_values.size() < 4)
    throw Error("need at least 4 distinct kp values, got " +
                std::to_string(kp_values.size()));
  if (ki_values.size() < 3)
    throw Error("need at least 3 distinct ki values, got " +
                std::to_string(ki_values.size()));

  // Per-gain means of each metric; rows without a steady-state error are
  // left out of the sse curves.
  auto marginal = [&](bool by_kp, bool use_sse) {
    std::map<double, std::pair<double, int>> acc;
    for (const auto& r : rows) {
      double gain = by_kp ? r.kp : r.ki;
      if (use_sse) {
        if (!r.sse) continue;
        acc[gain].first += *r.sse;
      } else {
        acc[gain].first += r.overshoot;
      }
      acc[gain].second += 1;
    }
    std::vector<DataPoint> pts;
    for (const auto& [gain, sum_count] : acc)
      pts.push_back({{gain}, sum_count.first / sum_count.second});
    return pts;
  };

  const ModelKind kinds[] = {ModelKind::linear, ModelKind::quadratic, ModelKind::exponential};
  auto fit_marginal = [&](bool by_kp, bool use_sse) {
    return fit_best(marginal(by_kp, use_sse), kinds, {by_kp ? "kp" : "ki"});
  };

  EnactorTuneResult result;
  result.fits.push_back({"kp", "sse", fit_marginal(true, true)});
  result.fits.push_back({"kp", "overshoot", fit_marginal(true, false)});
  result.fits.push_back({"ki", "sse", fit_marginal(false, true)});
  result.fits.push_back({"ki", "overshoot", fit_marginal(false, false)});

  auto pareto_front = [&](const FittedModel& sse_model, const FittedModel& os_model,
                          const ParamRange& range, std::uint64_t run_seed) {
    nsga2::Problem problem;
    problem.dimension = 1;
    problem.bounds = {{range.lo, range.hi}};
    problem.n_objectives = 2;
    problem.evaluate = [&](const std::vector<double>& genes) {
      return std::vector<double>{predict(sse_model, genes), predict(os_model, genes)};
    };
    nsga2::EAConfig config;
    config.seed = run_seed;
    return nsga2::optimize(problem, config).front;
  };

  result.kp_front = pareto_front(result.fits[0].model, result.fits[1].model, goals.kp_range,
                                 derive_seed(seed, 1));
  result.ki_front = pareto_front(result.fits[2].model, result.fits[3].model, goals.ki_range,
                                 derive_seed(seed, 2));

  result.tuned.kp = result.kp_front[knee_point(result.kp_front)].genes[0];
  result.tuned.ki = result.ki_front[knee_point(result.ki_front)].genes[0];
  result.tuned.iw = goals.iw;
  result.tuned.seed = seed;
  return result;
}

PIConfig pi_config_from(const TunedConfig& tuned, const Goals& goals) {
  if (!tuned.kp || !tuned.ki) throw Error("tuned config carries no PI gains");
  check_in_range(*tuned.kp, goals.kp_range, "kp");
  check_in_range(*tuned.ki, goals.ki_range, "ki");
  PIConfig pi;
  pi.kp = *tuned.kp;
  pi.ki = *tuned.ki;
  pi.iw = tuned.iw ? *tuned.iw : goals.iw;
  if (pi.iw < 1) throw Error("tuned integral window must be at least 1");
  return pi;
}

SearchParams search_params_from(const TunedConfig& tuned, const Goals& goals) {
  if (!tuned.gran || !tuned.offset) throw Error("tuned config carries no search parameters");
  check_in_range(*tuned.gran, goals.gran_range, "gran");
  check_in_range(*tuned.offset, goals.offset_range, "offset");
  SearchParams params;
  params.gran = *tuned.gran;
  params.offset = *tuned.offset;
  return params;
}

}  // namespace adaptctl
