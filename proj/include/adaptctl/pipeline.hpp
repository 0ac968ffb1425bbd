// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaptctl/curvefit.hpp"
#include "adaptctl/enactor.hpp"
#include "adaptctl/knowledge.hpp"
#include "adaptctl/manager.hpp"
#include "adaptctl/metrics.hpp"
#include "adaptctl/nsga2.hpp"
#include "adaptctl/sysmodel.hpp"

namespace adaptctl {

struct CommandLogEntry {
  std::int64_t tick = 0;
  std::string sensor_id;
  double old_rate = 0.0;
  double new_rate = 0.0;
  double u = 0.0;
};

struct ClosedLoopOptions {
  std::int64_t ticks = 0;        // 0 runs the scenario's own length
  bool manager_enabled = false;  // strategy search at start and on escalation
  SearchParams search;
};

struct ClosedLoopResult {
  ResponseSeries response;
  ControlMetrics metrics;
  std::vector<CommandLogEntry> commands;
  std::size_t adaptations = 0;  // ticks on which at least one rate moved
  std::size_t escalations = 0;
  std::size_t manager_invocations = 0;
  std::vector<std::string> warnings;
};

/// Strategy actuating every sensor with the scenario's gain, negative sign:
/// observed below goal means rates must come down.
Strategy default_strategy(const Scenario& scenario, const Goals& goals);

/// Simulates the scenario under PI control of the observed property.
/// Commands computed from tick t's telemetry are applied at tick t+1.
ClosedLoopResult run_closed_loop(const Scenario& scenario, const ParametricFormula& formula,
                                 const Goals& goals, const PIConfig& pi, std::uint64_t seed,
                                 const ClosedLoopOptions& options = {});

struct ManagerCollectOptions {
  std::vector<double> grans;
  std::vector<double> offsets;
  int repetitions = 3;
  // Synthesize the time column from the (deterministic) step count instead of
  // the wall clock; makes collected datasets reproducible byte for byte.
  bool time_from_steps = false;
};

/// Times the strategy search over a gran x offset grid.
std::vector<ManagerDatapoint> collect_manager_data(const ParametricFormula& formula,
                                                   double reference, const Binding& current,
                                                   const ManagerCollectOptions& options);

struct ManagerTuneResult {
  FittedModel model;
  TunedConfig tuned;  // gran and offset set
  double predicted_time = 0.0;
  std::vector<std::string> warnings;
};

/// Fits time-to-solution over (gran, offset) and searches the goal ranges for
/// the configuration with the smallest predicted time.
ManagerTuneResult run_manager_pipeline(const std::vector<ManagerDatapoint>& rows,
                                       const Goals& goals, std::uint64_t seed);

struct EnactorCollectOptions {
  std::vector<double> kps;
  std::vector<double> kis;
  int iw = 5;
  std::uint64_t seed = 1;  // every grid cell runs under this same seed
  std::int64_t ticks = 0;
};

/// One closed-loop run per (kp, ki) cell, kp-major order.
std::vector<EnactorDatapoint> collect_enactor_data(const Scenario& scenario,
                                                   const ParametricFormula& formula,
                                                   const Goals& goals,
                                                   const EnactorCollectOptions& options);

struct MarginalFit {
  std::string gain;    // "kp" or "ki"
  std::string metric;  // "sse" or "overshoot"
  FittedModel model;
};

struct EnactorTuneResult {
  TunedConfig tuned;  // kp, ki, iw set
  std::vector<MarginalFit> fits;
  std::vector<nsga2::Individual> kp_front;
  std::vector<nsga2::Individual> ki_front;
  std::vector<std::string> warnings;
};

/// Fits each control metric against each gain (best of linear, quadratic,
/// exponential on the per-gain means; rows without a steady-state error are
/// left out of the sse fits), then picks each gain from the knee of a
/// two-objective (sse, overshoot) search over its goal range. kp first.
EnactorTuneResult run_enactor_pipeline(const std::vector<EnactorDatapoint>& rows,
                                       const Goals& goals, std::uint64_t seed);

/// Front member closest to the per-objective ideal after min-max
/// normalization; distance ties fall to the smallest first gene.
std::size_t knee_point(const std::vector<nsga2::Individual>& front);

/// Tuned values checked against the goal ranges before use.
PIConfig pi_config_from(const TunedConfig& tuned, const Goals& goals);
SearchParams search_params_from(const TunedConfig& tuned, const Goals& goals);

}  // namespace adaptctl
