// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adaptctl/formula.hpp"
#include "adaptctl/rng.hpp"

namespace adaptctl {

struct SensorState {
  std::string id;
  double sampling_rate = 0.0;        // messages per tick, within scenario bounds
  double failure_probability = 0.0;  // chance of forwarding nothing this tick
  bool active = true;
};

struct ProcessorState {
  double capacity = 0.0;      // messages per tick, > 0
  double queue_length = 0.0;  // backlog, >= 0
};

/// Windowed failure-probability override. Within [from_tick, to_tick) the
/// sensor's failure probability becomes `value` (absolute) or baseline+value
/// (delta), clamped to [0, 1]; outside the window the baseline is restored.
struct Disturbance {
  std::string sensor_id;
  std::int64_t from_tick = 0;
  std::int64_t to_tick = 0;
  bool absolute = true;
  double value = 0.0;
};

struct Scenario {
  std::string name = "scenario";
  std::int64_t ticks = 600;
  double capacity = 120.0;
  double rate_min = 1.0;
  double rate_max = 100.0;
  double action_scale = 0.35;  // per-sensor gain applied to the control signal
  double rate_drift = 0.0;     // greedy sensors: per-tick upward pull on every rate
  std::vector<SensorState> sensors;
  std::vector<Disturbance> disturbances;
};

/// Key-value scenario file ("# adaptctl scenario v1" header). Throws
/// ParseError with line numbers on malformed input.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

/// One tick of observations handed to the controller.
struct Telemetry {
  std::int64_t tick = 0;
  Binding reliabilities;  // one entry per sensor id plus "rproc"
  double messages_sent = 0.0;
  double messages_processed = 0.0;
};

/// Absolute target rate for one sensor; applied at the next step.
struct RateCommand {
  std::string sensor_id;
  double new_rate = 0.0;
};

/// Name of the processor reliability entry in Telemetry::reliabilities.
inline constexpr const char* kProcessorReliabilityKey = "rproc";

/// Deterministic simulation of the sensor network: sensors forward
/// sampling_rate messages per tick unless their per-tick failure fires, the
/// processor drains up to `capacity` messages from arrivals plus backlog.
/// Identical (scenario, commands, seed) give identical telemetry streams.
class Simulation {
 public:
  Simulation(Scenario scenario, std::uint64_t seed);

  Telemetry step(std::span<const RateCommand> commands);

  /// Registers an additional disturbance window at runtime. Unknown sensor
  /// ids are rejected.
  void inject_disturbance(const Disturbance& disturbance);

  /// Reliabilities from baseline failure probabilities and nominal rates,
  /// before any stepping; the instance the strategy search plans against.
  Binding nominal_reliabilities() const;

  const Scenario& scenario() const { return scenario_; }
  std::int64_t tick() const { return tick_; }
  double queue_length() const { return processor_.queue_length; }
  double rate(const std::string& sensor_id) const;
  Binding current_rates() const;

 private:
  double effective_failure(std::size_t sensor_index) const;

  Scenario scenario_;
  std::vector<double> baseline_failure_;
  ProcessorState processor_;
  std::int64_t tick_ = 0;
  Rng rng_;
};

}  // namespace adaptctl
