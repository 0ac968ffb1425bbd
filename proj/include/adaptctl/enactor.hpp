// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <filesystem>
#include <string>
#include <vector>

#include "adaptctl/formula.hpp"
#include "adaptctl/sysmodel.hpp"

namespace adaptctl {

/// One actuation target: the control signal u turns into a rate increment of
/// sign * scale * u for this sensor. For the sensor network the sign is
/// negative: a positive error (observed below goal) must lower rates.
struct StrategyAction {
  std::string sensor_id;
  double sign = -1.0;  // +1 or -1
  double scale = 1.0;  // > 0
};

struct Strategy {
  std::string property;          // observed property name, e.g. "reliability"
  double goal = 0.0;             // target value in (0, 1]
  double condition = 0.0;        // tolerance half-width; inside it, no actuation
  std::vector<StrategyAction> actions;
};

void validate_strategy(const Strategy& strategy);

/// Key-value strategy file ("# adaptctl strategy v1" header).
Strategy load_strategy(const std::filesystem::path& path);
void save_strategy(const std::filesystem::path& path, const Strategy& strategy);

struct PIConfig {
  double kp = 0.0;
  double ki = 0.0;
  int iw = 1;  // integral window length, >= 1
};

/// Ring of the most recent errors; never longer than the integral window.
class PIState {
 public:
  void push(double error, int iw) {
    errors_.push_back(error);
    while (static_cast<int>(errors_.size()) > iw) errors_.pop_front();
  }

  double sum() const {
    double total = 0.0;
    for (double e : errors_) total += e;
    return total;
  }

  void reset() { errors_.clear(); }
  std::size_t size() const { return errors_.size(); }
  const std::deque<double>& history() const { return errors_; }

 private:
  std::deque<double> errors_;
};

/// Discrete PI law: records the error, then returns
///   u = kp * error + ki * (sum of the last iw errors, this one included).
/// Before the window fills, the sum runs over whatever history exists.
double control_signal(const PIConfig& config, PIState& state, double error);

struct EnactResult {
  std::vector<RateCommand> commands;  // empty when inside the condition band
  bool escalate = false;              // true when actuation is pinned and failing
  double error = 0.0;
  double u = 0.0;
};

/// Consecutive ticks of fully saturated, still-failing actuation before the
/// enactor gives up and escalates to the strategy manager.
inline constexpr int kEscalationPatience = 10;

/// Owns the PI state for one strategy and turns observed property values into
/// rate commands.
class Enactor {
 public:
  Enactor(Strategy strategy, PIConfig config, int escalation_patience = kEscalationPatience);

  /// current_rates must contain every actuated sensor. Commands are clamped
  /// into [rate_min, rate_max] and only emitted for rates that actually move.
  EnactResult enact(double observed, const Binding& current_rates, double rate_min,
                    double rate_max);

  /// Clears the error history and the saturation counter.
  void reset();

  void set_strategy(Strategy strategy);
  void set_config(PIConfig config);

  const Strategy& strategy() const { return strategy_; }
  const PIConfig& config() const { return config_; }
  const PIState& state() const { return state_; }

 private:
  Strategy strategy_;
  PIConfig config_;
  PIState state_;
  int patience_;
  int saturated_ticks_ = 0;
};

}  // namespace adaptctl
