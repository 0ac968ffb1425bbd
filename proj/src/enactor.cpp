// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/enactor.hpp"

#include <algorithm>
#include <cmath>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

void validate_strategy(const Strategy& strategy) {
  if (!(strategy.goal > 0.0 && strategy.goal <= 1.0))
    throw Error("strategy goal must lie in (0, 1]");
  if (strategy.condition < 0.0) throw Error("strategy condition must be >= 0");
  if (strategy.actions.empty()) throw Error("strategy needs at least one action");
  for (const auto& action : strategy.actions) {
    if (action.sensor_id.empty()) throw Error("strategy action needs a sensor id");
    if (action.sign != 1.0 && action.sign != -1.0)
      throw Error("strategy action sign must be +1 or -1");
    if (!(action.scale > 0.0)) throw Error("strategy action scale must be > 0");
  }
}

Strategy load_strategy(const std::filesystem::path& path) {
  Strategy strategy;
  for (const auto& line : read_artifact_lines(path, "strategy")) {
    auto tokens = split_tokens(line.text);
    const std::string& key = tokens[0];
    auto num = [&](std::size_t i) {
      auto v = try_parse_double(tokens[i]);
      if (!v)
        throw ParseError("invalid number '" + tokens[i] + "' in " + path.string(), line.number);
      return *v;
    };
    if (key == "property" && tokens.size() == 2) {
      strategy.property = tokens[1];
    } else if (key == "goal" && tokens.size() == 2) {
      strategy.goal = num(1);
    } else if (key == "condition" && tokens.size() == 2) {
      strategy.condition = num(1);
    } else if (key == "action" && tokens.size() == 4) {
      StrategyAction action;
      action.sensor_id = tokens[1];
      action.sign = num(2);
      action.scale = num(3);
      strategy.actions.push_back(std::move(action));
    } else {
      throw ParseError("unknown strategy line '" + line.text + "' in " + path.string(),
                       line.number);
    }
  }
  try {
    validate_strategy(strategy);
  } catch (const Error& e) {
    throw ParseError(std::string(e.what()) + " in " + path.string(), 0);
  }
  return strategy;
}

void save_strategy(const std::filesystem::path& path, const Strategy& strategy) {
  validate_strategy(strategy);
  std::string out = artifact_header("strategy");
  out += "property " + strategy.property + "\n";
  out += "goal " + format_double(strategy.goal) + "\n";
  out += "condition " + format_double(strategy.condition) + "\n";
  for (const auto& action : strategy.actions)
    out += "action " + action.sensor_id + " " + format_double(action.sign) + " " +
           format_double(action.scale) + "\n";
  write_text_file(path, out);
}

double control_signal(const PIConfig& config, PIState& state, double error) {
  if (config.iw < 1) throw Error("integral window must be >= 1");
  state.push(error, config.iw);
  return config.kp * error + config.ki * state.sum();
}

Enactor::Enactor(Strategy strategy, PIConfig config, int escalation_patience)
    : strategy_(std::move(strategy)), config_(config), patience_(escalation_patience) {
  validate_strategy(strategy_);
  if (config_.iw < 1) throw Error("integral window must be >= 1");
  if (!std::isfinite(config_.kp) || !std::isfinite(config_.ki))
    throw Error("controller gains must be finite");
}

EnactResult Enactor::enact(double observed, const Binding& current_rates, double rate_min,
                           double rate_max) {
  if (!std::isfinite(observed)) throw Error("observed property value must be finite");

  EnactResult result;
  result.error = strategy_.goal - observed;

  if (std::fabs(result.error) <= strategy_.condition) {
    // Inside the tolerance band: the error still enters the history so the
    // integral term stays honest, but nothing is actuated.
    state_.push(result.error, config_.iw);
    saturated_ticks_ = 0;
    return result;
  }

  result.u = control_signal(config_, state_, result.error);

  bool all_pinned = !strategy_.actions.empty();
  for (const auto& action : strategy_.actions) {
    auto it = current_rates.find(action.sensor_id);
    if (it == current_rates.end())
      throw Error("no current rate for sensor '" + action.sensor_id + "'");
    double old_rate = it->second;
    double target = old_rate + action.sign * action.scale * result.u;
    double clamped = std::clamp(target, rate_min, rate_max);
    if (clamped != old_rate) {
      result.commands.push_back({action.sensor_id, clamped});
      all_pinned = false;
    } else if (target == old_rate) {
      // Zero net push (e.g. kp = ki = 0): idle, not saturated.
      all_pinned = false;
    }
  }

  if (all_pinned) {
    if (++saturated_ticks_ >= patience_) {
      saturated_ticks_ = 0;
      result.escalate = true;
      result.commands.clear();
    }
  } else {
    saturated_ticks_ = 0;
  }
  return result;
}

void Enactor::reset() {
  state_.reset();
  saturated_ticks_ = 0;
}

void Enactor::set_strategy(Strategy strategy) {
  validate_strategy(strategy);
  strategy_ = std::move(strategy);
}

void Enactor::set_config(PIConfig config) {
  if (config.iw < 1) throw Error("integral window must be >= 1");
  if (!std::isfinite(config.kp) || !std::isfinite(config.ki))
    throw Error("controller gains must be finite");
  config_ = config;
}

}  // namespace adaptctl
