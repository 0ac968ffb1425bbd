// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/sysmodel.hpp"

#include <algorithm>
#include <cmath>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

namespace {

constexpr double kArrivalEpsilon = 1e-9;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::size_t find_sensor(const std::vector<SensorState>& sensors, const std::string& id) {
  for (std::size_t i = 0; i < sensors.size(); ++i)
    if (sensors[i].id == id) return i;
  throw Error("unknown sensor '" + id + "'");
}

void validate_scenario(const Scenario& s) {
  if (s.ticks < 1) throw Error("scenario ticks must be >= 1");
  if (s.capacity <= 0.0) throw Error("processor capacity must be > 0");
  if (!(s.rate_min < s.rate_max)) throw Error("rate bounds must satisfy rate_min < rate_max");
  if (s.action_scale <= 0.0) throw Error("action_scale must be > 0");
  if (s.rate_drift < 0.0) throw Error("rate_drift must be >= 0");
  if (s.sensors.empty()) throw Error("scenario needs at least one sensor");
  for (const auto& sensor : s.sensors) {
    if (sensor.id.empty()) throw Error("sensor id must not be empty");
    if (sensor.id == kProcessorReliabilityKey)
      throw Error("sensor id 'rproc' collides with the processor reliability key");
    if (sensor.sampling_rate < s.rate_min || sensor.sampling_rate > s.rate_max)
      throw Error("sensor '" + sensor.id + "' rate outside [rate_min, rate_max]");
    if (sensor.failure_probability < 0.0 || sensor.failure_probability > 1.0)
      throw Error("sensor '" + sensor.id + "' failure probability outside [0, 1]");
  }
  for (std::size_t i = 0; i < s.sensors.size(); ++i)
    for (std::size_t j = i + 1; j < s.sensors.size(); ++j)
      if (s.sensors[i].id == s.sensors[j].id)
        throw Error("duplicate sensor id '" + s.sensors[i].id + "'");
  for (const auto& d : s.disturbances) {
    find_sensor(s.sensors, d.sensor_id);
    if (d.from_tick >= d.to_tick) throw Error("disturbance window must satisfy from < to");
  }
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  Scenario scenario;
  scenario.sensors.clear();
  bool sensors_seen = false;
  for (const auto& line : read_artifact_lines(path, "scenario")) {
    auto tokens = split_tokens(line.text);
    const std::string& key = tokens[0];
    auto need = [&](std::size_t n) {
      if (tokens.size() != n + 1)
        throw ParseError("'" + key + "' expects " + std::to_string(n) + " value(s) in " +
                             path.string(),
                         line.number);
    };
    auto num = [&](std::size_t i) {
      auto v = try_parse_double(tokens[i]);
      if (!v)
        throw ParseError("invalid number '" + tokens[i] + "' in " + path.string(), line.number);
      return *v;
    };
    auto integer = [&](std::size_t i) {
      auto v = try_parse_int(tokens[i]);
      if (!v)
        throw ParseError("invalid integer '" + tokens[i] + "' in " + path.string(), line.number);
      return *v;
    };
    if (key == "name") {
      need(1);
      scenario.name = tokens[1];
    } else if (key == "ticks") {
      need(1);
      scenario.ticks = integer(1);
    } else if (key == "capacity") {
      need(1);
      scenario.capacity = num(1);
    } else if (key == "rate_min") {
      need(1);
      scenario.rate_min = num(1);
    } else if (key == "rate_max") {
      need(1);
      scenario.rate_max = num(1);
    } else if (key == "action_scale") {
      need(1);
      scenario.action_scale = num(1);
    } else if (key == "rate_drift") {
      need(1);
      scenario.rate_drift = num(1);
    } else if (key == "sensor") {
      need(3);
      SensorState sensor;
      sensor.id = tokens[1];
      sensor.sampling_rate = num(2);
      sensor.failure_probability = num(3);
      scenario.sensors.push_back(std::move(sensor));
      sensors_seen = true;
    } else if (key == "disturb") {
      // disturb <sensor> <from_tick> <to_tick> <abs|delta> <value>
      need(5);
      Disturbance d;
      d.sensor_id = tokens[1];
      d.from_tick = integer(2);
      d.to_tick = integer(3);
      if (tokens[4] == "abs")
        d.absolute = true;
      else if (tokens[4] == "delta")
        d.absolute = false;
      else
        throw ParseError("disturbance mode must be 'abs' or 'delta' in " + path.string(),
                         line.number);
      d.value = num(5);
      scenario.disturbances.push_back(std::move(d));
    } else {
      throw ParseError("unknown scenario key '" + key + "' in " + path.string(), line.number);
    }
  }
  if (!sensors_seen) throw ParseError("scenario file declares no sensors: " + path.string(), 0);
  try {
    validate_scenario(scenario);
  } catch (const Error& e) {
    throw ParseError(std::string(e.what()) + " in " + path.string(), 0);
  }
  return scenario;
}

void save_scenario(const std::filesystem::path& path, const Scenario& scenario) {
  validate_scenario(scenario);
  std::string out = artifact_header("scenario");
  out += "name " + scenario.name + "\n";
  out += "ticks " + format_int(scenario.ticks) + "\n";
  out += "capacity " + format_double(scenario.capacity) + "\n";
  out += "rate_min " + format_double(scenario.rate_min) + "\n";
  out += "rate_max " + format_double(scenario.rate_max) + "\n";
  out += "action_scale " + format_double(scenario.action_scale) + "\n";
  if (scenario.rate_drift != 0.0) out += "rate_drift " + format_double(scenario.rate_drift) + "\n";
  for (const auto& s : scenario.sensors)
    out += "sensor " + s.id + " " + format_double(s.sampling_rate) + " " +
           format_double(s.failure_probability) + "\n";
  for (const auto& d : scenario.disturbances)
    out += "disturb " + d.sensor_id + " " + format_int(d.from_tick) + " " +
           format_int(d.to_tick) + " " + (d.absolute ? "abs" : "delta") + " " +
           format_double(d.value) + "\n";
  write_text_file(path, out);
}

Simulation::Simulation(Scenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)), rng_(seed) {
  validate_scenario(scenario_);
  processor_.capacity = scenario_.capacity;
  processor_.queue_length = 0.0;
  baseline_failure_.reserve(scenario_.sensors.size());
  for (const auto& s : scenario_.sensors) baseline_failure_.push_back(s.failure_probability);
}

double Simulation::effective_failure(std::size_t sensor_index) const {
  double f = baseline_failure_[sensor_index];
  for (const auto& d : scenario_.disturbances) {
    if (d.sensor_id != scenario_.sensors[sensor_index].id) continue;
    if (tick_ < d.from_tick || tick_ >= d.to_tick) continue;
    f = d.absolute ? d.value : f + d.value;
  }
  return clamp01(f);
}

Telemetry Simulation::step(std::span<const RateCommand> commands) {
  for (const auto& command : commands) {
    std::size_t i = find_sensor(scenario_.sensors, command.sensor_id);
    scenario_.sensors[i].sampling_rate =
        std::clamp(command.new_rate, scenario_.rate_min, scenario_.rate_max);
  }
  if (scenario_.rate_drift > 0.0) {
    for (auto& sensor : scenario_.sensors)
      sensor.sampling_rate = std::min(sensor.sampling_rate + scenario_.rate_drift,
                                      scenario_.rate_max);
  }

  Telemetry telemetry;
  telemetry.tick = tick_;

  double arrivals = 0.0;
  for (std::size_t i = 0; i < scenario_.sensors.size(); ++i) {
    auto& sensor = scenario_.sensors[i];
    double failure = effective_failure(i);
    sensor.failure_probability = failure;
    // One draw per sensor per tick, unconditionally, so the stream stays
    // aligned across runs that differ only in commands.
    bool failed = rng_.bernoulli(failure);
    if (sensor.active && !failed) arrivals += sensor.sampling_rate;
    telemetry.reliabilities[sensor.id] = 1.0 - failure;
  }

  double available = arrivals + processor_.queue_length;
  double processed = std::min(available, processor_.capacity);
  processor_.queue_length = available - processed;

  telemetry.reliabilities[kProcessorReliabilityKey] =
      std::min(1.0, processor_.capacity / std::max(arrivals, kArrivalEpsilon));
  telemetry.messages_sent = arrivals;
  telemetry.messages_processed = processed;

  ++tick_;
  return telemetry;
}

void Simulation::inject_disturbance(const Disturbance& disturbance) {
  find_sensor(scenario_.sensors, disturbance.sensor_id);
  if (disturbance.from_tick >= disturbance.to_tick)
    throw Error("disturbance window must satisfy from < to");
  scenario_.disturbances.push_back(disturbance);
}

Binding Simulation::nominal_reliabilities() const {
  Binding binding;
  double total_rate = 0.0;
  for (std::size_t i = 0; i < scenario_.sensors.size(); ++i) {
    const auto& sensor = scenario_.sensors[i];
    binding[sensor.id] = 1.0 - baseline_failure_[i];
    if (sensor.active) total_rate += sensor.sampling_rate;
  }
  binding[kProcessorReliabilityKey] =
      std::min(1.0, scenario_.capacity / std::max(total_rate, kArrivalEpsilon));
  return binding;
}

double Simulation::rate(const std::string& sensor_id) const {
  return scenario_.sensors[find_sensor(scenario_.sensors, sensor_id)].sampling_rate;
}

Binding Simulation::current_rates() const {
  Binding rates;
  for (const auto& s : scenario_.sensors) rates[s.id] = s.sampling_rate;
  return rates;
}

}  // namespace adaptctl
