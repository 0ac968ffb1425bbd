// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/knowledge.hpp"

#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

namespace {

// Splits on commas, keeping empty fields (absent optional values).
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

double require_double(const std::string& token, std::size_t line) {
  auto v = try_parse_double(token);
  if (!v) throw ParseError("invalid number '" + token + "'", line);
  return *v;
}

std::int64_t require_int(const std::string& token, std::size_t line) {
  auto v = try_parse_int(token);
  if (!v) throw ParseError("invalid integer '" + token + "'", line);
  return *v;
}

void require_field_count(const std::vector<std::string>& fields, std::size_t expected,
                         std::size_t line) {
  if (fields.size() != expected)
    throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                         std::to_string(fields.size()),
                     line);
}

void check_range(const ParamRange& range, const std::string& name) {
  if (!(range.lo <= range.hi))
    throw Error("goal range '" + name + "' must satisfy lo <= hi");
}

}  // namespace

double effective_condition(const Goals& goals) {
  if (goals.condition) return *goals.condition;
  return goals.stability_margin * goals.setpoint;
}

void validate_goals(const Goals& goals) {
  if (goals.property.empty()) throw Error("goals: property name is empty");
  if (!(goals.setpoint > 0.0 && goals.setpoint <= 1.0))
    throw Error("goals: setpoint must be in (0, 1]");
  if (!(goals.stability_margin > 0.0)) throw Error("goals: stability margin must be positive");
  if (goals.condition && *goals.condition < 0.0)
    throw Error("goals: condition must be non-negative");
  check_range(goals.gran_range, "gran");
  check_range(goals.offset_range, "offset");
  check_range(goals.kp_range, "kp");
  check_range(goals.ki_range, "ki");
  if (goals.gran_range.lo < 0.0 || !(goals.gran_range.hi > 0.0))
    throw Error("goals: gran range must be non-negative with a positive upper bound");
  if (goals.offset_range.lo < 0.0 || goals.offset_range.hi > 1.0)
    throw Error("goals: offset range must lie in [0, 1]");
  if (goals.kp_range.lo < 0.0) throw Error("goals: kp range must be non-negative");
  if (goals.ki_range.lo < 0.0) throw Error("goals: ki range must be non-negative");
  if (goals.iw < 1) throw Error("goals: integral window must be at least 1");
}

void save_goals(const std::filesystem::path& path, const Goals& goals) {
  validate_goals(goals);
  std::ostringstream out;
  out << artifact_header("goals");
  out << "property " << goals.property << "\n";
  out << "setpoint " << format_double(goals.setpoint) << "\n";
  out << "margin " << format_double(goals.stability_margin) << "\n";
  if (goals.condition) out << "condition " << format_double(*goals.condition) << "\n";
  out << "gran " << format_double(goals.gran_range.lo) << " "
      << format_double(goals.gran_range.hi) << "\n";
  out << "offset " << format_double(goals.offset_range.lo) << " "
      << format_double(goals.offset_range.hi) << "\n";
  out << "kp " << format_double(goals.kp_range.lo) << " " << format_double(goals.kp_range.hi)
      << "\n";
  out << "ki " << format_double(goals.ki_range.lo) << " " << format_double(goals.ki_range.hi)
      << "\n";
  out << "iw " << format_int(goals.iw) << "\n";
  write_text_file(path, out.str());
}

Goals load_goals(const std::filesystem::path& path) {
  Goals goals;
  std::set<std::string> seen;
  for (const auto& line : read_artifact_lines(path, "goals")) {
    auto tokens = split_tokens(line.text);
    const std::string& key = tokens[0];
    if (!seen.insert(key).second)
      throw ParseError("duplicate key '" + key + "'", line.number);

    auto one_double = [&](double& target) {
      if (tokens.size() != 2) throw ParseError("expected one value after '" + key + "'", line.number);
      target = require_double(tokens[1], line.number);
    };
    auto range = [&](ParamRange& target) {
      if (tokens.size() != 3)
        throw ParseError("expected two values after '" + key + "'", line.number);
      target.lo = require_double(tokens[1], line.number);
      target.hi = require_double(tokens[2], line.number);
    };

    if (key == "property") {
      if (tokens.size() != 2) throw ParseError("expected one value after 'property'", line.number);
      goals.property = tokens[1];
    } else if (key == "setpoint") {
      one_double(goals.setpoint);
    } else if (key == "margin") {
      one_double(goals.stability_margin);
    } else if (key == "condition") {
      double v = 0.0;
      one_double(v);
      goals.condition = v;
    } else if (key == "gran") {
      range(goals.gran_range);
    } else if (key == "offset") {
      range(goals.offset_range);
    } else if (key == "kp") {
      range(goals.kp_range);
    } else if (key == "ki") {
      range(goals.ki_range);
    } else if (key == "iw") {
      if (tokens.size() != 2) throw ParseError("expected one value after 'iw'", line.number);
      goals.iw = static_cast<int>(require_int(tokens[1], line.number));
    } else {
      throw ParseError("unknown goals key '" + key + "'", line.number);
    }
  }
  if (!seen.count("setpoint"))
    throw IoError("goals file " + path.string() + " is missing a setpoint");
  validate_goals(goals);
  return goals;
}

void save_manager_dataset(const std::filesystem::path& path,
                          const std::vector<ManagerDatapoint>& rows) {
  std::ostringstream out;
  out << artifact_header("dataset-manager");
  out << "gran,offset,time_to_solution_s,steps\n";
  for (const auto& r : rows) {
    out << format_double(r.gran) << "," << format_double(r.offset) << ","
        << format_double(r.time_to_solution_s) << "," << format_int(r.steps) << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<ManagerDatapoint> load_manager_dataset(const std::filesystem::path& path) {
  auto lines = read_artifact_lines(path, "dataset-manager");
  if (lines.empty()) throw IoError("dataset " + path.string() + " has no column header");
  if (trim(lines[0].text) != "gran,offset,time_to_solution_s,steps")
    throw ParseError("unexpected column header '" + lines[0].text + "'", lines[0].number);

  std::vector<ManagerDatapoint> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_csv(lines[i].text);
    require_field_count(fields, 4, lines[i].number);
    ManagerDatapoint r;
    r.gran = require_double(fields[0], lines[i].number);
    r.offset = require_double(fields[1], lines[i].number);
    r.time_to_solution_s = require_double(fields[2], lines[i].number);
    r.steps = require_int(fields[3], lines[i].number);
    rows.push_back(r);
  }
  return rows;
}

void save_enactor_dataset(const std::filesystem::path& path,
                          const std::vector<EnactorDatapoint>& rows) {
  std::ostringstream out;
  out << artifact_header("dataset-enactor");
  out << "kp,ki,iw,stable,overshoot,sse,settling_time\n";
  for (const auto& r : rows) {
    out << format_double(r.kp) << "," << format_double(r.ki) << "," << format_int(r.iw) << ","
        << (r.stable ? "1" : "0") << "," << format_double(r.overshoot) << ",";
    if (r.sse) out << format_double(*r.sse);
    out << ",";
    if (r.settling_time) out << format_int(*r.settling_time);
    out << "\n";
  }
  write_text_file(path, out.str());
}

std::vector<EnactorDatapoint> load_enactor_dataset(const std::filesystem::path& path) {
  auto lines = read_artifact_lines(path, "dataset-enactor");
  if (lines.empty()) throw IoError("dataset " + path.string() + " has no column header");
  if (trim(lines[0].text) != "kp,ki,iw,stable,overshoot,sse,settling_time")
    throw ParseError("unexpected column header '" + lines[0].text + "'", lines[0].number);

  std::vector<EnactorDatapoint> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = split_csv(lines[i].text);
    require_field_count(fields, 7, lines[i].number);
    EnactorDatapoint r;
    r.kp = require_double(fields[0], lines[i].number);
    r.ki = require_double(fields[1], lines[i].number);
    r.iw = static_cast<int>(require_int(fields[2], lines[i].number));
    std::int64_t stable = require_int(fields[3], lines[i].number);
    if (stable != 0 && stable != 1)
      throw ParseError("stable flag must be 0 or 1", lines[i].number);
    r.stable = stable == 1;
    r.overshoot = require_double(fields[4], lines[i].number);
    if (!fields[5].empty()) r.sse = require_double(fields[5], lines[i].number);
    if (!fields[6].empty()) r.settling_time = require_int(fields[6], lines[i].number);
    rows.push_back(r);
  }
  return rows;
}

void save_model(const std::filesystem::path& path, const FittedModel& model) {
  std::ostringstream out;
  out << artifact_header("model");
  out << "kind " << model_kind_name(model.kind) << "\n";
  out << "inputs";
  for (const auto& name : model.input_names) out << " " << name;
  out << "\n";
  out << "coefficients";
  for (double c : model.coefficients) out << " " << format_double(c);
  out << "\n";
  out << "rmse " << format_double(model.rmse) << "\n";
  out << "points " << format_int(static_cast<std::int64_t>(model.n_points)) << "\n";
  write_text_file(path, out.str());
}

FittedModel load_model(const std::filesystem::path& path) {
  FittedModel model;
  bool have_kind = false, have_coeffs = false;
  for (const auto& line : read_artifact_lines(path, "model")) {
    auto tokens = split_tokens(line.text);
    const std::string& key = tokens[0];
    if (key == "kind") {
      if (tokens.size() != 2) throw ParseError("expected one value after 'kind'", line.number);
      try {
        model.kind = model_kind_from_name(tokens[1]);
      } catch (const FitError& e) {
        throw ParseError(e.what(), line.number);
      }
      have_kind = true;
    } else if (key == "inputs") {
      model.input_names.assign(tokens.begin() + 1, tokens.end());
    } else if (key == "coefficients") {
      model.coefficients.clear();
      for (std::size_t i = 1; i < tokens.size(); ++i)
        model.coefficients.push_back(require_double(tokens[i], line.number));
      have_coeffs = true;
    } else if (key == "rmse") {
      if (tokens.size() != 2) throw ParseError("expected one value after 'rmse'", line.number);
      model.rmse = require_double(tokens[1], line.number);
    } else if (key == "points") {
      if (tokens.size() != 2) throw ParseError("expected one value after 'points'", line.number);
      model.n_points = static_cast<std::size_t>(require_int(tokens[1], line.number));
    } else {
      throw ParseError("unknown model key '" + key + "'", line.number);
    }
  }
  if (!have_kind || !have_coeffs)
    throw IoError("model file " + path.string() + " is missing kind or coefficients");
  if (model.coefficients.size() != coefficient_count(model.kind))
    throw IoError("model file " + path.string() + " has " +
                  std::to_string(model.coefficients.size()) + " coefficients, kind '" +
                  model_kind_name(model.kind) + "' needs " +
                  std::to_string(coefficient_count(model.kind)));
  if (model.input_names.empty())
    model.input_names = input_arity(model.kind) == 1 ? std::vector<std::string>{"x"}
                                                     : std::vector<std::string>{"x1", "x2"};
  return model;
}

void save_tuned_config(const std::filesystem::path& path, const TunedConfig& config) {
  std::ostringstream out;
  out << artifact_header("tuned-config");
  if (config.kp) out << "kp " << format_double(*config.kp) << "\n";
  if (config.ki) out << "ki " << format_double(*config.ki) << "\n";
  if (config.iw) out << "iw " << format_int(*config.iw) << "\n";
  if (config.gran) out << "gran " << format_double(*config.gran) << "\n";
  if (config.offset) out << "offset " << format_double(*config.offset) << "\n";
  if (!config.dataset_hash.empty()) out << "dataset " << config.dataset_hash << "\n";
  out << "seed " << format_int(static_cast<std::int64_t>(config.seed)) << "\n";
  write_text_file(path, out.str());
}

TunedConfig load_tuned_config(const std::filesystem::path& path) {
  TunedConfig config;
  for (const auto& line : read_artifact_lines(path, "tuned-config")) {
    auto tokens = split_tokens(line.text);
    const std::string& key = tokens[0];
    if (tokens.size() != 2)
      throw ParseError("expected one value after '" + key + "'", line.number);
    if (key == "kp")
      config.kp = require_double(tokens[1], line.number);
    else if (key == "ki")
      config.ki = require_double(tokens[1], line.number);
    else if (key == "iw")
      config.iw = static_cast<int>(require_int(tokens[1], line.number));
    else if (key == "gran")
      config.gran = require_double(tokens[1], line.number);
    else if (key == "offset")
      config.offset = require_double(tokens[1], line.number);
    else if (key == "dataset")
      config.dataset_hash = tokens[1];
    else if (key == "seed")
      config.seed = static_cast<std::uint64_t>(require_int(tokens[1], line.number));
    else
      throw ParseError("unknown tuned-config key '" + key + "'", line.number);
  }
  return config;
}

void save_formula(const std::filesystem::path& path, const ParametricFormula& formula) {
  std::ostringstream out;
  out << artifact_header("formula");
  out << formula.serialize() << "\n";
  write_text_file(path, out.str());
}

ParametricFormula load_formula(const std::filesystem::path& path) {
  auto lines = read_artifact_lines(path, "formula");
  if (lines.empty()) throw IoError("formula file " + path.string() + " is empty");
  std::string joined;
  for (const auto& line : lines) {
    if (!joined.empty()) joined += " ";
    joined += line.text;
  }
  return ParametricFormula::parse(joined);
}

std::string file_hash(const std::filesystem::path& path) {
  return fnv1a64_hex(read_text_file(path));
}

KnowledgeRepository KnowledgeRepository::from_environment() {
  if (const char* dir = std::getenv("ADAPTCTL_KNOWLEDGE_DIR"); dir && *dir)
    return KnowledgeRepository(std::filesystem::path(dir));
  return KnowledgeRepository(std::filesystem::path("knowledge"));
}

}  // namespace adaptctl
