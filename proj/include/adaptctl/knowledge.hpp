// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "adaptctl/curvefit.hpp"
#include "adaptctl/formula.hpp"

namespace adaptctl {

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Adaptation goals: what to hold the managed property at, and where the
// tuning searches are allowed to look.
struct Goals {
  std::string property = "reliability";
  double setpoint = 0.95;
  double stability_margin = 0.02;
  // Dead band half-width for the enactor. Absent means the full stability
  // band (margin * setpoint); a smaller value keeps the controller active
  // inside the band.
  std::optional<double> condition;
  ParamRange gran_range{0.1, 1.0};
  ParamRange offset_range{0.0, 1.0};
  ParamRange kp_range{60.0, 150.0};
  ParamRange ki_range{0.2, 1.0};
  int iw = 5;
};

double effective_condition(const Goals& goals);
void validate_goals(const Goals& goals);

struct ManagerDatapoint {
  double gran = 0.0;
  double offset = 0.0;
  double time_to_solution_s = 0.0;
  long long steps = 0;
};

struct EnactorDatapoint {
  double kp = 0.0;
  double ki = 0.0;
  int iw = 1;
  bool stable = false;
  double overshoot = 0.0;
  std::optional<double> sse;
  std::optional<long long> settling_time;
};

// Result of a tuning pipeline. Manager tuning fills gran/offset, enactor
// tuning fills kp/ki/iw; dataset_hash ties the config to the data it came
// from.
struct TunedConfig {
  std::optional<double> kp;
  std::optional<double> ki;
  std::optional<int> iw;
  std::optional<double> gran;
  std::optional<double> offset;
  std::string dataset_hash;
  std::uint64_t seed = 0;
};

void save_goals(const std::filesystem::path& path, const Goals& goals);
Goals load_goals(const std::filesystem::path& path);

void save_manager_dataset(const std::filesystem::path& path,
                          const std::vector<ManagerDatapoint>& rows);
std::vector<ManagerDatapoint> load_manager_dataset(const std::filesystem::path& path);

void save_enactor_dataset(const std::filesystem::path& path,
                          const std::vector<EnactorDatapoint>& rows);
std::vector<EnactorDatapoint> load_enactor_dataset(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model(const std::filesystem::path& path);

void save_tuned_config(const std::filesystem::path& path, const TunedConfig& config);
TunedConfig load_tuned_config(const std::filesystem::path& path);

void save_formula(const std::filesystem::path& path, const ParametricFormula& formula);
ParametricFormula load_formula(const std::filesystem::path& path);

// FNV-1a hash of a file's bytes; used for dataset provenance.
std::string file_hash(const std::filesystem::path& path);

// Directory of named knowledge artifacts shared between the manager, the
// enactor and the tuning pipelines.
class KnowledgeRepository {
 public:
  explicit KnowledgeRepository(std::filesystem::path root) : root_(std::move(root)) {}

  // Uses ADAPTCTL_KNOWLEDGE_DIR when set, else ./knowledge.
  static KnowledgeRepository from_environment();

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path resolve(const std::string& name) const { return root_ / name; }
  bool contains(const std::string& name) const {
    return std::filesystem::exists(root_ / name);
  }

 private:
  std::filesystem::path root_;
};

}  // namespace adaptctl
