// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaptctl {

/// A recorded step response: (tick, observed value) samples with the setpoint
/// the controller was chasing and the +-margin band (fraction of setpoint)
/// used to judge settling.
struct ResponseSeries {
  std::vector<std::pair<std::int64_t, double>> samples;  // ticks strictly increasing
  double setpoint = 0.0;
  double stability_margin = 0.02;
};

struct ControlMetrics {
  bool stable = false;
  double overshoot = 0.0;                          // fraction of setpoint, >= 0
  std::optional<std::int64_t> settling_time;       // ticks from first sample
  std::optional<double> steady_state_error;        // fraction of setpoint
};

/// A response only counts as settled-for-good with at least this many samples
/// inside the band at the tail; a lone in-band endpoint is not stability.
inline constexpr std::size_t kMinSettledSamples = 5;

/// Overshoot is max(0, (max sample - setpoint)/setpoint) over the whole
/// series. The settling tick is the earliest tick from which every later
/// sample stays inside setpoint*(1 +- margin); steady-state error is measured
/// against the mean of that settled tail. Throws Error on an empty series or
/// non-increasing ticks.
ControlMetrics compute_metrics(const ResponseSeries& series);

/// Ranking for reports: stable first, then lower overshoot, then lower
/// steady-state error (absent compares as worst). Returns <0 when a ranks
/// ahead of b, 0 when tied, >0 otherwise.
int compare_metrics(const ControlMetrics& a, const ControlMetrics& b);

/// Response CSV: "# adaptctl response v1" header, "# key value" metadata
/// comment lines, then "tick,value" rows.
void write_response_csv(const std::filesystem::path& path, const ResponseSeries& series,
                        const std::map<std::string, std::string>& metadata);

struct ResponseFile {
  ResponseSeries series;
  std::map<std::string, std::string> metadata;
};

ResponseFile read_response_csv(const std::filesystem::path& path);

}  // namespace adaptctl
