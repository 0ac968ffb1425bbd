// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/metrics.hpp"

#include <cmath>
#include <limits>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl {

ControlMetrics compute_metrics(const ResponseSeries& series) {
  const auto& samples = series.samples;
  if (samples.empty()) throw Error("cannot compute metrics of an empty response series");
  if (series.setpoint <= 0.0) throw Error("setpoint must be positive");
  if (series.stability_margin <= 0.0) throw Error("stability margin must be positive");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].first <= samples[i - 1].first)
      throw Error("response ticks must be strictly increasing");
  }

  const double lo = series.setpoint * (1.0 - series.stability_margin);
  const double hi = series.setpoint * (1.0 + series.stability_margin);

  double max_value = samples.front().second;
  std::size_t settle_idx = 0;  // first index of the all-in-band tail
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double v = samples[i].second;
    if (v > max_value) max_value = v;
    if (v < lo || v > hi) settle_idx = i + 1;
  }

  ControlMetrics metrics;
  metrics.overshoot = std::max(0.0, (max_value - series.setpoint) / series.setpoint);

  if (settle_idx < samples.size()) {
    metrics.settling_time = samples[settle_idx].first - samples.front().first;
    // mean around the first tail sample, so a constant tail averages to
    // exactly that value
    const double pivot = samples[settle_idx].second;
    double deviations = 0.0;
    for (std::size_t i = settle_idx; i < samples.size(); ++i)
      deviations += samples[i].second - pivot;
    double convergence = pivot + deviations / static_cast<double>(samples.size() - settle_idx);
    metrics.steady_state_error = std::fabs(series.setpoint - convergence) / series.setpoint;
    metrics.stable = samples.size() - settle_idx >= kMinSettledSamples;
  }
  return metrics;
}

int compare_metrics(const ControlMetrics& a, const ControlMetrics& b) {
  if (a.stable != b.stable) return a.stable ? -1 : 1;
  if (a.overshoot != b.overshoot) return a.overshoot < b.overshoot ? -1 : 1;
  double sse_a = a.steady_state_error.value_or(std::numeric_limits<double>::infinity());
  double sse_b = b.steady_state_error.value_or(std::numeric_limits<double>::infinity());
  if (sse_a != sse_b) return sse_a < sse_b ? -1 : 1;
  return 0;
}

void write_response_csv(const std::filesystem::path& path, const ResponseSeries& series,
                        const std::map<std::string, std::string>& metadata) {
  std::string out = artifact_header("response");
  for (const auto& [key, value] : metadata) out += "# " + key + " " + value + "\n";
  out += "# setpoint " + format_double(series.setpoint) + "\n";
  out += "# margin " + format_double(series.stability_margin) + "\n";
  out += "tick,value\n";
  for (const auto& [tick, value] : series.samples)
    out += format_int(tick) + "," + format_double(value) + "\n";
  write_text_file(path, out);
}

ResponseFile read_response_csv(const std::filesystem::path& path) {
  std::string content = read_text_file(path);
  ResponseFile result;
  bool header_checked = false;
  bool columns_seen = false;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t eol = content.find('\n', pos);
    std::string_view raw(content.data() + pos,
                         (eol == std::string::npos ? content.size() : eol) - pos);
    ++lineno;
    pos = (eol == std::string::npos) ? content.size() : eol + 1;
    std::string_view line = trim(raw);
    if (!header_checked) {
      check_artifact_header(line, "response", path);
      header_checked = true;
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '#') {
      auto tokens = split_tokens(line.substr(1));
      if (tokens.size() >= 2) {
        std::string key = tokens[0];
        std::string value = tokens[1];
        for (std::size_t i = 2; i < tokens.size(); ++i) value += " " + tokens[i];
        result.metadata[key] = value;
      }
      continue;
    }
    if (!columns_seen) {
      if (line != "tick,value")
        throw ParseError("expected 'tick,value' column header in " + path.string(), lineno);
      columns_seen = true;
      continue;
    }
    std::size_t comma = line.find(',');
    if (comma == std::string_view::npos)
      throw ParseError("expected 'tick,value' row in " + path.string(), lineno);
    auto tick = try_parse_int(trim(line.substr(0, comma)));
    auto value = try_parse_double(trim(line.substr(comma + 1)));
    if (!tick || !value)
      throw ParseError("malformed response row in " + path.string(), lineno);
    result.series.samples.emplace_back(*tick, *value);
  }
  if (!header_checked) throw IoError("missing adaptctl header in " + path.string());
  if (auto it = result.metadata.find("setpoint"); it != result.metadata.end()) {
    if (auto v = try_parse_double(it->second)) result.series.setpoint = *v;
  }
  if (auto it = result.metadata.find("margin"); it != result.metadata.end()) {
    if (auto v = try_parse_double(it->second)) result.series.stability_margin = *v;
  }
  return result;
}

}  // namespace adaptctl
