// SPDX-License-Identifier: Apache-2.0
// Reference implementations the tests compare the real code against. Written
// the dumb, obvious way on purpose.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adaptctl/rng.hpp"

namespace oracles {

// ---------------------------------------------------------------- formulas

struct ExprNode {
  enum class Kind { number, variable, add, sub, mul, div } kind;
  double value = 0.0;
  std::string name;
  std::unique_ptr<ExprNode> lhs, rhs;
};

inline double eval_expr(const ExprNode& node, const std::map<std::string, double>& binding) {
  switch (node.kind) {
    case ExprNode::Kind::number:
      return node.value;
    case ExprNode::Kind::variable:
      return binding.at(node.name);
    case ExprNode::Kind::add:
      return eval_expr(*node.lhs, binding) + eval_expr(*node.rhs, binding);
    case ExprNode::Kind::sub:
      return eval_expr(*node.lhs, binding) - eval_expr(*node.rhs, binding);
    case ExprNode::Kind::mul:
      return eval_expr(*node.lhs, binding) * eval_expr(*node.rhs, binding);
    case ExprNode::Kind::div:
      return eval_expr(*node.lhs, binding) / eval_expr(*node.rhs, binding);
  }
  return 0.0;
}

// Fully parenthesized so the text has no precedence to get wrong.
inline std::string expr_text(const ExprNode& node) {
  switch (node.kind) {
    case ExprNode::Kind::number: {
      char buf[64];
      // the formula grammar has no unary minus; spell -1.5 as (0 - 1.5)
      int n = std::snprintf(buf, sizeof(buf), "%.17g", std::fabs(node.value));
      std::string text(buf, static_cast<std::size_t>(n));
      return node.value < 0.0 ? "(0 - " + text + ")" : text;
    }
    case ExprNode::Kind::variable:
      return node.name;
    case ExprNode::Kind::add:
      return "(" + expr_text(*node.lhs) + " + " + expr_text(*node.rhs) + ")";
    case ExprNode::Kind::sub:
      return "(" + expr_text(*node.lhs) + " - " + expr_text(*node.rhs) + ")";
    case ExprNode::Kind::mul:
      return "(" + expr_text(*node.lhs) + " * " + expr_text(*node.rhs) + ")";
    case ExprNode::Kind::div:
      return "(" + expr_text(*node.lhs) + " / " + expr_text(*node.rhs) + ")";
  }
  return "";
}

inline void collect_vars(const ExprNode& node, std::vector<std::string>& out) {
  if (node.kind == ExprNode::Kind::variable) {
    if (std::find(out.begin(), out.end(), node.name) == out.end()) out.push_back(node.name);
    return;
  }
  if (node.lhs) collect_vars(*node.lhs, out);
  if (node.rhs) collect_vars(*node.rhs, out);
}

// Random expression over the given variable names. monotone narrows the
// operator set to {+, *} with non-negative literals, so the value never
// decreases when a variable grows.
inline std::unique_ptr<ExprNode> random_expr(adaptctl::Rng& rng,
                                             const std::vector<std::string>& vars, int depth,
                                             bool monotone) {
  auto node = std::make_unique<ExprNode>();
  const double leaf_chance = depth <= 0 ? 1.0 : 0.3;
  if (rng.uniform01() < leaf_chance) {
    if (rng.bernoulli(0.55)) {
      node->kind = ExprNode::Kind::variable;
      node->name = vars[rng.index(vars.size())];
    } else {
      node->kind = ExprNode::Kind::number;
      node->value = monotone ? rng.uniform(0.0, 2.0) : rng.uniform(-2.0, 2.0);
    }
    return node;
  }
  const std::size_t n_ops = monotone ? 2 : 4;
  switch (rng.index(n_ops)) {
    case 0:
      node->kind = ExprNode::Kind::add;
      break;
    case 1:
      node->kind = ExprNode::Kind::mul;
      break;
    case 2:
      node->kind = ExprNode::Kind::sub;
      break;
    default:
      node->kind = ExprNode::Kind::div;
      break;
  }
  node->lhs = random_expr(rng, vars, depth - 1, monotone);
  node->rhs = random_expr(rng, vars, depth - 1, monotone);
  return node;
}

// ----------------------------------------------------------------- metrics

struct BruteMetrics {
  bool stable = false;
  double overshoot = 0.0;
  std::optional<std::int64_t> settling_time;
  std::optional<double> sse;
};

// Quadratic scan: for every start index, re-check the whole tail.
inline BruteMetrics brute_metrics(const std::vector<std::pair<std::int64_t, double>>& samples,
                                  double setpoint, double margin,
                                  std::size_t min_settled_samples) {
  BruteMetrics m;
  double max_value = samples.front().second;
  for (const auto& [tick, value] : samples) max_value = std::max(max_value, value);
  m.overshoot = std::max(0.0, (max_value - setpoint) / setpoint);

  const double lo = setpoint * (1.0 - margin);
  const double hi = setpoint * (1.0 + margin);
  for (std::size_t start = 0; start < samples.size(); ++start) {
    bool all_in = true;
    for (std::size_t j = start; j < samples.size(); ++j) {
      if (samples[j].second < lo || samples[j].second > hi) {
        all_in = false;
        break;
      }
    }
    if (all_in) {
      m.settling_time = samples[start].first - samples.front().first;
      double sum = 0.0;
      for (std::size_t j = start; j < samples.size(); ++j) sum += samples[j].second;
      double mean = sum / static_cast<double>(samples.size() - start);
      m.sse = std::fabs(setpoint - mean) / setpoint;
      m.stable = samples.size() - start >= min_settled_samples;
      return m;
    }
  }
  return m;
}

// --------------------------------------------------------------------- PI

// Keeps every error ever seen and sums the last `iw` on demand.
struct BruteWindowedSum {
  std::vector<double> all;
  void push(double e) { all.push_back(e); }
  double sum(int iw) const {
    double total = 0.0;
    std::size_t from = all.size() > static_cast<std::size_t>(iw)
                           ? all.size() - static_cast<std::size_t>(iw)
                           : 0;
    for (std::size_t i = from; i < all.size(); ++i) total += all[i];
    return total;
  }
};

// Integrator plant with a constant load: x' = x + gain*u + bias.
struct FirstOrderPlant {
  double x = 0.0;
  double gain = 1.0;
  double bias = 0.0;
  double step(double u) {
    x += gain * u + bias;
    return x;
  }
};

// ------------------------------------------------------------------ NSGA-II

inline bool brute_dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) better = true;
  }
  return better;
}

// Repeated peeling: front = everything nothing else dominates, remove, repeat.
inline std::vector<std::vector<std::size_t>> brute_fronts(
    const std::vector<std::vector<double>>& objectives) {
  std::vector<std::vector<std::size_t>> fronts;
  std::vector<bool> assigned(objectives.size(), false);
  std::size_t remaining = objectives.size();
  while (remaining > 0) {
    std::vector<std::size_t> front;
    for (std::size_t p = 0; p < objectives.size(); ++p) {
      if (assigned[p]) continue;
      bool dominated = false;
      for (std::size_t q = 0; q < objectives.size(); ++q) {
        if (q == p || assigned[q]) continue;
        if (brute_dominates(objectives[q], objectives[p])) {
          dominated = true;
          break;
        }
      }
      if (!dominated) front.push_back(p);
    }
    for (std::size_t p : front) assigned[p] = true;
    remaining -= front.size();
    fronts.push_back(std::move(front));
  }
  return fronts;
}

// Dominated hypervolume of a 2-objective minimization front.
inline double hypervolume_2d(std::vector<std::pair<double, double>> points, double ref_x,
                             double ref_y) {
  // drop points beyond the reference and dominated ones
  std::erase_if(points, [&](const auto& p) { return p.first >= ref_x || p.second >= ref_y; });
  std::sort(points.begin(), points.end());
  // lower-left staircase: sorted by x, keep points that improve on y
  std::vector<std::pair<double, double>> frontier;
  double best_y = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    if (p.second < best_y) {
      frontier.push_back(p);
      best_y = p.second;
    }
  }
  double hv = 0.0;
  double prev_y = ref_y;
  for (const auto& [x, y] : frontier) {
    hv += (ref_x - x) * (prev_y - y);
    prev_y = y;
  }
  return hv;
}

}  // namespace oracles
