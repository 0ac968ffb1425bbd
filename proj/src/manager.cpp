// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/manager.hpp"

#include <chrono>
#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

void validate_params(const SearchParams& params) {
  if (!(params.gran > 0.0)) throw Error("gran must be > 0");
  if (params.offset < 0.0 || params.offset > 1.0) throw Error("offset must lie in [0, 1]");
}

}  // namespace

SearchOutcome search_for_strategy(const SearchParams& params, const ParametricFormula& formula,
                                  const Binding& current, double reference) {
  validate_params(params);
  const auto& variables = formula.variables();

  SearchOutcome outcome;
  double current_value = formula.evaluate(current);
  outcome.error = reference - current_value;

  if (std::fabs(outcome.error) <= params.goal_tolerance) {
    outcome.no_op = true;
    CandidateStrategy keep;
    for (const auto& name : variables) keep.assignments[name] = current.at(name);
    keep.achieved = current_value;
    keep.deviation = std::fabs(outcome.error);
    keep.pivot = variables.size();
    outcome.selected = std::move(keep);
    return outcome;
  }

  const bool upward = outcome.error > 0.0;
  const double step = params.gran * outcome.error;  // signed
  const double bound = upward ? 1.0 : 0.0;

  for (std::size_t pivot = 0; pivot < variables.size(); ++pivot) {
    Binding assignments;
    for (const auto& name : variables) assignments[name] = clamp01(params.offset);
    double value = formula.evaluate(assignments);

    // Crossing must clear the reference by more than the goal tolerance;
    // a value merely within the tolerance is "met", not "crossed".
    auto crossed = [&] {
      return upward ? value > reference + params.goal_tolerance
                    : value < reference - params.goal_tolerance;
    };

    // Body-first loop: move at least once unless the variable already sits
    // at its bound, stop as soon as the formula value crosses the reference.
    auto push_variable = [&](const std::string& name) {
      double& v = assignments[name];
      while (true) {
        if (v == bound) break;
        v = clamp01(v + step);
        if (++outcome.steps > params.max_steps)
          throw NonConvergence("strategy search exceeded " + std::to_string(params.max_steps) +
                               " steps");
        value = formula.evaluate(assignments);
        if (crossed()) break;
      }
    };

    push_variable(variables[pivot]);
    for (std::size_t j = 0; j < variables.size(); ++j) {
      if (j == pivot) continue;
      push_variable(variables[j]);
    }

    if (crossed()) {
      CandidateStrategy candidate;
      candidate.assignments = std::move(assignments);
      candidate.achieved = value;
      candidate.deviation = std::fabs(value - reference);
      candidate.pivot = pivot;
      outcome.candidates.push_back(std::move(candidate));
    }
  }

  if (outcome.candidates.empty())
    throw SolutionNotFound("no assignment crosses the reference " +
                           std::to_string(reference) + " from offset " +
                           std::to_string(params.offset));

  outcome.selected = select_strategy(outcome.candidates, current);
  return outcome;
}

const CandidateStrategy& select_strategy(const std::vector<CandidateStrategy>& candidates,
                                         const Binding& current) {
  if (candidates.empty()) throw Error("cannot select from an empty candidate set");

  auto l1_change = [&](const CandidateStrategy& c) {
    double total = 0.0;
    for (const auto& [name, value] : c.assignments) {
      auto it = current.find(name);
      if (it != current.end()) total += std::fabs(value - it->second);
    }
    return total;
  };

  const CandidateStrategy* best = &candidates.front();
  double best_l1 = l1_change(*best);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const CandidateStrategy& c = candidates[i];
    if (c.deviation < best->deviation) {
      best = &c;
      best_l1 = l1_change(c);
    } else if (c.deviation == best->deviation) {
      double l1 = l1_change(c);
      if (l1 < best_l1) {
        best = &c;
        best_l1 = l1;
      }
      // Equal on both counts: keep the earlier pivot.
    }
  }
  return *best;
}

TimedSearchResult timed_search(const SearchParams& params, const ParametricFormula& formula,
                               const Binding& current, double reference) {
  auto start = std::chrono::steady_clock::now();
  TimedSearchResult result{search_for_strategy(params, formula, current, reference), 0.0};
  auto end = std::chrono::steady_clock::now();
  result.elapsed_seconds = std::chrono::duration<double>(end - start).count();
  return result;
}

Strategy make_strategy(const SearchOutcome& outcome, std::string property, double reference,
                       double condition, std::vector<StrategyAction> actions) {
  (void)outcome;  // assignments inform reporting; the enacted goal is the reference
  Strategy strategy;
  strategy.property = std::move(property);
  strategy.goal = reference;
  strategy.condition = condition;
  strategy.actions = std::move(actions);
  validate_strategy(strategy);
  return strategy;
}

}  // namespace adaptctl
