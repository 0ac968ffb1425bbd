// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adaptctl/enactor.hpp"
#include "adaptctl/formula.hpp"

namespace adaptctl {

struct SearchParams {
  double gran = 0.5;    // > 0; the per-move step is gran * error
  double offset = 0.5;  // starting point for every variable, in [0, 1]
  double goal_tolerance = 1e-6;
  std::uint64_t max_steps = 1'000'000;
};

/// One completed assignment produced by the search.
struct CandidateStrategy {
  Binding assignments;     // every formula variable, values in [0, 1]
  double achieved = 0.0;   // formula value at the assignments
  double deviation = 0.0;  // |achieved - reference|
  std::size_t pivot = 0;   // index of the variable the pass started from
};

struct SearchOutcome {
  std::vector<CandidateStrategy> candidates;
  CandidateStrategy selected;
  bool no_op = false;       // reference already met within goal_tolerance
  std::uint64_t steps = 0;  // total variable moves across all pivot passes
  double error = 0.0;       // reference - current value
};

/// Incremental pivot search: for each formula variable in order, reset all
/// variables to `offset`, then push the pivot (and after it each remaining
/// variable) by gran*error per move - upward when the reference sits above
/// the current value, downward otherwise - until the formula value crosses
/// the reference or the variable clamps at its [0, 1] bound. Passes whose
/// final value crosses the reference become candidates.
///
/// Throws SolutionNotFound when no pass crosses the reference and
/// NonConvergence when the step budget is exhausted.
SearchOutcome search_for_strategy(const SearchParams& params, const ParametricFormula& formula,
                                  const Binding& current, double reference);

/// Smallest deviation wins; ties fall to the smallest total assignment change
/// from `current`, then to pivot order. Throws Error on an empty set.
const CandidateStrategy& select_strategy(const std::vector<CandidateStrategy>& candidates,
                                         const Binding& current);

struct TimedSearchResult {
  SearchOutcome outcome;
  double elapsed_seconds = 0.0;  // monotonic clock
};

TimedSearchResult timed_search(const SearchParams& params, const ParametricFormula& formula,
                               const Binding& current, double reference);

/// Packages a search outcome as an enactor strategy: goal = reference,
/// tolerance band and actions as supplied by the caller's goals.
Strategy make_strategy(const SearchOutcome& outcome, std::string property, double reference,
                       double condition, std::vector<StrategyAction> actions);

}  // namespace adaptctl
