// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace adaptctl {

// "lo:hi:step" -> {lo, lo+step, ..., hi}; the last value is hi exactly.
// A bare number yields a single-element grid.
std::vector<double> parse_grid_spec(const std::string& spec);

// Entry point behind main(). Exit codes: 0 success, 1 domain failure
// (no solution, no convergence, bad data), 2 usage or I/O trouble.
int run_cli(int argc, const char* const* argv);

}  // namespace adaptctl
