// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "adaptctl/rng.hpp"

namespace adaptctl::nsga2 {

// Minimization problem over a box-bounded real vector.
struct Problem {
  std::size_t dimension = 1;
  std::vector<std::pair<double, double>> bounds;  // one (lo, hi) per gene
  std::size_t n_objectives = 1;
  std::function<std::vector<double>(const std::vector<double>&)> evaluate;
};

struct Individual {
  std::vector<double> genes;
  std::vector<double> objectives;
  int rank = 0;                // 0-based front index
  double crowding = 0.0;
};

struct EAConfig {
  std::size_t population_size = 100;  // even, >= 4
  std::size_t generations = 100;
  double crossover_probability = 0.9;
  double mutation_probability = -1.0;  // < 0 means 1/dimension
  double eta_crossover = 20.0;
  double eta_mutation = 20.0;
  std::uint64_t seed = 1;
  // Called after each elitist replacement with (generation, population).
  std::function<void(std::size_t, const std::vector<Individual>&)> on_generation;
};

// a dominates b: no objective worse, at least one strictly better.
bool dominates(const std::vector<double>& a, const std::vector<double>& b);

// Returns fronts as index lists into `pop`, best front first. Also writes
// each individual's rank.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop);

// Crowding distance within one front (indices into `pop`). Boundary points on
// every objective get +inf; fronts of size <= 2 are all +inf.
void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front);

// Simulated binary crossover on bounded reals; mutates both children.
void sbx_crossover(const Problem& problem, const EAConfig& config, Rng& rng,
                   std::vector<double>& child1, std::vector<double>& child2);

// Polynomial mutation on bounded reals.
void polynomial_mutation(const Problem& problem, const EAConfig& config, Rng& rng,
                         std::vector<double>& genes);

struct OptimizeResult {
  std::vector<Individual> front;       // final first front
  std::vector<Individual> population;  // full final population
  std::size_t evaluations = 0;
};

OptimizeResult optimize(const Problem& problem, const EAConfig& config);

// CSV with header gene_1,..,obj_1,..,rank,crowding.
void write_front_csv(const std::string& path, const std::vector<Individual>& front);

}  // namespace adaptctl::nsga2
