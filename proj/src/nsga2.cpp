// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "adaptctl/errors.hpp"
#include "adaptctl/textio.hpp"

namespace adaptctl::nsga2 {

namespace {

constexpr double kEps = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

void validate(const Problem& problem, const EAConfig& config) {
  if (problem.dimension == 0) throw Error("problem dimension must be positive");
  if (problem.bounds.size() != problem.dimension)
    throw Error("expected one bound pair per gene");
  for (const auto& [lo, hi] : problem.bounds)
    if (!(lo < hi)) throw Error("gene bounds must satisfy lo < hi");
  if (problem.n_objectives == 0) throw Error("need at least one objective");
  if (!problem.evaluate) throw Error("problem has no evaluate function");
  if (config.population_size < 4 || config.population_size % 2 != 0)
    throw Error("population size must be even and at least 4");
  if (config.generations == 0) throw Error("generations must be positive");
  if (config.crossover_probability < 0.0 || config.crossover_probability > 1.0)
    throw Error("crossover probability out of [0,1]");
}

void evaluate_individual(const Problem& problem, Individual& ind) {
  std::vector<double> objs;
  try {
    objs = problem.evaluate(ind.genes);
  } catch (const std::exception& e) {
    throw Error(std::string("objective evaluation failed: ") + e.what());
  }
  if (objs.size() != problem.n_objectives)
    throw Error("evaluate returned " + std::to_string(objs.size()) + " objectives, expected " +
                std::to_string(problem.n_objectives));
  for (double v : objs)
    if (std::isnan(v)) throw Error("objective evaluation produced NaN");
  ind.objectives = std::move(objs);
}

// Binary tournament on (rank, crowding); full tie keeps the first pick.
const Individual& tournament(const std::vector<Individual>& pop, Rng& rng) {
  const Individual& a = pop[rng.index(pop.size())];
  const Individual& b = pop[rng.index(pop.size())];
  if (b.rank < a.rank) return b;
  if (a.rank < b.rank) return a;
  if (b.crowding > a.crowding) return b;
  return a;
}

}  // namespace

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strictly_better = false;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] > b[m]) return false;
    if (a[m] < b[m]) strictly_better = true;
  }
  return strictly_better;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop) {
  const std::size_t n = pop.size();
  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<int> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      if (dominates(pop[p].objectives, pop[q].objectives))
        dominated[p].push_back(q);
      else if (dominates(pop[q].objectives, pop[p].objectives))
        ++domination_count[p];
    }
    if (domination_count[p] == 0) {
      pop[p].rank = 0;
      fronts[0].push_back(p);
    }
  }

  std::size_t i = 0;
  while (!fronts[i].empty()) {
    std::vector<std::size_t> next;
    for (std::size_t p : fronts[i]) {
      for (std::size_t q : dominated[p]) {
        if (--domination_count[q] == 0) {
          pop[q].rank = static_cast<int>(i) + 1;
          next.push_back(q);
        }
      }
    }
    ++i;
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();  // last one is always empty
  return fronts;
}

void assign_crowding(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
  const std::size_t n = front.size();
  if (n == 0) return;
  for (std::size_t idx : front) pop[idx].crowding = 0.0;
  if (n <= 2) {
    for (std::size_t idx : front) pop[idx].crowding = kInf;
    return;
  }

  const std::size_t m_count = pop[front[0]].objectives.size();
  std::vector<std::size_t> order(front);
  for (std::size_t m = 0; m < m_count; ++m) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return pop[a].objectives[m] < pop[b].objectives[m];
    });
    double lo = pop[order.front()].objectives[m];
    double hi = pop[order.back()].objectives[m];
    pop[order.front()].crowding = kInf;
    pop[order.back()].crowding = kInf;
    double range = hi - lo;
    if (range <= 0.0) continue;  // degenerate objective adds nothing
    for (std::size_t j = 1; j + 1 < n; ++j) {
      if (pop[order[j]].crowding == kInf) continue;
      pop[order[j]].crowding +=
          (pop[order[j + 1]].objectives[m] - pop[order[j - 1]].objectives[m]) / range;
    }
  }
}

void sbx_crossover(const Problem& problem, const EAConfig& config, Rng& rng,
                   std::vector<double>& child1, std::vector<double>& child2) {
  if (rng.uniform01() > config.crossover_probability) return;
  for (std::size_t i = 0; i < problem.dimension; ++i) {
    if (rng.uniform01() > 0.5) continue;
    double y1 = child1[i];
    double y2 = child2[i];
    if (std::fabs(y1 - y2) <= kEps) continue;
    if (y1 > y2) std::swap(y1, y2);
    const auto [lo, hi] = problem.bounds[i];
    const double u = rng.uniform01();
    const double eta = config.eta_crossover;

    auto spread = [&](double beta_bound) {
      double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
      if (u <= 1.0 / alpha) return std::pow(u * alpha, 1.0 / (eta + 1.0));
      return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };

    double beta1 = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
    double c1 = 0.5 * ((y1 + y2) - spread(beta1) * (y2 - y1));
    double beta2 = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
    double c2 = 0.5 * ((y1 + y2) + spread(beta2) * (y2 - y1));

    c1 = std::clamp(c1, lo, hi);
    c2 = std::clamp(c2, lo, hi);
    if (rng.uniform01() <= 0.5) std::swap(c1, c2);
    child1[i] = c1;
    child2[i] = c2;
  }
}

void polynomial_mutation(const Problem& problem, const EAConfig& config, Rng& rng,
                         std::vector<double>& genes) {
  double pm = config.mutation_probability;
  if (pm < 0.0) pm = 1.0 / static_cast<double>(problem.dimension);
  const double eta = config.eta_mutation;

  for (std::size_t i = 0; i < problem.dimension; ++i) {
    if (rng.uniform01() > pm) continue;
    const auto [lo, hi] = problem.bounds[i];
    const double y = genes[i];
    const double range = hi - lo;
    const double d1 = (y - lo) / range;
    const double d2 = (hi - y) / range;
    const double u = rng.uniform01();
    const double mpow = 1.0 / (eta + 1.0);

    double deltaq;
    if (u <= 0.5) {
      double xy = 1.0 - d1;
      double val = 2.0 * u + (1.0 - 2.0 * u) * std::pow(xy, eta + 1.0);
      deltaq = std::pow(val, mpow) - 1.0;
    } else {
      double xy = 1.0 - d2;
      double val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(xy, eta + 1.0);
      deltaq = 1.0 - std::pow(val, mpow);
    }
    genes[i] = std::clamp(y + deltaq * range, lo, hi);
  }
}

OptimizeResult optimize(const Problem& problem, const EAConfig& config) {
  validate(problem, config);
  Rng rng(config.seed);
  const std::size_t n = config.population_size;

  OptimizeResult result;
  std::vector<Individual> pop(n);
  for (auto& ind : pop) {
    ind.genes.resize(problem.dimension);
    for (std::size_t i = 0; i < problem.dimension; ++i) {
      const auto [lo, hi] = problem.bounds[i];
      ind.genes[i] = rng.uniform(lo, hi);
    }
    evaluate_individual(problem, ind);
    ++result.evaluations;
  }
  {
    auto fronts = fast_nondominated_sort(pop);
    for (const auto& f : fronts) assign_crowding(pop, f);
  }

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    std::vector<Individual> merged = pop;
    merged.reserve(2 * n);
    for (std::size_t pair = 0; pair < n / 2; ++pair) {
      Individual c1, c2;
      c1.genes = tournament(pop, rng).genes;
      c2.genes = tournament(pop, rng).genes;
      sbx_crossover(problem, config, rng, c1.genes, c2.genes);
      polynomial_mutation(problem, config, rng, c1.genes);
      polynomial_mutation(problem, config, rng, c2.genes);
      evaluate_individual(problem, c1);
      evaluate_individual(problem, c2);
      result.evaluations += 2;
      merged.push_back(std::move(c1));
      merged.push_back(std::move(c2));
    }

    auto fronts = fast_nondominated_sort(merged);
    for (const auto& f : fronts) assign_crowding(merged, f);

    std::vector<Individual> next;
    next.reserve(n);
    for (const auto& front : fronts) {
      if (next.size() + front.size() <= n) {
        for (std::size_t idx : front) next.push_back(merged[idx]);
      } else {
        std::vector<std::size_t> order(front);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return merged[a].crowding > merged[b].crowding;
        });
        for (std::size_t idx : order) {
          if (next.size() == n) break;
          next.push_back(merged[idx]);
        }
      }
      if (next.size() == n) break;
    }
    pop = std::move(next);
    if (config.on_generation) config.on_generation(gen, pop);
  }

  {
    auto fronts = fast_nondominated_sort(pop);
    for (const auto& f : fronts) assign_crowding(pop, f);
    for (std::size_t idx : fronts[0]) result.front.push_back(pop[idx]);
  }
  result.population = std::move(pop);
  return result;
}

void write_front_csv(const std::string& path, const std::vector<Individual>& front) {
  std::ostringstream out;
  out << artifact_header("front");
  if (front.empty()) throw Error("cannot write an empty front");
  const std::size_t dim = front[0].genes.size();
  const std::size_t m = front[0].objectives.size();
  for (std::size_t i = 0; i < dim; ++i) out << (i ? "," : "") << "gene_" << (i + 1);
  for (std::size_t i = 0; i < m; ++i) out << ",obj_" << (i + 1);
  out << ",rank,crowding\n";
  for (const auto& ind : front) {
    for (std::size_t i = 0; i < dim; ++i) out << (i ? "," : "") << format_double(ind.genes[i]);
    for (std::size_t i = 0; i < m; ++i) out << "," << format_double(ind.objectives[i]);
    out << "," << ind.rank << ",";
    if (std::isinf(ind.crowding))
      out << "inf";
    else
      out << format_double(ind.crowding);
    out << "\n";
  }
  write_text_file(path, out.str());
}

}  // namespace adaptctl::nsga2
