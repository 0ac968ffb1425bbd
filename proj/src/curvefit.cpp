// SPDX-License-Identifier: Apache-2.0
#include "adaptctl/curvefit.hpp"

#include <algorithm>
#include <cmath>

#include "adaptctl/errors.hpp"

namespace adaptctl {

namespace {

// Gaussian elimination with partial pivoting; small dense systems only.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) throw FitError("singular normal system");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row)
      if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
    if (std::fabs(a[pivot][col]) < 1e-12 * scale) throw FitError("singular normal system");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t row = col + 1; row < n; ++row) {
      double factor = a[row][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[row][k] -= factor * a[col][k];
      b[row] -= factor * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t k = i + 1; k < n; ++k) sum -= a[i][k] * x[k];
    x[i] = sum / a[i][i];
  }
  return x;
}

void check_points(std::span<const DataPoint> points, ModelKind kind) {
  const std::size_t arity = input_arity(kind);
  const std::size_t needed = coefficient_count(kind) + 1;
  if (points.size() < needed)
    throw FitError("need at least " + std::to_string(needed) + " points, got " +
                   std::to_string(points.size()));
  for (const auto& p : points) {
    if (p.inputs.size() != arity)
      throw FitError("data point has " + std::to_string(p.inputs.size()) +
                     " inputs, model expects " + std::to_string(arity));
    if (!std::isfinite(p.output)) throw FitError("non-finite output value");
    for (double v : p.inputs)
      if (!std::isfinite(v)) throw FitError("non-finite input value");
  }
}

double sum_squared_residuals(ModelKind kind, std::span<const double> coeffs,
                             std::span<const DataPoint> points) {
  double sse = 0.0;
  for (const auto& p : points) {
    double r = eval_family(kind, coeffs, p.inputs) - p.output;
    sse += r * r;
  }
  return sse;
}

// Least squares over a fixed basis; basis(point) returns one value per
// coefficient.
template <typename Basis>
std::vector<double> normal_equations(std::span<const DataPoint> points, std::size_t k,
                                     Basis&& basis) {
  std::vector<std::vector<double>> ata(k, std::vector<double>(k, 0.0));
  std::vector<double> aty(k, 0.0);
  std::vector<double> row(k, 0.0);
  for (const auto& p : points) {
    basis(p, row);
    for (std::size_t i = 0; i < k; ++i) {
      aty[i] += row[i] * p.output;
      for (std::size_t j = 0; j < k; ++j) ata[i][j] += row[i] * row[j];
    }
  }
  return solve_dense(std::move(ata), std::move(aty));
}

// Straight line through (x, y) pairs; used for seeding only, so a singular
// system falls back to the caller's default instead of throwing.
bool line_fit(const std::vector<std::pair<double, double>>& pairs, double& slope,
              double& intercept) {
  if (pairs.size() < 2) return false;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pairs) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pairs.size());
  double det = n * sxx - sx * sx;
  if (std::fabs(det) < 1e-12 * std::max(1.0, std::fabs(sxx) * n)) return false;
  slope = (n * sxy - sx * sy) / det;
  intercept = (sy * sxx - sx * sxy) / det;
  return true;
}

// Damped Gauss-Newton: damping grows until a step improves the fit, shrinks
// after accepted steps. Converged when an accepted step improves the sum of
// squares by less than 1e-10 relative, or the damping blows up at a minimum.
std::vector<double> gauss_newton(ModelKind kind, std::vector<double> coeffs,
                                 std::span<const DataPoint> points) {
  const std::size_t k = coeffs.size();
  double sse = sum_squared_residuals(kind, coeffs, points);
  double lambda = 1e-3;
  bool converged = false;

  for (int iter = 0; iter < kMaxNlsIterations && !converged; ++iter) {
    std::vector<std::vector<double>> jtj(k, std::vector<double>(k, 0.0));
    std::vector<double> jtr(k, 0.0);
    for (const auto& p : points) {
      double r = eval_family(kind, coeffs, p.inputs) - p.output;
      std::vector<double> g = family_gradient(kind, coeffs, p.inputs);
      for (std::size_t i = 0; i < k; ++i) {
        jtr[i] += g[i] * r;
        for (std::size_t j = 0; j < k; ++j) jtj[i][j] += g[i] * g[j];
      }
    }

    bool stepped = false;
    while (!stepped) {
      auto damped = jtj;
      for (std::size_t i = 0; i < k; ++i)
        damped[i][i] += lambda * std::max(jtj[i][i], 1e-12);
      std::vector<double> delta;
      try {
        std::vector<double> rhs(k);
        for (std::size_t i = 0; i < k; ++i) rhs[i] = -jtr[i];
        delta = solve_dense(std::move(damped), std::move(rhs));
      } catch (const FitError&) {
        lambda *= 10.0;
        if (lambda > 1e12) {
          converged = true;
          break;
        }
        continue;
      }

      std::vector<double> trial(k);
      for (std::size_t i = 0; i < k; ++i) trial[i] = coeffs[i] + delta[i];
      double trial_sse = sum_squared_residuals(kind, trial, points);
      if (std::isfinite(trial_sse) && trial_sse < sse) {
        double improvement = (sse - trial_sse) / std::max(sse, 1e-300);
        coeffs = std::move(trial);
        sse = trial_sse;
        lambda = std::max(lambda * 0.5, 1e-12);
        if (improvement < 1e-10) converged = true;
        stepped = true;
      } else {
        lambda *= 2.0;
        if (lambda > 1e12) {
          converged = true;  // no direction improves: local minimum
          break;
        }
      }
    }
  }

  if (!converged) throw FitError("curve fit did not converge");
  return coeffs;
}

}  // namespace

std::size_t coefficient_count(ModelKind kind) {
  switch (kind) {
    case ModelKind::linear:
    case ModelKind::exponential:
      return 2;
    case ModelKind::quadratic:
    case ModelKind::exp_sum_2d:
      return 3;
  }
  throw FitError("unknown model kind");
}

std::size_t input_arity(ModelKind kind) {
  return kind == ModelKind::exp_sum_2d ? 2 : 1;
}

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::linear:
      return "linear";
    case ModelKind::quadratic:
      return "quadratic";
    case ModelKind::exponential:
      return "exponential";
    case ModelKind::exp_sum_2d:
      return "exp_sum_2d";
  }
  throw FitError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "linear") return ModelKind::linear;
  if (name == "quadratic") return ModelKind::quadratic;
  if (name == "exponential") return ModelKind::exponential;
  if (name == "exp_sum_2d") return ModelKind::exp_sum_2d;
  throw FitError("unknown model kind '" + name + "'");
}

double eval_family(ModelKind kind, std::span<const double> c, std::span<const double> x) {
  switch (kind) {
    case ModelKind::linear:
      return c[0] * x[0] + c[1];
    case ModelKind::quadratic:
      return c[0] * x[0] * x[0] + c[1] * x[0] + c[2];
    case ModelKind::exponential:
      return c[0] * std::exp(c[1] * x[0]);
    case ModelKind::exp_sum_2d:
      return c[0] * std::exp(c[1] * x[0]) + std::exp(c[2] * x[1]);
  }
  throw FitError("unknown model kind");
}

std::vector<double> family_gradient(ModelKind kind, std::span<const double> c,
                                    std::span<const double> x) {
  switch (kind) {
    case ModelKind::linear:
      return {x[0], 1.0};
    case ModelKind::quadratic:
      return {x[0] * x[0], x[0], 1.0};
    case ModelKind::exponential: {
      double e = std::exp(c[1] * x[0]);
      return {e, c[0] * x[0] * e};
    }
    case ModelKind::exp_sum_2d: {
      double e1 = std::exp(c[1] * x[0]);
      double e2 = std::exp(c[2] * x[1]);
      return {e1, c[0] * x[0] * e1, x[1] * e2};
    }
  }
  throw FitError("unknown model kind");
}

std::vector<double> initial_seed(ModelKind kind, std::span<const DataPoint> points) {
  if (kind == ModelKind::exponential) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& p : points)
      if (p.output > 0.0) logs.emplace_back(p.inputs[0], std::log(p.output));
    double slope = 0.0, intercept = 0.0;
    if (line_fit(logs, slope, intercept)) return {std::exp(intercept), slope};
    double max_y = 0.0;
    for (const auto& p : points) max_y = std::max(max_y, p.output);
    return {max_y > 0.0 ? max_y : 1.0, -1.0};
  }

  if (kind == ModelKind::exp_sum_2d) {
    // First term dominates by construction of the family; seed it from the
    // x1 marginal, then explain what is left with the x2 exponent.
    std::vector<DataPoint> marginal;
    marginal.reserve(points.size());
    for (const auto& p : points) marginal.push_back({{p.inputs[0]}, p.output});
    std::vector<double> ab = initial_seed(ModelKind::exponential, marginal);
    try {
      ab = gauss_newton(ModelKind::exponential, ab, marginal);
    } catch (const FitError&) {
      // keep the log-linear seed
    }

    double num = 0.0, den = 0.0;
    for (const auto& p : points) {
      double residual = p.output - ab[0] * std::exp(ab[1] * p.inputs[0]);
      double x2 = p.inputs[1];
      if (residual > 0.0 && x2 != 0.0) {
        double l = std::log(residual);
        num += x2 * l;
        den += x2 * x2;
      }
    }
    double c = den > 0.0 ? num / den : -1.0;
    return {ab[0], ab[1], c};
  }

  throw FitError("no iterative seed for closed-form kinds");
}

FittedModel fit(std::span<const DataPoint> points, ModelKind kind,
                std::vector<std::string> input_names) {
  check_points(points, kind);

  FittedModel model;
  model.kind = kind;
  model.n_points = points.size();
  if (input_names.empty())
    model.input_names = input_arity(kind) == 1 ? std::vector<std::string>{"x"}
                                               : std::vector<std::string>{"x1", "x2"};
  else
    model.input_names = std::move(input_names);
  if (model.input_names.size() != input_arity(kind))
    throw FitError("expected " + std::to_string(input_arity(kind)) + " input name(s)");

  switch (kind) {
    case ModelKind::linear:
      model.coefficients = normal_equations(points, 2, [](const DataPoint& p, auto& row) {
        row[0] = p.inputs[0];
        row[1] = 1.0;
      });
      break;
    case ModelKind::quadratic:
      model.coefficients = normal_equations(points, 3, [](const DataPoint& p, auto& row) {
        row[0] = p.inputs[0] * p.inputs[0];
        row[1] = p.inputs[0];
        row[2] = 1.0;
      });
      break;
    case ModelKind::exponential:
    case ModelKind::exp_sum_2d:
      model.coefficients = gauss_newton(kind, initial_seed(kind, points), points);
      break;
  }

  model.rmse = std::sqrt(sum_squared_residuals(kind, model.coefficients, points) /
                         static_cast<double>(points.size()));
  return model;
}

FittedModel fit_best(std::span<const DataPoint> points, std::span<const ModelKind> kinds,
                     std::vector<std::string> input_names) {
  if (kinds.empty()) throw FitError("no candidate model kinds");

  bool have_best = false;
  FittedModel best;
  double best_score = 0.0;
  std::string last_error = "all candidate fits failed";

  for (ModelKind kind : kinds) {
    FittedModel candidate;
    try {
      candidate = fit(points, kind, input_names);
    } catch (const FitError& e) {
      last_error = e.what();
      continue;
    }
    double n = static_cast<double>(candidate.n_points);
    double k = static_cast<double>(coefficient_count(kind));
    double score = candidate.rmse * (n / (n - k));
    if (!have_best) {
      best = std::move(candidate);
      best_score = score;
      have_best = true;
      continue;
    }
    double tie = 1e-12 * std::max(1.0, std::max(best_score, score));
    if (std::fabs(score - best_score) <= tie) {
      if (candidate.coefficients.size() < best.coefficients.size()) {
        best = std::move(candidate);
        best_score = score;
      }
    } else if (score < best_score) {
      best = std::move(candidate);
      best_score = score;
    }
  }

  if (!have_best) throw FitError(last_error);
  return best;
}

double predict(const FittedModel& model, std::span<const double> inputs) {
  if (inputs.size() != input_arity(model.kind))
    throw FitError("model expects " + std::to_string(input_arity(model.kind)) +
                   " input(s), got " + std::to_string(inputs.size()));
  return eval_family(model.kind, model.coefficients, inputs);
}

}  // namespace adaptctl
