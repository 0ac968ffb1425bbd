// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace adaptctl {

/// Model families, all minimizing squared residuals:
///   linear         y = c0*x + c1
///   quadratic      y = c0*x^2 + c1*x + c2
///   exponential    y = c0*exp(c1*x)
///   exp_sum_2d     y = c0*exp(c1*x1) + exp(c2*x2)
enum class ModelKind { linear, quadratic, exponential, exp_sum_2d };

std::size_t coefficient_count(ModelKind kind);
std::size_t input_arity(ModelKind kind);
std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct DataPoint {
  std::vector<double> inputs;
  double output = 0.0;
};

struct FittedModel {
  ModelKind kind = ModelKind::linear;
  std::vector<double> coefficients;
  std::vector<std::string> input_names;
  double rmse = 0.0;
  std::size_t n_points = 0;
};

/// Iteration cap for the damped Gauss-Newton refinement.
inline constexpr int kMaxNlsIterations = 200;

/// Linear and quadratic fits solve the normal equations directly. The
/// exponential families run Gauss-Newton with adaptive damping, seeded by a
/// log-linearization of the data. Throws FitError when there are fewer than
/// coefficient_count+1 points, the normal system is singular, or the
/// refinement stalls without converging.
FittedModel fit(std::span<const DataPoint> points, ModelKind kind,
                std::vector<std::string> input_names = {});

/// Fits every candidate kind and keeps the lowest rmse * n/(n-k); near-ties
/// go to the model with fewer coefficients.
FittedModel fit_best(std::span<const DataPoint> points, std::span<const ModelKind> kinds,
                     std::vector<std::string> input_names = {});

/// Evaluates the family; throws FitError on input arity mismatch.
double predict(const FittedModel& model, std::span<const double> inputs);

/// Family evaluation with explicit coefficients (predict() without a fit).
double eval_family(ModelKind kind, std::span<const double> coefficients,
                   std::span<const double> inputs);

/// Partial derivatives of eval_family with respect to each coefficient.
std::vector<double> family_gradient(ModelKind kind, std::span<const double> coefficients,
                                    std::span<const double> inputs);

/// The log-linearization starting point used for the iterative families.
std::vector<double> initial_seed(ModelKind kind, std::span<const DataPoint> points);

}  // namespace adaptctl
