#pragma once

// L2-penalized logistic regression fitted by Newton's method (IRLS).

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rescore {

// How a model's input columns are built.
enum class Recipe {
  kRawWindow,           // windowed activity
  kContinuousRescore,   // logit(pi), log1p(l), log1p(n), log1p(c) of pi
  kBinaryRescore,       // pi, l(W), n(W), c(W) with W = 1(pi >= 0.5)
  kCustom,
};

std::string recipe_name(Recipe recipe);
Recipe parse_recipe(const std::string& name);

struct GlmModel {
  double intercept = 0.0;
  Eigen::VectorXd weights;
  Recipe recipe = Recipe::kCustom;

  // intercept + X w, one entry per row.
  Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& x) const;
};

struct GlmOptions {
  double l2 = 1e-6;          // penalty on weights, not on the intercept
  int max_iterations = 100;
  double tolerance = 1e-8;   // gradient norm relative to its starting value
};

// Throws DomainError on shape mismatch, non-finite input, or non-binary
// labels; ConvergenceError when Newton's method does not reach the
// tolerance (typically perfect separation with l2 = 0).
GlmModel fit_glm(const Eigen::MatrixXd& x, std::span<const double> labels,
                 const GlmOptions& options = {});

std::vector<double> predict(const GlmModel& model, const Eigen::MatrixXd& x);

// Numerically stable logistic function and its clamped inverse.
double sigmoid(double z);
double logit(double p);

// Penalized log-likelihood gradient at the given model, used for diagnostics
// and tests. Same sign convention as the fit (ascent direction).
Eigen::VectorXd glm_gradient(const GlmModel& model, const Eigen::MatrixXd& x,
                             std::span<const double> labels, double l2);

}  // namespace rescore
