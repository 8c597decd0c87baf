#include "rescore/glm.hpp"

#include <cmath>
#include <string>

#include "rescore/errors.hpp"

namespace rescore {

std::string recipe_name(Recipe recipe) {
  switch (recipe) {
    case Recipe::kRawWindow:
      return "raw-window";
    case Recipe::kContinuousRescore:
      return "logit-pi-log1p-features";
    case Recipe::kBinaryRescore:
      return "pi-binary-features";
    case Recipe::kCustom:
      break;
  }
  return "custom";
}

Recipe parse_recipe(const std::string& name) {
  for (Recipe r : {Recipe::kRawWindow, Recipe::kContinuousRescore, Recipe::kBinaryRescore,
                   Recipe::kCustom}) {
    if (recipe_name(r) == name) {
      return r;
    }
  }
  throw DataError("unknown feature recipe '" + name + "'");
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

Eigen::VectorXd GlmModel::linear_predictor(const Eigen::MatrixXd& x) const {
  if (x.cols() != weights.size()) {
    throw DomainError("model expects " + std::to_string(weights.size()) + " inputs, got " +
                      std::to_string(x.cols()));
  }
  Eigen::VectorXd eta = x * weights;
  eta.array() += intercept;
  return eta;
}

std::vector<double> predict(const GlmModel& model, const Eigen::MatrixXd& x) {
  const Eigen::VectorXd eta = model.linear_predictor(x);
  std::vector<double> out(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    out[static_cast<std::size_t>(i)] = sigmoid(eta[i]);
  }
  return out;
}

namespace {

void check_inputs(const Eigen::MatrixXd& x, std::span<const double> labels) {
  if (x.rows() == 0) {
    throw DomainError("fit_glm: no rows");
  }
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DomainError("fit_glm: " + std::to_string(x.rows()) + " rows but " +
                      std::to_string(labels.size()) + " labels");
  }
  if (!x.allFinite()) {
    throw DomainError("fit_glm: non-finite feature value");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) {
      throw DomainError("fit_glm: labels must be 0 or 1");
    }
  }
}

// Penalized log-likelihood in standardized coordinates.
double objective(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                 const Eigen::VectorXd& penalty) {
  const Eigen::VectorXd eta = z * theta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // log(1 + e^eta) computed without overflow.
    const double e = eta[i];
    const double softplus = e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += y[i] * e - softplus;
  }
  return ll - 0.5 * theta.dot(penalty.asDiagonal() * theta);
}

}  // namespace

GlmModel fit_glm(const Eigen::MatrixXd& x, std::span<const double> labels,
                 const GlmOptions& options) {
  check_inputs(x, labels);
  if (options.l2 < 0.0 || !std::isfinite(options.l2)) {
    throw DomainError("fit_glm: l2 must be nonnegative");
  }
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();

  // Standardize columns; the raw-coordinate penalty l2 |w|^2 becomes
  // l2 / sd^2 per standardized coefficient, so the optimum is unchanged.
  Eigen::VectorXd mean = x.colwise().mean();
  Eigen::VectorXd sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = (x.col(j).array() - mean[j]).square().mean();
    sd[j] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  Eigen::MatrixXd z(n, p + 1);
  z.col(0).setOnes();
  for (Eigen::Index j = 0; j < p; ++j) {
    z.col(j + 1) = (x.col(j).array() - mean[j]) / sd[j];
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Zero(p + 1);
  for (Eigen::Index j = 0; j < p; ++j) {
    penalty[j + 1] = options.l2 / (sd[j] * sd[j]);
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(labels.data(), n);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  const double ybar = y.mean();
  if (ybar > 0.0 && ybar < 1.0) {
    theta[0] = logit(ybar);
  }

  double current = objective(z, y, theta, penalty);
  double initial_norm = -1.0;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd eta = z * theta;
    Eigen::VectorXd prob(n);
    Eigen::VectorXd weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd grad = z.transpose() * (y - prob) - penalty.cwiseProduct(theta);
    const double norm = grad.norm();
    if (initial_norm < 0.0) {
      initial_norm = std::max(norm, 1.0);
    }
    Eigen::MatrixXd hessian = z.transpose() * (z.array().colwise() * weight.array()).matrix();
    hessian.diagonal() += penalty;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw ConvergenceError("fit_glm: Hessian is not positive definite");
    }
    const Eigen::VectorXd step = ldlt.solve(grad);
    if (!step.allFinite()) {
      throw ConvergenceError("fit_glm: non-finite Newton step (separable data with l2 = 0?)");
    }

    // Under separation the gradient vanishes while Newton steps stay O(1), so
    // both must be small.
    if (norm <= options.tolerance * initial_norm &&
        step.lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + theta.lpNorm<Eigen::Infinity>())) {
      GlmModel model;
      model.weights = theta.tail(p).cwiseQuotient(sd);
      model.intercept = theta[0] - model.weights.dot(mean);
      return model;
    }

    // Step halving keeps the penalized likelihood nondecreasing.
    double scale = 1.0;
    Eigen::VectorXd candidate = theta + step;
    double value = objective(z, y, candidate, penalty);
    while (value < current && scale > 1e-10) {
      scale *= 0.5;
      candidate = theta + scale * step;
      value = objective(z, y, candidate, penalty);
    }
    theta = candidate;
    current = value;
    if (!theta.allFinite()) {
      throw ConvergenceError("fit_glm: coefficients diverged");
    }
  }
  throw ConvergenceError("fit_glm: no convergence after " +
                         std::to_string(options.max_iterations) +
                         " Newton iterations (perfect separation?)");
}

Eigen::VectorXd glm_gradient(const GlmModel& model, const Eigen::MatrixXd& x,
                             std::span<const double> labels, double l2) {
  check_inputs(x, labels);
  const Eigen::VectorXd eta = model.linear_predictor(x);
  Eigen::VectorXd residual(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    residual[i] = labels[static_cast<std::size_t>(i)] - sigmoid(eta[i]);
  }
  Eigen::VectorXd grad(x.cols() + 1);
  grad[0] = residual.sum();
  grad.tail(x.cols()) = x.transpose() * residual - l2 * model.weights;
  return grad;
}

}  // namespace rescore
