#include "rescore/joint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rescore/adam.hpp"
#include "rescore/errors.hpp"
#include "rescore/features.hpp"

namespace rescore {

Eigen::Index JointModel::parameter_count() const {
  return 2 + window_layer.weights.size() + rescore_layer.weights.size();
}

Eigen::VectorXd JointModel::parameters() const {
  const Eigen::Index w = window_layer.weights.size();
  const Eigen::Index k = rescore_layer.weights.size();
  Eigen::VectorXd theta(parameter_count());
  theta[0] = window_layer.intercept;
  theta.segment(1, w) = window_layer.weights;
  theta[w + 1] = rescore_layer.intercept;
  theta.segment(w + 2, k) = rescore_layer.weights;
  return theta;
}

void JointModel::set_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count()) {
    throw DomainError("parameter vector has the wrong length");
  }
  const Eigen::Index w = window_layer.weights.size();
  const Eigen::Index k = rescore_layer.weights.size();
  window_layer.intercept = theta[0];
  window_layer.weights = theta.segment(1, w);
  rescore_layer.intercept = theta[w + 1];
  rescore_layer.weights = theta.segment(w + 2, k);
}

void JointModel::validate() const {
  window.validate();
  if (window_layer.weights.size() != window.width()) {
    throw DomainError("window layer has " + std::to_string(window_layer.weights.size()) +
                      " weights for a window of width " + std::to_string(window.width()));
  }
  const Eigen::Index expected = features.with_next ? 13 : 9;
  if (rescore_layer.weights.size() != expected) {
    throw DomainError("rescoring layer needs " + std::to_string(expected) + " weights, has " +
                      std::to_string(rescore_layer.weights.size()));
  }
}

JointModel init_joint(const WindowSpec& window, const GlmModel& window_glm,
                      const GlmModel& continuous_glm, const RescoreOptions& features) {
  JointModel model;
  model.window = window;
  model.window_layer = window_glm;
  model.window_layer.recipe = Recipe::kRawWindow;
  model.rescore_layer = continuous_glm;
  model.features = features;
  model.validate();
  return model;
}

namespace {

struct NightPass {
  Eigen::MatrixXd window;
  std::vector<double> prob;
  Eigen::MatrixXd inputs;
  Eigen::VectorXd eta;
};

NightPass run_forward(const JointModel& model, const EpochSeries& night) {
  NightPass pass;
  pass.window = window_matrix(night.activity, model.window);
  pass.prob = predict(model.window_layer, pass.window);
  pass.inputs = continuous_rescoring_inputs(pass.prob, night.epoch_len, model.features);
  pass.eta = model.rescore_layer.linear_predictor(pass.inputs);
  return pass;
}

double softplus(double e) { return e > 0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e)); }

double dot(const Vec4& a, const Vec4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// d/ds of one recursion step at state `prev`: v1 + M1 prev.
Vec4 score_sensitivity(const RecursionCoefficients& k, const Vec4& prev) {
  Vec4 out = k.v1;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[i] += k.m1[i][j] * prev[j];
  }
  return out;
}

// (M0 + s M1)^T g
Vec4 transpose_step(const RecursionCoefficients& k, double s, const Vec4& g) {
  Vec4 out{};
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) out[j] += (k.m0[i][j] + s * k.m1[i][j]) * g[i];
  }
  return out;
}

void require_labels(const EpochSeries& night) {
  if (!night.has_labels() || night.labels.size() != night.activity.size()) {
    throw DomainError("night " + night.participant_id + " has no labels");
  }
}

// Adds this night's loss (unscaled sum) and its gradient scaled by `scale`.
void accumulate(const JointModel& model, const EpochSeries& night, double scale,
                double& loss_sum, Eigen::VectorXd* grad) {
  require_labels(night);
  const NightPass pass = run_forward(model, night);
  const auto n = static_cast<std::size_t>(pass.eta.size());

  Eigen::VectorXd d_eta1(pass.eta.size());
  for (std::size_t t = 0; t < n; ++t) {
    const double e = pass.eta[static_cast<Eigen::Index>(t)];
    const double y = night.labels[t];
    loss_sum += softplus(e) - y * e;
    d_eta1[static_cast<Eigen::Index>(t)] = (sigmoid(e) - y) * scale;
  }
  if (grad == nullptr) return;

  const Eigen::Index w = model.window_layer.weights.size();
  const Eigen::Index k = model.rescore_layer.weights.size();
  (*grad)[w + 1] += d_eta1.sum();
  grad->segment(w + 2, k) += pass.inputs.transpose() * d_eta1;

  const auto& opts = model.features;
  const double eps = night.epoch_len;
  const auto last = last_features(pass.prob, eps, opts.borders.first, opts.border_mode);
  const auto next = next_features(pass.prob, eps, opts.borders.last, opts.border_mode);
  const Eigen::VectorXd& b1 = model.rescore_layer.weights;
  const Eigen::Index combined_col = opts.with_next ? 9 : 5;

  std::vector<double> dp(n, 0.0);
  std::vector<Vec4> dl(n, Vec4{});
  std::vector<Vec4> dn(n, Vec4{});
  for (std::size_t t = 0; t < n; ++t) {
    const double g = d_eta1[static_cast<Eigen::Index>(t)];
    const double p = pass.prob[t];
    if (p > kProbabilityFloor && p < 1.0 - kProbabilityFloor) {
      dp[t] += g * b1[0] / (p * (1.0 - p));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      dl[t][i] += g * b1[static_cast<Eigen::Index>(1 + i)] / (1.0 + last[t][i]);
      if (opts.with_next) {
        dn[t][i] += g * b1[static_cast<Eigen::Index>(5 + i)] / (1.0 + next[t][i]);
      }
    }
    const Vec4 c = combine(last[t], next[t]);
    Vec4 dc{};
    for (std::size_t i = 0; i < 4; ++i) {
      dc[i] = g * b1[combined_col + static_cast<Eigen::Index>(i)] / (1.0 + c[i]);
    }
    dl[t][kLagWake] += dc[kCurLenSleep];
    dn[t][kLagWake] += dc[kCurLenSleep];
    dl[t][kLagSleep] += dc[kCurLenWake];
    dn[t][kLagSleep] += dc[kCurLenWake];
    // Ties take the left (last) branch.
    (last[t][kLenSleep] <= next[t][kLenSleep] ? dl[t][kLenSleep] : dn[t][kLenSleep]) +=
        dc[kMinBorderSleep];
    (last[t][kLenWake] <= next[t][kLenWake] ? dl[t][kLenWake] : dn[t][kLenWake]) +=
        dc[kMinBorderWake];
  }

  // Reverse pass through l(t) = v0 + p_t v1 + (M0 + p_t M1) l(t-1).
  const auto coef = RecursionCoefficients::for_epoch(eps);
  const std::size_t first_step = opts.border_mode == BorderMode::kAssign ? 1 : 0;
  for (std::size_t t = n; t-- > first_step;) {
    const Vec4& prev = t == 0 ? opts.borders.first : last[t - 1];
    dp[t] += dot(dl[t], score_sensitivity(coef, prev));
    if (t >= 1) {
      const Vec4 back = transpose_step(coef, pass.prob[t], dl[t]);
      for (std::size_t i = 0; i < 4; ++i) dl[t - 1][i] += back[i];
    }
  }
  // n(t) = v0 + p_t v1 + (M0 + p_t M1) n(t+1), run left to right.
  const std::size_t steps = n - first_step;
  for (std::size_t t = 0; t < steps; ++t) {
    const Vec4& after = t + 1 == n ? opts.borders.last : next[t + 1];
    dp[t] += dot(dn[t], score_sensitivity(coef, after));
    if (t + 1 < n) {
      const Vec4 fwd = transpose_step(coef, pass.prob[t], dn[t]);
      for (std::size_t i = 0; i < 4; ++i) dn[t + 1][i] += fwd[i];
    }
  }

  Eigen::VectorXd d_eta0(pass.eta.size());
  for (std::size_t t = 0; t < n; ++t) {
    const double p = pass.prob[t];
    d_eta0[static_cast<Eigen::Index>(t)] = dp[t] * p * (1.0 - p);
  }
  (*grad)[0] += d_eta0.sum();
  grad->segment(1, w) += pass.window.transpose() * d_eta0;
}

LossAndGradient evaluate(const JointModel& model, std::span<const EpochSeries* const> batch,
                         bool with_gradient) {
  model.validate();
  std::size_t total = 0;
  for (const auto* night : batch) {
    require_labels(*night);
    total += night->size();
  }
  if (total == 0) {
    throw DomainError("loss: empty batch");
  }
  LossAndGradient out;
  out.gradient = Eigen::VectorXd::Zero(model.parameter_count());
  const double scale = 1.0 / static_cast<double>(total);
  double sum = 0.0;
  for (const auto* night : batch) {
    accumulate(model, *night, scale, sum, with_gradient ? &out.gradient : nullptr);
  }
  out.loss = sum * scale;
  return out;
}

std::vector<const EpochSeries*> pointers(std::span<const EpochSeries> nights) {
  std::vector<const EpochSeries*> out;
  out.reserve(nights.size());
  for (const auto& night : nights) out.push_back(&night);
  return out;
}

}  // namespace

std::vector<double> window_probabilities(const JointModel& model, const EpochSeries& night) {
  model.validate();
  return predict(model.window_layer, window_matrix(night.activity, model.window));
}

std::vector<double> forward(const JointModel& model, const EpochSeries& night) {
  model.validate();
  const auto prob = window_probabilities(model, night);
  return predict(model.rescore_layer,
                 continuous_rescoring_inputs(prob, night.epoch_len, model.features));
}

double loss(const JointModel& model, std::span<const EpochSeries> batch) {
  const auto ptrs = pointers(batch);
  return evaluate(model, ptrs, false).loss;
}

LossAndGradient loss_and_gradient(const JointModel& model, std::span<const EpochSeries> batch) {
  const auto ptrs = pointers(batch);
  return evaluate(model, ptrs, true);
}

void TrainConfig::validate() const {
  if (batch_size < 1 || epochs < 1) {
    throw DomainError("batch_size and epochs must be >= 1");
  }
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw DomainError("learning_rate must be finite and >= 0");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0)) {
    throw DomainError("invalid Adam moment parameters");
  }
}

TrainResult train(const JointModel& init, std::span<const EpochSeries> nights,
                  const TrainConfig& config, const EpochLogger& log) {
  config.validate();
  init.validate();
  if (nights.empty()) {
    throw DomainError("train: no nights");
  }
  const auto all = pointers(nights);

  TrainResult result;
  result.model = init;
  result.loss_trace.push_back(evaluate(result.model, all, false).loss);
  if (!std::isfinite(result.loss_trace.back())) {
    throw TrainingError("initial loss is not finite", init, 0);
  }
  if (log) log(0, result.loss_trace.back());

  Eigen::VectorXd theta = result.model.parameters();
  Adam adam(theta.size(), {config.learning_rate, config.beta1, config.beta2, config.epsilon});
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(nights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  JointModel last_finite = result.model;
  for (int pass = 1; pass <= config.epochs; ++pass) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<const EpochSeries*> batch;
    std::size_t batch_epochs = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      batch.push_back(&nights[order[i]]);
      batch_epochs += nights[order[i]].size();
      if (batch_epochs < static_cast<std::size_t>(config.batch_size) && i + 1 < order.size()) {
        continue;
      }
      const auto step = evaluate(result.model, batch, true);
      if (!std::isfinite(step.loss) || !step.gradient.allFinite()) {
        throw TrainingError("training diverged in pass " + std::to_string(pass), last_finite,
                            pass);
      }
      adam.step(theta, step.gradient);
      result.model.set_parameters(theta);
      if (theta.allFinite()) last_finite = result.model;
      batch.clear();
      batch_epochs = 0;
    }
    const double full = evaluate(result.model, all, false).loss;
    if (!std::isfinite(full)) {
      throw TrainingError("loss is not finite after pass " + std::to_string(pass), last_finite,
                          pass);
    }
    result.loss_trace.push_back(full);
    if (log) log(pass, full);
  }
  return result;
}

}  // namespace rescore
