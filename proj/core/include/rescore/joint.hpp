#pragma once

// Two-layer model trained end to end:
//   pi_t  = sigmoid(a0 + [X_{t+past} .. X_{t+future}] b0)          (window layer)
//   P(Y_t = 1 | X) = sigmoid(a1 + (logit pi_t, log1p(l, n, c)(pi, t)) b1)
// Gradients flow through the feature recursion by an explicit reverse pass.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rescore/data.hpp"
#include "rescore/glm.hpp"
#include "rescore/rescoring_inputs.hpp"
#include "rescore/window.hpp"

namespace rescore {

struct JointModel {
  WindowSpec window;
  GlmModel window_layer;   // weights: window width
  GlmModel rescore_layer;  // weights: 13 (9 without the next block)
  RescoreOptions features;

  Eigen::Index parameter_count() const;
  // Flattened as [a0, b0..., a1, b1...].
  Eigen::VectorXd parameters() const;
  void set_parameters(const Eigen::VectorXd& theta);
  // Throws DomainError on inconsistent shapes.
  void validate() const;
};

// Window layer from a GLM-window fit, rescoring layer from a GLM-continuous
// fit on that window model's output.
JointModel init_joint(const WindowSpec& window, const GlmModel& window_glm,
                      const GlmModel& continuous_glm, const RescoreOptions& features = {});

// Window-layer probabilities pi_t for one night.
std::vector<double> window_probabilities(const JointModel& model, const EpochSeries& night);

// Final P(Y_t = 1 | X) for one night.
std::vector<double> forward(const JointModel& model, const EpochSeries& night);

// Mean negative Bernoulli log-likelihood over all labeled epochs in the batch.
double loss(const JointModel& model, std::span<const EpochSeries> batch);

struct LossAndGradient {
  double loss = 0.0;
  Eigen::VectorXd gradient;  // same layout as JointModel::parameters()
};

LossAndGradient loss_and_gradient(const JointModel& model, std::span<const EpochSeries> batch);

struct TrainConfig {
  int batch_size = 100;  // minimum epochs per batch; batches are whole nights
  int epochs = 20;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct TrainResult {
  JointModel model;
  // loss_trace[0] is the loss before training, loss_trace[k] after pass k,
  // both over the full training set.
  std::vector<double> loss_trace;
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, JointModel last_finite, int epoch)
      : std::runtime_error(what), last_finite_(std::move(last_finite)), epoch_(epoch) {}

  const JointModel& last_finite() const { return last_finite_; }
  int epoch() const { return epoch_; }

 private:
  JointModel last_finite_;
  int epoch_;
};

using EpochLogger = std::function<void(int epoch, double loss)>;

// Mini-batch Adam. Nights are shuffled once per pass with a seeded engine
// and grouped into consecutive batches of at least batch_size epochs.
TrainResult train(const JointModel& init, std::span<const EpochSeries> nights,
                  const TrainConfig& config, const EpochLogger& log = {});

}  // namespace rescore
