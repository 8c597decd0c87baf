#pragma once

// Design matrices for the second-stage (rescoring) models, built from the
// first-stage wake probabilities of one night.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rescore/features.hpp"
#include "rescore/glm.hpp"

namespace rescore {

inline constexpr double kProbabilityFloor = 1e-6;

double clamp_probability(double p);

struct RescoreOptions {
  BorderValues borders;
  BorderMode border_mode = BorderMode::kAssign;
  double threshold = 0.5;  // binarization for the binary recipe
  bool with_next = true;   // continuous recipe: include the log1p(n) block
};

// Columns: logit(pi), log1p(l) x4, [log1p(n) x4], log1p(c) x4.
// 13 columns, or 9 without the next block.
Eigen::MatrixXd continuous_rescoring_inputs(std::span<const double> prob, double epoch_len,
                                            const RescoreOptions& options = {});

// Columns: pi, l(W) x4, n(W) x4, min_border_sleep(W), min_border_wake(W).
// cur_len_sleep / cur_len_wake are exact sums of l and n columns and are
// left out so the design has full column rank.
Eigen::MatrixXd binary_rescoring_inputs(std::span<const double> prob, double epoch_len,
                                        const RescoreOptions& options = {});

std::vector<double> binarize(std::span<const double> prob, double threshold = 0.5);

// First-stage output for one labeled night.
struct ScoredNight {
  std::vector<double> prob;
  std::vector<int> labels;
  double epoch_len = 0.5;
};

enum class SequentialMode { kContinuous, kBinary };

Eigen::MatrixXd rescoring_inputs(std::span<const double> prob, double epoch_len,
                                 SequentialMode mode, const RescoreOptions& options = {});

// Stacks the rescoring inputs of every night and fits a logistic regression.
GlmModel fit_sequential(std::span<const ScoredNight> nights, SequentialMode mode,
                        const RescoreOptions& options = {}, const GlmOptions& glm = {});

std::vector<double> predict_sequential(const GlmModel& model, std::span<const double> prob,
                                       double epoch_len, SequentialMode mode,
                                       const RescoreOptions& options = {});

}  // namespace rescore
