#include "rescore/rescoring_inputs.hpp"

#include <algorithm>
#include <cmath>

#include "rescore/errors.hpp"

namespace rescore {

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

std::vector<double> binarize(std::span<const double> prob, double threshold) {
  std::vector<double> out(prob.size());
  std::transform(prob.begin(), prob.end(), out.begin(),
                 [threshold](double p) { return p >= threshold ? 1.0 : 0.0; });
  return out;
}

Eigen::MatrixXd continuous_rescoring_inputs(std::span<const double> prob, double epoch_len,
                                            const RescoreOptions& options) {
  const FeatureFrame frame = feature_frame(prob, epoch_len, options.borders, options.border_mode);
  const Eigen::Index cols = options.with_next ? 13 : 9;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frame.size()), cols);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const auto& row = frame.rows[t];
    const auto r = static_cast<Eigen::Index>(t);
    Eigen::Index c = 0;
    out(r, c++) = logit(clamp_probability(row.score));
    for (double v : row.last) out(r, c++) = std::log1p(v);
    if (options.with_next) {
      for (double v : row.next) out(r, c++) = std::log1p(v);
    }
    for (double v : row.combined) out(r, c++) = std::log1p(v);
  }
  return out;
}

Eigen::MatrixXd binary_rescoring_inputs(std::span<const double> prob, double epoch_len,
                                        const RescoreOptions& options) {
  const auto w = binarize(prob, options.threshold);
  const FeatureFrame frame = feature_frame(w, epoch_len, options.borders, options.border_mode);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frame.size()), 11);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const auto& row = frame.rows[t];
    const auto r = static_cast<Eigen::Index>(t);
    Eigen::Index c = 0;
    out(r, c++) = prob[t];
    for (double v : row.last) out(r, c++) = v;
    for (double v : row.next) out(r, c++) = v;
    out(r, c++) = row.combined[kMinBorderSleep];
    out(r, c++) = row.combined[kMinBorderWake];
  }
  return out;
}

Eigen::MatrixXd rescoring_inputs(std::span<const double> prob, double epoch_len,
                                 SequentialMode mode, const RescoreOptions& options) {
  return mode == SequentialMode::kContinuous
             ? continuous_rescoring_inputs(prob, epoch_len, options)
             : binary_rescoring_inputs(prob, epoch_len, options);
}

GlmModel fit_sequential(std::span<const ScoredNight> nights, SequentialMode mode,
                        const RescoreOptions& options, const GlmOptions& glm) {
  if (nights.empty()) {
    throw DomainError("fit_sequential: no nights");
  }
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index rows = 0;
  for (const auto& night : nights) {
    if (night.prob.size() != night.labels.size()) {
      throw DomainError("fit_sequential: probabilities and labels differ in length");
    }
    blocks.push_back(rescoring_inputs(night.prob, night.epoch_len, mode, options));
    rows += blocks.back().rows();
  }
  Eigen::MatrixXd x(rows, blocks.front().cols());
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    x.middleRows(at, blocks[i].rows()) = blocks[i];
    at += blocks[i].rows();
    for (int label : nights[i].labels) y.push_back(label);
  }
  GlmModel model = fit_glm(x, y, glm);
  model.recipe = mode == SequentialMode::kContinuous ? Recipe::kContinuousRescore
                                                     : Recipe::kBinaryRescore;
  if (mode == SequentialMode::kContinuous && !options.with_next) {
    model.recipe = Recipe::kCustom;
  }
  return model;
}

std::vector<double> predict_sequential(const GlmModel& model, std::span<const double> prob,
                                       double epoch_len, SequentialMode mode,
                                       const RescoreOptions& options) {
  return predict(model, rescoring_inputs(prob, epoch_len, mode, options));
}

}  // namespace rescore
