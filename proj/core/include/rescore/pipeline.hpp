#pragma once

// End-to-end sleep/wake pipelines and their cross-validated evaluation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rescore/data.hpp"
#include "rescore/eval.hpp"
#include "rescore/glm.hpp"
#include "rescore/joint.hpp"
#include "rescore/rescoring_inputs.hpp"
#include "rescore/tree.hpp"
#include "rescore/webster.hpp"
#include "rescore/window.hpp"

namespace rescore {

enum class Method {
  kConstant,       // scores every epoch 0.5
  kGlmWindow,      // logistic regression on windowed activity
  kWebster,        // GLM-window thresholded, then Webster's rules
  kGlmContinuous,  // second GLM on log1p rescoring features of pi
  kGlmBinary,      // second GLM on pi and raw features of W = 1(pi >= 0.5)
  kTree,           // CART on the 13-column frame of W
  kRescoreNN,      // joint training initialized from the two GLMs
};

std::string method_name(Method method);
Method parse_method(const std::string& name);

struct PipelineRecipe {
  Method method = Method::kGlmWindow;
  WindowSpec window;
  RescoreOptions features;
  GlmOptions glm;
  RuleParams rules = RuleParams::webster_defaults();
  TreeOptions tree{3, 50};
  TrainConfig train;
  std::vector<double> threshold_grid = default_threshold_grid();
};

struct FittedPipeline {
  PipelineRecipe recipe;
  GlmModel window_model;
  std::optional<GlmModel> rescore_model;
  std::optional<RuleTree> tree;
  std::optional<JointModel> joint;
  std::vector<double> loss_trace;  // rescore-NN only
};

// Stacks every night's window matrix and fits the first-stage GLM.
GlmModel fit_window_glm(std::span<const EpochSeries> nights, const WindowSpec& window,
                        const GlmOptions& glm = {});

std::vector<double> window_scores(const GlmModel& model, const WindowSpec& window,
                                  const EpochSeries& night);

// Nights must be labeled. A pre-fitted window model may be supplied so
// several methods can share one first stage.
FittedPipeline fit_pipeline(const PipelineRecipe& recipe, std::span<const EpochSeries> nights,
                            const GlmModel* window_model = nullptr);

// P(wake) per epoch. For Webster this is the first-stage probability that
// the threshold sweep operates on.
std::vector<double> score_night(const FittedPipeline& pipeline, const EpochSeries& night);

struct CvResult {
  Method method = Method::kGlmWindow;
  WindowSpec window;
  std::vector<std::optional<RocCurve>> folds;  // empty when a fold has one class
  RocCurve pooled;
};

// Participant-level k-fold CV. Held-out scores of all folds are pooled into
// one ROC curve; Webster pipelines are swept over the threshold grid.
CvResult cross_validate(std::span<const EpochSeries> nights, int k, const PipelineRecipe& recipe,
                        std::uint64_t seed);

// Several methods sharing one window GLM per fold.
std::vector<CvResult> cross_validate_methods(std::span<const EpochSeries> nights, int k,
                                             std::span<const Method> methods,
                                             const PipelineRecipe& base, std::uint64_t seed);

}  // namespace rescore
