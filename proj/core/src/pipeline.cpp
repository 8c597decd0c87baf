#include "rescore/pipeline.hpp"

#include <algorithm>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

constexpr std::pair<Method, const char*> kMethodNames[] = {
    {Method::kConstant, "constant"},
    {Method::kGlmWindow, "glm-window"},
    {Method::kWebster, "webster"},
    {Method::kGlmContinuous, "glm-continuous"},
    {Method::kGlmBinary, "glm-binary"},
    {Method::kTree, "tree"},
    {Method::kRescoreNN, "rescore-nn"},
};

void require_labeled(std::span<const EpochSeries> nights) {
  if (nights.empty()) {
    throw DomainError("no nights to fit");
  }
  for (const auto& night : nights) {
    if (!night.has_labels()) {
      throw DomainError("night " + night.participant_id + " has no labels");
    }
  }
}

std::vector<ScoredNight> score_window(const GlmModel& model, const WindowSpec& window,
                                      std::span<const EpochSeries> nights) {
  std::vector<ScoredNight> out;
  out.reserve(nights.size());
  for (const auto& night : nights) {
    out.push_back({window_scores(model, window, night), night.labels, night.epoch_len});
  }
  return out;
}

Eigen::MatrixXd frame_matrix(const FeatureFrame& frame) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(frame.size()), column::kCount);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const auto row = frame.rows[t].flat();
    for (std::size_t j = 0; j < column::kCount; ++j) {
      x(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return x;
}

Eigen::MatrixXd tree_inputs(std::span<const double> prob, double epoch_len,
                            const RescoreOptions& options) {
  const auto w = binarize(prob, options.threshold);
  return frame_matrix(feature_frame(w, epoch_len, options.borders, options.border_mode));
}

}  // namespace

std::string method_name(Method method) {
  for (const auto& [m, name] : kMethodNames) {
    if (m == method) return name;
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (const auto& [m, text] : kMethodNames) {
    if (name == text) return m;
  }
  throw DomainError("unknown method '" + name + "'");
}

GlmModel fit_window_glm(std::span<const EpochSeries> nights, const WindowSpec& window,
                        const GlmOptions& glm) {
  require_labeled(nights);
  window.validate();
  Eigen::Index rows = 0;
  for (const auto& night : nights) rows += static_cast<Eigen::Index>(night.size());
  Eigen::MatrixXd x(rows, window.width());
  std::vector<double> y;
  y.reserve(static_cast<std::size_t>(rows));
  Eigen::Index at = 0;
  for (const auto& night : nights) {
    const Eigen::MatrixXd block = window_matrix(night.activity, window);
    x.middleRows(at, block.rows()) = block;
    at += block.rows();
    y.insert(y.end(), night.labels.begin(), night.labels.end());
  }
  GlmModel model = fit_glm(x, y, glm);
  model.recipe = Recipe::kRawWindow;
  return model;
}

std::vector<double> window_scores(const GlmModel& model, const WindowSpec& window,
                                  const EpochSeries& night) {
  return predict(model, window_matrix(night.activity, window));
}

FittedPipeline fit_pipeline(const PipelineRecipe& recipe, std::span<const EpochSeries> nights,
                            const GlmModel* window_model) {
  require_labeled(nights);
  FittedPipeline fitted;
  fitted.recipe = recipe;
  if (recipe.method == Method::kConstant) {
    return fitted;
  }
  fitted.window_model = window_model ? *window_model : fit_window_glm(nights, recipe.window, recipe.glm);

  switch (recipe.method) {
    case Method::kConstant:
    case Method::kGlmWindow:
    case Method::kWebster:
      break;
    case Method::kGlmContinuous:
    case Method::kGlmBinary: {
      const auto scored = score_window(fitted.window_model, recipe.window, nights);
      const auto mode = recipe.method == Method::kGlmContinuous ? SequentialMode::kContinuous
                                                                : SequentialMode::kBinary;
      fitted.rescore_model = fit_sequential(scored, mode, recipe.features, recipe.glm);
      break;
    }
    case Method::kTree: {
      const auto scored = score_window(fitted.window_model, recipe.window, nights);
      std::vector<Eigen::MatrixXd> blocks;
      Eigen::Index rows = 0;
      std::vector<double> y;
      for (const auto& night : scored) {
        blocks.push_back(tree_inputs(night.prob, night.epoch_len, recipe.features));
        rows += blocks.back().rows();
        y.insert(y.end(), night.labels.begin(), night.labels.end());
      }
      Eigen::MatrixXd x(rows, column::kCount);
      Eigen::Index at = 0;
      for (const auto& b : blocks) {
        x.middleRows(at, b.rows()) = b;
        at += b.rows();
      }
      fitted.tree = fit_tree(x, y, recipe.tree);
      break;
    }
    case Method::kRescoreNN: {
      const auto scored = score_window(fitted.window_model, recipe.window, nights);
      const GlmModel continuous =
          fit_sequential(scored, SequentialMode::kContinuous, recipe.features, recipe.glm);
      const JointModel init =
          init_joint(recipe.window, fitted.window_model, continuous, recipe.features);
      TrainResult trained = train(init, nights, recipe.train);
      fitted.joint = std::move(trained.model);
      fitted.loss_trace = std::move(trained.loss_trace);
      break;
    }
  }
  return fitted;
}

std::vector<double> score_night(const FittedPipeline& pipeline, const EpochSeries& night) {
  const auto& recipe = pipeline.recipe;
  switch (recipe.method) {
    case Method::kConstant:
      return std::vector<double>(night.size(), 0.5);
    case Method::kGlmWindow:
    case Method::kWebster:
      return window_scores(pipeline.window_model, recipe.window, night);
    case Method::kGlmContinuous:
    case Method::kGlmBinary: {
      const auto prob = window_scores(pipeline.window_model, recipe.window, night);
      const auto mode = recipe.method == Method::kGlmContinuous ? SequentialMode::kContinuous
                                                                : SequentialMode::kBinary;
      return predict_sequential(pipeline.rescore_model.value(), prob, night.epoch_len, mode,
                                recipe.features);
    }
    case Method::kTree: {
      const auto prob = window_scores(pipeline.window_model, recipe.window, night);
      return predict(pipeline.tree.value(), tree_inputs(prob, night.epoch_len, recipe.features));
    }
    case Method::kRescoreNN:
      return forward(pipeline.joint.value(), night);
  }
  throw DomainError("unknown method");
}

std::vector<CvResult> cross_validate_methods(std::span<const EpochSeries> nights, int k,
                                             std::span<const Method> methods,
                                             const PipelineRecipe& base, std::uint64_t seed) {
  require_labeled(nights);
  const CvPlan plan = make_cv_plan(nights.size(), k, seed);

  struct Collected {
    std::vector<std::vector<ScoredNight>> per_fold;
  };
  std::vector<Collected> collected(methods.size());
  for (auto& c : collected) c.per_fold.resize(static_cast<std::size_t>(k));

  for (int fold = 0; fold < k; ++fold) {
    std::vector<EpochSeries> train_set;
    std::vector<const EpochSeries*> held_out;
    for (std::size_t i = 0; i < nights.size(); ++i) {
      if (plan.fold_of[i] == fold) {
        held_out.push_back(&nights[i]);
      } else {
        train_set.push_back(nights[i]);
      }
    }
    const bool needs_window =
        std::any_of(methods.begin(), methods.end(), [](Method m) { return m != Method::kConstant; });
    GlmModel window_model;
    if (needs_window) {
      window_model = fit_window_glm(train_set, base.window, base.glm);
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      PipelineRecipe recipe = base;
      recipe.method = methods[m];
      const FittedPipeline fitted = fit_pipeline(recipe, train_set, &window_model);
      for (const auto* night : held_out) {
        collected[m].per_fold[static_cast<std::size_t>(fold)].push_back(
            {score_night(fitted, *night), night->labels, night->epoch_len});
      }
    }
  }

  auto curve_for = [&](Method method, std::span<const ScoredNight> scored) {
    if (method == Method::kWebster) {
      return roc_webster(scored, base.rules, base.threshold_grid, base.features);
    }
    std::vector<double> scores;
    std::vector<int> labels;
    for (const auto& night : scored) {
      scores.insert(scores.end(), night.prob.begin(), night.prob.end());
      labels.insert(labels.end(), night.labels.begin(), night.labels.end());
    }
    return roc(scores, labels);
  };

  std::vector<CvResult> results;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    CvResult result;
    result.method = methods[m];
    result.window = base.window;
    std::vector<ScoredNight> pooled;
    for (const auto& fold : collected[m].per_fold) {
      try {
        result.folds.emplace_back(curve_for(methods[m], fold));
      } catch (const DomainError&) {
        result.folds.emplace_back(std::nullopt);
      }
      pooled.insert(pooled.end(), fold.begin(), fold.end());
    }
    result.pooled = curve_for(methods[m], pooled);
    results.push_back(std::move(result));
  }
  return results;
}

CvResult cross_validate(std::span<const EpochSeries> nights, int k, const PipelineRecipe& recipe,
                        std::uint64_t seed) {
  const Method method[] = {recipe.method};
  return std::move(cross_validate_methods(nights, k, method, recipe, seed).front());
}

}  // namespace rescore
