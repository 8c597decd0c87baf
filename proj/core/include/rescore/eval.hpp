#pragma once

// ROC curves, AUC, and participant-level cross-validation folds.

#include <cstdint>
#include <span>
#include <vector>

#include "rescore/rescoring_inputs.hpp"
#include "rescore/webster.hpp"

namespace rescore {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // predict wake when score >= threshold
};

// Points run from (0,0) to (1,1) with nondecreasing fpr.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Exact ROC over every distinct score; tied scores form one diagonal step.
// The AUC is accumulated in integer pair counts, so it equals the
// Mann-Whitney statistic bit for bit. Throws DomainError for length
// mismatch or single-class labels.
RocCurve roc(std::span<const double> scores, std::span<const int> labels);

// Operating points 1(score >= theta) for each theta in the grid, sorted by
// (fpr, tpr), with (0,0) and (1,1) appended; trapezoidal AUC.
RocCurve roc_at_thresholds(std::span<const double> scores, std::span<const int> labels,
                           std::span<const double> grid);

// 0.01, 0.02, ..., 0.99
std::vector<double> default_threshold_grid();

// For each theta: W = 1(pi >= theta) per night, Webster rescoring, one
// (fpr, tpr) point. Curves are not forced to be concave.
RocCurve roc_webster(std::span<const ScoredNight> nights, const RuleParams& params,
                     std::span<const double> grid, const RescoreOptions& options = {});

// Participants are shuffled with the seed and dealt round-robin, so fold
// sizes differ by at most one.
struct CvPlan {
  int k = 5;
  std::vector<int> fold_of;  // participant index -> fold

  std::vector<std::size_t> members(int fold) const;
};

CvPlan make_cv_plan(std::size_t participants, int k, std::uint64_t seed);

}  // namespace rescore
