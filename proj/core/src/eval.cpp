#include "rescore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

struct ClassCounts {
  std::int64_t positives = 0;
  std::int64_t negatives = 0;
};

ClassCounts count_classes(std::span<const int> labels) {
  ClassCounts c;
  for (int y : labels) {
    if (y == 1) {
      ++c.positives;
    } else if (y == 0) {
      ++c.negatives;
    } else {
      throw DomainError("roc: labels must be 0 or 1");
    }
  }
  if (c.positives == 0 || c.negatives == 0) {
    throw DomainError("roc: both classes must be present");
  }
  return c;
}

double trapezoid(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) * 0.5;
  }
  return area;
}

RocCurve curve_from_points(std::vector<RocPoint> points) {
  std::sort(points.begin(), points.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  points.insert(points.begin(), RocPoint{0.0, 0.0, std::numeric_limits<double>::infinity()});
  points.push_back(RocPoint{1.0, 1.0, -std::numeric_limits<double>::infinity()});
  RocCurve curve;
  curve.auc = trapezoid(points);
  curve.points = std::move(points);
  return curve;
}

RocPoint operating_point(std::span<const double> predicted, std::span<const int> labels,
                         const ClassCounts& counts, double threshold) {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predicted[i] >= threshold) {
      (labels[i] == 1 ? tp : fp) += 1;
    }
  }
  return {static_cast<double>(fp) / static_cast<double>(counts.negatives),
          static_cast<double>(tp) / static_cast<double>(counts.positives), threshold};
}

}  // namespace

RocCurve roc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DomainError("roc: scores and labels differ in length");
  }
  const ClassCounts counts = count_classes(labels);
  for (double s : scores) {
    if (std::isnan(s)) throw DomainError("roc: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  // Twice the area in units of (1 / positives) x (1 / negatives).
  std::int64_t doubled_area = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    std::int64_t dtp = 0;
    std::int64_t dfp = 0;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) {
      (labels[order[i]] == 1 ? dtp : dfp) += 1;
    }
    doubled_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(counts.negatives),
                            static_cast<double>(tp) / static_cast<double>(counts.positives),
                            threshold});
  }
  curve.auc = static_cast<double>(doubled_area) /
              (2.0 * static_cast<double>(counts.positives) * static_cast<double>(counts.negatives));
  return curve;
}

RocCurve roc_at_thresholds(std::span<const double> scores, std::span<const int> labels,
                           std::span<const double> grid) {
  if (scores.size() != labels.size()) {
    throw DomainError("roc: scores and labels differ in length");
  }
  if (grid.empty()) {
    throw DomainError("roc: threshold grid is empty");
  }
  const ClassCounts counts = count_classes(labels);
  std::vector<RocPoint> points;
  for (double theta : grid) {
    points.push_back(operating_point(scores, labels, counts, theta));
  }
  return curve_from_points(std::move(points));
}

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

RocCurve roc_webster(std::span<const ScoredNight> nights, const RuleParams& params,
                     std::span<const double> grid, const RescoreOptions& options) {
  if (grid.empty()) {
    throw DomainError("roc_webster: threshold grid is empty");
  }
  for (double theta : grid) {
    if (!(theta > 0.0 && theta < 1.0)) {
      throw DomainError("roc_webster: thresholds must lie in (0,1)");
    }
  }
  params.validate();
  std::vector<int> labels;
  for (const auto& night : nights) {
    if (night.labels.size() != night.prob.size()) {
      throw DomainError("roc_webster: probabilities and labels differ in length");
    }
    labels.insert(labels.end(), night.labels.begin(), night.labels.end());
  }
  const ClassCounts counts = count_classes(labels);

  std::vector<RocPoint> points;
  std::vector<double> predicted;
  predicted.reserve(labels.size());
  for (double theta : grid) {
    predicted.clear();
    for (const auto& night : nights) {
      const auto w = binarize(night.prob, theta);
      const auto result =
          apply_webster(w, night.epoch_len, params, options.borders, options.border_mode);
      predicted.insert(predicted.end(), result.rescored.begin(), result.rescored.end());
    }
    RocPoint point = operating_point(predicted, labels, counts, 0.5);
    point.threshold = theta;
    points.push_back(point);
  }
  return curve_from_points(std::move(points));
}

std::vector<std::size_t> CvPlan::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

CvPlan make_cv_plan(std::size_t participants, int k, std::uint64_t seed) {
  if (k < 2) {
    throw DomainError("cross-validation needs k >= 2");
  }
  if (participants < static_cast<std::size_t>(k)) {
    throw DomainError("cross-validation needs at least k = " + std::to_string(k) +
                      " participants, got " + std::to_string(participants));
  }
  std::vector<std::size_t> order(participants);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  CvPlan plan;
  plan.k = k;
  plan.fold_of.assign(participants, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    plan.fold_of[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return plan;
}

}  // namespace rescore
