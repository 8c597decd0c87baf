#include "rescore/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

void check_epoch_len(double epoch_len) {
  if (!std::isfinite(epoch_len) || epoch_len <= 0.0) {
    throw DomainError("epoch_len must be positive, got " + std::to_string(epoch_len));
  }
}

void check_scores(std::span<const double> scores) {
  if (scores.empty()) {
    throw DomainError("score sequence is empty");
  }
  for (std::size_t t = 0; t < scores.size(); ++t) {
    const double s = scores[t];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw DomainError("score at epoch " + std::to_string(t + 1) + " is outside [0,1]");
    }
  }
}

void check_border(const Vec4& border) {
  for (double b : border) {
    if (!std::isfinite(b) || b < 0.0) {
      throw DomainError("border values must be finite and nonnegative");
    }
  }
}

}  // namespace

const std::array<std::string_view, column::kCount>& feature_names() {
  static const std::array<std::string_view, column::kCount> names = {
      "score",          "last_lag_wake",   "last_lag_sleep", "last_len_wake",
      "last_len_sleep", "next_lag_wake",   "next_lag_sleep", "next_len_wake",
      "next_len_sleep", "cur_len_sleep",   "cur_len_wake",   "min_border_sleep",
      "min_border_wake"};
  return names;
}

RecursionCoefficients RecursionCoefficients::for_epoch(double epoch_len) {
  check_epoch_len(epoch_len);
  const double e = epoch_len;
  RecursionCoefficients k;
  k.v0 = {e, 0.0, 0.0, e};
  k.v1 = {-e, e, e, -e};
  k.m0 = {{{1, 0, 0, 0},  //
           {0, 0, 0, 0},
           {0, 0, 1, 0},
           {1, 0, 0, 0}}};
  k.m1 = {{{-1, 0, 0, 0},  //
           {0, 1, 0, 0},
           {0, 1, -1, 0},
           {-1, 0, 0, 1}}};
  return k;
}

Vec4 RecursionCoefficients::step(double score, const Vec4& prev) const {
  // The transition matrix is formed before the product so that binary scores
  // select rows exactly (no x - x cancellation).
  Vec4 out{};
  for (std::size_t i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      acc += (m0[i][j] + score * m1[i][j]) * prev[j];
    }
    out[i] = (v0[i] + score * v1[i]) + acc;
  }
  return out;
}

std::array<double, column::kCount> FeatureRow::flat() const {
  std::array<double, column::kCount> out{};
  out[column::kScore] = score;
  std::copy(last.begin(), last.end(), out.begin() + column::kLast);
  std::copy(next.begin(), next.end(), out.begin() + column::kNext);
  std::copy(combined.begin(), combined.end(), out.begin() + column::kCombined);
  return out;
}

bool is_binary(std::span<const double> scores) {
  return std::all_of(scores.begin(), scores.end(), [](double s) { return s == 0.0 || s == 1.0; });
}

std::vector<Vec4> last_features(std::span<const double> scores, double epoch_len,
                                const Vec4& border, BorderMode mode) {
  check_scores(scores);
  check_border(border);
  const auto coef = RecursionCoefficients::for_epoch(epoch_len);

  std::vector<Vec4> out(scores.size());
  std::size_t t = 0;
  if (mode == BorderMode::kAssign) {
    out[0] = border;
    t = 1;
  }
  for (; t < scores.size(); ++t) {
    const Vec4& prev = t == 0 ? border : out[t - 1];
    out[t] = coef.step(scores[t], prev);
  }
  return out;
}

std::vector<Vec4> next_features(std::span<const double> scores, double epoch_len,
                                const Vec4& border, BorderMode mode) {
  std::vector<double> reversed(scores.rbegin(), scores.rend());
  auto out = last_features(reversed, epoch_len, border, mode);
  std::reverse(out.begin(), out.end());
  return out;
}

Vec4 combine(const Vec4& last, const Vec4& next) {
  return {last[kLagWake] + next[kLagWake], last[kLagSleep] + next[kLagSleep],
          std::min(last[kLenSleep], next[kLenSleep]), std::min(last[kLenWake], next[kLenWake])};
}

std::vector<Vec4> combine_features(std::span<const Vec4> last, std::span<const Vec4> next) {
  if (last.size() != next.size()) {
    throw DomainError("combine_features: last has " + std::to_string(last.size()) +
                      " epochs, next has " + std::to_string(next.size()));
  }
  std::vector<Vec4> out(last.size());
  for (std::size_t t = 0; t < last.size(); ++t) {
    out[t] = combine(last[t], next[t]);
  }
  return out;
}

FeatureFrame feature_frame(std::span<const double> scores, double epoch_len,
                           const BorderValues& borders, BorderMode mode) {
  const auto last = last_features(scores, epoch_len, borders.first, mode);
  const auto next = next_features(scores, epoch_len, borders.last, mode);

  FeatureFrame frame;
  frame.epoch_len = epoch_len;
  frame.binary = is_binary(scores);
  frame.rows.resize(scores.size());
  for (std::size_t t = 0; t < scores.size(); ++t) {
    frame.rows[t] = FeatureRow{scores[t], last[t], next[t], combine(last[t], next[t])};
  }
  return frame;
}

namespace {

// Bout statistics by literal search. Walks from epoch t toward the window
// edge `edge` (inclusive) in direction `dir` (-1 looks back, +1 looks ahead).
class Scanner {
 public:
  Scanner(std::span<const double> scores, double epoch_len, const Vec4& border, long edge, long dir)
      : scores_(scores), eps_(epoch_len), border_(border), edge_(edge), dir_(dir) {}

  Vec4 at(long t) const {
    // Epochs outside the observed window report the border itself.
    if ((t - edge_) * dir_ > 0) {
      return border_;
    }
    return {lag(t, 1.0, kLagWake), lag(t, 0.0, kLagSleep), len(t, 1.0, kLenWake, kLagSleep),
            len(t, 0.0, kLenSleep, kLagWake)};
  }

 private:
  bool observed(long u) const { return (u - edge_) * dir_ <= 0; }

  // Time from t back to the closest epoch in `state`, or the border lag grown
  // by one epoch per observed epoch when the state never occurs.
  double lag(long t, double state, std::size_t slot) const {
    double acc = 0.0;
    for (long u = t; observed(u); u += dir_) {
      if (scores_[static_cast<std::size_t>(u)] == state) {
        return acc;
      }
      acc += eps_;
    }
    acc = border_[slot];
    for (long u = t; observed(u); u += dir_) {
      acc += eps_;
    }
    return acc;
  }

  // Length of the closest bout in `state` at or beyond t. A bout running into
  // the window edge continues the opposite state's border lag.
  double len(long t, double state, std::size_t slot, std::size_t edge_lag_slot) const {
    long hit = t;
    while (observed(hit) && scores_[static_cast<std::size_t>(hit)] != state) {
      hit += dir_;
    }
    if (!observed(hit)) {
      return border_[slot];
    }
    long start = hit;
    while (observed(start + dir_) && scores_[static_cast<std::size_t>(start + dir_)] == state) {
      start += dir_;
    }
    double acc = start == edge_ ? border_[edge_lag_slot] : 0.0;
    for (long u = start;; u -= dir_) {
      acc += eps_;
      if (u == hit) {
        break;
      }
    }
    return acc;
  }

  std::span<const double> scores_;
  double eps_;
  Vec4 border_;
  long edge_;
  long dir_;
};

}  // namespace

FeatureFrame features_by_scan(std::span<const double> scores, double epoch_len,
                              const BorderValues& borders, BorderMode mode) {
  check_scores(scores);
  check_epoch_len(epoch_len);
  check_border(borders.first);
  check_border(borders.last);
  if (!is_binary(scores)) {
    throw DomainError("features_by_scan requires binary scores");
  }

  const long n = static_cast<long>(scores.size());
  const long shift = mode == BorderMode::kAssign ? 1 : 0;
  const Scanner back(scores, epoch_len, borders.first, shift, -1);
  const Scanner ahead(scores, epoch_len, borders.last, n - 1 - shift, +1);

  FeatureFrame frame;
  frame.epoch_len = epoch_len;
  frame.binary = true;
  frame.rows.resize(scores.size());
  for (long t = 0; t < n; ++t) {
    auto& row = frame.rows[static_cast<std::size_t>(t)];
    row.score = scores[static_cast<std::size_t>(t)];
    row.last = back.at(t);
    row.next = ahead.at(t);
    row.combined[kCurLenSleep] = row.last[kLagWake] + row.next[kLagWake];
    row.combined[kCurLenWake] = row.last[kLagSleep] + row.next[kLagSleep];
    row.combined[kMinBorderSleep] =
        row.last[kLenSleep] < row.next[kLenSleep] ? row.last[kLenSleep] : row.next[kLenSleep];
    row.combined[kMinBorderWake] =
        row.last[kLenWake] < row.next[kLenWake] ? row.last[kLenWake] : row.next[kLenWake];
  }
  return frame;
}

}  // namespace rescore
