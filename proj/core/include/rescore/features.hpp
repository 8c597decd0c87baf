#pragma once

// Epoch-level rescoring features.
//
// For a score sequence s_1..s_T (binary W_t or a probability of wake), the
// "last" block l(s,t) holds
//   [0] last_lag_wake   time since the most recent wake epoch
//   [1] last_lag_sleep  time since the most recent sleep epoch
//   [2] last_len_wake   length of the most recent (or current) wake bout
//   [3] last_len_sleep  length of the most recent (or current) sleep bout
// and the "next" block n(s,t) is the same four quantities looking forward.
// The combined block c(s,t) is derived from l and n:
//   [0] cur_len_sleep     last_lag_wake + next_lag_wake
//   [1] cur_len_wake      last_lag_sleep + next_lag_sleep
//   [2] min_border_sleep  min(last_len_sleep, next_len_sleep)
//   [3] min_border_wake   min(last_len_wake, next_len_wake)
//
// All durations are real time (epoch count times epoch_len, in minutes).
// l is produced by the affine recursion
//   l(t) = v0 + s_t v1 + (M0 + s_t M1) l(t-1)
// and n by the same recursion run right to left.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace rescore {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

enum LastIndex : std::size_t { kLagWake = 0, kLagSleep = 1, kLenWake = 2, kLenSleep = 3 };
enum CombinedIndex : std::size_t {
  kCurLenSleep = 0,
  kCurLenWake = 1,
  kMinBorderSleep = 2,
  kMinBorderWake = 3
};

// Column layout of a flattened 13-value feature row.
namespace column {
inline constexpr std::size_t kScore = 0;
inline constexpr std::size_t kLast = 1;
inline constexpr std::size_t kNext = 5;
inline constexpr std::size_t kCombined = 9;
inline constexpr std::size_t kCurLenSleep = kCombined + 0;
inline constexpr std::size_t kCurLenWake = kCombined + 1;
inline constexpr std::size_t kMinBorderSleep = kCombined + 2;
inline constexpr std::size_t kMinBorderWake = kCombined + 3;
inline constexpr std::size_t kCount = 13;
}  // namespace column

// Names used in CSV headers and tree exports, in flattened column order.
const std::array<std::string_view, column::kCount>& feature_names();

// How the border vectors enter the recursion.
//   kAssign:  l(1) = b1 and n(T) = bT; the first (last) score only affects
//             later (earlier) epochs.
//   kPrecede: b1 (bT) describes a virtual epoch just before 1 (after T), so
//             l(1) is one recursion step from b1.
enum class BorderMode { kAssign, kPrecede };

// b1 seeds the last block, bT seeds the next block. Zero means "the night
// starts (ends) with a state change".
struct BorderValues {
  Vec4 first{};
  Vec4 last{};
};

struct RecursionCoefficients {
  Vec4 v0{};
  Vec4 v1{};
  Mat4 m0{};
  Mat4 m1{};

  static RecursionCoefficients for_epoch(double epoch_len);

  // One recursion step: v0 + s v1 + (M0 + s M1) prev.
  Vec4 step(double score, const Vec4& prev) const;
};

struct FeatureRow {
  double score = 0.0;
  Vec4 last{};
  Vec4 next{};
  Vec4 combined{};

  std::array<double, column::kCount> flat() const;
};

struct FeatureFrame {
  double epoch_len = 1.0;
  bool binary = true;  // every score was exactly 0 or 1
  std::vector<FeatureRow> rows;

  std::size_t size() const { return rows.size(); }
};

// Throws DomainError on empty input, non-finite scores, scores outside
// [0,1], non-positive epoch_len, or negative borders.
std::vector<Vec4> last_features(std::span<const double> scores, double epoch_len,
                                const Vec4& border = {},
                                BorderMode mode = BorderMode::kAssign);

// Right-to-left counterpart: next_features(s) == reverse(last_features(reverse(s))).
std::vector<Vec4> next_features(std::span<const double> scores, double epoch_len,
                                const Vec4& border = {},
                                BorderMode mode = BorderMode::kAssign);

Vec4 combine(const Vec4& last, const Vec4& next);
std::vector<Vec4> combine_features(std::span<const Vec4> last, std::span<const Vec4> next);

FeatureFrame feature_frame(std::span<const double> scores, double epoch_len,
                           const BorderValues& borders = {},
                           BorderMode mode = BorderMode::kAssign);

// Literal-search implementation of the eight bout features for binary input.
// It shares no code with the recursion and is kept as an independent check.
// Convention when a state is never observed inside the window: lags keep
// growing from the border lag, bout lengths carry the border length, and a
// bout that touches the window edge is extended by the opposite state's
// border lag.
FeatureFrame features_by_scan(std::span<const double> scores, double epoch_len,
                              const BorderValues& borders = {},
                              BorderMode mode = BorderMode::kAssign);

bool is_binary(std::span<const double> scores);

}  // namespace rescore
