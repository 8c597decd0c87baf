#pragma once

// Bout features for K-state label sequences (activity classes, sleep stages).

#include <span>
#include <vector>

#include "rescore/features.hpp"

namespace rescore {

// Bout features of state k against "any other state", obtained by running
// the binary recursion on the indicator 1(Y_t = k).
struct PairedStateRow {
  double lag_k = 0.0;
  double len_k = 0.0;
  double lag_other = 0.0;
  double len_other = 0.0;
};

// Borders use the binary layout: {lag_k, lag_other, len_k, len_other}.
std::vector<PairedStateRow> multistate_paired(std::span<const int> states, int num_states,
                                              int k, double epoch_len, const Vec4& border = {},
                                              BorderMode mode = BorderMode::kAssign);

// Per-state lag and bout length where the bout length is recovered from the
// minimum lag over the other states, so no "not k" bookkeeping is needed.
struct StateBoutSeries {
  std::vector<double> lag;
  std::vector<double> len;
};

// lag_border and len_border hold one entry per state (empty means zeros).
// Returns the series for state k; all K lags are tracked internally.
StateBoutSeries multistate_min(std::span<const int> states, int num_states, int k,
                               double epoch_len, std::span<const double> lag_border = {},
                               std::span<const double> len_border = {},
                               BorderMode mode = BorderMode::kAssign);

}  // namespace rescore
