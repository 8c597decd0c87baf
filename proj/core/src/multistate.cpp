#include "rescore/multistate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

void check_states(std::span<const int> states, int num_states, int k) {
  if (num_states < 2) {
    throw DomainError("multistate features need at least 2 states");
  }
  if (k < 0 || k >= num_states) {
    throw DomainError("state index " + std::to_string(k) + " is outside [0," +
                      std::to_string(num_states) + ")");
  }
  if (states.empty()) {
    throw DomainError("state sequence is empty");
  }
  for (std::size_t t = 0; t < states.size(); ++t) {
    if (states[t] < 0 || states[t] >= num_states) {
      throw DomainError("label at epoch " + std::to_string(t + 1) + " is not a valid state");
    }
  }
}

std::vector<double> border_or_zeros(std::span<const double> border, int num_states) {
  if (border.empty()) {
    return std::vector<double>(static_cast<std::size_t>(num_states), 0.0);
  }
  if (border.size() != static_cast<std::size_t>(num_states)) {
    throw DomainError("multistate border must have one entry per state");
  }
  for (double b : border) {
    if (!std::isfinite(b) || b < 0.0) {
      throw DomainError("border values must be finite and nonnegative");
    }
  }
  return {border.begin(), border.end()};
}

}  // namespace

std::vector<PairedStateRow> multistate_paired(std::span<const int> states, int num_states,
                                              int k, double epoch_len, const Vec4& border,
                                              BorderMode mode) {
  check_states(states, num_states, k);
  std::vector<double> indicator(states.size());
  std::transform(states.begin(), states.end(), indicator.begin(),
                 [k](int s) { return s == k ? 1.0 : 0.0; });
  const auto last = last_features(indicator, epoch_len, border, mode);

  std::vector<PairedStateRow> out(last.size());
  for (std::size_t t = 0; t < last.size(); ++t) {
    out[t] = {last[t][kLagWake], last[t][kLenWake], last[t][kLagSleep], last[t][kLenSleep]};
  }
  return out;
}

StateBoutSeries multistate_min(std::span<const int> states, int num_states, int k,
                               double epoch_len, std::span<const double> lag_border,
                               std::span<const double> len_border, BorderMode mode) {
  check_states(states, num_states, k);
  if (!std::isfinite(epoch_len) || epoch_len <= 0.0) {
    throw DomainError("epoch_len must be positive");
  }
  const auto ks = static_cast<std::size_t>(num_states);
  std::vector<double> lag = border_or_zeros(lag_border, num_states);
  std::vector<double> len = border_or_zeros(len_border, num_states);

  StateBoutSeries out;
  out.lag.reserve(states.size());
  out.len.reserve(states.size());

  std::size_t t = 0;
  if (mode == BorderMode::kAssign) {
    out.lag.push_back(lag[static_cast<std::size_t>(k)]);
    out.len.push_back(len[static_cast<std::size_t>(k)]);
    t = 1;
  }
  std::vector<double> next_lag(ks);
  for (; t < states.size(); ++t) {
    const auto current = static_cast<std::size_t>(states[t]);
    for (std::size_t j = 0; j < ks; ++j) {
      const double in_j = current == j ? 1.0 : 0.0;
      double since_other = std::numeric_limits<double>::infinity();
      for (std::size_t o = 0; o < ks; ++o) {
        if (o != j) {
          since_other = std::min(since_other, lag[o] + epoch_len);
        }
      }
      next_lag[j] = (1.0 - in_j) * (lag[j] + epoch_len);
      len[j] = (1.0 - in_j) * len[j] + in_j * since_other;
    }
    lag.swap(next_lag);
    out.lag.push_back(lag[static_cast<std::size_t>(k)]);
    out.len.push_back(len[static_cast<std::size_t>(k)]);
  }
  return out;
}

}  // namespace rescore
