#include "rescore/webster.hpp"

#include <cmath>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

void require_binary(const FeatureFrame& frame) {
  if (!frame.binary) {
    throw DomainError("rescoring rules need a frame built from binary scores");
  }
}

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string("rule constant ") + name + " must be positive");
  }
}

}  // namespace

RuleParams RuleParams::webster_defaults() {
  return {{{4, 1}, {10, 3}, {15, 4}}, {{6, 10}, {10, 20}}};
}

void RuleParams::validate() const {
  for (const auto& [a, b] : rule1) {
    require_positive(a, "a");
    require_positive(b, "b");
  }
  for (const auto& [c, d] : rule2) {
    require_positive(c, "c");
    require_positive(d, "d");
  }
}

std::string Trigger::label() const {
  if (rule == 0) {
    return "none";
  }
  return "R" + std::to_string(rule) + "." + std::to_string(pair);
}

std::vector<std::uint8_t> apply_rule1(const FeatureFrame& frame, double a, double b) {
  require_binary(frame);
  std::vector<std::uint8_t> flags(frame.size(), 0);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const auto& last = frame.rows[t].last;
    // last_lag_wake > 0 excludes epochs already scored wake.
    flags[t] = last[kLenWake] >= a && last[kLagWake] > 0.0 && last[kLagWake] <= b;
  }
  return flags;
}

std::vector<std::uint8_t> apply_rule2(const FeatureFrame& frame, double c, double d) {
  require_binary(frame);
  std::vector<std::uint8_t> flags(frame.size(), 0);
  for (std::size_t t = 0; t < frame.size(); ++t) {
    const auto& row = frame.rows[t];
    flags[t] = row.score == 0.0 && row.combined[kCurLenSleep] <= c &&
               row.combined[kMinBorderWake] >= d;
  }
  return flags;
}

RescoreResult apply_webster(const FeatureFrame& frame, const RuleParams& params) {
  require_binary(frame);
  params.validate();

  RescoreResult result;
  result.original.resize(frame.size());
  for (std::size_t t = 0; t < frame.size(); ++t) {
    result.original[t] = frame.rows[t].score == 1.0 ? 1 : 0;
  }
  result.rescored = result.original;
  result.trigger.assign(frame.size(), Trigger{});

  auto mark = [&](const std::vector<std::uint8_t>& flags, int rule, int pair) {
    for (std::size_t t = 0; t < flags.size(); ++t) {
      if (flags[t] && result.rescored[t] == 0) {
        result.rescored[t] = 1;
        result.trigger[t] = {rule, pair};
      }
    }
  };
  for (std::size_t i = 0; i < params.rule1.size(); ++i) {
    mark(apply_rule1(frame, params.rule1[i].first, params.rule1[i].second), 1,
         static_cast<int>(i));
  }
  for (std::size_t i = 0; i < params.rule2.size(); ++i) {
    mark(apply_rule2(frame, params.rule2[i].first, params.rule2[i].second), 2,
         static_cast<int>(i));
  }
  return result;
}

RescoreResult apply_webster(std::span<const double> scores, double epoch_len,
                            const RuleParams& params, const BorderValues& borders,
                            BorderMode mode) {
  if (!is_binary(scores)) {
    throw DomainError("apply_webster requires binary scores");
  }
  return apply_webster(feature_frame(scores, epoch_len, borders, mode), params);
}

}  // namespace rescore
