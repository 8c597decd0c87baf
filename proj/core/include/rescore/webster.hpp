#pragma once

// Webster's rescoring rules expressed over rescoring features.
//
// Rule 1 (a, b): rescore a sleep epoch to wake when the wake bout before it
//   lasted at least a minutes and ended at most b minutes ago.
// Rule 2 (c, d): rescore a sleep epoch to wake when its sleep bout measures
//   at most c minutes and both bordering wake bouts last at least d minutes.
// All constants are minutes and are compared against epoch_len-scaled
// features. Every rule is evaluated against the original scores and the
// results are OR-ed.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rescore/features.hpp"

namespace rescore {

struct RuleParams {
  std::vector<std::pair<double, double>> rule1;  // (a, b)
  std::vector<std::pair<double, double>> rule2;  // (c, d)

  static RuleParams webster_defaults();
  bool empty() const { return rule1.empty() && rule2.empty(); }
  // Throws DomainError unless every constant is finite and > 0.
  void validate() const;

  bool operator==(const RuleParams&) const = default;
};

// Which rule flipped an epoch. rule == 0 means the epoch kept its score;
// pair indexes into RuleParams::rule1 / rule2.
struct Trigger {
  int rule = 0;
  int pair = -1;

  std::string label() const;  // "none", "R1.0", "R2.1", ...
  bool operator==(const Trigger&) const = default;
};

struct RescoreResult {
  std::vector<int> original;
  std::vector<int> rescored;
  std::vector<Trigger> trigger;
};

// Per-epoch flags (1 = rule fires). The frame must come from binary scores.
std::vector<std::uint8_t> apply_rule1(const FeatureFrame& frame, double a, double b);
std::vector<std::uint8_t> apply_rule2(const FeatureFrame& frame, double c, double d);

RescoreResult apply_webster(const FeatureFrame& frame, const RuleParams& params);
RescoreResult apply_webster(std::span<const double> scores, double epoch_len,
                            const RuleParams& params, const BorderValues& borders = {},
                            BorderMode mode = BorderMode::kAssign);

}  // namespace rescore
