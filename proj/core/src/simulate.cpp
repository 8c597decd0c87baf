#include "rescore/data.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("invalid simulation config: " + what);
}

bool is_rate(double r) { return std::isfinite(r) && r >= 0.0 && r < 1.0; }

}  // namespace

void SimConfig::validate() const {
  require(n_participants >= 1, "n_participants must be >= 1");
  require(mean_night_epochs >= 1, "mean_night_epochs must be >= 1");
  require(std::isfinite(epoch_len) && epoch_len > 0.0, "epoch_len must be positive");
  require(mean_sleep_bout >= 1.0 && mean_wake_bout >= 1.0 && mean_sleep_latency >= 1.0 &&
              mean_quiet_wake >= 1.0,
          "bout means must be >= 1 epoch");
  require(wake_shape > 0.0 && wake_scale > 0.0 && sleep_shape > 0.0 && sleep_scale > 0.0,
          "gamma parameters must be positive");
  require(wake_shape * wake_scale > sleep_shape * sleep_scale,
          "wake emission mean must exceed sleep emission mean");
  require(is_rate(arousal_rate) && is_rate(twitch_rate) && is_rate(quiet_wake_rate),
          "rates must lie in [0,1)");
  require(lead_in_min >= 0 && lead_in_max >= lead_in_min, "need 0 <= lead_in_min <= lead_in_max");
}

EpochSeries simulate_night(const SimConfig& config, int index) {
  std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(index));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto bout = [&](double mean) {
    std::geometric_distribution<int> g(1.0 / mean);
    return 1 + g(rng);
  };
  std::uniform_int_distribution<int> lead_in(config.lead_in_min, config.lead_in_max);
  std::uniform_int_distribution<int> arousal_len(1, 2);

  const auto target = static_cast<std::size_t>(
      std::max(1.0, std::round(config.mean_night_epochs * (0.9 + 0.2 * unit(rng)))));

  std::vector<int> labels;
  std::vector<char> active;
  labels.reserve(target + 64);
  active.reserve(target + 64);

  bool first = true;
  bool wake = true;
  while (labels.size() < target) {
    if (wake) {
      // A wake bout always ends in an inactive lead-in and has at least one
      // active epoch before it.
      const int quiet_tail = lead_in(rng);
      const int length =
          std::max(bout(first ? config.mean_sleep_latency : config.mean_wake_bout), quiet_tail + 1);
      const int active_part = length - quiet_tail;
      for (int i = 0; i < active_part; ++i) {
        if (unit(rng) < config.quiet_wake_rate) {
          const int still = std::min(bout(config.mean_quiet_wake), active_part - i);
          for (int j = 0; j < still; ++j) {
            labels.push_back(1);
            active.push_back(0);
          }
          i += still - 1;
          continue;
        }
        labels.push_back(1);
        active.push_back(1);
      }
      for (int i = 0; i < quiet_tail; ++i) {
        labels.push_back(1);
        active.push_back(0);
      }
    } else {
      const int length = bout(config.mean_sleep_bout);
      for (int i = 0; i < length; ++i) {
        labels.push_back(0);
        active.push_back(unit(rng) < config.twitch_rate ? 1 : 0);
        if (i + 1 < length && unit(rng) < config.arousal_rate) {
          for (int j = arousal_len(rng); j > 0; --j) {
            labels.push_back(1);
            active.push_back(1);
          }
        }
      }
    }
    first = false;
    wake = !wake;
  }
  labels.resize(target);
  active.resize(target);

  std::gamma_distribution<double> wake_emission(config.wake_shape, config.wake_scale);
  std::gamma_distribution<double> sleep_emission(config.sleep_shape, config.sleep_scale);

  EpochSeries night;
  night.participant_id = "sim" + std::to_string(index + 1);
  night.epoch_len = config.epoch_len;
  night.labels = std::move(labels);
  night.activity.resize(target);
  for (std::size_t t = 0; t < target; ++t) {
    night.activity[t] = active[t] ? wake_emission(rng) : sleep_emission(rng);
  }
  return night;
}

std::vector<EpochSeries> simulate(const SimConfig& config) {
  config.validate();
  std::vector<EpochSeries> nights;
  nights.reserve(static_cast<std::size_t>(config.n_participants));
  for (int i = 0; i < config.n_participants; ++i) {
    nights.push_back(simulate_night(config, i));
  }
  return nights;
}

}  // namespace rescore
