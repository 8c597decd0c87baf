#pragma once

// Per-epoch actigraphy nights: CSV ingest, contiguity filtering, and a
// semi-Markov simulator for labeled synthetic nights.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rescore {

// One participant-night. labels (1 = wake, 0 = sleep) are either empty or
// the same length as activity.
struct EpochSeries {
  std::string participant_id;
  double epoch_len = 0.5;  // minutes
  std::vector<double> activity;
  std::vector<int> labels;

  std::size_t size() const { return activity.size(); }
  bool has_labels() const { return !labels.empty(); }
  double hours() const { return static_cast<double>(activity.size()) * epoch_len / 60.0; }
  // Throws DomainError when an invariant does not hold.
  void validate() const;

  bool operator==(const EpochSeries&) const = default;
};

// CSV with header participant_id,epoch_index,activity[,label]. Epoch
// indices run 1..T per participant; participants are returned in order of
// first appearance. Throws DataError naming every offending row.
std::vector<EpochSeries> read_nights(std::istream& in, double epoch_len = 0.5,
                                     const std::string& source = "<stream>");
std::vector<EpochSeries> read_nights(const std::filesystem::path& path, double epoch_len = 0.5);

// Values are written with 9 significant digits. The label column is emitted
// when any night carries labels.
void write_nights(std::ostream& out, std::span<const EpochSeries> nights);
void write_nights(const std::filesystem::path& path, std::span<const EpochSeries> nights);

struct FilterReport {
  std::vector<EpochSeries> kept;
  std::size_t dropped = 0;
};

// Keeps nights lasting at least min_hours (T * epoch_len / 60 >= min_hours).
FilterReport filter_contiguous(std::span<const EpochSeries> nights, double min_hours);

struct SimConfig {
  int n_participants = 200;
  int mean_night_epochs = 960;  // 8 h of 30 s epochs
  double epoch_len = 0.5;

  // Geometric bout means, in epochs.
  double mean_sleep_bout = 90.0;
  double mean_wake_bout = 24.0;
  double mean_sleep_latency = 40.0;

  // Gamma emissions (shape, scale) for active and inactive epochs.
  double wake_shape = 1.5;
  double wake_scale = 40.0;
  double sleep_shape = 0.5;
  double sleep_scale = 2.0;

  // Wake epochs (1-2 long) inserted into sleep, per sleep epoch.
  double arousal_rate = 0.01;
  // Sleep epochs that emit wake-like activity (movement during sleep).
  double twitch_rate = 0.02;
  // Still-but-awake stretches inside wake bouts, per wake epoch, and their
  // geometric mean length.
  double quiet_wake_rate = 0.03;
  double mean_quiet_wake = 8.0;
  // Inactive wake epochs at the end of every wake bout that precedes sleep.
  int lead_in_min = 2;
  int lead_in_max = 8;

  std::uint64_t seed = 1;

  // Throws DomainError on non-positive rates/means or when wake emissions
  // are not more active than sleep emissions.
  void validate() const;
};

// Night i is drawn from an engine seeded with seed + i.
std::vector<EpochSeries> simulate(const SimConfig& config);
EpochSeries simulate_night(const SimConfig& config, int index);

}  // namespace rescore
