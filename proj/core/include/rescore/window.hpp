#pragma once

#include <span>
#include <string>

#include <Eigen/Dense>

namespace rescore {

// Moving window [t + past, t + future] around each epoch, past <= 0 <= future.
struct WindowSpec {
  int past = -5;
  int future = 2;

  int width() const { return future - past + 1; }
  void validate() const;
  std::string label() const;  // "-5:2"
  static WindowSpec parse(const std::string& text);

  bool operator==(const WindowSpec&) const = default;
};

enum class EdgeMode { kReplicate, kZero };

// One row per epoch holding X_{t+past} .. X_{t+future}. Indices outside the
// series are filled with the nearest edge value, or zero with EdgeMode::kZero.
Eigen::MatrixXd window_matrix(std::span<const double> activity, const WindowSpec& spec,
                              EdgeMode edge = EdgeMode::kReplicate);

}  // namespace rescore
