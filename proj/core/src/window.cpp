#include "rescore/window.hpp"

#include <algorithm>
#include <cmath>

#include "rescore/errors.hpp"

namespace rescore {

void WindowSpec::validate() const {
  if (past > 0 || future < 0) {
    throw DomainError("window must satisfy past <= 0 <= future, got " + label());
  }
}

std::string WindowSpec::label() const {
  return std::to_string(past) + ":" + std::to_string(future);
}

WindowSpec WindowSpec::parse(const std::string& text) {
  const auto sep = text.find_first_of(":,", 1);
  if (sep == std::string::npos) {
    throw DomainError("window '" + text + "' is not of the form past:future");
  }
  WindowSpec spec;
  try {
    std::size_t used = 0;
    const std::string head = text.substr(0, sep);
    const std::string tail = text.substr(sep + 1);
    spec.past = std::stoi(head, &used);
    if (used != head.size()) throw DomainError("bad window");
    spec.future = std::stoi(tail, &used);
    if (used != tail.size()) throw DomainError("bad window");
  } catch (const std::exception&) {
    throw DomainError("window '" + text + "' is not of the form past:future");
  }
  spec.validate();
  return spec;
}

Eigen::MatrixXd window_matrix(std::span<const double> activity, const WindowSpec& spec,
                              EdgeMode edge) {
  spec.validate();
  if (activity.empty()) {
    throw DomainError("window_matrix: activity series is empty");
  }
  const long n = static_cast<long>(activity.size());
  Eigen::MatrixXd out(n, spec.width());
  for (long t = 0; t < n; ++t) {
    for (int j = 0; j < spec.width(); ++j) {
      const long src = t + spec.past + j;
      if (src >= 0 && src < n) {
        out(t, j) = activity[static_cast<std::size_t>(src)];
      } else if (edge == EdgeMode::kZero) {
        out(t, j) = 0.0;
      } else {
        out(t, j) = activity[static_cast<std::size_t>(std::clamp(src, 0L, n - 1))];
      }
    }
  }
  return out;
}

}  // namespace rescore
