#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rescore/features.hpp"

namespace rescore::testing {

inline std::vector<double> random_binary(std::mt19937_64& rng, std::size_t n, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  std::vector<double> out(n);
  for (auto& v : out) v = coin(rng) ? 1.0 : 0.0;
  return out;
}

// Runs of random length, so bouts of both states are long enough to matter.
inline std::vector<double> random_bouts(std::mt19937_64& rng, std::size_t n, int max_run = 30) {
  std::uniform_int_distribution<int> run(1, max_run);
  std::vector<double> out;
  double state = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;
  while (out.size() < n) {
    const int len = run(rng);
    for (int i = 0; i < len && out.size() < n; ++i) out.push_back(state);
    state = 1.0 - state;
  }
  return out;
}

inline std::vector<double> random_unit(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& v : out) v = u(rng);
  return out;
}

inline Vec4 random_border(std::mt19937_64& rng, double scale = 20.0) {
  std::uniform_real_distribution<double> u(0.0, scale);
  // Multiples of 0.5 keep the arithmetic exact.
  return {std::round(2 * u(rng)) / 2, std::round(2 * u(rng)) / 2, std::round(2 * u(rng)) / 2,
          std::round(2 * u(rng)) / 2};
}

inline std::vector<double> bits(std::uint32_t mask, int length) {
  std::vector<double> out(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) out[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1.0 : 0.0;
  return out;
}

inline bool frames_equal(const FeatureFrame& a, const FeatureFrame& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t t = 0; t < a.size(); ++t) {
    if (a.rows[t].flat() != b.rows[t].flat()) return false;
  }
  return true;
}

}  // namespace rescore::testing
