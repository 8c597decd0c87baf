// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mann_whitney.hpp"
#include "rescore/cli.hpp"
#include "rescore/data.hpp"
#include "rescore/eval.hpp"
#include "rescore/features.hpp"
#include "rescore/joint.hpp"
#include "rescore/pipeline.hpp"
#include "rescore/tree.hpp"
#include "rescore/webster.hpp"
#include "support.hpp"

namespace {

using namespace rescore;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2024);
  std::vector<BorderValues> borders{BorderValues{}};
  for (int i = 0; i < 20; ++i) borders.push_back({testing::random_border(rng), testing::random_border(rng)});
  long checked = 0;
  for (double eps : {0.5, 1.0}) {
    for (int len = 1; len <= 12; ++len) {
      for (std::uint32_t mask = 0; mask < (1u << len); ++mask) {
        const auto s = testing::bits(mask, len);
        for (const auto& b : borders) {
          if (!testing::frames_equal(feature_frame(s, eps, b), features_by_scan(s, eps, b))) {
            return {false, fmt("mismatch at len %.0f mask %.0f eps %.1f", len, mask, eps)};
          }
          ++checked;
        }
      }
    }
  }
  const double secs = seconds_since(start);
  return {secs < 30.0, fmt("%.0f frames, %.2f s (limit 30 s)", static_cast<double>(checked), secs)};
}

Outcome time_reversal() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> length(1, 500);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = length(rng);
    const auto s = trial % 2 ? testing::random_unit(rng, n) : testing::random_binary(rng, n);
    const Vec4 b = testing::random_border(rng);
    for (BorderMode mode : {BorderMode::kAssign, BorderMode::kPrecede}) {
      const std::vector<double> rev(s.rbegin(), s.rend());
      auto expected = last_features(rev, 0.5, b, mode);
      std::reverse(expected.begin(), expected.end());
      if (next_features(s, 0.5, b, mode) != expected) {
        return {false, fmt("trial %.0f differs", trial)};
      }
    }
  }
  return {true, "1000 sequences, both border modes, exact"};
}

Outcome expectation_law() {
  const auto start = Clock::now();
  constexpr std::size_t kT = 20;
  constexpr int kN = 200000;
  std::mt19937_64 rng(99);
  const auto pi = testing::random_unit(rng, kT);
  std::array<std::array<double, 4>, kT> sum{}, sum_sq{};
  std::vector<double> y(kT);
  for (int i = 0; i < kN; ++i) {
    for (std::size_t t = 0; t < kT; ++t) y[t] = std::bernoulli_distribution(pi[t])(rng) ? 1.0 : 0.0;
    const auto l = last_features(y, 1.0);
    for (std::size_t t = 0; t < kT; ++t) {
      for (std::size_t j = 0; j < 4; ++j) {
        sum[t][j] += l[t][j];
        sum_sq[t][j] += l[t][j] * l[t][j];
      }
    }
  }
  const auto expected = last_features(pi, 1.0);
  int within = 0;
  for (std::size_t t = 0; t < kT; ++t) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double mean = sum[t][j] / kN;
      const double var = std::max(0.0, sum_sq[t][j] / kN - mean * mean);
      const double se = std::sqrt(var * kN / (kN - 1) / kN);
      const double diff = std::abs(mean - expected[t][j]);
      if (diff <= 4.0 * se || diff <= 1e-12) ++within;
    }
  }
  const double frac = within / static_cast<double>(kT * 4);
  const double secs = seconds_since(start);
  return {frac >= 0.95 && secs < 120.0,
          fmt("%.0f/80 cells within 4 SE (%.3f), %.1f s", within, frac, secs)};
}

std::vector<EpochSeries> simulated(int count, int epochs, std::uint64_t seed) {
  SimConfig c;
  c.n_participants = count;
  c.mean_night_epochs = epochs;
  c.seed = seed;
  return simulate(c);
}

// Rejects draws where a min() in the combined block is within reach of a
// finite-difference step, since the loss is only piecewise smooth there.
bool has_min_tie(const JointModel& m, const EpochSeries& night) {
  const auto frame = feature_frame(window_probabilities(m, night), night.epoch_len, m.features.borders,
                                   m.features.border_mode);
  for (const auto& row : frame.rows) {
    if (std::abs(row.last[kLenSleep] - row.next[kLenSleep]) < 1e-3) return true;
    if (std::abs(row.last[kLenWake] - row.next[kLenWake]) < 1e-3) return true;
  }
  return false;
}

Outcome gradient_check() {
  double worst = 0.0;
  int redraws = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto nights = simulated(1, 50, seed);
    nights.front().validate();
    JointModel m;
    for (;;) {
      m.window = {-2, 1};
      m.window_layer.weights = Eigen::VectorXd::Zero(4);
      m.rescore_layer.weights = Eigen::VectorXd::Zero(13);
      std::normal_distribution<double> z(0.0, 0.3);
      Eigen::VectorXd theta(m.parameter_count());
      for (auto& v : theta) v = z(rng);
      theta.segment(1, 4) *= 0.05;
      m.set_parameters(theta);
      if (!has_min_tie(m, nights.front())) break;
      ++redraws;
    }
    const auto analytic = loss_and_gradient(m, nights);
    const Eigen::VectorXd theta = m.parameters();
    const double h = 1e-5;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      JointModel plus = m, minus = m;
      Eigen::VectorXd tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      plus.set_parameters(tp);
      minus.set_parameters(tm);
      const double fd = (loss(plus, nights) - loss(minus, nights)) / (2 * h);
      const double a = analytic.gradient[i];
      const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 10 seeds, %.0f tie redraws", worst, redraws)};
}

Outcome init_equivalence() {
  const auto nights = simulated(20, 400, 5);
  PipelineRecipe r;
  r.method = Method::kGlmContinuous;
  const auto sequential = fit_pipeline(r, nights);
  const auto joint = init_joint(r.window, sequential.window_model, *sequential.rescore_model, r.features);
  double worst = 0.0;
  for (const auto& n : nights) {
    const auto a = forward(joint, n);
    const auto b = score_night(sequential, n);
    for (std::size_t t = 0; t < a.size(); ++t) worst = std::max(worst, std::abs(a[t] - b[t]));
  }
  return {worst <= 1e-10, fmt("max |joint - sequential| = %.3g over 20 nights", worst)};
}

Outcome webster_monotonicity() {
  std::mt19937_64 rng(31);
  const auto params = RuleParams::webster_defaults();
  std::uniform_int_distribution<std::size_t> length(1, 400);
  long flipped = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = length(rng);
    const auto s = trial % 2 ? testing::random_bouts(rng, n, 40) : testing::random_binary(rng, n, 0.3);
    const auto result = apply_webster(s, 0.5, params);
    for (std::size_t t = 0; t < n; ++t) {
      if (result.rescored[t] < result.original[t]) return {false, fmt("decrease in trial %.0f", trial)};
      flipped += result.rescored[t] - result.original[t];
    }
  }
  return {true, fmt("10000 sequences, %.0f epochs rescored to wake, none to sleep", static_cast<double>(flipped))};
}

Outcome table_one() {
  const auto start = Clock::now();
  SimConfig c;
  c.n_participants = 200;
  c.seed = 1;
  const auto nights = simulate(c);
  const std::vector<Method> methods{Method::kGlmWindow, Method::kWebster, Method::kGlmContinuous};
  auto auc_at = [&](const WindowSpec& w) {
    PipelineRecipe base;
    base.window = w;
    std::array<double, 3> out{};
    const auto cv = cross_validate_methods(nights, 5, methods, base, 1);
    for (std::size_t i = 0; i < 3; ++i) out[i] = cv[i].pooled.auc;
    return out;
  };
  const auto narrow = auc_at({-5, 2});
  const auto wide = auc_at({-30, 20});
  const double gap_narrow = narrow[2] - narrow[0];
  const double gap_wide = wide[2] - wide[0];
  const bool a = gap_narrow >= 0.01;
  const bool b = narrow[1] >= narrow[0] - 0.005;
  const bool cc = gap_wide < gap_narrow;
  const double secs = seconds_since(start);
  std::ostringstream detail;
  detail << "[-5,2] window " << narrow[0] << " webster " << narrow[1] << " continuous " << narrow[2]
         << "; [-30,20] gap " << gap_wide << " vs " << gap_narrow << "; (a)" << (a ? "ok" : "no")
         << " (b)" << (b ? "ok" : "no") << " (c)" << (cc ? "ok" : "no") << "; " << secs << " s";
  return {a && b && cc && secs < 600.0, detail.str()};
}

Outcome auc_correctness() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> length(2, 200);
  int done = 0;
  while (done < 100) {
    const std::size_t n = length(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    std::uniform_int_distribution<int> level(0, 9);  // coarse levels force ties
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = level(rng) / 9.0;
      labels[i] = static_cast<int>(rng() % 2);
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0 ||
        std::count(labels.begin(), labels.end(), 0) == 0)
      continue;
    const double got = roc(scores, labels).auc;
    const double want = testing::mann_whitney(scores, labels);
    if (got != want) return {false, fmt("instance %.0f: %.17g vs %.17g", done, got, want)};
    ++done;
  }
  const std::vector<int> labels{0, 0, 1, 0, 1, 1};
  const std::vector<double> perfect{0.1, 0.2, 0.9, 0.3, 0.8, 0.7};
  const std::vector<double> constant(labels.size(), 0.4);
  const double p = roc(perfect, labels).auc;
  const double k = roc(constant, labels).auc;
  return {p == 1.0 && k == 0.5, fmt("100 instances exact; perfect %.17g, constant %.17g", p, k)};
}

Outcome rule_recovery() {
  std::ostringstream detail;
  bool ok = true;
  for (double eps : {0.5, 1.0}) {
    std::mt19937_64 rng(61);
    std::vector<std::array<double, column::kCount>> rows;
    std::vector<double> y;
    for (int night = 0; night < 40; ++night) {
      const auto s = testing::random_bouts(rng, 600, static_cast<int>(40 / eps));
      for (const auto& row : feature_frame(s, eps).rows) {
        rows.push_back(row.flat());
        y.push_back(row.combined[kCurLenSleep] < 14.0 ? 1.0 : 0.0);
      }
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), column::kCount);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < column::kCount; ++j)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    const auto tree = fit_tree(x, y, {1, 1});
    const bool split = tree.nodes.size() == 3 && tree.nodes[0].feature == static_cast<int>(column::kCurLenSleep);
    const double thr = tree.nodes[0].threshold;
    ok = ok && split && thr > 13.0 && thr <= 14.0;
    detail << "eps " << eps << ": " << (split ? "cur_len_sleep" : "other") << " <= " << thr << "; ";
  }
  return {ok, detail.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome evaluate_determinism() {
  const fs::path dir = fs::temp_directory_path() / "rescore_acceptance_eval";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ostringstream out, err;
  const std::string data = (dir / "d.csv").string();
  if (cli::run({"simulate", "--seed", "11", "--nights", "40", "--out", data}, out, err) != 0) {
    return {false, "simulate failed: " + err.str()};
  }
  std::array<std::string, 2> tables;
  for (int i = 0; i < 2; ++i) {
    const std::string auc = (dir / ("auc" + std::to_string(i) + ".csv")).string();
    const int code = cli::run({"evaluate", "--in", data, "--seed", "3", "--windows", "-5:2,-30:20",
                               "--epochs", "3", "--auc-out", auc},
                              out, err);
    if (code != 0) return {false, "evaluate failed: " + err.str()};
    tables[static_cast<std::size_t>(i)] = slurp(auc);
  }
  fs::remove_all(dir);
  const auto rows = std::count(tables[0].begin(), tables[0].end(), '\n');
  return {tables[0] == tables[1] && rows == 13,
          fmt("%.0f-line tables, identical: %.0f", static_cast<double>(rows), tables[0] == tables[1])};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 oracle equivalence", oracle_equivalence},
      {"2 time reversal", time_reversal},
      {"3 expectation law", expectation_law},
      {"4 gradient check", gradient_check},
      {"5 init equivalence", init_equivalence},
      {"6 webster monotonicity", webster_monotonicity},
      {"7 synthetic table reproduction", table_one},
      {"8 auc correctness", auc_correctness},
      {"9 rule recovery", rule_recovery},
      {"10 evaluate determinism", evaluate_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << "  (" << o.detail << ")" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
