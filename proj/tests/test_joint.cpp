#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rescore/data.hpp"
#include "rescore/errors.hpp"
#include "rescore/joint.hpp"
#include "rescore/pipeline.hpp"

namespace rescore {
namespace {

std::vector<EpochSeries> small_nights(int count, int epochs, std::uint64_t seed) {
  SimConfig c;
  c.n_participants = count;
  c.mean_night_epochs = epochs;
  c.seed = seed;
  return simulate(c);
}

JointModel zero_model(const WindowSpec& w = {-2, 1}) {
  JointModel m;
  m.window = w;
  m.window_layer.weights = Eigen::VectorXd::Zero(w.width());
  m.rescore_layer.weights = Eigen::VectorXd::Zero(13);
  return m;
}

JointModel random_model(std::mt19937_64& rng, const WindowSpec& w = {-2, 1}) {
  std::normal_distribution<double> z(0.0, 0.3);
  JointModel m = zero_model(w);
  Eigen::VectorXd theta(m.parameter_count());
  for (auto& v : theta) v = z(rng);
  // Window weights act on raw activity counts, so keep them small.
  theta.segment(1, w.width()) *= 0.05;
  m.set_parameters(theta);
  return m;
}

TEST(JointForward, ZeroModelIsOneHalf) {
  const auto nights = small_nights(1, 60, 1);
  for (double p : forward(zero_model(), nights[0])) EXPECT_EQ(p, 0.5);
}

TEST(JointForward, LogitPassthroughReturnsWindowProbability) {
  std::mt19937_64 rng(1);
  auto m = random_model(rng);
  m.rescore_layer.intercept = 0.0;
  m.rescore_layer.weights.setZero();
  m.rescore_layer.weights[0] = 1.0;
  const auto nights = small_nights(1, 80, 2);
  const auto pi = window_probabilities(m, nights[0]);
  const auto out = forward(m, nights[0]);
  for (std::size_t t = 0; t < pi.size(); ++t) EXPECT_NEAR(out[t], pi[t], 1e-12);
}

TEST(JointForward, SteepWindowLayerGivesBinaryFeatures) {
  std::mt19937_64 rng(2);
  auto m = random_model(rng);
  const auto nights = small_nights(1, 200, 3);
  m.window_layer.intercept = -0.5;
  m.window_layer.weights.setConstant(0.02);
  const auto pi = window_probabilities(m, nights[0]);
  const auto w = binarize(pi);
  m.window_layer.intercept *= 1e3;
  m.window_layer.weights *= 1e3;
  const auto steep = window_probabilities(m, nights[0]);
  bool near_boundary = false;
  for (std::size_t t = 0; t < pi.size(); ++t) {
    near_boundary |= std::abs(pi[t] - 0.5) < 1e-3;
  }
  ASSERT_FALSE(near_boundary);
  const auto soft = feature_frame(steep, nights[0].epoch_len);
  const auto hard = feature_frame(w, nights[0].epoch_len);
  for (std::size_t t = 0; t < pi.size(); ++t) {
    const auto a = soft.rows[t].flat();
    const auto b = hard.rows[t].flat();
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-3);
  }
}

TEST(JointLoss, HalfEverywhereIsLogTwo) {
  const auto nights = small_nights(3, 50, 4);
  EXPECT_NEAR(loss(zero_model(), nights), std::log(2.0), 1e-12);
}

TEST(JointLoss, ConfidentCorrectModelNearZero) {
  // Rescoring layer reads logit(pi); make pi equal the labels by building
  // the activity from them.
  auto nights = small_nights(2, 60, 5);
  for (auto& n : nights)
    for (std::size_t t = 0; t < n.size(); ++t) n.activity[t] = n.labels[t];
  JointModel m = zero_model({0, 0});
  m.window_layer.intercept = -30;
  m.window_layer.weights[0] = 60;
  m.rescore_layer.weights[0] = 1.0;
  EXPECT_LT(loss(m, nights), 1e-5);
}

TEST(JointLoss, RandomModelOnRandomLabels) {
  std::mt19937_64 rng(6);
  auto nights = small_nights(10, 100, 6);
  double total = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    for (auto& n : nights)
      for (auto& y : n.labels) y = static_cast<int>(rng() % 2);
    total += loss(random_model(rng), nights);
  }
  EXPECT_GE(total / 10, std::log(2.0) - 0.05);
}

TEST(JointGradient, MatchesCentralDifferences) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::mt19937_64 rng(seed);
    const auto nights = small_nights(1, 50, seed);
    const auto m = random_model(rng);
    const auto analytic = loss_and_gradient(m, nights);
    EXPECT_DOUBLE_EQ(analytic.loss, loss(m, nights));
    const Eigen::VectorXd theta = m.parameters();
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      const double h = 1e-5;
      JointModel plus = m, minus = m;
      Eigen::VectorXd tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      plus.set_parameters(tp);
      minus.set_parameters(tm);
      const double fd = (loss(plus, nights) - loss(minus, nights)) / (2 * h);
      const double a = analytic.gradient[i];
      const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-6});
      EXPECT_LT(rel, 1e-4) << "seed " << seed << " parameter " << i;
    }
  }
}

TEST(JointGradient, InterceptsVanishForBalancedZeroModel) {
  auto nights = small_nights(1, 40, 7);
  for (std::size_t t = 0; t < nights[0].size(); ++t) nights[0].labels[t] = static_cast<int>(t % 2);
  const auto g = loss_and_gradient(zero_model(), nights).gradient;
  EXPECT_EQ(g[0], 0.0);
  EXPECT_NEAR(g[5], 0.0, 1e-15);
}

TEST(JointGradient, RescoringBlockIsLogisticRegressionGradient) {
  std::mt19937_64 rng(8);
  const auto nights = small_nights(1, 70, 8);
  const auto m = random_model(rng);
  const auto g = loss_and_gradient(m, nights).gradient;
  const auto pi = window_probabilities(m, nights[0]);
  const auto x = continuous_rescoring_inputs(pi, nights[0].epoch_len);
  const std::vector<double> y(nights[0].labels.begin(), nights[0].labels.end());
  const Eigen::VectorXd ascent = glm_gradient(m.rescore_layer, x, y, 0.0);
  const double n = static_cast<double>(y.size());
  for (Eigen::Index j = 0; j < ascent.size(); ++j) {
    EXPECT_NEAR(g[m.window.width() + 1 + j], -ascent[j] / n, 1e-12);
  }
}

class JointTraining : public ::testing::Test {
 protected:
  void SetUp() override {
    nights = small_nights(12, 300, 9);
    PipelineRecipe r;
    r.method = Method::kGlmContinuous;
    sequential = fit_pipeline(r, nights);
    init = init_joint(r.window, sequential.window_model, *sequential.rescore_model);
  }
  std::vector<EpochSeries> nights;
  FittedPipeline sequential;
  JointModel init;
};

TEST_F(JointTraining, InitReproducesSequentialPipeline) {
  for (const auto& n : nights) {
    const auto a = forward(init, n);
    const auto b = score_night(sequential, n);
    for (std::size_t t = 0; t < a.size(); ++t) EXPECT_NEAR(a[t], b[t], 1e-10);
  }
}

TEST_F(JointTraining, InitialLossEqualsSequentialLoss) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& n : nights) {
    const auto p = score_night(sequential, n);
    for (std::size_t t = 0; t < p.size(); ++t) {
      sum -= n.labels[t] ? std::log(p[t]) : std::log1p(-p[t]);
      ++count;
    }
  }
  TrainConfig c;
  c.epochs = 1;
  const auto result = train(init, nights, c);
  EXPECT_NEAR(result.loss_trace.front(), sum / static_cast<double>(count), 1e-10);
}

TEST_F(JointTraining, LossDoesNotRise) {
  TrainConfig c;
  c.epochs = 5;
  std::vector<std::pair<int, double>> logged;
  const auto result = train(init, nights, c, [&](int e, double l) { logged.emplace_back(e, l); });
  ASSERT_EQ(result.loss_trace.size(), 6u);
  ASSERT_EQ(logged.size(), 6u);
  EXPECT_EQ(logged.front().first, 0);
  EXPECT_LE(result.loss_trace.back(), result.loss_trace.front() + 1e-3);
}

TEST_F(JointTraining, ZeroLearningRateKeepsModel) {
  TrainConfig c;
  c.epochs = 2;
  c.learning_rate = 0.0;
  const auto result = train(init, nights, c);
  EXPECT_EQ(result.model.parameters(), init.parameters());
}

TEST_F(JointTraining, DeterministicGivenSeed) {
  TrainConfig c;
  c.epochs = 2;
  const auto a = train(init, nights, c);
  const auto b = train(init, nights, c);
  EXPECT_EQ(a.loss_trace, b.loss_trace);
  EXPECT_EQ(a.model.parameters(), b.model.parameters());
}

TEST(TrainConfig, RejectsInvalidValues) {
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.epochs = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(JointModel, ValidateChecksShapes) {
  JointModel m = zero_model();
  m.rescore_layer.weights = Eigen::VectorXd::Zero(9);
  EXPECT_THROW(m.validate(), DomainError);
  m.features.with_next = false;
  EXPECT_NO_THROW(m.validate());
}

}  // namespace
}  // namespace rescore
