#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rescore/errors.hpp"
#include "rescore/glm.hpp"

namespace rescore {
namespace {

TEST(FitGlm, SymmetricOneDimensional) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  const std::vector<double> y{0, 1};
  const auto m = fit_glm(x, y, {0.1});
  EXPECT_GT(m.weights[0], 0.0);
  EXPECT_NEAR(m.intercept, 0.0, 1e-9);
}

TEST(FitGlm, UninformativeFeaturesGiveZeroModel) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 2);
  const std::vector<double> y{0, 1, 0, 1, 0, 1};
  const auto m = fit_glm(x, y);
  EXPECT_NEAR(m.intercept, 0.0, 1e-12);
  EXPECT_NEAR(m.weights.norm(), 0.0, 1e-12);
}

TEST(FitGlm, RecoversKnownCoefficients) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = 50000;
  Eigen::MatrixXd x(n, 2);
  std::vector<double> y(n);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = z(rng);
    x(i, 1) = z(rng);
    const double p = sigmoid(0.3 + x(i, 0) - 2.0 * x(i, 1));
    y[static_cast<std::size_t>(i)] = std::bernoulli_distribution(p)(rng) ? 1.0 : 0.0;
  }
  const auto m = fit_glm(x, y);
  EXPECT_NEAR(m.intercept, 0.3, 0.05 * 0.3);
  EXPECT_NEAR(m.weights[0], 1.0, 0.05);
  EXPECT_NEAR(m.weights[1], -2.0, 0.1);
}

TEST(FitGlm, SeparationWithoutPenaltyFails) {
  Eigen::MatrixXd x(4, 1);
  x << -2, -1, 1, 2;
  const std::vector<double> y{0, 0, 1, 1};
  EXPECT_THROW(fit_glm(x, y, {0.0}), ConvergenceError);
  EXPECT_NO_THROW(fit_glm(x, y, {0.1}));
}

TEST(FitGlm, RejectsBadInput) {
  Eigen::MatrixXd x(2, 1);
  x << 1, std::nan("");
  const std::vector<double> y{0, 1};
  EXPECT_THROW(fit_glm(x, y), DomainError);
  x << 1, 2;
  const std::vector<double> short_y{0};
  EXPECT_THROW(fit_glm(x, short_y), DomainError);
  const std::vector<double> bad_y{0, 0.5};
  EXPECT_THROW(fit_glm(x, bad_y), DomainError);
}

class ScaledFeatures : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> z(0.0, 1.0);
    x.resize(2000, 3);
    y.resize(2000);
    for (int i = 0; i < 2000; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = z(rng);
      y[static_cast<std::size_t>(i)] = std::bernoulli_distribution(sigmoid(x(i, 0) - x(i, 2)))(rng);
    }
  }
  Eigen::MatrixXd x;
  std::vector<double> y;
};

TEST_F(ScaledFeatures, DoublingInputsHalvesWeights) {
  const GlmOptions unpenalized{0.0};
  const auto a = fit_glm(x, y, unpenalized);
  const auto b = fit_glm(2.0 * x, y, unpenalized);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(b.weights[j], a.weights[j] / 2, 1e-6);
  const auto pa = predict(a, x);
  const auto pb = predict(b, 2.0 * x);
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_NEAR(pa[i], pb[i], 1e-6);
}

TEST_F(ScaledFeatures, GradientVanishesAtTheFit) {
  const auto m = fit_glm(x, y);
  EXPECT_LT(glm_gradient(m, x, y, GlmOptions{}.l2).norm(), 1e-6);
}

TEST_F(ScaledFeatures, ClassFollowsSignOfLinearPredictor) {
  const auto m = fit_glm(x, y);
  const auto p = predict(m, x);
  const auto eta = m.linear_predictor(x);
  for (std::size_t i = 0; i < p.size(); ++i) {
    ASSERT_GE(p[i], 0.0);
    ASSERT_LE(p[i], 1.0);
    EXPECT_EQ(p[i] >= 0.5, eta[static_cast<Eigen::Index>(i)] >= 0.0);
  }
}

TEST(Predict, ZeroModelIsOneHalf) {
  GlmModel m;
  m.weights = Eigen::VectorXd::Zero(3);
  for (double p : predict(m, Eigen::MatrixXd::Random(5, 3))) EXPECT_EQ(p, 0.5);
}

TEST(Predict, ArityMismatchThrows) {
  GlmModel m;
  m.weights = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(predict(m, Eigen::MatrixXd::Zero(2, 4)), DomainError);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(-1000), 0.0);
  EXPECT_EQ(sigmoid(1000), 1.0);
  EXPECT_NEAR(logit(sigmoid(3.0)), 3.0, 1e-12);
}

TEST(Recipe, NamesRoundTrip) {
  for (Recipe r : {Recipe::kRawWindow, Recipe::kContinuousRescore, Recipe::kBinaryRescore,
                   Recipe::kCustom}) {
    EXPECT_EQ(parse_recipe(recipe_name(r)), r);
  }
}

}  // namespace
}  // namespace rescore
