#include <gtest/gtest.h>

#include <random>

#include "rescore/errors.hpp"
#include "rescore/features.hpp"
#include "rescore/tree.hpp"
#include "support.hpp"

namespace rescore {
namespace {

double accuracy(const RuleTree& tree, const Eigen::MatrixXd& x, const std::vector<double>& y) {
  const auto p = predict(tree, x);
  int hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += (p[i] >= 0.5) == (y[i] == 1.0);
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

TEST(FitTree, PureLabelsGiveSingleLeaf) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(20, 3);
  const std::vector<double> y(20, 1.0);
  const auto tree = fit_tree(x, y);
  ASSERT_EQ(tree.nodes.size(), 1u);
  EXPECT_TRUE(tree.nodes[0].is_leaf());
  EXPECT_EQ(tree.nodes[0].probability, 1.0);
}

TEST(FitTree, XorNeedsTwoLevels) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 1, 0, 1, 1;
  const std::vector<double> y{0, 1, 1, 0};
  const auto tree = fit_tree(x, y, {2, 1});
  EXPECT_EQ(accuracy(tree, x, y), 1.0);
  EXPECT_EQ(tree.depth(), 2);
}

TEST(FitTree, MidpointThresholdAndLowestFeatureTieBreak) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 1, 2, 2, 3, 3, 4, 4;  // both columns separate equally well
  const std::vector<double> y{0, 0, 1, 1};
  const auto tree = fit_tree(x, y, {1, 1});
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_EQ(tree.nodes[0].threshold, 2.5);
}

TEST(FitTree, RecoversPlantedBoutLengthRule) {
  std::mt19937_64 rng(41);
  std::vector<std::array<double, column::kCount>> rows;
  std::vector<double> y;
  for (int night = 0; night < 30; ++night) {
    const auto s = testing::random_bouts(rng, 400, 40);
    for (const auto& row : feature_frame(s, 1.0).rows) {
      rows.push_back(row.flat());
      y.push_back(row.combined[kCurLenSleep] < 14.0 ? 1.0 : 0.0);
    }
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), column::kCount);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < column::kCount; ++j) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  const auto tree = fit_tree(x, y, {1, 1});
  ASSERT_EQ(tree.nodes.size(), 3u);
  EXPECT_EQ(tree.nodes[0].feature, static_cast<int>(column::kCurLenSleep));
  EXPECT_GT(tree.nodes[0].threshold, 13.0);
  EXPECT_LE(tree.nodes[0].threshold, 14.0);
}

TEST(FitTree, AccuracyNondecreasingInDepth) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> z;
  Eigen::MatrixXd x(300, 4);
  std::vector<double> y(300);
  for (int i = 0; i < 300; ++i) {
    for (int j = 0; j < 4; ++j) x(i, j) = z(rng);
    y[static_cast<std::size_t>(i)] = (x(i, 0) * x(i, 1) + 0.3 * z(rng) > 0) ? 1.0 : 0.0;
  }
  double previous = 0.0;
  for (int depth = 0; depth <= 6; ++depth) {
    const auto tree = fit_tree(x, y, {depth, 1});
    EXPECT_LE(tree.depth(), depth);
    const double acc = accuracy(tree, x, y);
    EXPECT_GE(acc, previous);
    previous = acc;
  }
}

TEST(FitTree, RejectsBadInput) {
  const Eigen::MatrixXd empty(0, 2);
  const std::vector<double> none;
  EXPECT_THROW(fit_tree(empty, none), DomainError);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  const std::vector<double> y{0, 1, 0};
  EXPECT_THROW(fit_tree(x, y, {2, 2}), DomainError);
}

// Sleep epochs in bouts shorter than 14 minutes are called wake.
RuleTree short_bout_tree() {
  RuleTree t;
  t.num_features = column::kCount;
  t.nodes = {
      {static_cast<int>(column::kScore), 0.5, 1, 2, 0.3, 100},
      {static_cast<int>(column::kCurLenSleep), 14.0, 3, 4, 0.2, 80},
      {-1, 0.0, -1, -1, 0.95, 20},
      {-1, 0.0, -1, -1, 0.8, 10},
      {-1, 0.0, -1, -1, 0.1, 70},
  };
  return t;
}

TEST(RuleTree, ShortSleepBoutPredictsWake) {
  const auto tree = short_bout_tree();
  tree.validate();
  std::array<double, column::kCount> row{};
  row[column::kCurLenSleep] = 10;
  EXPECT_EQ(tree.nodes[3].predicted_class(), 1);
  EXPECT_GE(tree.predict_row(row), 0.5);
  row[column::kCurLenSleep] = 20;
  EXPECT_LT(tree.predict_row(row), 0.5);
}

TEST(RuleTree, ValidateCatchesBrokenStructure) {
  auto tree = short_bout_tree();
  tree.nodes[1].right = 9;
  EXPECT_THROW(tree.validate(), DataError);
  tree = short_bout_tree();
  tree.nodes.push_back({-1, 0.0, -1, -1, 0.5, 0});
  EXPECT_THROW(tree.validate(), DataError);
}

TEST(RuleTree, ArityMismatchThrows) {
  const auto tree = short_bout_tree();
  EXPECT_THROW(predict(tree, Eigen::MatrixXd::Zero(2, 5)), DomainError);
}

TEST(RuleTree, DotNamesFeatures) {
  const auto& names = feature_names();
  const std::vector<std::string_view> v(names.begin(), names.end());
  const auto dot = to_dot(short_bout_tree(), v);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("cur_len_sleep"), std::string::npos);
}

}  // namespace
}  // namespace rescore
