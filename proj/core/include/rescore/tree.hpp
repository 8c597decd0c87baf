#pragma once

// Greedy CART classification trees over rescoring features.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace rescore {

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // rows with value <= threshold go left
  int left = -1;
  int right = -1;
  double probability = 0.0;  // mean label of the training rows reaching this node
  long count = 0;

  bool is_leaf() const { return feature < 0; }
  int predicted_class() const { return probability >= 0.5 ? 1 : 0; }
};

struct RuleTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  int num_features = 0;

  int depth() const;
  double predict_row(std::span<const double> row) const;
  // Checks child indices, finiteness and that every node is reachable.
  void validate() const;
};

struct TreeOptions {
  int max_depth = 3;
  int min_leaf = 1;
};

// Splits minimize weighted Gini impurity over midpoints between sorted
// distinct values; ties go to the lowest feature index, then the lowest
// threshold. Growth stops at max_depth, at pure nodes, or when no split
// leaves min_leaf rows on each side.
RuleTree fit_tree(const Eigen::MatrixXd& x, std::span<const double> labels,
                  const TreeOptions& options = {});

std::vector<double> predict(const RuleTree& tree, const Eigen::MatrixXd& x);

// Graphviz rendering. Feature names default to "x<i>".
std::string to_dot(const RuleTree& tree, std::span<const std::string_view> names = {});

}  // namespace rescore
