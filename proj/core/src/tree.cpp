#include "rescore/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "rescore/errors.hpp"

namespace rescore {

namespace {

double gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 2.0 * p * (1.0 - p);
}

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

class Builder {
 public:
  Builder(const Eigen::MatrixXd& x, std::span<const double> y, const TreeOptions& options)
      : x_(x), y_(y), options_(options) {}

  RuleTree build() {
    std::vector<long> rows(static_cast<std::size_t>(x_.rows()));
    std::iota(rows.begin(), rows.end(), 0L);
    tree_.num_features = static_cast<int>(x_.cols());
    grow(rows, 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<long>& rows, int depth) {
    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double positives = 0.0;
    for (long r : rows) positives += y_[static_cast<std::size_t>(r)];
    const auto total = static_cast<double>(rows.size());
    tree_.nodes[static_cast<std::size_t>(id)].probability = positives / total;
    tree_.nodes[static_cast<std::size_t>(id)].count = static_cast<long>(rows.size());

    const bool pure = positives == 0.0 || positives == total;
    if (pure || depth >= options_.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(options_.min_leaf)) {
      return id;
    }
    const Split best = best_split(rows, positives);
    if (best.feature < 0) {
      return id;
    }

    std::vector<long> left;
    std::vector<long> right;
    for (long r : rows) {
      (x_(r, best.feature) <= best.threshold ? left : right).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split best_split(const std::vector<long>& rows, double positives) const {
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    const auto total = static_cast<double>(rows.size());
    const auto min_leaf = static_cast<std::size_t>(options_.min_leaf);
    std::vector<long> order(rows);
    for (Eigen::Index f = 0; f < x_.cols(); ++f) {
      std::sort(order.begin(), order.end(), [&](long a, long b) { return x_(a, f) < x_(b, f); });
      double left_pos = 0.0;
      for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        left_pos += y_[static_cast<std::size_t>(order[i])];
        const double here = x_(order[i], f);
        const double there = x_(order[i + 1], f);
        if (here == there) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || order.size() - n_left < min_leaf) continue;
        const auto nl = static_cast<double>(n_left);
        const double nr = total - nl;
        const double impurity =
            (nl * gini(left_pos, nl) + nr * gini(positives - left_pos, nr)) / total;
        // Thresholds are visited in increasing order and features in index
        // order, so only a strictly better impurity replaces the incumbent.
        if (impurity < best.impurity - 1e-12) {
          best = {static_cast<int>(f), here + 0.5 * (there - here), impurity};
        }
      }
    }
    return best;
  }

  const Eigen::MatrixXd& x_;
  std::span<const double> y_;
  TreeOptions options_;
  RuleTree tree_;
};

}  // namespace

int RuleTree::depth() const {
  std::function<int(int)> walk = [&](int id) -> int {
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (node.is_leaf()) return 0;
    return 1 + std::max(walk(node.left), walk(node.right));
  };
  return nodes.empty() ? 0 : walk(0);
}

double RuleTree::predict_row(std::span<const double> row) const {
  if (static_cast<int>(row.size()) != num_features) {
    throw DomainError("tree expects " + std::to_string(num_features) + " features, got " +
                      std::to_string(row.size()));
  }
  int id = 0;
  while (!nodes[static_cast<std::size_t>(id)].is_leaf()) {
    const auto& node = nodes[static_cast<std::size_t>(id)];
    id = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes[static_cast<std::size_t>(id)].probability;
}

void RuleTree::validate() const {
  if (nodes.empty()) {
    throw DataError("tree has no nodes");
  }
  std::vector<int> seen(nodes.size(), 0);
  std::vector<int> stack = {0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (id < 0 || static_cast<std::size_t>(id) >= nodes.size()) {
      throw DataError("tree child index out of range");
    }
    if (seen[static_cast<std::size_t>(id)]++) {
      throw DataError("tree node reached twice");
    }
    const auto& node = nodes[static_cast<std::size_t>(id)];
    if (!(node.probability >= 0.0 && node.probability <= 1.0)) {
      throw DataError("tree leaf probability outside [0,1]");
    }
    if (!node.is_leaf()) {
      if (node.feature >= num_features || !std::isfinite(node.threshold)) {
        throw DataError("tree split is invalid");
      }
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw DataError("tree has unreachable nodes");
  }
}

RuleTree fit_tree(const Eigen::MatrixXd& x, std::span<const double> labels,
                  const TreeOptions& options) {
  if (x.rows() == 0) {
    throw DomainError("fit_tree: no rows");
  }
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw DomainError("fit_tree: row and label counts differ");
  }
  if (options.max_depth < 0 || options.min_leaf < 1) {
    throw DomainError("fit_tree: max_depth must be >= 0 and min_leaf >= 1");
  }
  if (x.rows() < 2L * options.min_leaf) {
    throw DomainError("fit_tree: need at least 2 * min_leaf rows");
  }
  if (!x.allFinite()) {
    throw DomainError("fit_tree: non-finite feature value");
  }
  for (double y : labels) {
    if (y != 0.0 && y != 1.0) throw DomainError("fit_tree: labels must be 0 or 1");
  }
  return Builder(x, labels, options).build();
}

std::vector<double> predict(const RuleTree& tree, const Eigen::MatrixXd& x) {
  if (x.cols() != tree.num_features) {
    throw DomainError("tree expects " + std::to_string(tree.num_features) + " features, got " +
                      std::to_string(x.cols()));
  }
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  std::vector<double> row(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
    out[static_cast<std::size_t>(i)] = tree.predict_row(row);
  }
  return out;
}

std::string to_dot(const RuleTree& tree, std::span<const std::string_view> names) {
  std::ostringstream os;
  os << "digraph rule_tree {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const auto& node = tree.nodes[i];
    os << "  n" << i << " [label=\"";
    if (node.is_leaf()) {
      os << (node.predicted_class() == 1 ? "wake" : "sleep") << "\\np=" << node.probability
         << "\\nn=" << node.count;
    } else {
      const auto f = static_cast<std::size_t>(node.feature);
      if (f < names.size()) {
        os << names[f];
      } else {
        os << "x" << f;
      }
      os << " <= " << node.threshold;
    }
    os << "\"];\n";
    if (!node.is_leaf()) {
      os << "  n" << i << " -> n" << node.left << " [label=\"yes\"];\n";
      os << "  n" << i << " -> n" << node.right << " [label=\"no\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace rescore
