#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

namespace rescore {

struct AdamParameters {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moment estimates with bias correction. Minimizes.
class Adam {
 public:
  Adam(Eigen::Index size, const AdamParameters& params)
      : params_(params), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& x, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = params_.beta1 * m_ + (1.0 - params_.beta1) * grad;
    v_ = params_.beta2 * v_ + (1.0 - params_.beta2) * grad.cwiseProduct(grad);
    const double m_corr = 1.0 - std::pow(params_.beta1, static_cast<double>(t_));
    const double v_corr = 1.0 - std::pow(params_.beta2, static_cast<double>(t_));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      x[i] -= params_.learning_rate * (m_[i] / m_corr) /
              (std::sqrt(v_[i] / v_corr) + params_.epsilon);
    }
  }

  std::size_t iterations() const { return t_; }

 private:
  AdamParameters params_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::size_t t_ = 0;
};

}  // namespace rescore
