#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace npm::approx {

/// Max-subtracted softmax; sums to 1 within 1e-12 for finite logits.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

/// Column-wise versions (one sample per column).
Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits);
Eigen::MatrixXd log_softmax_columns(const Eigen::MatrixXd& logits);

}  // namespace npm::approx
