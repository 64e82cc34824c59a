#pragma once

#include <Eigen/Dense>

namespace crm {

/// Points of R^n (and of the lifted space R^{n*m}) are dense Eigen vectors.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace crm
