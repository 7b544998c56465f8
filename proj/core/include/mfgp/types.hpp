#pragma once

#include <Eigen/Dense>

namespace mfgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One design point per row, one input dimension per column.
using DesignMatrix = Eigen::MatrixXd;

}  // namespace mfgp
