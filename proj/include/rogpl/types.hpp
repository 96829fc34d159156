#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rogpl {

/// Dense row-major matrix used for features, embeddings and parameters.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Label value of a node that carries no class annotation.
inline constexpr int kUnlabeled = -1;
/// Predicted or ground-truth label of a rejected (open-set) node.
inline constexpr int kUnknown = -2;

/// Malformed or inconsistent input file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The training loop cannot continue (empty clean set, divergence).
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rogpl
