#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmsfem {

using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Vertex index triple of a triangle, counter-clockwise.
using Tri = std::array<int, 3>;

/// Error in user-supplied configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure inside the pipeline (CLI exit code 3).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gmsfem
