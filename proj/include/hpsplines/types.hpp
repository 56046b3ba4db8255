/// @file types.hpp
/// @brief Shared scalar/vector/matrix aliases and the error taxonomy.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace hpsplines {

/// Real coordinate vector in a fixed Lie-algebra basis.
using AlgebraVector = Eigen::VectorXd;
/// Real coordinate vector in the dual basis; pairing with AlgebraVector is the
/// coordinate dot product.
using DualVector = Eigen::VectorXd;

using Vec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;
/// Group and algebra elements as matrices.  Entries are complex so that the
/// special unitary groups share the code path of the real groups; for real
/// groups the imaginary parts stay identically zero.
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Raised for invalid problem descriptions: malformed configs, incompatible
/// group/manifold pairs, schedule violations.  The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised for runtime numerical failures: retraction singularities, step-size
/// violations, blow-up, non-convergent solves.  The CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hpsplines
