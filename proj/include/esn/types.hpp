#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace esn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an iterative numeric routine fails to converge or a
/// computation produces non-finite values.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised for malformed files or invalid configuration values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_square(const Matrix& m, const std::string& who) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument(who + ": expected a square matrix, got " +
                                shape_string(m));
  }
}

inline void require_finite(const Matrix& m, const std::string& who) {
  if (!m.allFinite()) {
    throw std::invalid_argument(who + ": matrix (" + shape_string(m) +
                                ") has non-finite entries");
  }
}

inline void require_finite(const Vector& v, const std::string& who) {
  if (!v.allFinite()) {
    throw std::invalid_argument(who + ": vector (length " +
                                std::to_string(v.size()) +
                                ") has non-finite entries");
  }
}

}  // namespace esn
