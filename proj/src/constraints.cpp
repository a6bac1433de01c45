#include "esn/constraints.hpp"

#include "esn/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace esn {

namespace {
constexpr double kRankTolerance = 1e-12;  // relative to sigma_max
constexpr double kRadiusFloor = 1e-12;
}  // namespace

std::string to_string(ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::Orthogonal:
      return "orthogonal";
    case ConstraintMode::SkewSymmetricUnitSpectrum:
      return "skew-symmetric-unit-spectrum";
    case ConstraintMode::GeneralUnitSpectralRadius:
      return "general-unit-spectral-radius";
  }
  throw std::invalid_argument("unknown ConstraintMode");
}

ConstraintMode constraint_mode_from_string(const std::string& name) {
  if (name == "orthogonal") return ConstraintMode::Orthogonal;
  if (name == "skew-symmetric-unit-spectrum")
    return ConstraintMode::SkewSymmetricUnitSpectrum;
  if (name == "general-unit-spectral-radius")
    return ConstraintMode::GeneralUnitSpectralRadius;
  throw std::invalid_argument(
      "unknown constraint mode '" + name +
      "' (expected one of: orthogonal, skew-symmetric-unit-spectrum, "
      "general-unit-spectral-radius)");
}

double spectral_radius(const Matrix& m) {
  require_square(m, "spectral_radius");
  require_finite(m, "spectral_radius");
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("spectral_radius: eigenvalue solver did not converge on " +
                       shape_string(m) + " matrix");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double largest_singular_value(const Matrix& m) {
  require_square(m, "largest_singular_value");
  require_finite(m, "largest_singular_value");
  Eigen::JacobiSVD<Matrix> svd(m);
  if (svd.info() != Eigen::Success) {
    throw NumericError("largest_singular_value: SVD did not converge on " +
                       shape_string(m) + " matrix");
  }
  return svd.singularValues()(0);
}

double normality_defect(const Matrix& m) {
  require_square(m, "normality_defect");
  require_finite(m, "normality_defect");
  const Matrix commutator = m.transpose() * m - m * m.transpose();
  return commutator.cwiseAbs().maxCoeff();
}

Matrix project_orthogonal(const Matrix& m) {
  require_square(m, "project_orthogonal");
  require_finite(m, "project_orthogonal");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericError("project_orthogonal: SVD did not converge on " +
                       shape_string(m) + " matrix");
  }
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma(0);
  const double sigma_min = sigma(sigma.size() - 1);
  if (sigma_max <= 0.0 || sigma_min < kRankTolerance * sigma_max) {
    throw std::invalid_argument(
        "project_orthogonal: rank-deficient input (sigma_min=" +
        std::to_string(sigma_min) + ", sigma_max=" + std::to_string(sigma_max) +
        "); the nearest orthogonal matrix is ambiguous");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix project_skew_unit(const Matrix& m) {
  require_square(m, "project_skew_unit");
  require_finite(m, "project_skew_unit");
  // a - b == -(b - a) exactly in IEEE arithmetic, so S is exactly skew.
  const Matrix skew = m - m.transpose();
  if (skew.cwiseAbs().maxCoeff() < kRadiusFloor) {
    throw std::invalid_argument(
        "project_skew_unit: degenerate skew part (input is symmetric)");
  }
  const double radius = spectral_radius(skew);
  if (radius < kRadiusFloor) {
    throw std::invalid_argument(
        "project_skew_unit: degenerate skew part (spectral radius ~ 0)");
  }
  return skew / radius;
}

Matrix normalize_spectral_radius(const Matrix& m) {
  const double radius = spectral_radius(m);
  if (radius < kRadiusFloor) {
    throw std::invalid_argument(
        "normalize_spectral_radius: spectral radius " + std::to_string(radius) +
        " is below 1e-12 (nilpotent or near-zero matrix)");
  }
  return m / radius;
}

Matrix apply_constraint(const Matrix& m, ConstraintMode mode) {
  switch (mode) {
    case ConstraintMode::Orthogonal:
      return project_orthogonal(m);
    case ConstraintMode::SkewSymmetricUnitSpectrum:
      return project_skew_unit(m);
    case ConstraintMode::GeneralUnitSpectralRadius:
      return normalize_spectral_radius(m);
  }
  throw std::invalid_argument("apply_constraint: unknown ConstraintMode");
}

Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("random_orthogonal: dimension must be >= 1");
  }
  Rng rng(seed);
  return project_orthogonal(rng.gaussian_matrix(n, n));
}

}  // namespace esn
