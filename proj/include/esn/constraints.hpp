#pragma once

#include "esn/types.hpp"

#include <cstdint>
#include <string>

namespace esn {

/// Which manifold the recurrent matrix is forced back onto after each
/// gradient update.
enum class ConstraintMode {
  Orthogonal,
  SkewSymmetricUnitSpectrum,
  GeneralUnitSpectralRadius,
};

std::string to_string(ConstraintMode mode);
ConstraintMode constraint_mode_from_string(const std::string& name);

/// Largest |lambda| over the complex spectrum of a real square matrix.
double spectral_radius(const Matrix& m);

/// Largest singular value (spectral norm). Never smaller than the spectral
/// radius, up to floating tolerance.
double largest_singular_value(const Matrix& m);

/// Max-abs-entry norm of W^T W - W W^T. Zero (up to floating tolerance) iff
/// the matrix is normal, in which case spectral radius and largest singular
/// value coincide.
double normality_defect(const Matrix& m);

/// Polar factor U V^T of the SVD: the Frobenius-nearest orthogonal matrix.
/// Rejects rank-deficient inputs (sigma_min < 1e-12 * sigma_max), for which
/// the nearest orthogonal matrix is not unique.
Matrix project_orthogonal(const Matrix& m);

/// (m - m^T) scaled so its largest |eigenvalue| is 1. The result is exactly
/// skew-symmetric entrywise. Rejects symmetric inputs (degenerate skew part).
Matrix project_skew_unit(const Matrix& m);

/// m divided by its spectral radius; the result has spectral radius 1.
/// Rejects matrices whose spectral radius is below 1e-12 (near-nilpotent).
Matrix normalize_spectral_radius(const Matrix& m);

/// Dispatches to the projection that enforces the given mode.
Matrix apply_constraint(const Matrix& m, ConstraintMode mode);

/// Random orthogonal matrix: polar factor of a standard-Gaussian matrix.
/// Deterministic per seed.
Matrix random_orthogonal(Eigen::Index n, std::uint64_t seed);

}  // namespace esn
