#pragma once

#include "esn/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace esn {

/// Name of the generator recorded in run manifests.
inline constexpr const char* kRngName = "mt19937_64";

/// Seeded random source. The engine is std::mt19937_64, whose output stream
/// is fully specified by the standard; the uniform and normal transforms are
/// spelled out here instead of using <random> distributions, whose results
/// are implementation-defined and would break cross-platform reproduction.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal();
    return m;
  }

  Matrix uniform_matrix(Eigen::Index rows, Eigen::Index cols, double lo,
                        double hi) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
    return m;
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent child seed for a named consumer. All randomness in
/// an experiment flows from one root seed through labelled splits, so adding
/// or reordering consumers never perturbs the others.
inline std::uint64_t split_seed(std::uint64_t root, std::string_view label) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64-bit
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(root ^ h);
}

}  // namespace esn
