#pragma once

namespace kgf {

/// Numerical thresholds. All are relative to the magnitude of the quantity
/// being tested unless noted otherwise.
struct Tolerances {
  double psd = 1e-9;    ///< smallest admissible eigenvalue is -psd * (1 + |a|)
  double herm = 1e-10;  ///< |a - a*| <= herm * (1 + |a|)
  double rank = 1e-10;  ///< singular values below rank * sigma_max count as zero
  double eq = 1e-8;     ///< operator identities: |lhs - rhs| <= eq * (1 + scale)
};

}  // namespace kgf
