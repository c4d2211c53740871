#pragma once

// Dense complex kernels shared by the algebra, module and operator layers.
// Everything here works on a single matrix block; callers loop over blocks.

#include <kgf/tolerances.hpp>

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>

namespace kgf {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

namespace linalg {

/// Largest singular value; 0 for an empty matrix.
double spectral_norm(const Mat& m);

Mat hermitian_part(const Mat& m);

struct HermitianEigen {
  RVec values;  // ascending
  Mat vectors;  // columns
};
HermitianEigen eigh(const Mat& m);

struct ThinSvd {
  RVec values;  // descending
  Mat u;
  Mat v;
};
ThinSvd svd(const Mat& m);

/// Count of singular values strictly above rel_tol * sigma_max.
std::size_t numerical_rank(const RVec& descending_values, double rel_tol);
std::size_t numerical_rank(const Mat& m, double rel_tol);

/// Moore-Penrose inverse with relative singular-value cut-off.
Mat pinv(const Mat& m, double rel_tol);

/// Orthogonal projector onto the span of the rows of m, acting by right
/// multiplication on row vectors.
Mat row_space_projector(const Mat& m, double rel_tol);

/// Principal square root of the Hermitian part. Eigenvalues at or below
/// rel_cut * lambda_max (and all negative ones) are set to zero first.
Mat psd_sqrt(const Mat& m, double rel_cut = 0.0);

struct PsdCheck {
  bool hermitian = true;
  bool positive = true;
  double min_eigenvalue = 0.0;
};
/// Hermitian within tol.herm and lambda_min >= -tol.psd * (1 + |m|).
PsdCheck check_psd(const Mat& m, const Tolerances& tol);

/// Smallest lambda with x <= lambda * y for PSD x, y, computed on Ran(y).
/// `included` reports whether Ran(x) lies in Ran(y); when it does not, no
/// finite lambda exists and `lambda` is meaningless.
struct BlockMajorization {
  bool included = true;
  double lambda = 0.0;
  double leakage = 0.0;  // sqrt |(I - P_y) x (I - P_y)|
  std::size_t y_rank = 0;
};
BlockMajorization majorization(const Mat& x, const Mat& y, const Tolerances& tol);

}  // namespace linalg
}  // namespace kgf
