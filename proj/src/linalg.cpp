#include <kgf/linalg.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace kgf::linalg {

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> solver(m);
  return solver.singularValues()(0);
}

Mat hermitian_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

HermitianEigen eigh(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(hermitian_part(m));
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ThinSvd svd(const Mat& m) {
  if (m.size() == 0) return {RVec(0), Mat(m.rows(), 0), Mat(m.cols(), 0)};
  Eigen::JacobiSVD<Mat> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {solver.singularValues(), solver.matrixU(), solver.matrixV()};
}

std::size_t numerical_rank(const RVec& descending_values, double rel_tol) {
  if (descending_values.size() == 0) return 0;
  const double top = descending_values(0);
  if (!(top > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < descending_values.size(); ++i) {
    if (descending_values(i) > rel_tol * top) ++r;
  }
  return r;
}

std::size_t numerical_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> solver(m);
  return numerical_rank(solver.singularValues(), rel_tol);
}

Mat pinv(const Mat& m, double rel_tol) {
  const ThinSvd s = svd(m);
  const auto r = static_cast<Eigen::Index>(numerical_rank(s.values, rel_tol));
  Mat out = Mat::Zero(m.cols(), m.rows());
  if (r == 0) return out;
  const RVec inv = s.values.head(r).cwiseInverse();
  out = s.v.leftCols(r) * inv.asDiagonal() * s.u.leftCols(r).adjoint();
  return out;
}

Mat row_space_projector(const Mat& m, double rel_tol) {
  const ThinSvd s = svd(m);
  const auto r = static_cast<Eigen::Index>(numerical_rank(s.values, rel_tol));
  if (r == 0) return Mat::Zero(m.cols(), m.cols());
  const Mat v = s.v.leftCols(r);
  return v * v.adjoint();
}

Mat psd_sqrt(const Mat& m, double rel_cut) {
  const HermitianEigen e = eigh(m);
  if (e.values.size() == 0) return m;
  const double cut = std::max(rel_cut * e.values(e.values.size() - 1), 0.0);
  RVec root = e.values;
  for (Eigen::Index i = 0; i < root.size(); ++i) root(i) = root(i) > cut ? std::sqrt(root(i)) : 0.0;
  return e.vectors * root.asDiagonal() * e.vectors.adjoint();
}

PsdCheck check_psd(const Mat& m, const Tolerances& tol) {
  PsdCheck out;
  if (m.size() == 0) return out;
  const double scale = spectral_norm(m);
  const double skew = spectral_norm(m - m.adjoint());
  out.hermitian = skew <= tol.herm * (1.0 + scale);
  const HermitianEigen e = eigh(m);
  out.min_eigenvalue = e.values(0);
  out.positive = out.hermitian && out.min_eigenvalue >= -tol.psd * (1.0 + scale);
  return out;
}

BlockMajorization majorization(const Mat& x, const Mat& y, const Tolerances& tol) {
  BlockMajorization out;
  const HermitianEigen ey = eigh(y);
  const Eigen::Index n = ey.values.size();
  const double top = n > 0 ? std::max(ey.values(n - 1), 0.0) : 0.0;

  // Columns of ey.vectors are ascending; the retained ones are at the end.
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (top > 0.0 && ey.values(i) > tol.rank * top) ++keep;
  }
  out.y_rank = static_cast<std::size_t>(keep);

  const Mat v = ey.vectors.rightCols(keep);
  const Mat proj = v * v.adjoint();
  const Mat outside = Mat::Identity(x.rows(), x.cols()) - proj;
  const double x_norm = spectral_norm(x);
  out.leakage = std::sqrt(spectral_norm(outside * hermitian_part(x) * outside));
  out.included = out.leakage <= tol.eq * (1.0 + std::sqrt(x_norm));
  if (keep == 0) {
    out.lambda = 0.0;
    return out;
  }

  const RVec scale = ey.values.tail(keep).cwiseSqrt().cwiseInverse();
  const Mat w = v * scale.asDiagonal();
  const HermitianEigen reduced = eigh(w.adjoint() * x * w);
  out.lambda = std::max(reduced.values(reduced.values.size() - 1), 0.0);
  return out;
}

}  // namespace kgf::linalg
