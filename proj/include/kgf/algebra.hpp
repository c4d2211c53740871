#pragma once

// The model algebra: a finite direct sum of full complex matrix algebras
// M_{n_1} (+) ... (+) M_{n_m}. Block k carries the C*-seminorm p_k, the
// spectral norm of that block.

#include <kgf/linalg.hpp>
#include <kgf/tolerances.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace kgf {

class AlgebraShape {
 public:
  /// Throws ShapeError unless every dimension is >= 1 and there is at least
  /// one block.
  explicit AlgebraShape(std::vector<int> block_dims);

  std::size_t num_blocks() const noexcept { return dims_.size(); }
  int dim(std::size_t k) const;
  std::span<const int> dims() const noexcept { return dims_; }

  bool operator==(const AlgebraShape&) const = default;

 private:
  std::vector<int> dims_;
};

class AlgebraElement {
 public:
  /// Throws ShapeError when a block is not n_k x n_k.
  AlgebraElement(AlgebraShape shape, std::vector<Mat> blocks);

  static AlgebraElement zero(const AlgebraShape& shape);
  static AlgebraElement identity(const AlgebraShape& shape);
  static AlgebraElement scalar(const AlgebraShape& shape, cplx value);

  const AlgebraShape& shape() const noexcept { return shape_; }
  std::size_t num_blocks() const noexcept { return blocks_.size(); }
  const Mat& block(std::size_t k) const;
  std::span<const Mat> blocks() const noexcept { return blocks_; }

  AlgebraElement adjoint() const;

  AlgebraElement& operator+=(const AlgebraElement& other);
  AlgebraElement& operator-=(const AlgebraElement& other);

  friend AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
  friend AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
  friend AlgebraElement operator*(cplx s, AlgebraElement a);

  /// Exact blockwise equality.
  friend bool operator==(const AlgebraElement& a, const AlgebraElement& b);

 private:
  AlgebraShape shape_;
  std::vector<Mat> blocks_;
};

/// p_k(a): spectral norm of block k. Throws IndexError for k out of range.
double seminorm(const AlgebraElement& a, std::size_t k);

/// max_k p_k(a), the C*-norm of the direct sum.
double max_seminorm(const AlgebraElement& a);

/// Membership certificate for the positive cone.
struct PositivityVerdict {
  bool is_positive = true;
  std::size_t worst_block = 0;
  double min_eigenvalue = 0.0;
};

/// Shared by algebra elements and operator realizations.
PositivityVerdict positivity_of_blocks(std::span<const Mat> blocks, const Tolerances& tol);

PositivityVerdict is_positive(const AlgebraElement& a, const Tolerances& tol = {});

/// a <= b in the order of the positive cone. Throws ShapeError on mismatch.
bool leq(const AlgebraElement& a, const AlgebraElement& b, const Tolerances& tol = {});

}  // namespace kgf
