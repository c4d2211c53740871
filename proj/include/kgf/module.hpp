#pragma once

// The free left Hilbert module A^d with <x, y> = sum_i x_i y_i^*.
//
// Per block k a vector is equivalently an n_k x (n_k d) matrix obtained by
// placing the block-k parts of its components side by side ("stacked"
// form). In that form <x, y> = X Y^* and an operator acts by right
// multiplication with its realization.

#include <kgf/algebra.hpp>

#include <cstddef>
#include <span>
#include <vector>

namespace kgf {

class ModuleVector {
 public:
  /// Throws ShapeError if a component's shape differs from `shape`.
  ModuleVector(AlgebraShape shape, std::vector<AlgebraElement> components);

  static ModuleVector zero(const AlgebraShape& shape, std::size_t rank);
  /// Coordinate vector e_i: component i is 1_A, the rest vanish.
  static ModuleVector basis(const AlgebraShape& shape, std::size_t rank, std::size_t i);
  /// Inverse of `stacked`: one n_k x (n_k rank) matrix per block.
  static ModuleVector from_stacked(const AlgebraShape& shape, std::size_t rank,
                                   std::span<const Mat> stacked);

  const AlgebraShape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return components_.size(); }
  const AlgebraElement& component(std::size_t i) const { return components_.at(i); }
  std::span<const AlgebraElement> components() const noexcept { return components_; }

  Mat stacked(std::size_t k) const;

  ModuleVector& operator+=(const ModuleVector& other);
  ModuleVector& operator-=(const ModuleVector& other);
  friend ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
  friend ModuleVector operator-(ModuleVector a, const ModuleVector& b) { return a -= b; }
  /// Left module action (a . x)_i = a x_i.
  friend ModuleVector operator*(const AlgebraElement& a, const ModuleVector& x);
  friend ModuleVector operator*(cplx s, ModuleVector x);
  friend bool operator==(const ModuleVector& a, const ModuleVector& b);

 private:
  AlgebraShape shape_;
  std::vector<AlgebraElement> components_;
};

/// A-valued inner product, A-linear in the first argument.
AlgebraElement inner(const ModuleVector& x, const ModuleVector& y);

/// sqrt(p_k(<x, x>)).
double vector_seminorm(const ModuleVector& x, std::size_t k);

/// Vector supported in block k whose stacked form there is e_1 v^*, so that
/// <x, x> = e_1 e_1^* in that block and x R x^* picks out v^* R v.
/// `v` has length n_k * rank.
ModuleVector pull_back(const AlgebraShape& shape, std::size_t rank, std::size_t k, const CVec& v);

}  // namespace kgf
