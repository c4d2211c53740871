#include <kgf/algebra.hpp>

#include <kgf/errors.hpp>

#include <limits>
#include <string>

namespace kgf {

AlgebraShape::AlgebraShape(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw ShapeError("algebra needs at least one block");
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 1) {
      throw ShapeError("block " + std::to_string(k) + " has dimension " + std::to_string(dims_[k]));
    }
  }
}

int AlgebraShape::dim(std::size_t k) const {
  if (k >= dims_.size()) {
    throw IndexError("block index " + std::to_string(k) + " out of range for " +
                     std::to_string(dims_.size()) + " blocks");
  }
  return dims_[k];
}

AlgebraElement::AlgebraElement(AlgebraShape shape, std::vector<Mat> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (blocks_.size() != shape_.num_blocks()) {
    throw ShapeError("element has " + std::to_string(blocks_.size()) + " blocks, shape has " +
                     std::to_string(shape_.num_blocks()));
  }
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const int n = shape_.dim(k);
    if (blocks_[k].rows() != n || blocks_[k].cols() != n) {
      throw ShapeError("block " + std::to_string(k) + " must be " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraShape& shape) {
  return scalar(shape, cplx(0.0, 0.0));
}

AlgebraElement AlgebraElement::identity(const AlgebraShape& shape) {
  return scalar(shape, cplx(1.0, 0.0));
}

AlgebraElement AlgebraElement::scalar(const AlgebraShape& shape, cplx value) {
  std::vector<Mat> blocks;
  blocks.reserve(shape.num_blocks());
  for (int n : shape.dims()) blocks.push_back(value * Mat::Identity(n, n));
  return AlgebraElement(shape, std::move(blocks));
}

const Mat& AlgebraElement::block(std::size_t k) const {
  if (k >= blocks_.size()) {
    throw IndexError("block index " + std::to_string(k) + " out of range");
  }
  return blocks_[k];
}

AlgebraElement AlgebraElement::adjoint() const {
  std::vector<Mat> out;
  out.reserve(blocks_.size());
  for (const Mat& b : blocks_) out.push_back(b.adjoint());
  return AlgebraElement(shape_, std::move(out));
}

namespace {
void require_same_shape(const AlgebraShape& a, const AlgebraShape& b) {
  if (!(a == b)) throw ShapeError("algebra shapes differ");
}
}  // namespace

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& other) {
  require_same_shape(shape_, other.shape_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] += other.blocks_[k];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& other) {
  require_same_shape(shape_, other.shape_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] -= other.blocks_[k];
  return *this;
}

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_shape(a.shape_, b.shape_);
  std::vector<Mat> out;
  out.reserve(a.blocks_.size());
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) out.push_back(a.blocks_[k] * b.blocks_[k]);
  return AlgebraElement(a.shape_, std::move(out));
}

AlgebraElement operator*(cplx s, AlgebraElement a) {
  for (Mat& b : a.blocks_) b *= s;
  return a;
}

bool operator==(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.shape_ == b.shape_)) return false;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) {
    if (a.blocks_[k] != b.blocks_[k]) return false;
  }
  return true;
}

double seminorm(const AlgebraElement& a, std::size_t k) {
  return linalg::spectral_norm(a.block(k));
}

double max_seminorm(const AlgebraElement& a) {
  double out = 0.0;
  for (std::size_t k = 0; k < a.num_blocks(); ++k) out = std::max(out, seminorm(a, k));
  return out;
}

PositivityVerdict positivity_of_blocks(std::span<const Mat> blocks, const Tolerances& tol) {
  // worst_block: first non-Hermitian block, otherwise the block holding the
  // smallest eigenvalue.
  PositivityVerdict out;
  if (blocks.empty()) return out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  bool skew_found = false;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const linalg::PsdCheck c = linalg::check_psd(blocks[k], tol);
    if (!c.positive) out.is_positive = false;
    if (!c.hermitian && !skew_found) {
      skew_found = true;
      out.worst_block = k;
    }
    if (c.min_eigenvalue < out.min_eigenvalue) {
      out.min_eigenvalue = c.min_eigenvalue;
      if (!skew_found) out.worst_block = k;
    }
  }
  return out;
}

PositivityVerdict is_positive(const AlgebraElement& a, const Tolerances& tol) {
  return positivity_of_blocks(a.blocks(), tol);
}

bool leq(const AlgebraElement& a, const AlgebraElement& b, const Tolerances& tol) {
  require_same_shape(a.shape(), b.shape());
  return is_positive(b - a, tol).is_positive;
}

}  // namespace kgf
