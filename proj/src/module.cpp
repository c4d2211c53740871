#include <kgf/module.hpp>

#include <kgf/errors.hpp>

#include <cmath>
#include <string>

namespace kgf {

ModuleVector::ModuleVector(AlgebraShape shape, std::vector<AlgebraElement> components)
    : shape_(std::move(shape)), components_(std::move(components)) {
  for (const AlgebraElement& c : components_) {
    if (!(c.shape() == shape_)) throw ShapeError("module vector component has a foreign shape");
  }
}

ModuleVector ModuleVector::zero(const AlgebraShape& shape, std::size_t rank) {
  return ModuleVector(shape, std::vector<AlgebraElement>(rank, AlgebraElement::zero(shape)));
}

ModuleVector ModuleVector::basis(const AlgebraShape& shape, std::size_t rank, std::size_t i) {
  if (i >= rank) throw IndexError("coordinate " + std::to_string(i) + " outside rank " + std::to_string(rank));
  std::vector<AlgebraElement> comps(rank, AlgebraElement::zero(shape));
  comps[i] = AlgebraElement::identity(shape);
  return ModuleVector(shape, std::move(comps));
}

ModuleVector ModuleVector::from_stacked(const AlgebraShape& shape, std::size_t rank,
                                        std::span<const Mat> stacked) {
  if (stacked.size() != shape.num_blocks()) throw ShapeError("stacked form needs one matrix per block");
  std::vector<std::vector<Mat>> per_component(rank);
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    const int n = shape.dim(k);
    const Mat& s = stacked[k];
    if (s.rows() != n || s.cols() != n * static_cast<Eigen::Index>(rank)) {
      throw ShapeError("stacked block " + std::to_string(k) + " has wrong dimensions");
    }
    for (std::size_t i = 0; i < rank; ++i) {
      per_component[i].push_back(s.middleCols(static_cast<Eigen::Index>(i) * n, n));
    }
  }
  std::vector<AlgebraElement> comps;
  comps.reserve(rank);
  for (auto& blocks : per_component) comps.emplace_back(shape, std::move(blocks));
  return ModuleVector(shape, std::move(comps));
}

Mat ModuleVector::stacked(std::size_t k) const {
  const int n = shape_.dim(k);
  Mat out(n, n * static_cast<Eigen::Index>(components_.size()));
  for (std::size_t i = 0; i < components_.size(); ++i) {
    out.middleCols(static_cast<Eigen::Index>(i) * n, n) = components_[i].block(k);
  }
  return out;
}

namespace {
void require_conformal(const ModuleVector& a, const ModuleVector& b) {
  if (!(a.shape() == b.shape()) || a.rank() != b.rank()) {
    throw ShapeError("module vectors differ in shape or rank (" + std::to_string(a.rank()) + " vs " +
                     std::to_string(b.rank()) + ")");
  }
}
}  // namespace

ModuleVector& ModuleVector::operator+=(const ModuleVector& other) {
  require_conformal(*this, other);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] += other.components_[i];
  return *this;
}

ModuleVector& ModuleVector::operator-=(const ModuleVector& other) {
  require_conformal(*this, other);
  for (std::size_t i = 0; i < components_.size(); ++i) components_[i] -= other.components_[i];
  return *this;
}

ModuleVector operator*(const AlgebraElement& a, const ModuleVector& x) {
  if (!(a.shape() == x.shape_)) throw ShapeError("scalar and vector live over different algebras");
  std::vector<AlgebraElement> comps;
  comps.reserve(x.components_.size());
  for (const AlgebraElement& c : x.components_) comps.push_back(a * c);
  return ModuleVector(x.shape_, std::move(comps));
}

ModuleVector operator*(cplx s, ModuleVector x) {
  for (AlgebraElement& c : x.components_) c = s * c;
  return x;
}

bool operator==(const ModuleVector& a, const ModuleVector& b) {
  if (!(a.shape_ == b.shape_) || a.rank() != b.rank()) return false;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (!(a.components_[i] == b.components_[i])) return false;
  }
  return true;
}

AlgebraElement inner(const ModuleVector& x, const ModuleVector& y) {
  require_conformal(x, y);
  AlgebraElement out = AlgebraElement::zero(x.shape());
  for (std::size_t i = 0; i < x.rank(); ++i) out += x.component(i) * y.component(i).adjoint();
  return out;
}

double vector_seminorm(const ModuleVector& x, std::size_t k) {
  return std::sqrt(seminorm(inner(x, x), k));
}

ModuleVector pull_back(const AlgebraShape& shape, std::size_t rank, std::size_t k, const CVec& v) {
  std::vector<Mat> stacked;
  stacked.reserve(shape.num_blocks());
  for (std::size_t b = 0; b < shape.num_blocks(); ++b) {
    const int n = shape.dim(b);
    stacked.push_back(Mat::Zero(n, n * static_cast<Eigen::Index>(rank)));
  }
  if (v.size() != stacked.at(k).cols()) throw ShapeError("pull_back: vector length does not match the block");
  stacked[k].row(0) = v.adjoint();
  return ModuleVector::from_stacked(shape, rank, stacked);
}

}  // namespace kgf
