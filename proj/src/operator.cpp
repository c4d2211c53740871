#include <kgf/operator.hpp>

#include <kgf/errors.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kgf {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

std::vector<Mat> assemble(const AlgebraShape& shape, std::size_t d, std::size_t c,
                          const std::vector<AlgebraElement>& coeffs) {
  std::vector<Mat> out;
  out.reserve(shape.num_blocks());
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    const Eigen::Index n = shape.dim(k);
    Mat r(n * idx(d), n * idx(c));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        r.block(idx(i) * n, idx(j) * n, n, n) = coeffs[i * c + j].block(k);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AlgebraElement> extract(const AlgebraShape& shape, std::size_t d, std::size_t c,
                                    const std::vector<Mat>& blocks) {
  std::vector<AlgebraElement> coeffs;
  coeffs.reserve(d * c);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      std::vector<Mat> parts;
      parts.reserve(shape.num_blocks());
      for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
        const Eigen::Index n = shape.dim(k);
        parts.push_back(blocks[k].block(idx(i) * n, idx(j) * n, n, n));
      }
      coeffs.emplace_back(shape, std::move(parts));
    }
  }
  return coeffs;
}

void require_same_space(const ModuleOperator& a, const ModuleOperator& b, const char* what) {
  if (!(a.shape() == b.shape()) || a.domain_rank() != b.domain_rank() ||
      a.codomain_rank() != b.codomain_rank()) {
    throw ShapeError(std::string(what) + ": operators map between different modules");
  }
}

void require_square(const ModuleOperator& t, const char* what) {
  if (!t.is_square()) throw ShapeError(std::string(what) + ": operator must be square");
}

template <class F>
ModuleOperator map_blocks(const ModuleOperator& t, std::size_t d, std::size_t c, F&& f) {
  std::vector<Mat> out;
  out.reserve(t.shape().num_blocks());
  for (const Mat& r : t.realizations()) out.push_back(f(r));
  return ModuleOperator::from_realization(t.shape(), d, c, std::move(out));
}

}  // namespace

ModuleOperator::ModuleOperator(AlgebraShape shape, std::size_t domain_rank, std::size_t codomain_rank,
                               std::vector<AlgebraElement> coeffs)
    : shape_(std::move(shape)), domain_(domain_rank), codomain_(codomain_rank), coeffs_(std::move(coeffs)) {
  if (domain_ == 0 || codomain_ == 0) throw ShapeError("module ranks must be positive");
  if (coeffs_.size() != domain_ * codomain_) {
    throw ShapeError("operator needs " + std::to_string(domain_ * codomain_) + " coefficients, got " +
                     std::to_string(coeffs_.size()));
  }
  for (const AlgebraElement& a : coeffs_) {
    if (!(a.shape() == shape_)) throw ShapeError("operator coefficient has a foreign shape");
  }
  realization_ = assemble(shape_, domain_, codomain_, coeffs_);
}

ModuleOperator::ModuleOperator(AlgebraShape shape, std::size_t domain_rank, std::size_t codomain_rank,
                               std::vector<AlgebraElement> coeffs, std::vector<Mat> realization)
    : shape_(std::move(shape)),
      domain_(domain_rank),
      codomain_(codomain_rank),
      coeffs_(std::move(coeffs)),
      realization_(std::move(realization)) {}

ModuleOperator ModuleOperator::from_realization(AlgebraShape shape, std::size_t domain_rank,
                                                std::size_t codomain_rank, std::vector<Mat> blocks) {
  if (domain_rank == 0 || codomain_rank == 0) throw ShapeError("module ranks must be positive");
  if (blocks.size() != shape.num_blocks()) throw ShapeError("realization needs one matrix per block");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Eigen::Index n = shape.dim(k);
    if (blocks[k].rows() != n * idx(domain_rank) || blocks[k].cols() != n * idx(codomain_rank)) {
      throw ShapeError("realization block " + std::to_string(k) + " has wrong dimensions");
    }
  }
  auto coeffs = extract(shape, domain_rank, codomain_rank, blocks);
  return ModuleOperator(std::move(shape), domain_rank, codomain_rank, std::move(coeffs), std::move(blocks));
}

ModuleOperator ModuleOperator::identity(const AlgebraShape& shape, std::size_t rank) {
  std::vector<AlgebraElement> coeffs(rank * rank, AlgebraElement::zero(shape));
  for (std::size_t i = 0; i < rank; ++i) coeffs[i * rank + i] = AlgebraElement::identity(shape);
  return ModuleOperator(shape, rank, rank, std::move(coeffs));
}

ModuleOperator ModuleOperator::zero(const AlgebraShape& shape, std::size_t domain_rank,
                                    std::size_t codomain_rank) {
  return ModuleOperator(shape, domain_rank, codomain_rank,
                        std::vector<AlgebraElement>(domain_rank * codomain_rank, AlgebraElement::zero(shape)));
}

const AlgebraElement& ModuleOperator::coeff(std::size_t i, std::size_t j) const {
  if (i >= domain_ || j >= codomain_) throw IndexError("coefficient index out of range");
  return coeffs_[i * codomain_ + j];
}

ModuleVector ModuleOperator::apply(const ModuleVector& x) const {
  if (!(x.shape() == shape_) || x.rank() != domain_) {
    throw ShapeError("operator with domain rank " + std::to_string(domain_) + " applied to a rank " +
                     std::to_string(x.rank()) + " vector");
  }
  std::vector<AlgebraElement> out(codomain_, AlgebraElement::zero(shape_));
  for (std::size_t j = 0; j < codomain_; ++j) {
    for (std::size_t i = 0; i < domain_; ++i) out[j] += x.component(i) * coeffs_[i * codomain_ + j];
  }
  return ModuleVector(shape_, std::move(out));
}

ModuleVector ModuleOperator::apply_realized(const ModuleVector& x) const {
  if (!(x.shape() == shape_) || x.rank() != domain_) throw ShapeError("operator applied to a foreign vector");
  std::vector<Mat> stacked;
  stacked.reserve(shape_.num_blocks());
  for (std::size_t k = 0; k < shape_.num_blocks(); ++k) stacked.push_back(x.stacked(k) * realization_[k]);
  return ModuleVector::from_stacked(shape_, codomain_, stacked);
}

ModuleOperator& ModuleOperator::operator+=(const ModuleOperator& other) {
  require_same_space(*this, other, "operator sum");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  for (std::size_t k = 0; k < realization_.size(); ++k) realization_[k] += other.realization_[k];
  return *this;
}

ModuleOperator& ModuleOperator::operator-=(const ModuleOperator& other) {
  require_same_space(*this, other, "operator difference");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  for (std::size_t k = 0; k < realization_.size(); ++k) realization_[k] -= other.realization_[k];
  return *this;
}

ModuleOperator operator*(cplx s, const ModuleOperator& a) {
  ModuleOperator out = a;
  for (AlgebraElement& c : out.coeffs_) c = s * c;
  for (Mat& r : out.realization_) r *= s;
  return out;
}

bool operator==(const ModuleOperator& a, const ModuleOperator& b) {
  if (!(a.shape_ == b.shape_) || a.domain_ != b.domain_ || a.codomain_ != b.codomain_) return false;
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (!(a.coeffs_[i] == b.coeffs_[i])) return false;
  }
  return true;
}

std::span<const Mat> realize(const ModuleOperator& t) { return t.realizations(); }

ModuleOperator adjoint(const ModuleOperator& t) {
  const std::size_t d = t.domain_rank();
  const std::size_t c = t.codomain_rank();
  std::vector<AlgebraElement> coeffs;
  coeffs.reserve(d * c);
  for (std::size_t j = 0; j < c; ++j) {
    for (std::size_t i = 0; i < d; ++i) coeffs.push_back(t.coeff(i, j).adjoint());
  }
  return ModuleOperator(t.shape(), c, d, std::move(coeffs));
}

ModuleOperator compose(const ModuleOperator& outer, const ModuleOperator& inner) {
  if (!(outer.shape() == inner.shape())) throw ShapeError("compose: operators over different algebras");
  if (inner.codomain_rank() != outer.domain_rank()) {
    throw ShapeError("compose: inner codomain rank " + std::to_string(inner.codomain_rank()) +
                     " does not match outer domain rank " + std::to_string(outer.domain_rank()));
  }
  std::vector<Mat> out;
  out.reserve(inner.shape().num_blocks());
  for (std::size_t k = 0; k < inner.shape().num_blocks(); ++k) {
    out.push_back(inner.realization(k) * outer.realization(k));
  }
  return ModuleOperator::from_realization(inner.shape(), inner.domain_rank(), outer.codomain_rank(),
                                          std::move(out));
}

double uniform_norm(const ModuleOperator& t) {
  double out = 0.0;
  for (const Mat& r : t.realizations()) out = std::max(out, linalg::spectral_norm(r));
  return out;
}

ModuleOperator pinv(const ModuleOperator& t, const Tolerances& tol) {
  return map_blocks(t, t.codomain_rank(), t.domain_rank(),
                    [&](const Mat& r) { return linalg::pinv(r, tol.rank); });
}

ModuleOperator range_projection(const ModuleOperator& t, const Tolerances& tol) {
  return map_blocks(t, t.codomain_rank(), t.codomain_rank(),
                    [&](const Mat& r) { return linalg::row_space_projector(r, tol.rank); });
}

ModuleOperator psd_sqrt(const ModuleOperator& t, double rel_cut) {
  require_square(t, "psd_sqrt");
  return map_blocks(t, t.domain_rank(), t.domain_rank(),
                    [rel_cut](const Mat& r) { return linalg::psd_sqrt(r, rel_cut); });
}

PositivityVerdict is_positive(const ModuleOperator& t, const Tolerances& tol) {
  require_square(t, "is_positive");
  return positivity_of_blocks(t.realizations(), tol);
}

bool is_isometry(const ModuleOperator& w, double tol) {
  const ModuleOperator gram = compose(adjoint(w), w);
  return uniform_norm(gram - ModuleOperator::identity(w.shape(), w.domain_rank())) <= tol;
}

bool is_coisometry(const ModuleOperator& w, double tol) {
  const ModuleOperator gram = compose(w, adjoint(w));
  return uniform_norm(gram - ModuleOperator::identity(w.shape(), w.codomain_rank())) <= tol;
}

double smallest_singular_value(const ModuleOperator& t) {
  require_square(t, "smallest_singular_value");
  double out = std::numeric_limits<double>::infinity();
  for (const Mat& r : t.realizations()) {
    const linalg::ThinSvd s = linalg::svd(r);
    out = std::min(out, s.values(s.values.size() - 1));
  }
  return out;
}

std::vector<SpectralGap> spectral_gaps(const ModuleOperator& t, const Tolerances& tol) {
  std::vector<SpectralGap> out;
  for (std::size_t k = 0; k < t.shape().num_blocks(); ++k) {
    const linalg::ThinSvd s = linalg::svd(t.realization(k));
    const std::size_t r = linalg::numerical_rank(s.values, tol.rank);
    SpectralGap g;
    g.block = k;
    g.smallest_retained = r > 0 ? s.values(idx(r) - 1) : 0.0;
    g.largest_discarded = r < static_cast<std::size_t>(s.values.size()) ? s.values(idx(r)) : 0.0;
    if (g.largest_discarded > 0.0) {
      g.ratio = g.smallest_retained / g.largest_discarded;
    } else {
      g.ratio = std::numeric_limits<double>::infinity();
    }
    out.push_back(g);
  }
  return out;
}

bool check_norm_sandwich(const ModuleOperator& f, const ModuleVector& eta, const Tolerances& tol) {
  require_square(f, "check_norm_sandwich");
  std::vector<Mat> inverse;
  for (std::size_t k = 0; k < f.shape().num_blocks(); ++k) {
    const Mat& r = f.realization(k);
    const linalg::ThinSvd s = linalg::svd(r);
    if (!(s.values(s.values.size() - 1) > tol.rank * s.values(0))) {
      throw NotInvertibleError("block " + std::to_string(k) + " of the operator is singular");
    }
    inverse.push_back(Eigen::FullPivLU<Mat>(r).inverse());
  }
  const ModuleOperator f_inv =
      ModuleOperator::from_realization(f.shape(), f.domain_rank(), f.domain_rank(), std::move(inverse));
  const double inv_norm = uniform_norm(f_inv);
  const double norm = uniform_norm(f);

  const AlgebraElement base = inner(eta, eta);
  const ModuleVector image = f.apply(eta);
  const AlgebraElement mid = inner(image, image);
  const AlgebraElement low = cplx(1.0 / (inv_norm * inv_norm)) * base;
  const AlgebraElement high = cplx(norm * norm) * base;
  return leq(low, mid, tol) && leq(mid, high, tol);
}

Majorization majorization(const ModuleOperator& x, const ModuleOperator& y, const Tolerances& tol) {
  require_square(x, "majorization");
  require_same_space(x, y, "majorization");
  Majorization out;
  double worst_leak = -1.0;
  for (std::size_t k = 0; k < x.shape().num_blocks(); ++k) {
    const linalg::BlockMajorization m = linalg::majorization(x.realization(k), y.realization(k), tol);
    if (!m.included && out.included) {
      out.included = false;
      out.worst_block = k;
    }
    if (out.included && m.lambda >= out.lambda) {
      out.lambda = m.lambda;
      out.worst_block = k;
    }
    if (!m.included && m.leakage > worst_leak && !out.included) {
      worst_leak = m.leakage;
      out.worst_block = k;
    }
    out.leakage = std::max(out.leakage, m.leakage);
    if (m.included) out.lambda = std::max(out.lambda, m.lambda);
  }
  return out;
}

DouglasCertificate douglas(const ModuleOperator& t, const ModuleOperator& z, const Tolerances& tol) {
  if (!(t.shape() == z.shape()) || t.codomain_rank() != z.codomain_rank()) {
    throw ShapeError("douglas: T and Z need a common codomain");
  }
  DouglasCertificate cert;
  const double t_norm = uniform_norm(t);
  const double bound = tol.eq * (1.0 + t_norm);

  // (1) range inclusion through the SVD-based projector onto Ran(Z).
  const ModuleOperator p_z = range_projection(z, tol);
  const ModuleOperator outside = ModuleOperator::identity(z.shape(), z.codomain_rank()) - p_z;
  cert.range_defect = uniform_norm(compose(outside, t));
  cert.range_included = cert.range_defect <= bound;

  // (2) majorization TT* <= alpha^2 ZZ*, through the eigendecomposition of ZZ*.
  const ModuleOperator ttstar = compose(t, adjoint(t));
  const ModuleOperator zzstar = compose(z, adjoint(z));
  const Majorization maj = majorization(ttstar, zzstar, tol);
  if (maj.included) {
    const ModuleOperator gap = cplx(maj.lambda) * zzstar - ttstar;
    cert.majorized = is_positive(gap, tol).is_positive;
  }

  // (3) factorization with the minimal-norm factor pinv(Z) o T.
  const ModuleOperator factor = compose(pinv(z, tol), t);
  cert.residual = uniform_norm(t - compose(z, factor));
  cert.factorizes = cert.residual <= bound;

  if (cert.range_included) {
    cert.alpha_min = std::sqrt(maj.lambda);
    cert.factor = factor;
  }
  return cert;
}

}  // namespace kgf
