#include <kgf/gframe.hpp>

#include <kgf/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kgf {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

FrameBounds compute_bounds(const GFrame& f) {
  const ModuleOperator& s = f.frame_operator();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t lo_block = 0;
  std::size_t hi_block = 0;
  CVec lo_vec;
  CVec hi_vec;
  for (std::size_t k = 0; k < f.shape().num_blocks(); ++k) {
    const linalg::HermitianEigen e = linalg::eigh(s.realization(k));
    const Eigen::Index last = e.values.size() - 1;
    if (e.values(0) < lo) {
      lo = e.values(0);
      lo_block = k;
      lo_vec = e.vectors.col(0);
    }
    if (e.values(last) > hi) {
      hi = e.values(last);
      hi_block = k;
      hi_vec = e.vectors.col(last);
    }
  }
  lo = std::max(lo, 0.0);
  hi = std::max(hi, 0.0);
  const std::size_t d = f.domain_rank();
  return FrameBounds{lo,
                     hi,
                     hi - lo <= 1e-8 * hi,
                     lo_block,
                     hi_block,
                     pull_back(f.shape(), d, lo_block, lo_vec),
                     pull_back(f.shape(), d, hi_block, hi_vec)};
}

double max_defect(const ModuleOperator& a, const ModuleOperator& b) { return uniform_norm(a - b); }

}  // namespace

GFrame::GFrame(std::vector<ModuleOperator> members)
    : members_(std::move(members)), cache_(std::make_shared<Cache>()) {
  if (members_.empty()) throw ShapeError("a g-frame needs at least one member");
  offsets_.reserve(members_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    const ModuleOperator& m = members_[i];
    if (!(m.shape() == members_.front().shape()) || m.domain_rank() != members_.front().domain_rank()) {
      throw ShapeError("member " + std::to_string(i) + " does not share the frame's domain");
    }
    offsets_.push_back(offsets_.back() + m.codomain_rank());
  }
}

std::vector<std::size_t> GFrame::codomain_ranks() const {
  std::vector<std::size_t> out;
  out.reserve(members_.size());
  for (const ModuleOperator& m : members_) out.push_back(m.codomain_rank());
  return out;
}

const ModuleOperator& GFrame::frame_operator() const {
  std::call_once(cache_->s_once, [this] {
    ModuleOperator s = ModuleOperator::zero(shape(), domain_rank(), domain_rank());
    for (const ModuleOperator& g : members_) s += compose(adjoint(g), g);
    cache_->s.emplace(std::move(s));
  });
  return *cache_->s;
}

const FrameBounds& GFrame::bounds() const {
  std::call_once(cache_->bounds_once, [this] { cache_->bounds.emplace(compute_bounds(*this)); });
  return *cache_->bounds;
}

ModuleOperator analysis_operator(const GFrame& f) {
  const std::size_t d = f.domain_rank();
  std::vector<Mat> blocks;
  for (std::size_t k = 0; k < f.shape().num_blocks(); ++k) {
    const Eigen::Index n = f.shape().dim(k);
    Mat r(n * idx(d), n * idx(f.total_rank()));
    for (std::size_t i = 0; i < f.size(); ++i) {
      const Mat& m = f.member(i).realization(k);
      r.middleCols(n * idx(f.offsets()[i]), m.cols()) = m;
    }
    blocks.push_back(std::move(r));
  }
  return ModuleOperator::from_realization(f.shape(), d, f.total_rank(), std::move(blocks));
}

ModuleOperator synthesis_operator(const GFrame& f) { return adjoint(analysis_operator(f)); }

ModuleVector analysis(const GFrame& f, const ModuleVector& x) {
  std::vector<AlgebraElement> out;
  out.reserve(f.total_rank());
  for (const ModuleOperator& g : f.members()) {
    const ModuleVector y = g.apply(x);
    out.insert(out.end(), y.components().begin(), y.components().end());
  }
  return ModuleVector(f.shape(), std::move(out));
}

ModuleVector synthesis(const GFrame& f, const ModuleVector& g) {
  if (!(g.shape() == f.shape()) || g.rank() != f.total_rank()) {
    throw ShapeError("synthesis expects a vector of rank " + std::to_string(f.total_rank()));
  }
  ModuleVector out = ModuleVector::zero(f.shape(), f.domain_rank());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto first = g.components().begin() + static_cast<std::ptrdiff_t>(f.offsets()[i]);
    const auto last = g.components().begin() + static_cast<std::ptrdiff_t>(f.offsets()[i + 1]);
    const ModuleVector gi(f.shape(), std::vector<AlgebraElement>(first, last));
    out += adjoint(f.member(i)).apply(gi);
  }
  return out;
}

const ModuleOperator& frame_operator(const GFrame& f) { return f.frame_operator(); }

const FrameBounds& optimal_g_bounds(const GFrame& f) { return f.bounds(); }

bool is_g_complete(const GFrame& f, const Tolerances& tol) { return f.bounds().lower > tol.rank; }

GFrame canonical_g_orthonormal_basis(const AlgebraShape& shape, std::size_t d,
                                     std::span<const std::size_t> partition) {
  if (partition.empty()) throw PartitionError("partition is empty");
  std::size_t total = 0;
  for (std::size_t c : partition) {
    if (c == 0) throw PartitionError("partition entries must be positive");
    total += c;
  }
  if (total != d) {
    throw PartitionError("partition sums to " + std::to_string(total) + ", module rank is " + std::to_string(d));
  }
  std::vector<ModuleOperator> members;
  std::size_t offset = 0;
  for (std::size_t c : partition) {
    std::vector<AlgebraElement> coeffs(d * c, AlgebraElement::zero(shape));
    for (std::size_t j = 0; j < c; ++j) coeffs[(offset + j) * c + j] = AlgebraElement::identity(shape);
    members.emplace_back(shape, d, c, std::move(coeffs));
    offset += c;
  }
  return GFrame(std::move(members));
}

ModuleOperator g_operator(const GFrame& f, const GFrame& e, const Tolerances& tol) {
  if (!(f.shape() == e.shape()) || f.size() != e.size() || f.domain_rank() != e.domain_rank() ||
      f.codomain_ranks() != e.codomain_ranks()) {
    throw BasisIncompatibleError("basis does not match the frame's index set, codomains or domain");
  }
  const BasisAxiomReport axioms = basis_axiom_diagnostic(e, {}, tol.herm);
  if (!axioms.delta_condition || !axioms.a_valued_parseval) {
    throw BasisIncompatibleError("family is not a g-orthonormal basis");
  }
  ModuleOperator q = ModuleOperator::zero(f.shape(), f.domain_rank(), f.domain_rank());
  for (std::size_t i = 0; i < f.size(); ++i) q += compose(adjoint(f.member(i)), e.member(i));
  return q;
}

GFrame frame_from_g_operator(const ModuleOperator& q, const GFrame& e) {
  const ModuleOperator qs = adjoint(q);
  std::vector<ModuleOperator> members;
  members.reserve(e.size());
  for (const ModuleOperator& ei : e.members()) members.push_back(compose(ei, qs));
  return GFrame(std::move(members));
}

BasisAxiomReport basis_axiom_diagnostic(const GFrame& e, std::span<const ModuleVector> samples, double tol) {
  BasisAxiomReport out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = 0; j < e.size(); ++j) {
      const ModuleOperator g = compose(e.member(i), adjoint(e.member(j)));
      const double defect =
          i == j ? max_defect(g, ModuleOperator::identity(e.shape(), e.member(i).codomain_rank()))
                 : uniform_norm(g);
      out.delta_defect = std::max(out.delta_defect, defect);
    }
  }
  out.delta_condition = out.delta_defect <= tol;

  out.parseval_defect = max_defect(e.frame_operator(), ModuleOperator::identity(e.shape(), e.domain_rank()));
  out.a_valued_parseval = out.parseval_defect <= tol;

  for (const ModuleVector& xi : samples) {
    for (std::size_t k = 0; k < e.shape().num_blocks(); ++k) {
      double sum = 0.0;
      for (const ModuleOperator& ei : e.members()) {
        const double p = vector_seminorm(ei.apply(xi), k);
        sum += p * p;
      }
      const double p = vector_seminorm(xi, k);
      out.seminorm_defect = std::max(out.seminorm_defect, std::abs(sum - p * p));
    }
  }
  // Sums of squared norms lose about half the digits of the inputs.
  out.seminorm_parseval = !samples.empty() && out.seminorm_defect <= std::sqrt(tol);
  return out;
}

}  // namespace kgf
