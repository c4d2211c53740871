#include <kgf/kgframe.hpp>

#include <kgf/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kgf {

namespace {

// Column of `vectors` with the largest eigenvalue of m, restricted to the
// directions in `basis` (orthonormal columns).
CVec top_direction(const Mat& m, const Mat& basis) {
  const linalg::HermitianEigen e = linalg::eigh(basis.adjoint() * m * basis);
  return basis * e.vectors.col(e.vectors.cols() - 1);
}

KGCounterexample make_counterexample(const GFrame& f, const ModuleOperator& k, const KGLowerBound& lb,
                                     const Tolerances& tol) {
  const std::size_t b = lb.worst_block;
  const Mat& s = f.frame_operator().realization(b);
  const Mat m = compose(k, adjoint(k)).realization(b);
  const linalg::HermitianEigen es = linalg::eigh(s);
  const Eigen::Index n = es.values.size();
  const double top = std::max(es.values(n - 1), 0.0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (top > 0.0 && es.values(i) > tol.rank * top) ++keep;
  }

  CVec v;
  if (!lb.range_included || keep == 0) {
    // Part of Ran(KK^*) the frame operator does not see.
    v = top_direction(m, es.vectors.leftCols(n - keep));
  } else {
    // Extremal direction of the pencil on Ran(S).
    const RVec scale = es.values.tail(keep).cwiseSqrt().cwiseInverse();
    const Mat w = es.vectors.rightCols(keep) * scale.asDiagonal();
    const linalg::HermitianEigen red = linalg::eigh(w.adjoint() * m * w);
    v = w * red.vectors.col(red.vectors.cols() - 1);
    v.normalize();
  }

  ModuleVector xi = pull_back(f.shape(), f.domain_rank(), b, v);
  const ModuleVector kx = adjoint(k).apply(xi);
  const ModuleVector g = analysis(f, xi);
  KGCounterexample out{std::move(xi), b, 0.0, 0.0, 0.0};
  out.k_energy = seminorm(inner(kx, kx), b);
  out.frame_energy = seminorm(inner(g, g), b);
  out.margin = out.k_energy - out.frame_energy;
  return out;
}

void require_square_on(const GFrame& f, const ModuleOperator& k) {
  if (!(k.shape() == f.shape()) || k.domain_rank() != f.domain_rank() || !k.is_square()) {
    throw ShapeError("K must be a square operator on the frame's domain");
  }
}

// Eigenvalue cut for the square root of S, matching the pencil's cut on S.
ModuleOperator frame_root(const GFrame& f, const Tolerances& tol) {
  return psd_sqrt(f.frame_operator(), tol.rank);
}

}  // namespace

KGLowerBound kg_lower_bound(const GFrame& f, const ModuleOperator& k, const Tolerances& tol) {
  require_square_on(f, k);
  KGLowerBound out;
  if (uniform_norm(k) == 0.0) {
    out.C = std::numeric_limits<double>::infinity();
    out.degenerate = true;
    return out;
  }
  const Majorization maj = majorization(compose(k, adjoint(k)), f.frame_operator(), tol);
  out.range_included = maj.included;
  out.leakage = maj.leakage;
  out.worst_block = maj.worst_block;
  out.C = maj.included && maj.lambda > 0.0 ? 1.0 / maj.lambda : 0.0;
  return out;
}

double optimal_kg_lower_bound(const GFrame& f, const ModuleOperator& k, const Tolerances& tol) {
  return kg_lower_bound(f, k, tol).C;
}

KGFrameReport is_kg_frame(const GFrame& f, const ModuleOperator& k, const Tolerances& tol) {
  KGFrameReport out;
  out.pencil = kg_lower_bound(f, k, tol);
  out.lower_C = out.pencil.C;
  out.upper_D = f.bounds().upper;
  out.degenerate = out.pencil.degenerate;
  out.route = KGRoute::pencil;
  out.is_k_g_frame = out.lower_C > tol.rank && std::isfinite(out.upper_D);
  out.douglas = douglas(k, frame_root(f, tol), tol);
  if (!out.is_k_g_frame) out.counterexample = make_counterexample(f, k, out.pencil, tol);
  return out;
}

KGFrameReport is_kg_frame(const GFrame& f, const ModuleOperator& k, const GFrame& e, const Tolerances& tol) {
  KGFrameReport out = is_kg_frame(f, k, tol);
  out.route = KGRoute::range_inclusion;
  out.is_k_g_frame = kg_via_range(f, k, e, tol);
  if (out.is_k_g_frame) {
    out.counterexample.reset();
  } else if (!out.counterexample) {
    out.counterexample = make_counterexample(f, k, out.pencil, tol);
  }
  return out;
}

bool kg_via_range(const GFrame& f, const ModuleOperator& k, const GFrame& e, const Tolerances& tol) {
  require_square_on(f, k);
  return douglas(k, g_operator(f, e, tol), tol).range_included;
}

TightnessReport tightness_check(const GFrame& f, const ModuleOperator& k, const Tolerances& tol) {
  require_square_on(f, k);
  TightnessReport out;
  const ModuleOperator m = compose(k, adjoint(k));
  const ModuleOperator& s = f.frame_operator();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t b = 0; b < f.shape().num_blocks(); ++b) {
    num += (m.realization(b).adjoint() * s.realization(b)).trace().real();
    den += m.realization(b).squaredNorm();
  }
  const double s_norm = uniform_norm(s);
  if (den > 0.0) {
    out.fitted_A = num / den;
    out.residual = uniform_norm(cplx(out.fitted_A) * m - s);
    out.tight = out.fitted_A > tol.rank && out.residual <= tol.eq * (1.0 + s_norm);
  } else {
    out.residual = s_norm;
  }
  if (out.tight) out.A = out.fitted_A;

  const ModuleOperator t = synthesis_operator(f);
  out.range_equal = douglas(k, t, tol).range_included && douglas(t, k, tol).range_included;
  return out;
}

SqrtFactorReport sqrt_factor_check(const GFrame& f, const ModuleOperator& k, const Tolerances& tol) {
  SqrtFactorReport out;
  out.kg = is_kg_frame(f, k, tol);
  const ModuleOperator root = frame_root(f, tol);
  out.douglas = douglas(k, root, tol);
  if (!out.kg.is_k_g_frame) {
    out.refusal = "not a K-g-frame: C = " + std::to_string(out.kg.lower_C) +
                  ", range defect = " + std::to_string(out.douglas.range_defect);
    return out;
  }
  out.U = compose(pinv(root, tol), k);
  out.residual = uniform_norm(k - compose(root, *out.U));
  out.factorizes = out.residual <= tol.eq * (1.0 + uniform_norm(k));
  if (!out.factorizes) out.refusal = "factorization residual " + std::to_string(out.residual) + " above tolerance";
  return out;
}

QuotientReport quotient_bounded(const ModuleOperator& f, const ModuleOperator& t, const Tolerances& tol) {
  if (!(f.shape() == t.shape()) || f.domain_rank() != t.domain_rank()) {
    throw ShapeError("quotient needs operators with a common domain");
  }
  QuotientReport out;
  out.well_defined = true;
  for (std::size_t b = 0; b < f.shape().num_blocks(); ++b) {
    const Mat& rt = t.realization(b);
    const Mat& rf = f.realization(b);
    Mat joint(rt.rows(), rt.cols() + rf.cols());
    joint << rt, rf;
    const std::size_t r_t = linalg::numerical_rank(rt, tol.rank);
    const std::size_t r_j = linalg::numerical_rank(joint, tol.rank);
    out.rank_t += r_t;
    out.rank_joint += r_j;
    if (r_j != r_t) out.well_defined = false;
  }
  const Majorization maj = majorization(compose(adjoint(f), f), compose(adjoint(t), t), tol);
  out.bounded = out.well_defined && maj.included;
  if (out.bounded) out.beta = std::sqrt(maj.lambda);
  return out;
}

double resolution_violation(const GFrame& psi, const ModuleVector& zeta, bool realized) {
  double worst = -std::numeric_limits<double>::infinity();
  if (!realized) {
    ModuleVector total = ModuleVector::zero(psi.shape(), zeta.rank());
    AlgebraElement rhs = AlgebraElement::zero(psi.shape());
    for (const ModuleOperator& p : psi.members()) {
      const ModuleVector a = p.apply(zeta);
      rhs += inner(a, a);
      total += a;
    }
    const AlgebraElement gap = rhs - inner(total, total);
    for (std::size_t b = 0; b < psi.shape().num_blocks(); ++b) {
      worst = std::max(worst, -linalg::eigh(gap.block(b)).values(0));
    }
    return worst;
  }
  for (std::size_t b = 0; b < psi.shape().num_blocks(); ++b) {
    const Mat z = zeta.stacked(b);
    Mat total = Mat::Zero(z.rows(), z.cols());
    Mat rhs = Mat::Zero(z.rows(), z.rows());
    for (const ModuleOperator& p : psi.members()) {
      const Mat a = z * p.realization(b);
      rhs += a * a.adjoint();
      total += a;
    }
    const Mat gap = rhs - total * total.adjoint();
    worst = std::max(worst, -linalg::eigh(gap).values(0));
  }
  return worst;
}

ResolutionReport resolution_check(const GFrame& psi, const ModuleOperator& k, const Tolerances& tol) {
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!psi.member(i).is_square()) {
      throw ShapeError("resolution member " + std::to_string(i) + " is not square");
    }
  }
  require_square_on(psi, k);
  ResolutionReport out;
  ModuleOperator sum = ModuleOperator::zero(psi.shape(), psi.domain_rank(), psi.domain_rank());
  double scale = 1.0;
  for (const ModuleOperator& p : psi.members()) {
    sum += p;
    scale += uniform_norm(p);
  }
  out.sum_defect = uniform_norm(sum - ModuleOperator::identity(psi.shape(), psi.domain_rank()));
  out.is_resolution = out.sum_defect <= 1e-10 * scale;
  out.bessel_D = psi.bounds().upper;
  if (!out.is_resolution) return out;

  out.kg = is_kg_frame(psi, k, tol);

  ResolutionAudit& audit = out.audit;
  const ModuleOperator& s = psi.frame_operator();
  audit.min_eigenvalue = std::numeric_limits<double>::infinity();
  CVec v;
  for (std::size_t b = 0; b < psi.shape().num_blocks(); ++b) {
    const linalg::HermitianEigen e = linalg::eigh(s.realization(b));
    if (e.values(0) < audit.min_eigenvalue) {
      audit.min_eigenvalue = e.values(0);
      audit.block = b;
      v = e.vectors.col(0);
    }
  }
  audit.estimate_holds = audit.min_eigenvalue >= 1.0 - tol.psd * (1.0 + out.bessel_D);
  if (audit.estimate_holds) return out;

  const ModuleVector zeta = pull_back(psi.shape(), psi.domain_rank(), audit.block, v);
  ModuleVector xi = pinv(adjoint(k), tol).apply(zeta);
  const ModuleOperator ks = adjoint(k);
  audit.violation = resolution_violation(psi, ks.apply(xi), false);
  audit.violation_realized = resolution_violation(psi, ks.apply_realized(xi), true);
  audit.reevaluation_agrees = std::abs(audit.violation - audit.violation_realized) <= 1e-10;
  audit.xi = std::move(xi);
  return out;
}

}  // namespace kgf
