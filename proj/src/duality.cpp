#include <kgf/duality.hpp>

#include <kgf/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kgf {

namespace {

void require_matching(const GFrame& a, const GFrame& b, const ModuleOperator& k) {
  if (!(a.shape() == b.shape()) || a.size() != b.size() || a.domain_rank() != b.domain_rank() ||
      a.codomain_ranks() != b.codomain_ranks()) {
    throw ShapeError("families differ in index set, codomain ranks or domain");
  }
  if (!(k.shape() == a.shape()) || !k.is_square() || k.domain_rank() != a.domain_rank()) {
    throw ShapeError("K must be a square operator on the families' domain");
  }
}

double dual_bound(const ModuleOperator& k, const Tolerances& tol) { return tol.eq * (1.0 + uniform_norm(k)); }

GFrame map_members(const GFrame& f, auto&& fn) {
  std::vector<ModuleOperator> out;
  out.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(fn(i, f.member(i)));
  return GFrame(std::move(out));
}

ModuleOperator compress(const ModuleOperator& p, const ModuleOperator& m) { return compose(p, compose(m, p)); }

}  // namespace

const char* to_string(DualConstruction c) {
  switch (c) {
    case DualConstruction::given: return "given";
    case DualConstruction::canonical: return "canonical";
    case DualConstruction::combined: return "combined";
    case DualConstruction::transported: return "transported";
  }
  return "given";
}

DualCertificate verify_k_dual(const GFrame& gamma, const GFrame& xi, const ModuleOperator& k,
                              const Tolerances& tol, DualConstruction construction) {
  require_matching(gamma, xi, k);
  ModuleOperator sum = ModuleOperator::zero(k.shape(), k.domain_rank(), k.domain_rank());
  for (std::size_t i = 0; i < gamma.size(); ++i) sum += compose(adjoint(gamma.member(i)), xi.member(i));
  DualCertificate out;
  out.construction = construction;
  out.residual = uniform_norm(sum - k);
  out.is_dual = out.residual <= dual_bound(k, tol);
  return out;
}

CanonicalDual canonical_k_dual(const GFrame& gamma, const ModuleOperator& k, const Tolerances& tol) {
  CanonicalDual out;
  out.certificate.construction = DualConstruction::canonical;
  out.report = is_kg_frame(gamma, k, tol);
  if (!out.report.is_k_g_frame) {
    out.refusal = "not a K-g-frame (C = " + std::to_string(out.report.lower_C) + ")";
    return out;
  }

  const ModuleOperator& s = gamma.frame_operator();
  const ModuleOperator pi_k = range_projection(k, tol);
  const ModuleOperator s_gamma = compose(s, pi_k);
  const ModuleOperator pi_sk = range_projection(compose(s, k), tol);
  const ModuleOperator middle = compose(pi_sk, compose(adjoint(pinv(s_gamma, tol)), k));

  out.smallest_retained = std::numeric_limits<double>::infinity();
  for (const Mat& r : s_gamma.realizations()) {
    const linalg::ThinSvd sv = linalg::svd(r);
    const std::size_t rank = linalg::numerical_rank(sv.values, tol.rank);
    if (rank > 0) {
      out.smallest_retained = std::min(out.smallest_retained, sv.values(static_cast<Eigen::Index>(rank) - 1));
    }
  }
  if (std::isfinite(out.smallest_retained) && out.smallest_retained < 1e3 * tol.rank) {
    out.conditioning_warning = "compression of S to Ran(K) is ill-conditioned: smallest retained singular value " +
                               std::to_string(out.smallest_retained);
  }

  out.dual = map_members(gamma, [&](std::size_t, const ModuleOperator& g) { return compose(g, middle); });
  out.partner = map_members(gamma, [&](std::size_t, const ModuleOperator& g) { return compose(g, pi_k); });
  out.certificate = verify_k_dual(*out.partner, *out.dual, k, tol, DualConstruction::canonical);
  out.residual_unprojected = verify_k_dual(gamma, *out.dual, k, tol).residual;
  return out;
}

GOperatorDual dual_via_g_operators(const GFrame& gamma, const GFrame& xi, const GFrame& e, const ModuleOperator& k,
                                   const Tolerances& tol) {
  require_matching(gamma, xi, k);
  const ModuleOperator q = g_operator(gamma, e, tol);
  const ModuleOperator p = g_operator(xi, e, tol);
  GOperatorDual out;
  out.residual = uniform_norm(k - compose(q, adjoint(p)));
  out.is_dual = out.residual <= dual_bound(k, tol);
  return out;
}

DualCertificate coisometry_transport(const GFrame& gamma, const GFrame& xi, const ModuleOperator& k,
                                     const ModuleOperator& w, const Tolerances& tol) {
  if (!is_coisometry(w, tol.herm)) throw PreconditionError("W o W^* is not the identity");
  for (std::size_t c : gamma.codomain_ranks()) {
    if (c != w.codomain_rank() || !(w.shape() == gamma.shape())) {
      throw ShapeError("W must map into every member's codomain");
    }
  }
  const ModuleOperator ws = adjoint(w);
  const auto transport = [&](std::size_t, const ModuleOperator& g) { return compose(ws, g); };
  return verify_k_dual(map_members(gamma, transport), map_members(xi, transport), k, tol,
                       DualConstruction::transported);
}

CombinedDual combine_duals(const GFrame& gamma, const GFrame& phi, const GFrame& xi, const ModuleOperator& k,
                           const ModuleOperator& t1, const ModuleOperator& t2, const Tolerances& tol) {
  if (!verify_k_dual(gamma, phi, k, tol).is_dual) throw PreconditionError("Phi is not a K-dual of Gamma");
  if (!verify_k_dual(gamma, xi, k, tol).is_dual) throw PreconditionError("Xi is not a K-dual of Gamma");
  GFrame frame = map_members(phi, [&](std::size_t i, const ModuleOperator& p) {
    return compose(p, t1) + compose(xi.member(i), t2);
  });
  DualCertificate cert = verify_k_dual(gamma, frame, k, tol, DualConstruction::combined);
  return CombinedDual{std::move(frame), cert};
}

ZeroOverlap zero_overlap_perturbation(const GFrame& gamma, const GFrame& v, const GFrame& xi, const GFrame& e,
                                      const ModuleOperator& k, const Tolerances& tol) {
  if (!verify_k_dual(gamma, v, k, tol).is_dual) throw PreconditionError("V is not a K-dual of Gamma");
  require_matching(gamma, xi, k);
  const ModuleOperator p = g_operator(gamma, e, tol);
  const ModuleOperator q = g_operator(xi, e, tol);
  ZeroOverlap out;
  out.overlap = uniform_norm(compose(p, adjoint(q)));
  out.zero_overlap = out.overlap <= dual_bound(k, tol);
  const GFrame sum = map_members(v, [&](std::size_t i, const ModuleOperator& m) { return m + xi.member(i); });
  out.certificate = verify_k_dual(gamma, sum, k, tol);
  out.is_dual = out.certificate.is_dual;
  return out;
}

QTransform transform_by_Q(const GFrame& gamma, const ModuleOperator& k, const ModuleOperator& q,
                          const Tolerances& tol) {
  if (!(q.shape() == k.shape()) || !q.is_square() || q.domain_rank() != k.domain_rank()) {
    throw ShapeError("Q must be a square operator on K's domain");
  }
  const double commutator = uniform_norm(compose(q, k) - compose(k, q));
  if (commutator > 1e-10) {
    throw PreconditionError("Q and K do not commute: |QK - KQ| = " + std::to_string(commutator));
  }
  const ModuleOperator qs = adjoint(q);
  GFrame frame = map_members(gamma, [&](std::size_t, const ModuleOperator& g) { return compose(g, qs); });

  QTransform out{std::move(frame)};
  const ModuleOperator predicted = compose(q, compose(gamma.frame_operator(), qs));
  out.s_defect = uniform_norm(out.frame.frame_operator() - predicted);

  out.C = optimal_kg_lower_bound(gamma, k, tol);
  out.D = gamma.bounds().upper;
  const double q_norm = uniform_norm(q);
  const double q_pinv_norm = uniform_norm(pinv(q, tol));
  out.envelope_low = out.C / (q_pinv_norm * q_pinv_norm);
  out.envelope_high = out.D * q_norm * q_norm;

  const ModuleOperator pi = range_projection(q, tol);
  const ModuleOperator s_new = compress(pi, out.frame.frame_operator());
  const ModuleOperator kk = compress(pi, compose(k, adjoint(k)));
  if (uniform_norm(kk) == 0.0) {
    out.measured_low = std::numeric_limits<double>::infinity();
  } else {
    const Majorization maj = majorization(kk, s_new, tol);
    out.measured_low = maj.included && maj.lambda > 0.0 ? 1.0 / maj.lambda : 0.0;
  }
  out.measured_high = uniform_norm(s_new);
  // An infinite envelope bound (K = 0) is met by an infinite measurement.
  const bool low_ok = out.measured_low >= out.envelope_low - 1e-8 ||
                      (std::isinf(out.envelope_low) && std::isinf(out.measured_low));
  out.inside = low_ok && out.measured_high <= out.envelope_high + 1e-8;
  return out;
}

GFrame isometry_left_transform(const GFrame& gamma, const ModuleOperator& w) {
  if (!is_isometry(w)) throw PreconditionError("W^* o W is not the identity");
  return map_members(gamma, [&](std::size_t i, const ModuleOperator& g) {
    if (g.codomain_rank() != w.domain_rank() || !(g.shape() == w.shape())) {
      throw ShapeError("member " + std::to_string(i) + " does not map into W's domain");
    }
    return compose(w, g);
  });
}

}  // namespace kgf
