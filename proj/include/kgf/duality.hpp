#pragma once

// K-dual families: {Xi_i} is a K-dual of {Gamma_i} when
// sum_i Gamma_i^* o Xi_i = K.

#include <kgf/gframe.hpp>
#include <kgf/kgframe.hpp>

#include <optional>
#include <string>

namespace kgf {

enum class DualConstruction { given, canonical, combined, transported };
const char* to_string(DualConstruction c);

struct DualCertificate {
  double residual = 0.0;  // |sum_i Gamma_i^* o Xi_i - K|
  bool is_dual = false;   // residual <= tol.eq * (1 + |K|)
  DualConstruction construction = DualConstruction::given;
};

/// Throws ShapeError when the families differ in size, codomain ranks or
/// domain, or K does not act on that domain.
DualCertificate verify_k_dual(const GFrame& gamma, const GFrame& xi, const ModuleOperator& k,
                              const Tolerances& tol = {},
                              DualConstruction construction = DualConstruction::given);

/// Xi_i = Gamma_i o pi_{S(Ran K)} o (S_Gamma^{-1})^* o K, where S_Gamma is
/// S restricted to Ran(K) (the compression S o pi_{Ran K}) and its inverse
/// is the pseudo-inverse of that compression. The family is a K-dual of
/// {Gamma_i o pi_{Ran K}}, which is what `certificate` checks; the residual
/// against Gamma itself is reported separately and vanishes when Ran(K) is
/// invariant under S (in particular for S invertible and K onto).
struct CanonicalDual {
  std::optional<GFrame> dual;     // absent on refusal
  std::optional<GFrame> partner;  // {Gamma_i o pi_{Ran K}}
  KGFrameReport report;
  DualCertificate certificate;
  double residual_unprojected = 0.0;
  double smallest_retained = 0.0;  // of the compression's realization
  std::optional<std::string> conditioning_warning;
  std::string refusal;
};
CanonicalDual canonical_k_dual(const GFrame& gamma, const ModuleOperator& k, const Tolerances& tol = {});

/// |K - Q o P^*| <= tol.eq * (1 + |K|) for the g-operators Q of gamma and P
/// of xi relative to e.
struct GOperatorDual {
  bool is_dual = false;
  double residual = 0.0;
};
GOperatorDual dual_via_g_operators(const GFrame& gamma, const GFrame& xi, const GFrame& e,
                                   const ModuleOperator& k, const Tolerances& tol = {});

/// Certificate for {W^* o Xi_i} against {W^* o Gamma_i}. W maps into the
/// members' common codomain and must satisfy W o W^* = I, otherwise
/// PreconditionError.
DualCertificate coisometry_transport(const GFrame& gamma, const GFrame& xi, const ModuleOperator& k,
                                     const ModuleOperator& w, const Tolerances& tol = {});

/// {Phi_i o T1 + Xi_i o T2}; PreconditionError unless Phi and Xi are both
/// K-duals of Gamma.
struct CombinedDual {
  GFrame frame;
  DualCertificate certificate;
};
CombinedDual combine_duals(const GFrame& gamma, const GFrame& phi, const GFrame& xi, const ModuleOperator& k,
                           const ModuleOperator& t1, const ModuleOperator& t2, const Tolerances& tol = {});

/// Whether {V_i + Xi_i} is still a K-dual of Gamma, alongside the overlap
/// |P o Q^*| of the g-operators P (of Gamma) and Q (of Xi). The two must
/// agree. PreconditionError unless V is a K-dual of Gamma.
struct ZeroOverlap {
  bool is_dual = false;
  bool zero_overlap = false;
  double overlap = 0.0;
  DualCertificate certificate;
};
ZeroOverlap zero_overlap_perturbation(const GFrame& gamma, const GFrame& v, const GFrame& xi, const GFrame& e,
                                      const ModuleOperator& k, const Tolerances& tol = {});

/// {Gamma_i o Q^*} for Q commuting with K (PreconditionError when
/// |QK - KQ| > 1e-10). Measured bounds are taken on Ran(Q) and compared
/// with [C |pinv(Q)|^-2, D |Q|^2].
struct QTransform {
  GFrame frame;
  double C = 0.0;
  double D = 0.0;
  double envelope_low = 0.0;
  double envelope_high = 0.0;
  double measured_low = 0.0;
  double measured_high = 0.0;
  double s_defect = 0.0;  // |S_new - Q o S o Q^*|
  bool inside = false;
};
QTransform transform_by_Q(const GFrame& gamma, const ModuleOperator& k, const ModuleOperator& q,
                          const Tolerances& tol = {});

/// {W o Gamma_i} for an isometry W (PreconditionError otherwise).
GFrame isometry_left_transform(const GFrame& gamma, const ModuleOperator& w);

}  // namespace kgf
