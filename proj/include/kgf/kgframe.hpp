#pragma once

// K-g-frames: families with C <K^* xi, K^* xi> <= sum_i <Gamma_i xi, Gamma_i xi>
// <= D <xi, xi>. The lower inequality is the operator order C K K^* <= S;
// all constants come from that form.

#include <kgf/gframe.hpp>

#include <optional>
#include <string>

namespace kgf {

enum class KGRoute { pencil, range_inclusion };

/// Largest C with C K K^* <= S. Directions outside Ran(KK^*) carry no
/// constraint. C is +infinity (degenerate) for K = 0 and exactly 0 when
/// Ran(K) is not inside Ran(S).
struct KGLowerBound {
  double C = 0.0;
  bool degenerate = false;
  bool range_included = true;
  double leakage = 0.0;
  std::size_t worst_block = 0;
};
KGLowerBound kg_lower_bound(const GFrame& f, const ModuleOperator& k, const Tolerances& tol = {});
double optimal_kg_lower_bound(const GFrame& f, const ModuleOperator& k, const Tolerances& tol = {});

/// A direction on which the lower inequality fails: with <xi, xi> = e_1 e_1^*
/// in `block`, k_energy = p(<K^* xi, K^* xi>) and frame_energy =
/// p(sum_i <Gamma_i xi, Gamma_i xi>); margin = k_energy - frame_energy > 0.
struct KGCounterexample {
  ModuleVector xi;
  std::size_t block = 0;
  double k_energy = 0.0;
  double frame_energy = 0.0;
  double margin = 0.0;
};

struct KGFrameReport {
  bool is_k_g_frame = false;
  double lower_C = 0.0;
  double upper_D = 0.0;
  KGRoute route = KGRoute::pencil;
  bool degenerate = false;
  KGLowerBound pencil;
  /// Douglas data for K against S^{1/2}; Ran(K) inside Ran(S^{1/2}) is the
  /// range form of the lower inequality.
  DouglasCertificate douglas;
  std::optional<KGCounterexample> counterexample;
};

/// Verdict from the pencil: true iff C > tol.rank (or K = 0).
KGFrameReport is_kg_frame(const GFrame& f, const ModuleOperator& k, const Tolerances& tol = {});
/// Same constants, verdict from Ran(K) inside Ran(Q) for the g-operator Q of
/// f relative to e. Throws BasisIncompatibleError like g_operator.
KGFrameReport is_kg_frame(const GFrame& f, const ModuleOperator& k, const GFrame& e,
                          const Tolerances& tol = {});

bool kg_via_range(const GFrame& f, const ModuleOperator& k, const GFrame& e, const Tolerances& tol = {});

/// Tight means A K K^* = T T^* (= S) for a scalar A > 0. A is the least
/// squares fit; range_equal is Ran(K) = Ran(T) by Douglas in both directions.
struct TightnessReport {
  bool tight = false;
  std::optional<double> A;
  double fitted_A = 0.0;
  double residual = 0.0;  // |A KK^* - S|
  bool range_equal = false;
};
TightnessReport tightness_check(const GFrame& f, const ModuleOperator& k, const Tolerances& tol = {});

/// K = S^{1/2} o U with U = pinv(S^{1/2}) o K, or a refusal.
struct SqrtFactorReport {
  bool factorizes = false;
  std::optional<ModuleOperator> U;
  double residual = 0.0;  // |K - S^{1/2} o U|, meaningful when factorizes
  KGFrameReport kg;
  DouglasCertificate douglas;
  std::string refusal;
};
SqrtFactorReport sqrt_factor_check(const GFrame& f, const ModuleOperator& k, const Tolerances& tol = {});

/// The quotient [F/T]: T x -> F x for maps with a common domain.
struct QuotientReport {
  bool well_defined = false;  // Ker(T) inside Ker(F)
  bool bounded = false;       // F^* F <= beta^2 T^* T
  std::optional<double> beta;
  std::size_t rank_t = 0;
  std::size_t rank_joint = 0;
};
QuotientReport quotient_bounded(const ModuleOperator& f, const ModuleOperator& t, const Tolerances& tol = {});

/// Resolution of the identity {Psi_i} with sum Psi_i = I, tested as a
/// K-g-frame. The audit examines the estimate
///   <sum a_i, sum a_i> <= sum <a_i, a_i>,   a_i = Psi_i K^* xi,
/// which is what carries the conclusion in the usual argument. It holds for
/// every xi iff sum_i Psi_i^* Psi_i >= I; when it does not, the audit keeps a
/// violating xi together with the violation evaluated twice, once through
/// coefficients and once through realizations.
struct ResolutionAudit {
  bool estimate_holds = true;
  double min_eigenvalue = 0.0;  // of sum Psi_i^* Psi_i, compared with 1
  std::optional<ModuleVector> xi;
  std::size_t block = 0;
  double violation = 0.0;            // -lambda_min(rhs - lhs), coefficient path
  double violation_realized = 0.0;   // same quantity, realization path
  bool reevaluation_agrees = true;   // |violation - violation_realized| <= 1e-10
};
struct ResolutionReport {
  bool is_resolution = false;
  double sum_defect = 0.0;  // |sum Psi_i - I|
  double bessel_D = 0.0;
  std::optional<KGFrameReport> kg;  // absent when the resolution is rejected
  ResolutionAudit audit;
};
/// Throws ShapeError when a member is not square.
ResolutionReport resolution_check(const GFrame& psi, const ModuleOperator& k, const Tolerances& tol = {});

/// -lambda_min(rhs - lhs) for lhs = <sum a_i, sum a_i>, rhs = sum <a_i, a_i>,
/// a_i = Psi_i(zeta); positive means the estimate fails. `realized` selects
/// evaluation through realizations instead of coefficients.
double resolution_violation(const GFrame& psi, const ModuleVector& zeta, bool realized);

}  // namespace kgf
