#pragma once

// Finite g-frames {Gamma_i : A^d -> A^{c_i}} and their operators.
//
// The direct sum of the codomains is represented as A^{sum c_i}; member i
// occupies components [offset(i), offset(i) + c_i).

#include <kgf/operator.hpp>

#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

namespace kgf {

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool tight = false;
  std::size_t lower_block = 0;
  std::size_t upper_block = 0;
  ModuleVector witness_low;
  ModuleVector witness_high;
};

class GFrame {
 public:
  /// Throws ShapeError when a member is over another algebra, has a
  /// different domain rank, or when the family is empty.
  explicit GFrame(std::vector<ModuleOperator> members);

  const AlgebraShape& shape() const noexcept { return members_.front().shape(); }
  std::size_t domain_rank() const noexcept { return members_.front().domain_rank(); }
  std::size_t size() const noexcept { return members_.size(); }
  const ModuleOperator& member(std::size_t i) const { return members_.at(i); }
  std::span<const ModuleOperator> members() const noexcept { return members_; }

  /// Prefix sums of the codomain ranks; offsets().back() == total_rank().
  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::size_t total_rank() const noexcept { return offsets_.back(); }
  std::vector<std::size_t> codomain_ranks() const;

  /// S = sum_i Gamma_i^* o Gamma_i, computed once.
  const ModuleOperator& frame_operator() const;
  /// Computed once from the realization of S.
  const FrameBounds& bounds() const;

 private:
  struct Cache {
    std::once_flag s_once;
    std::optional<ModuleOperator> s;
    std::once_flag bounds_once;
    std::optional<FrameBounds> bounds;
  };

  std::vector<ModuleOperator> members_;
  std::vector<std::size_t> offsets_;
  std::shared_ptr<Cache> cache_;
};

/// Stacked analysis operator A^d -> A^{sum c_i}.
ModuleOperator analysis_operator(const GFrame& f);
/// Synthesis operator A^{sum c_i} -> A^d, the adjoint of the analysis operator.
ModuleOperator synthesis_operator(const GFrame& f);

/// Concatenation of Gamma_i x.
ModuleVector analysis(const GFrame& f, const ModuleVector& x);
/// sum_i Gamma_i^*(g_i) for g laid out at the frame's offsets.
ModuleVector synthesis(const GFrame& f, const ModuleVector& g);

const ModuleOperator& frame_operator(const GFrame& f);

/// Extreme eigenvalues of the realization of S over all blocks. The
/// witnesses attain them: sum_i <Gamma_i w, Gamma_i w> = lambda <w, w>.
const FrameBounds& optimal_g_bounds(const GFrame& f);

/// {xi : Gamma_i xi = 0 for all i} = {0}, decided as lambda_min(S) > tol.rank.
bool is_g_complete(const GFrame& f, const Tolerances& tol = {});

/// Coordinate-slice family E_i : A^d -> A^{c_i}. Throws PartitionError
/// unless every c_i >= 1 and sum c_i == d.
GFrame canonical_g_orthonormal_basis(const AlgebraShape& shape, std::size_t d,
                                     std::span<const std::size_t> partition);

/// Q = sum_i Gamma_i^* o E_i. Throws BasisIncompatibleError when E does not
/// match F's index set, codomain ranks and domain, or fails the basis
/// identities.
ModuleOperator g_operator(const GFrame& f, const GFrame& e, const Tolerances& tol = {});

/// Family {E_i o Q^*}, the frame whose g-operator with respect to E is Q.
GFrame frame_from_g_operator(const ModuleOperator& q, const GFrame& e);

/// Tests the three candidate basis axioms separately. The seminorm form,
/// sum_i pbar_k(E_i xi)^2 = pbar_k(xi)^2, is evaluated on `samples` and
/// reported false when there are none.
struct BasisAxiomReport {
  bool delta_condition = false;    // E_i E_j^* = delta_ij I
  bool a_valued_parseval = false;  // sum_i E_i^* E_i = I
  bool seminorm_parseval = false;
  double delta_defect = 0.0;
  double parseval_defect = 0.0;
  double seminorm_defect = 0.0;
};
BasisAxiomReport basis_axiom_diagnostic(const GFrame& e, std::span<const ModuleVector> samples,
                                        double tol = 1e-12);

}  // namespace kgf
