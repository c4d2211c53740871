#pragma once

// Adjointable A-linear maps between free modules.
//
// A module map T: A^d -> A^c is fixed by a d x c array of algebra elements,
// (T x)_j = sum_i x_i t_ij. Per block k the same data is an
// (n_k d) x (n_k c) complex matrix, the realization, with t_ij^(k) as the
// (i, j) sub-block. With vectors in stacked form, applying T is
// X -> X R_T, so a composition realizes as the product of realizations in
// application order and the adjoint realizes as the conjugate transpose.
// Both forms are computed at construction and never change afterwards.

#include <kgf/algebra.hpp>
#include <kgf/module.hpp>
#include <kgf/tolerances.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace kgf {

class ModuleOperator {
 public:
  /// `coeffs` is row-major with domain_rank rows and codomain_rank columns.
  ModuleOperator(AlgebraShape shape, std::size_t domain_rank, std::size_t codomain_rank,
                 std::vector<AlgebraElement> coeffs);

  /// Build from per-block realizations of size (n_k d) x (n_k c).
  static ModuleOperator from_realization(AlgebraShape shape, std::size_t domain_rank,
                                         std::size_t codomain_rank, std::vector<Mat> blocks);
  static ModuleOperator identity(const AlgebraShape& shape, std::size_t rank);
  static ModuleOperator zero(const AlgebraShape& shape, std::size_t domain_rank,
                             std::size_t codomain_rank);

  const AlgebraShape& shape() const noexcept { return shape_; }
  std::size_t domain_rank() const noexcept { return domain_; }
  std::size_t codomain_rank() const noexcept { return codomain_; }
  bool is_square() const noexcept { return domain_ == codomain_; }

  const AlgebraElement& coeff(std::size_t i, std::size_t j) const;
  const Mat& realization(std::size_t k) const { return realization_.at(k); }
  std::span<const Mat> realizations() const noexcept { return realization_; }

  /// Evaluates through the coefficient array.
  ModuleVector apply(const ModuleVector& x) const;
  /// Evaluates through the realization; must agree with apply().
  ModuleVector apply_realized(const ModuleVector& x) const;

  ModuleOperator& operator+=(const ModuleOperator& other);
  ModuleOperator& operator-=(const ModuleOperator& other);
  friend ModuleOperator operator+(ModuleOperator a, const ModuleOperator& b) { return a += b; }
  friend ModuleOperator operator-(ModuleOperator a, const ModuleOperator& b) { return a -= b; }
  friend ModuleOperator operator*(cplx s, const ModuleOperator& a);
  friend bool operator==(const ModuleOperator& a, const ModuleOperator& b);

 private:
  ModuleOperator(AlgebraShape shape, std::size_t domain_rank, std::size_t codomain_rank,
                 std::vector<AlgebraElement> coeffs, std::vector<Mat> realization);

  AlgebraShape shape_;
  std::size_t domain_;
  std::size_t codomain_;
  std::vector<AlgebraElement> coeffs_;
  std::vector<Mat> realization_;
};

/// Per-block realization (the model isomorphism).
std::span<const Mat> realize(const ModuleOperator& t);

ModuleOperator adjoint(const ModuleOperator& t);

/// outer o inner: apply `inner` first. Throws ShapeError when
/// inner.codomain_rank() != outer.domain_rank().
ModuleOperator compose(const ModuleOperator& outer, const ModuleOperator& inner);

/// max over blocks of the spectral norm of the realization.
double uniform_norm(const ModuleOperator& t);

/// Blockwise Moore-Penrose inverse with cut-off tol.rank * sigma_max.
ModuleOperator pinv(const ModuleOperator& t, const Tolerances& tol = {});

/// Orthogonal projector on the codomain whose range is Ran(t).
ModuleOperator range_projection(const ModuleOperator& t, const Tolerances& tol = {});

/// Positive square root of the Hermitian part of a square operator, with
/// eigenvalues at or below rel_cut * lambda_max (per block) dropped.
ModuleOperator psd_sqrt(const ModuleOperator& t, double rel_cut = 0.0);

/// Operator positivity: every realization block is PSD.
PositivityVerdict is_positive(const ModuleOperator& t, const Tolerances& tol = {});

bool is_isometry(const ModuleOperator& w, double tol = 1e-10);    // w* w = I
bool is_coisometry(const ModuleOperator& w, double tol = 1e-10);  // w w* = I

/// sigma_min over blocks of a square operator; 0 when some block is singular.
double smallest_singular_value(const ModuleOperator& t);

/// Spectral gap of the realization: the ratio of the smallest retained to the
/// largest discarded singular value, per block (infinite when nothing is
/// discarded).
struct SpectralGap {
  std::size_t block = 0;
  double smallest_retained = 0.0;
  double largest_discarded = 0.0;
  double ratio = 0.0;
};
std::vector<SpectralGap> spectral_gaps(const ModuleOperator& t, const Tolerances& tol = {});

/// Checks ||F^-1||^-2 <eta, eta> <= <F eta, F eta> <= ||F||^2 <eta, eta>
/// for an invertible square F. Throws NotInvertibleError when some block
/// of F has sigma_min <= tol.rank * sigma_max.
bool check_norm_sandwich(const ModuleOperator& f, const ModuleVector& eta, const Tolerances& tol = {});

/// Smallest lambda with x <= lambda y for positive square operators x, y.
/// `included` is false when Ran(x) is not inside Ran(y) (no finite lambda).
struct Majorization {
  bool included = true;
  double lambda = 0.0;
  double leakage = 0.0;
  std::size_t worst_block = 0;
};
Majorization majorization(const ModuleOperator& x, const ModuleOperator& y, const Tolerances& tol = {});

/// Range inclusion, majorization TT* <= alpha^2 ZZ*, and factorization
/// T = Z U for operators with a common codomain.
struct DouglasCertificate {
  bool range_included = false;          // condition (1)
  bool majorized = false;               // condition (2)
  bool factorizes = false;              // condition (3)
  std::optional<double> alpha_min;      // present iff range_included
  std::optional<ModuleOperator> factor; // pinv(Z) o T, present iff range_included
  double range_defect = 0.0;            // ||(I - P_Z) o T||
  double residual = 0.0;                // ||T - Z o factor||
  bool conditions_agree() const noexcept {
    return range_included == majorized && majorized == factorizes;
  }
};
DouglasCertificate douglas(const ModuleOperator& t, const ModuleOperator& z, const Tolerances& tol = {});

}  // namespace kgf
