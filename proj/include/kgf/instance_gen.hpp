#pragma once

// Reproducible random instances. The same GenSpec always yields bit-identical
// operators.

#include <kgf/gframe.hpp>
#include <kgf/random.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kgf {

enum class GenKind { generic, tight, rank_deficient_K, coisometry, isometry, commuting_pair, resolution };
const char* to_string(GenKind kind);
/// Throws std::invalid_argument on an unknown name.
GenKind gen_kind_from_string(const std::string& name);

struct GenSpec {
  std::uint64_t seed = 0;
  AlgebraShape shape{std::vector<int>{1}};
  std::size_t module_rank = 1;
  std::size_t index_count = 1;
  std::vector<std::size_t> codomain_ranks{1};
  GenKind kind = GenKind::generic;

  // Kind-specific knobs.
  double tight_constant = 1.0;        // tight: S = A K K^*
  bool frame_rank_deficient = false;  // generic: S singular
  bool k_in_range = true;             // generic + frame_rank_deficient: Ran(K) inside Ran(S)
  bool oblique = false;               // resolution: non-orthogonal idempotents
  std::size_t target_rank = 0;        // (co)isometry: rank m of the far side, 0 means c + 1
};

struct Instance {
  GFrame frame;  // resolution kind: the family {Psi_i}
  ModuleOperator K;
  std::optional<GFrame> basis;       // coordinate basis, when sum c_i = d
  std::optional<ModuleOperator> W;   // (co)isometry kinds
  std::optional<ModuleOperator> Q;   // commuting_pair: polynomial in K
};

/// Throws InfeasibleError for specs that cannot be met (isometry into a
/// smaller module, tight frames without a matching basis, ...), and
/// ShapeError for non-positive ranks or a codomain list of the wrong length.
Instance generate(const GenSpec& spec);

/// Helpers shared with the verification suite.
ModuleOperator random_operator(Rng& rng, const AlgebraShape& shape, std::size_t d, std::size_t c);
/// Realization with orthonormal rows (W^* W = I) of size (n c) x (n m), m >= c.
ModuleOperator random_isometry(Rng& rng, const AlgebraShape& shape, std::size_t c, std::size_t m);
/// Realization with orthonormal columns (W W^* = I), W : A^m -> A^c, m >= c.
ModuleOperator random_coisometry(Rng& rng, const AlgebraShape& shape, std::size_t m, std::size_t c);
/// Square operator with prescribed per-block singular values in [lo, hi].
ModuleOperator random_invertible(Rng& rng, const AlgebraShape& shape, std::size_t d, double lo, double hi);
/// Orthogonal projector onto a random subspace of codimension `drop` per
/// block (clamped so the rank is never negative).
ModuleOperator random_projector(Rng& rng, const AlgebraShape& shape, std::size_t d, std::size_t drop);
/// Random composition of d into `parts` positive integers.
std::vector<std::size_t> random_partition(Rng& rng, std::size_t d, std::size_t parts);

}  // namespace kgf
