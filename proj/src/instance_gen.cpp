#include <kgf/instance_gen.hpp>

#include <kgf/errors.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kgf {

namespace {

Eigen::Index idx(std::size_t v) { return static_cast<Eigen::Index>(v); }

template <class F>
ModuleOperator from_blocks(const AlgebraShape& shape, std::size_t d, std::size_t c, F&& make) {
  std::vector<Mat> blocks;
  blocks.reserve(shape.num_blocks());
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) blocks.push_back(make(static_cast<Eigen::Index>(shape.dim(k))));
  return ModuleOperator::from_realization(shape, d, c, std::move(blocks));
}

ModuleOperator unit_norm(const ModuleOperator& t) {
  const double n = uniform_norm(t);
  return n > 0.0 ? cplx(1.0 / n) * t : t;
}

void validate(const GenSpec& spec) {
  if (spec.module_rank == 0) throw ShapeError("module rank must be positive");
  if (spec.index_count == 0) throw ShapeError("index set must be non-empty");
  if (spec.codomain_ranks.size() != spec.index_count) {
    throw ShapeError("expected " + std::to_string(spec.index_count) + " codomain ranks, got " +
                     std::to_string(spec.codomain_ranks.size()));
  }
  for (std::size_t c : spec.codomain_ranks) {
    if (c == 0) throw ShapeError("codomain ranks must be positive");
  }
}

std::size_t common_codomain(const GenSpec& spec) {
  const std::size_t c = spec.codomain_ranks.front();
  for (std::size_t ci : spec.codomain_ranks) {
    if (ci != c) throw InfeasibleError("(co)isometry instances need equal codomain ranks");
  }
  return c;
}

std::optional<GFrame> basis_for(const GenSpec& spec) {
  const std::size_t total = std::accumulate(spec.codomain_ranks.begin(), spec.codomain_ranks.end(), std::size_t{0});
  if (total != spec.module_rank) return std::nullopt;
  return canonical_g_orthonormal_basis(spec.shape, spec.module_rank, spec.codomain_ranks);
}

std::vector<ModuleOperator> gaussian_members(Rng& rng, const GenSpec& spec) {
  std::vector<ModuleOperator> out;
  out.reserve(spec.index_count);
  for (std::size_t c : spec.codomain_ranks) out.push_back(random_operator(rng, spec.shape, spec.module_rank, c));
  return out;
}

Instance generic(Rng& rng, const GenSpec& spec) {
  const std::size_t d = spec.module_rank;
  std::vector<ModuleOperator> members = gaussian_members(rng, spec);
  ModuleOperator k = unit_norm(random_operator(rng, spec.shape, d, d));
  if (spec.frame_rank_deficient) {
    const ModuleOperator p = random_projector(rng, spec.shape, d, std::max<std::size_t>(1, d / 2));
    for (ModuleOperator& m : members) m = compose(m, p);
    if (spec.k_in_range) k = unit_norm(compose(p, k));
  }
  return Instance{GFrame(std::move(members)), std::move(k), basis_for(spec), std::nullopt, std::nullopt};
}

Instance rank_deficient(Rng& rng, const GenSpec& spec) {
  const std::size_t d = spec.module_rank;
  for (int n : spec.shape.dims()) {
    if (static_cast<std::size_t>(n) * d < 2) throw InfeasibleError("a rank-deficient K needs n_k * d >= 2");
  }
  GFrame frame(gaussian_members(rng, spec));
  const ModuleOperator k = unit_norm(from_blocks(spec.shape, d, d, [&](Eigen::Index n) {
    const Eigen::Index full = n * idx(d);
    const Eigen::Index r = std::max<Eigen::Index>(1, full / 2);
    return Mat(rng.gaussian(full, r) * rng.gaussian(r, full));
  }));
  return Instance{std::move(frame), k, basis_for(spec), std::nullopt, std::nullopt};
}

Instance tight(Rng& rng, const GenSpec& spec) {
  std::optional<GFrame> basis = basis_for(spec);
  if (!basis) throw InfeasibleError("tight instances need codomain ranks summing to the module rank");
  if (!(spec.tight_constant > 0.0)) throw InfeasibleError("tight constant must be positive");
  const std::size_t d = spec.module_rank;
  // Partial isometry V; K = V and Gamma_i = sqrt(A) E_i o V^* give S = A V V^*.
  const ModuleOperator v = from_blocks(spec.shape, d, d, [&](Eigen::Index n) {
    const Eigen::Index full = n * idx(d);
    const Eigen::Index r = spec.frame_rank_deficient ? std::max<Eigen::Index>(1, full / 2) : full;
    const Mat u1 = rng.unitary(full);
    const Mat u2 = rng.unitary(full);
    return Mat(u1.leftCols(r) * u2.leftCols(r).adjoint());
  });
  const ModuleOperator vs = cplx(std::sqrt(spec.tight_constant)) * adjoint(v);
  std::vector<ModuleOperator> members;
  for (const ModuleOperator& e : basis->members()) members.push_back(compose(e, vs));
  return Instance{GFrame(std::move(members)), v, std::move(basis), std::nullopt, std::nullopt};
}

Instance with_partial_isometry(Rng& rng, const GenSpec& spec, bool coisometry) {
  const std::size_t c = common_codomain(spec);
  const std::size_t m = spec.target_rank == 0 ? c + 1 : spec.target_rank;
  if (m < c) throw InfeasibleError("target rank " + std::to_string(m) + " is below codomain rank " + std::to_string(c));
  Instance inst = generic(rng, spec);
  inst.W = coisometry ? random_coisometry(rng, spec.shape, m, c) : random_isometry(rng, spec.shape, c, m);
  return inst;
}

Instance commuting(Rng& rng, const GenSpec& spec) {
  Instance inst = generic(rng, spec);
  const std::size_t d = spec.module_rank;
  const ModuleOperator id = ModuleOperator::identity(spec.shape, d);
  const ModuleOperator k2 = compose(inst.K, inst.K);
  const ModuleOperator k3 = compose(inst.K, k2);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const cplx c0 = rng.complex_normal();
    const cplx c1 = rng.complex_normal();
    const cplx c2 = rng.complex_normal();
    const cplx c3 = rng.complex_normal();
    ModuleOperator q = c0 * id + c1 * inst.K + c2 * k2 + c3 * k3;
    if (smallest_singular_value(q) > 1e-6) {
      inst.Q = std::move(q);
      return inst;
    }
  }
  throw InfeasibleError("no invertible polynomial in K found");
}

Instance resolution(Rng& rng, const GenSpec& spec) {
  const std::size_t d = spec.module_rank;
  const std::size_t count = spec.index_count;
  std::vector<std::vector<Mat>> parts(count);
  for (std::size_t k = 0; k < spec.shape.num_blocks(); ++k) {
    const Eigen::Index full = spec.shape.dim(k) * idx(d);
    Mat g;
    if (spec.oblique) {
      const Mat u = rng.unitary(full);
      const Mat w = rng.unitary(full);
      RVec s(full);
      for (Eigen::Index i = 0; i < full; ++i) s(i) = 0.5 + 1.5 * rng.uniform();
      g = u * s.asDiagonal() * w.adjoint();
    } else {
      g = rng.unitary(full);
    }
    const Mat g_inv = g.fullPivLu().inverse();
    std::vector<RVec> select(count, RVec::Zero(full));
    for (Eigen::Index i = 0; i < full; ++i) {
      select[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(count) - 1))](i) = 1.0;
    }
    Mat rest = Mat::Identity(full, full);
    for (std::size_t i = 0; i + 1 < count; ++i) {
      Mat p = g_inv * select[i].cast<cplx>().asDiagonal() * g;
      rest -= p;
      parts[i].push_back(std::move(p));
    }
    parts[count - 1].push_back(std::move(rest));
  }
  std::vector<ModuleOperator> members;
  for (auto& blocks : parts) members.push_back(ModuleOperator::from_realization(spec.shape, d, d, std::move(blocks)));
  ModuleOperator k = random_invertible(rng, spec.shape, d, 0.5, 2.0);
  return Instance{GFrame(std::move(members)), std::move(k), std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace

const char* to_string(GenKind kind) {
  switch (kind) {
    case GenKind::generic: return "generic";
    case GenKind::tight: return "tight";
    case GenKind::rank_deficient_K: return "rank_deficient_K";
    case GenKind::coisometry: return "coisometry";
    case GenKind::isometry: return "isometry";
    case GenKind::commuting_pair: return "commuting_pair";
    case GenKind::resolution: return "resolution";
  }
  return "generic";
}

GenKind gen_kind_from_string(const std::string& name) {
  for (GenKind k : {GenKind::generic, GenKind::tight, GenKind::rank_deficient_K, GenKind::coisometry,
                    GenKind::isometry, GenKind::commuting_pair, GenKind::resolution}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown generator kind '" + name + "'");
}

ModuleOperator random_operator(Rng& rng, const AlgebraShape& shape, std::size_t d, std::size_t c) {
  return from_blocks(shape, d, c, [&](Eigen::Index n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * static_cast<double>(std::max(d, c)));
    return rng.gaussian(n * idx(d), n * idx(c), scale);
  });
}

ModuleOperator random_isometry(Rng& rng, const AlgebraShape& shape, std::size_t c, std::size_t m) {
  if (m < c) throw InfeasibleError("an isometry cannot map A^" + std::to_string(c) + " into A^" + std::to_string(m));
  return from_blocks(shape, c, m, [&](Eigen::Index n) {
    const Mat u = rng.unitary(n * idx(m));
    return Mat(u.topRows(n * idx(c)));
  });
}

ModuleOperator random_coisometry(Rng& rng, const AlgebraShape& shape, std::size_t m, std::size_t c) {
  if (m < c) throw InfeasibleError("a co-isometry cannot map A^" + std::to_string(m) + " onto A^" + std::to_string(c));
  return from_blocks(shape, m, c, [&](Eigen::Index n) {
    const Mat u = rng.unitary(n * idx(m));
    return Mat(u.leftCols(n * idx(c)));
  });
}

ModuleOperator random_invertible(Rng& rng, const AlgebraShape& shape, std::size_t d, double lo, double hi) {
  return from_blocks(shape, d, d, [&](Eigen::Index n) {
    const Eigen::Index full = n * idx(d);
    const Mat u = rng.unitary(full);
    const Mat v = rng.unitary(full);
    RVec s(full);
    for (Eigen::Index i = 0; i < full; ++i) s(i) = lo + (hi - lo) * rng.uniform();
    return Mat(u * s.asDiagonal() * v.adjoint());
  });
}

ModuleOperator random_projector(Rng& rng, const AlgebraShape& shape, std::size_t d, std::size_t drop) {
  return from_blocks(shape, d, d, [&](Eigen::Index n) {
    const Eigen::Index full = n * idx(d);
    const Eigen::Index r = std::max<Eigen::Index>(0, full - idx(drop));
    const Mat u = rng.unitary(full).leftCols(r);
    return Mat(u * u.adjoint());
  });
}

std::vector<std::size_t> random_partition(Rng& rng, std::size_t d, std::size_t parts) {
  if (parts == 0 || parts > d) throw InfeasibleError("cannot split " + std::to_string(d) + " into " +
                                                     std::to_string(parts) + " positive parts");
  // Selection sampling of parts - 1 cut points among 1..d-1.
  std::vector<std::size_t> cuts;
  std::size_t needed = parts - 1;
  for (std::size_t pos = 1; pos < d && needed > 0; ++pos) {
    const std::size_t remaining = d - pos;
    if (rng.uniform() * static_cast<double>(remaining) < static_cast<double>(needed)) {
      cuts.push_back(pos);
      --needed;
    }
  }
  std::vector<std::size_t> out;
  std::size_t prev = 0;
  for (std::size_t c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(d - prev);
  return out;
}

Instance generate(const GenSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  switch (spec.kind) {
    case GenKind::generic: return generic(rng, spec);
    case GenKind::tight: return tight(rng, spec);
    case GenKind::rank_deficient_K: return rank_deficient(rng, spec);
    case GenKind::coisometry: return with_partial_isometry(rng, spec, true);
    case GenKind::isometry: return with_partial_isometry(rng, spec, false);
    case GenKind::commuting_pair: return commuting(rng, spec);
    case GenKind::resolution: return resolution(rng, spec);
  }
  throw InfeasibleError("unknown generator kind");
}

}  // namespace kgf
