#include <kgf/suite.hpp>

#include <kgf/duality.hpp>
#include <kgf/errors.hpp>
#include <kgf/kgframe.hpp>

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace kgf {

namespace {

constexpr std::array<std::string_view, 22> kIds = {
    "douglas",          "norm_bounds",       "synthesis_onto",    "frame_operator_order",
    "g_completeness",   "g_operator",        "range_inclusion",   "parseval_coisometry",
    "dual_qp",          "coisometry_dual",   "canonical_dual",    "zero_overlap",
    "dual_combination", "dual_combination_converse",              "order_chain",
    "sqrt_factor",      "commuting_transform", "isometry_transform", "tightness",
    "resolution",       "quotient_sqrt",     "quotient_sqrt_q",
};

constexpr std::string_view kAudited = "resolution";

// Per-trial state: sizes and auxiliary data come from `rng`, instances from
// generate(spec) so a failure record can be replayed.
class Ctx {
 public:
  Ctx(const SuiteConfig& cfg, std::size_t trial, std::uint64_t trial_seed, bool corrupt)
      : cfg(cfg), tol(cfg.tol), trial(trial), trial_seed(trial_seed), corrupt(corrupt), rng(trial_seed) {}

  const SuiteConfig& cfg;
  const Tolerances& tol;
  std::size_t trial;
  std::uint64_t trial_seed;
  bool corrupt;
  Rng rng;
  GenSpec spec;

  void measure(std::string name, double value) { measured_.emplace_back(std::move(name), value); }

  /// Records the first violated expectation.
  void expect(bool ok, const std::string& reason) {
    if (!ok && !reason_) reason_ = reason;
  }
  void witness(const ModuleVector& w) {
    if (!witness_) witness_ = w;
  }

  TrialOutcome finish() {
    if (!reason_) return {};
    return fail_with(*reason_, false);
  }
  TrialOutcome audited_failure(const std::string& reason) { return fail_with(reason, true); }

 private:
  TrialOutcome fail_with(const std::string& reason, bool audited) {
    TrialOutcome out;
    out.status = TrialOutcome::Status::fail;
    out.failure = TrialFailure{trial, trial_seed, spec, reason, measured_, witness_, audited};
    return out;
  }

  Measured measured_;
  std::optional<std::string> reason_;
  std::optional<ModuleVector> witness_;
};

// ---------------------------------------------------------------- helpers

AlgebraShape draw_shape(Rng& rng, const SuiteConfig& cfg) {
  if (cfg.shape) return *cfg.shape;
  const SizeCaps& caps = cfg.caps;
  const int blocks = rng.uniform_int(1, static_cast<int>(caps.max_blocks));
  std::vector<int> dims;
  for (int b = 0; b < blocks; ++b) dims.push_back(rng.uniform_int(1, caps.max_block_dim));
  return AlgebraShape(dims);
}

std::size_t draw(Rng& rng, std::size_t lo, std::size_t hi) {
  if (hi < lo) hi = lo;
  return static_cast<std::size_t>(rng.uniform_int(static_cast<int>(lo), static_cast<int>(hi)));
}

// Frame with sum c_i >= oversample * d (as far as the caps allow).
void spec_any(Ctx& ctx, GenKind kind, std::size_t min_d = 1, std::size_t oversample = 1) {
  const SizeCaps& caps = ctx.cfg.caps;
  GenSpec& s = ctx.spec;
  s.kind = kind;
  s.shape = draw_shape(ctx.rng, ctx.cfg);
  s.module_rank = draw(ctx.rng, std::min(min_d, caps.max_module_rank), caps.max_module_rank);
  const std::size_t d = s.module_rank;
  s.index_count = draw(ctx.rng, 1, caps.max_index_count);
  s.codomain_ranks.clear();
  for (std::size_t i = 0; i < s.index_count; ++i) s.codomain_ranks.push_back(draw(ctx.rng, 1, d));
  std::size_t total = 0;
  for (std::size_t c : s.codomain_ranks) total += c;
  for (std::size_t i = 0; total < oversample * d; i = (i + 1) % s.index_count) {
    ++s.codomain_ranks[i];
    ++total;
  }
  s.seed = splitmix64(ctx.trial_seed);
}

// Codomain ranks summing to d, so the coordinate basis exists.
void spec_basis(Ctx& ctx, GenKind kind, std::size_t min_d = 1) {
  const SizeCaps& caps = ctx.cfg.caps;
  GenSpec& s = ctx.spec;
  s.kind = kind;
  s.shape = draw_shape(ctx.rng, ctx.cfg);
  s.module_rank = draw(ctx.rng, std::min(min_d, caps.max_module_rank), caps.max_module_rank);
  s.index_count = draw(ctx.rng, 1, std::min(s.module_rank, caps.max_index_count));
  s.codomain_ranks = random_partition(ctx.rng, s.module_rank, s.index_count);
  s.seed = splitmix64(ctx.trial_seed);
}

// Equal codomain ranks c with |I| c >= d.
void spec_common(Ctx& ctx, GenKind kind) {
  const SizeCaps& caps = ctx.cfg.caps;
  GenSpec& s = ctx.spec;
  s.kind = kind;
  s.shape = draw_shape(ctx.rng, ctx.cfg);
  s.module_rank = draw(ctx.rng, 1, caps.max_module_rank);
  const std::size_t d = s.module_rank;
  std::size_t c = draw(ctx.rng, 1, d);
  const std::size_t cap_i = caps.max_index_count;
  c = std::max(c, (d + cap_i - 1) / cap_i);
  s.index_count = draw(ctx.rng, (d + c - 1) / c, cap_i);
  s.codomain_ranks.assign(s.index_count, c);
  s.seed = splitmix64(ctx.trial_seed);
}

ModuleOperator unit_random(Rng& rng, const AlgebraShape& shape, std::size_t d, std::size_t c) {
  const ModuleOperator t = random_operator(rng, shape, d, c);
  return cplx(1.0 / uniform_norm(t)) * t;
}

ModuleVector random_vector(Rng& rng, const AlgebraShape& shape, std::size_t d) {
  std::vector<AlgebraElement> comps;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<Mat> blocks;
    for (int n : shape.dims()) blocks.push_back(rng.gaussian(n, n));
    comps.emplace_back(shape, std::move(blocks));
  }
  return ModuleVector(shape, std::move(comps));
}

// The fault used by injection: 0.1 added to coefficient (0, 0).
ModuleOperator perturb(const ModuleOperator& t) {
  std::vector<AlgebraElement> coeffs(t.domain_rank() * t.codomain_rank(), AlgebraElement::zero(t.shape()));
  coeffs[0] = AlgebraElement::scalar(t.shape(), cplx(0.1));
  return t + ModuleOperator(t.shape(), t.domain_rank(), t.codomain_rank(), std::move(coeffs));
}

GFrame perturb_first(const GFrame& f) {
  std::vector<ModuleOperator> members(f.members().begin(), f.members().end());
  members[0] = perturb(members[0]);
  return GFrame(std::move(members));
}

GFrame map_frame(const GFrame& f, const std::function<ModuleOperator(std::size_t, const ModuleOperator&)>& fn) {
  std::vector<ModuleOperator> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.push_back(fn(i, f.member(i)));
  return GFrame(std::move(out));
}

GFrame zero_frame(const GFrame& f) {
  return map_frame(f, [](std::size_t, const ModuleOperator& m) {
    return ModuleOperator::zero(m.shape(), m.domain_rank(), m.codomain_rank());
  });
}

// Gamma_i o pinv(S) o K: a K-dual whenever Ran(K) lies in Ran(S).
GFrame pinv_dual(const GFrame& gamma, const ModuleOperator& k, const Tolerances& tol) {
  const ModuleOperator g = compose(pinv(gamma.frame_operator(), tol), k);
  return map_frame(gamma, [&](std::size_t, const ModuleOperator& m) { return compose(m, g); });
}

// Second K-dual Phi_i + Y_i - Gamma_i o pinv(S) o sum_j Gamma_j^* Y_j.
GFrame shifted_dual(Rng& rng, const GFrame& gamma, const GFrame& phi, const Tolerances& tol) {
  std::vector<ModuleOperator> y;
  ModuleOperator m = ModuleOperator::zero(gamma.shape(), gamma.domain_rank(), gamma.domain_rank());
  for (const ModuleOperator& g : gamma.members()) {
    y.push_back(random_operator(rng, g.shape(), g.domain_rank(), g.codomain_rank()));
    m += compose(adjoint(g), y.back());
  }
  const ModuleOperator correction = compose(pinv(gamma.frame_operator(), tol), m);
  return map_frame(phi, [&](std::size_t i, const ModuleOperator& p) {
    return p + y[i] - compose(gamma.member(i), correction);
  });
}

// Unit direction on which an operator that should vanish is largest.
ModuleVector largest_direction(const ModuleOperator& r) {
  std::size_t best = 0;
  double top = -1.0;
  for (std::size_t k = 0; k < r.shape().num_blocks(); ++k) {
    const double n = linalg::spectral_norm(r.realization(k));
    if (n > top) {
      top = n;
      best = k;
    }
  }
  const linalg::ThinSvd s = linalg::svd(r.realization(best));
  return pull_back(r.shape(), r.domain_rank(), best, s.u.col(0));
}

ModuleOperator dual_defect(const GFrame& gamma, const GFrame& xi, const ModuleOperator& k) {
  ModuleOperator sum = cplx(-1.0) * k;
  for (std::size_t i = 0; i < gamma.size(); ++i) sum += compose(adjoint(gamma.member(i)), xi.member(i));
  return sum;
}

void dual_witness(Ctx& ctx, bool ok, const GFrame& gamma, const GFrame& xi, const ModuleOperator& k) {
  if (!ok) ctx.witness(largest_direction(dual_defect(gamma, xi, k)));
}

double rel_gap(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Mixes g-frames, rank-deficient frames with Ran(K) inside Ran(S), and
// rank-deficient frames where it is not.
Instance mixed_kg_instance(Ctx& ctx, bool basis) {
  if (basis) {
    spec_basis(ctx, GenKind::generic);
  } else {
    spec_any(ctx, GenKind::generic);
  }
  ctx.spec.frame_rank_deficient = ctx.trial % 2 == 1 || ctx.corrupt;
  ctx.spec.k_in_range = ctx.trial % 4 != 3 || ctx.corrupt;
  return generate(ctx.spec);
}

// Independent evaluation of the lower-inequality margin of a counterexample.
double realized_margin(const GFrame& f, const ModuleOperator& k, const KGCounterexample& cx) {
  const Mat x = cx.xi.stacked(cx.block);
  const Mat rk = k.realization(cx.block);
  const Mat ke = x * rk.adjoint() * rk * x.adjoint();
  const Mat fe = x * f.frame_operator().realization(cx.block) * x.adjoint();
  return linalg::spectral_norm(ke) - linalg::spectral_norm(fe);
}

// ------------------------------------------------------------------ checks

TrialOutcome check_douglas(Ctx& ctx) {
  const SizeCaps& caps = ctx.cfg.caps;
  ctx.spec.kind = GenKind::generic;
  ctx.spec.shape = draw_shape(ctx.rng, ctx.cfg);
  const std::size_t c = draw(ctx.rng, 1, caps.max_module_rank);
  const std::size_t a = draw(ctx.rng, 1, caps.max_module_rank);
  const std::size_t b = draw(ctx.rng, 1, caps.max_module_rank);
  ctx.spec.module_rank = c;
  ctx.spec.index_count = 2;
  ctx.spec.codomain_ranks = {a, b};
  ctx.spec.seed = splitmix64(ctx.trial_seed);
  const AlgebraShape& shape = ctx.spec.shape;
  const int mode = ctx.corrupt ? 0 : static_cast<int>(ctx.trial % 3);

  ModuleOperator z = random_operator(ctx.rng, shape, b, c);
  if (mode == 1) z = compose(random_projector(ctx.rng, shape, c, 1), z);
  const ModuleOperator t =
      mode == 0 ? compose(z, random_operator(ctx.rng, shape, a, b)) : random_operator(ctx.rng, shape, a, c);

  const DouglasCertificate cert = douglas(t, z, ctx.tol);
  const double t_norm = uniform_norm(t);
  ctx.measure("range_defect", cert.range_defect);
  ctx.measure("residual", cert.residual);
  ctx.expect(cert.conditions_agree(), "the three conditions disagree");
  if (mode == 0) ctx.expect(cert.range_included, "constructed inclusion not detected");
  if (cert.range_included) {
    ModuleOperator factor = *cert.factor;
    if (ctx.corrupt) factor = perturb(factor);
    const double residual = uniform_norm(t - compose(z, factor));
    if (residual > ctx.tol.eq * (1.0 + t_norm)) ctx.witness(largest_direction(t - compose(z, factor)));
    const double factor_norm = uniform_norm(factor);
    ctx.measure("alpha_min", *cert.alpha_min);
    ctx.measure("factor_norm", factor_norm);
    ctx.expect(residual <= ctx.tol.eq * (1.0 + t_norm), "factorization residual above tolerance");
    ctx.expect(factor_norm <= *cert.alpha_min + 1e-6, "factor norm exceeds alpha_min");
  } else {
    ctx.expect(!cert.alpha_min.has_value(), "alpha_min reported without inclusion");
  }
  return ctx.finish();
}

TrialOutcome check_norm_bounds(Ctx& ctx) {
  spec_any(ctx, GenKind::generic);
  const AlgebraShape& shape = ctx.spec.shape;
  const std::size_t d = ctx.spec.module_rank;
  const ModuleOperator f = random_invertible(ctx.rng, shape, d, 0.2, 3.0);
  const ModuleVector eta = random_vector(ctx.rng, shape, d);
  // The injected fault scales the image by 10, outside the upper bound.
  const ModuleOperator used = ctx.corrupt ? cplx(10.0) * f : f;
  bool ok = check_norm_sandwich(f, eta, ctx.tol);
  if (ctx.corrupt) {
    const ModuleVector image = used.apply(eta);
    const double norm = uniform_norm(f);
    ok = ok && leq(inner(image, image), cplx(norm * norm) * inner(eta, eta), ctx.tol);
  }
  ctx.measure("norm", uniform_norm(f));
  ctx.measure("sigma_min", smallest_singular_value(f));
  if (!ok) ctx.witness(eta);
  ctx.expect(ok, "norm sandwich violated");
  return ctx.finish();
}

TrialOutcome check_synthesis_onto(Ctx& ctx) {
  spec_any(ctx, GenKind::generic);
  ctx.spec.frame_rank_deficient = ctx.trial % 2 == 1 && !ctx.corrupt;
  const Instance inst = generate(ctx.spec);
  GFrame frame = inst.frame;
  const ModuleOperator t = synthesis_operator(frame);
  if (ctx.corrupt) frame = zero_frame(frame);

  bool onto = true;
  for (std::size_t k = 0; k < frame.shape().num_blocks(); ++k) {
    const Mat& r = t.realization(k);
    onto = onto && linalg::numerical_rank(r, ctx.tol.rank) == static_cast<std::size_t>(r.cols());
  }
  const bool g_frame = optimal_g_bounds(frame).lower > ctx.tol.rank;
  ctx.measure("lower", optimal_g_bounds(frame).lower);
  ctx.expect(g_frame == onto, "g-frame verdict and surjectivity of the synthesis operator disagree");
  if (!ctx.spec.frame_rank_deficient) ctx.expect(g_frame, "generic frame is not a g-frame");

  const ModuleVector g = random_vector(ctx.rng, frame.shape(), frame.total_rank());
  const ModuleVector x = random_vector(ctx.rng, frame.shape(), frame.domain_rank());
  const double path = max_seminorm(inner(synthesis(frame, g) - t.apply(g), synthesis(frame, g) - t.apply(g)));
  const AlgebraElement lhs = inner(analysis(frame, x), g);
  const AlgebraElement rhs = inner(x, synthesis(frame, g));
  ctx.measure("adjoint_defect", max_seminorm(lhs - rhs));
  ctx.expect(std::sqrt(path) <= 1e-10, "synthesis disagrees with the synthesis operator");
  ctx.expect(max_seminorm(lhs - rhs) <= 1e-10 * (1.0 + max_seminorm(lhs)), "synthesis is not adjoint to analysis");
  return ctx.finish();
}

TrialOutcome check_frame_operator_order(Ctx& ctx) {
  Instance inst = mixed_kg_instance(ctx, false);
  GFrame frame = ctx.corrupt ? zero_frame(inst.frame) : inst.frame;
  const KGFrameReport r = is_kg_frame(frame, inst.K, ctx.tol);
  ctx.measure("lower_C", r.lower_C);
  if (!ctx.spec.frame_rank_deficient || ctx.spec.k_in_range) {
    ctx.expect(r.is_k_g_frame, "expected a K-g-frame");
  }
  if (r.is_k_g_frame && std::isfinite(r.lower_C)) {
    const ModuleOperator gap = frame.frame_operator() - cplx(r.lower_C) * compose(inst.K, adjoint(inst.K));
    ctx.expect(is_positive(gap, ctx.tol).is_positive, "S - C KK^* is not positive");
  }
  if (!r.is_k_g_frame) {
    ctx.expect(r.counterexample.has_value(), "negative verdict without counterexample");
    if (r.counterexample) {
      const double again = realized_margin(frame, inst.K, *r.counterexample);
      ctx.witness(r.counterexample->xi);
      ctx.measure("margin", r.counterexample->margin);
      ctx.measure("margin_realized", again);
      ctx.expect(r.counterexample->margin > ctx.tol.psd, "counterexample margin too small");
      ctx.expect(std::abs(again - r.counterexample->margin) <= 1e-10, "counterexample does not re-evaluate");
    }
  }
  return ctx.finish();
}

TrialOutcome check_g_completeness(Ctx& ctx) {
  spec_any(ctx, GenKind::generic);
  ctx.spec.frame_rank_deficient = ctx.trial % 2 == 1;
  const Instance inst = generate(ctx.spec);
  const GFrame& frame = inst.frame;
  const bool complete = is_g_complete(frame, ctx.tol);
  // Span of the ranges of the adjoints: the rows of the stacked adjoint realizations.
  bool spans = true;
  for (std::size_t k = 0; k < frame.shape().num_blocks(); ++k) {
    std::vector<Mat> rows;
    Eigen::Index total = 0;
    for (const ModuleOperator& m : frame.members()) {
      rows.push_back(adjoint(m).realization(k));
      total += rows.back().rows();
    }
    Mat stacked(total, rows.front().cols());
    Eigen::Index at = 0;
    for (const Mat& r : rows) {
      stacked.middleRows(at, r.rows()) = r;
      at += r.rows();
    }
    spans = spans && linalg::numerical_rank(stacked, ctx.tol.rank) == static_cast<std::size_t>(stacked.cols());
  }
  if (ctx.corrupt) spans = !spans;
  ctx.measure("lower", frame.bounds().lower);
  ctx.expect(complete == spans, "g-completeness and the span criterion disagree");
  if (!complete) {
    const ModuleVector& w = frame.bounds().witness_low;
    const ModuleVector a = analysis(frame, w);
    const double annihilated = std::sqrt(max_seminorm(inner(a, a)));
    ctx.witness(w);
    ctx.measure("annihilation", annihilated);
    ctx.expect(annihilated <= 1e-6, "witness is not annihilated by the frame");
  }
  return ctx.finish();
}

TrialOutcome check_g_operator(Ctx& ctx) {
  spec_basis(ctx, GenKind::generic);
  const Instance inst = generate(ctx.spec);
  const GFrame& e = *inst.basis;
  const ModuleOperator q0 = random_operator(ctx.rng, ctx.spec.shape, ctx.spec.module_rank, ctx.spec.module_rank);
  GFrame f = frame_from_g_operator(q0, e);
  if (ctx.corrupt) f = perturb_first(f);
  const ModuleOperator q = g_operator(f, e, ctx.tol);
  const ModuleOperator qs = adjoint(q);
  double recon = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    recon = std::max(recon, uniform_norm(f.member(i) - compose(e.member(i), qs)));
  }
  const double qq = uniform_norm(compose(q, qs) - f.frame_operator());
  const double unique = uniform_norm(g_operator(frame_from_g_operator(q, e), e, ctx.tol) - q);
  ctx.measure("recovery", uniform_norm(q - q0));
  if (uniform_norm(q - q0) > 1e-10) ctx.witness(largest_direction(q - q0));
  ctx.measure("reconstruction", recon);
  ctx.measure("qq_star_minus_s", qq);
  ctx.expect(uniform_norm(q - q0) <= 1e-10, "recovered g-operator differs from Q0");
  ctx.expect(recon <= 1e-12, "Gamma_i != E_i o Q^*");
  ctx.expect(qq <= 1e-10, "QQ^* != S");
  ctx.expect(unique <= 1e-12, "re-extraction changed the g-operator");
  const double smin = smallest_singular_value(q);
  if (smin > 1e-6) {
    const FrameBounds& b = f.bounds();
    const double qn = uniform_norm(q);
    ctx.expect(b.lower >= smin * smin - 1e-8 && b.upper <= qn * qn + 1e-8, "frame bounds outside the Q envelope");
  }
  return ctx.finish();
}

TrialOutcome check_range_inclusion(Ctx& ctx) {
  const Instance inst = mixed_kg_instance(ctx, true);
  const GFrame range_frame = ctx.corrupt ? zero_frame(inst.frame) : inst.frame;
  const bool pencil = is_kg_frame(inst.frame, inst.K, ctx.tol).is_k_g_frame;
  const bool range = kg_via_range(range_frame, inst.K, *inst.basis, ctx.tol);
  const bool expected = !ctx.spec.frame_rank_deficient || ctx.spec.k_in_range;
  ctx.measure("lower_C", optimal_kg_lower_bound(inst.frame, inst.K, ctx.tol));
  ctx.expect(pencil == range, "pencil and range-inclusion verdicts disagree");
  ctx.expect(pencil == expected, "verdict differs from the construction");
  return ctx.finish();
}

TrialOutcome check_parseval_coisometry(Ctx& ctx) {
  spec_basis(ctx, GenKind::generic);
  const Instance inst = generate(ctx.spec);
  const std::size_t d = ctx.spec.module_rank;
  const bool want_coiso = ctx.trial % 2 == 0 || ctx.corrupt;
  const ModuleOperator q = want_coiso ? random_invertible(ctx.rng, ctx.spec.shape, d, 1.0, 1.0)
                                      : random_operator(ctx.rng, ctx.spec.shape, d, d);
  const ModuleOperator k = random_invertible(ctx.rng, ctx.spec.shape, d, 0.5, 2.0);
  GFrame gamma = frame_from_g_operator(q, *inst.basis);
  if (ctx.corrupt) gamma = perturb_first(gamma);
  const ModuleOperator ks = adjoint(k);
  const GFrame moved = map_frame(gamma, [&](std::size_t, const ModuleOperator& g) { return compose(g, ks); });
  const TightnessReport t = tightness_check(moved, k, ctx.tol);
  const bool parseval = t.tight && std::abs(t.fitted_A - 1.0) <= 1e-8;
  const bool coiso = is_coisometry(q, 1e-10);
  ctx.measure("fitted_A", t.fitted_A);
  ctx.expect(coiso == want_coiso, "generated g-operator has the wrong type");
  ctx.expect(parseval == coiso, "Parseval property and co-isometry of Q disagree");
  return ctx.finish();
}

TrialOutcome check_dual_qp(Ctx& ctx) {
  spec_basis(ctx, GenKind::generic);
  const Instance inst = generate(ctx.spec);
  const GFrame& e = *inst.basis;
  const std::size_t d = ctx.spec.module_rank;
  const ModuleOperator q0 = random_operator(ctx.rng, ctx.spec.shape, d, d);
  const ModuleOperator p0 = random_operator(ctx.rng, ctx.spec.shape, d, d);
  const ModuleOperator k = compose(q0, adjoint(p0));
  const bool perturbed = ctx.trial % 2 == 1 && !ctx.corrupt;
  const ModuleOperator p1 = perturbed ? p0 + cplx(1e-3) * unit_random(ctx.rng, ctx.spec.shape, d, d) : p0;
  const GFrame gamma = frame_from_g_operator(q0, e);
  GFrame xi = frame_from_g_operator(p1, e);
  if (ctx.corrupt) xi = perturb_first(xi);
  const GOperatorDual via_q = dual_via_g_operators(gamma, xi, e, k, ctx.tol);
  const DualCertificate direct = verify_k_dual(gamma, xi, k, ctx.tol);
  ctx.measure("residual_qp", via_q.residual);
  ctx.measure("residual_direct", direct.residual);
  dual_witness(ctx, direct.is_dual == !perturbed, gamma, xi, k);
  ctx.expect(via_q.is_dual == direct.is_dual, "K = QP^* criterion and direct verification disagree");
  ctx.expect(direct.is_dual == !perturbed, "duality verdict differs from the construction");
  return ctx.finish();
}

TrialOutcome check_coisometry_dual(Ctx& ctx) {
  spec_common(ctx, GenKind::coisometry);
  ctx.spec.target_rank = ctx.trial % 3 == 0 ? ctx.spec.codomain_ranks.front() : 0;
  const Instance inst = generate(ctx.spec);
  GFrame xi = pinv_dual(inst.frame, inst.K, ctx.tol);
  if (ctx.corrupt) xi = perturb_first(xi);
  const DualCertificate base = verify_k_dual(inst.frame, xi, inst.K, ctx.tol);
  const DualCertificate moved = coisometry_transport(inst.frame, xi, inst.K, *inst.W, ctx.tol);
  const double w_norm = uniform_norm(*inst.W);
  ctx.measure("residual", base.residual);
  ctx.measure("residual_transported", moved.residual);
  dual_witness(ctx, base.is_dual, inst.frame, xi, inst.K);
  ctx.expect(base.is_dual, "input pair is not K-dual");
  ctx.expect(moved.is_dual, "transported pair is not K-dual");
  ctx.expect(moved.residual <= w_norm * w_norm * base.residual + 1e-10, "transport amplified the residual");
  return ctx.finish();
}

TrialOutcome check_canonical_dual(Ctx& ctx) {
  const int mode = ctx.corrupt ? 0 : static_cast<int>(ctx.trial % 3);
  if (mode == 0) {
    spec_any(ctx, GenKind::generic, 1, 2);
  } else if (mode == 1) {
    spec_any(ctx, GenKind::rank_deficient_K, 2);
  } else {
    spec_any(ctx, GenKind::generic);
    ctx.spec.frame_rank_deficient = true;
    ctx.spec.k_in_range = true;
  }
  const Instance inst = generate(ctx.spec);
  const CanonicalDual cd = canonical_k_dual(inst.frame, inst.K, ctx.tol);
  ctx.expect(cd.dual.has_value(), "construction refused: " + cd.refusal);
  if (!cd.dual) return ctx.finish();
  GFrame xi = *cd.dual;
  if (ctx.corrupt) xi = perturb_first(xi);
  const DualCertificate cert = verify_k_dual(*cd.partner, xi, inst.K, ctx.tol, DualConstruction::canonical);
  ctx.measure("residual", cert.residual);
  ctx.measure("residual_unprojected", cd.residual_unprojected);
  dual_witness(ctx, cert.is_dual, *cd.partner, xi, inst.K);
  ctx.expect(cert.is_dual, "canonical family is not a K-dual of {Gamma_i o pi_K}");
  if (mode == 0) {
    ctx.expect(cd.residual_unprojected <= ctx.tol.eq * (1.0 + uniform_norm(inst.K)),
               "invertible case: not a K-dual of Gamma");
    double diff = 0.0;
    for (std::size_t k = 0; k < inst.frame.shape().num_blocks(); ++k) {
      const Mat s_inv = inst.frame.frame_operator().realization(k).fullPivLu().inverse();
      const Mat g = inst.K.realization(k) * s_inv;
      for (std::size_t i = 0; i < xi.size(); ++i) {
        diff = std::max(diff, linalg::spectral_norm(xi.member(i).realization(k) -
                                                    g * inst.frame.member(i).realization(k)));
      }
    }
    ctx.measure("distance_to_S_inverse_form", diff);
    ctx.expect(diff <= 1e-9, "invertible case differs from Gamma_i o S^-1 o K");
  }
  return ctx.finish();
}

TrialOutcome check_zero_overlap(Ctx& ctx) {
  spec_basis(ctx, GenKind::generic, 2);
  const Instance inst = generate(ctx.spec);
  const GFrame& e = *inst.basis;
  const AlgebraShape& shape = ctx.spec.shape;
  const std::size_t d = ctx.spec.module_rank;
  const int mode = ctx.corrupt ? 0 : static_cast<int>(ctx.trial % 4);

  const ModuleOperator pi = random_projector(ctx.rng, shape, d, 1);
  const ModuleOperator p0 = compose(random_invertible(ctx.rng, shape, d, 0.5, 2.0), pi);
  const GFrame gamma = frame_from_g_operator(p0, e);
  const ModuleOperator k = compose(p0, unit_random(ctx.rng, shape, d, d));
  const GFrame v = pinv_dual(gamma, k, ctx.tol);

  GFrame xi = zero_frame(gamma);
  if (mode == 1) {
    const ModuleOperator qs = compose(ModuleOperator::identity(shape, d) - pi, random_operator(ctx.rng, shape, d, d));
    xi = frame_from_g_operator(adjoint(qs), e);
  } else if (mode == 2) {
    xi = gamma;
  } else if (mode == 3) {
    xi = frame_from_g_operator(random_operator(ctx.rng, shape, d, d), e);
  }
  if (ctx.corrupt) xi = perturb_first(xi);
  const ZeroOverlap z = zero_overlap_perturbation(gamma, v, xi, e, k, ctx.tol);
  ctx.measure("overlap", z.overlap);
  ctx.measure("residual", z.certificate.residual);
  if (z.is_dual != (mode <= 1)) {
    ctx.witness(largest_direction(dual_defect(gamma, map_frame(v, [&](std::size_t i, const ModuleOperator& m) {
                                                return m + xi.member(i);
                                              }), k)));
  }
  ctx.expect(z.zero_overlap == z.is_dual, "PQ^* = 0 and duality of V + Xi disagree");
  ctx.expect(z.is_dual == (mode <= 1), "verdict differs from the construction");
  return ctx.finish();
}

TrialOutcome check_dual_combination(Ctx& ctx) {
  spec_any(ctx, GenKind::generic, 1, 2);
  const Instance inst = generate(ctx.spec);
  const std::size_t d = ctx.spec.module_rank;
  const AlgebraShape& shape = ctx.spec.shape;
  const GFrame phi = pinv_dual(inst.frame, inst.K, ctx.tol);
  const GFrame xi = shifted_dual(ctx.rng, inst.frame, phi, ctx.tol);
  const ModuleOperator id = ModuleOperator::identity(shape, d);
  const ModuleOperator t1 = ctx.trial % 2 == 0 ? cplx(0.5) * id : random_operator(ctx.rng, shape, d, d);
  ModuleOperator t2 = id - t1;
  if (ctx.corrupt) t2 = t2 + cplx(0.1) * id;
  const CombinedDual c = combine_duals(inst.frame, phi, xi, inst.K, t1, t2, ctx.tol);
  ctx.measure("residual", c.certificate.residual);
  dual_witness(ctx, c.certificate.is_dual, inst.frame, c.frame, inst.K);
  ctx.expect(c.certificate.is_dual, "combination with T1 + T2 = I is not a K-dual");
  return ctx.finish();
}

TrialOutcome check_dual_combination_converse(Ctx& ctx) {
  spec_any(ctx, GenKind::generic, 1, 2);
  const Instance inst = generate(ctx.spec);
  const std::size_t d = ctx.spec.module_rank;
  const AlgebraShape& shape = ctx.spec.shape;
  const ModuleOperator k = random_invertible(ctx.rng, shape, d, 0.5, 2.0);
  GFrame phi = pinv_dual(inst.frame, k, ctx.tol);
  const GFrame xi = shifted_dual(ctx.rng, inst.frame, phi, ctx.tol);
  if (ctx.corrupt) phi = perturb_first(phi);
  const ModuleOperator id = ModuleOperator::identity(shape, d);
  const ModuleOperator t1 = random_operator(ctx.rng, shape, d, d);
  ModuleOperator t2 = id - t1;
  if (ctx.trial % 2 == 1) {
    const double g = std::pow(10.0, -3.0 + 3.0 * ctx.rng.uniform());
    t2 = t2 + cplx(g) * unit_random(ctx.rng, shape, d, d);
  }
  const double gap = uniform_norm(t1 + t2 - id);
  const CombinedDual c = combine_duals(inst.frame, phi, xi, k, t1, t2, ctx.tol);
  ctx.measure("gap", gap);
  ctx.measure("residual", c.certificate.residual);
  ctx.expect(c.certificate.is_dual == (gap <= 1e-6), "duality does not track T1 + T2 = I");
  if (gap >= 1e-3) ctx.expect(c.certificate.residual >= 1e-4, "residual too small for the gap");
  return ctx.finish();
}

TrialOutcome check_order_chain(Ctx& ctx) {
  const Instance inst = mixed_kg_instance(ctx, false);
  const GFrame& f = inst.frame;
  const KGFrameReport r = is_kg_frame(f, inst.K, ctx.tol);
  const double c = ctx.corrupt ? 2.0 * r.lower_C + 1.0 : r.lower_C;
  const double d = r.upper_D;
  const std::size_t rank = f.domain_rank();
  const ModuleOperator kk = compose(inst.K, adjoint(inst.K));
  ctx.measure("C", r.lower_C);
  ctx.measure("D", d);
  const ModuleOperator top = cplx(d) * ModuleOperator::identity(f.shape(), rank) - f.frame_operator();
  ctx.expect(is_positive(top, ctx.tol).is_positive, "S <= D I fails");
  if (!r.is_k_g_frame || !std::isfinite(c)) return ctx.finish();
  ctx.expect(is_positive(f.frame_operator() - cplx(c) * kk, ctx.tol).is_positive, "C KK^* <= S fails");
  const ModuleOperator ks = adjoint(inst.K);
  for (int s = 0; s < 3; ++s) {
    const ModuleVector xi = random_vector(ctx.rng, f.shape(), rank);
    const ModuleVector kx = ks.apply(xi);
    const ModuleVector a = analysis(f, xi);
    const AlgebraElement mid = inner(a, a);
    const bool ok = leq(cplx(c) * inner(kx, kx), mid, ctx.tol) && leq(mid, cplx(d) * inner(xi, xi), ctx.tol);
    if (!ok) ctx.witness(xi);
    ctx.expect(ok, "frame inequality fails on a sample");
  }
  return ctx.finish();
}

TrialOutcome check_sqrt_factor(Ctx& ctx) {
  const Instance inst = mixed_kg_instance(ctx, false);
  const SqrtFactorReport r = sqrt_factor_check(inst.frame, inst.K, ctx.tol);
  ctx.measure("lower_C", r.kg.lower_C);
  ctx.expect(r.factorizes == r.kg.is_k_g_frame, "factorization and K-g-frame verdict disagree");
  ctx.expect(r.douglas.range_included == r.kg.is_k_g_frame, "range inclusion and K-g-frame verdict disagree");
  if (r.factorizes) {
    const ModuleOperator k = ctx.corrupt ? perturb(inst.K) : inst.K;
    const ModuleOperator root = psd_sqrt(inst.frame.frame_operator(), ctx.tol.rank);
    const double residual = uniform_norm(k - compose(root, *r.U));
    ctx.measure("residual", residual);
    if (residual > ctx.tol.eq * (1.0 + uniform_norm(k))) ctx.witness(largest_direction(k - compose(root, *r.U)));
    ctx.expect(residual <= ctx.tol.eq * (1.0 + uniform_norm(k)), "K != S^1/2 o U");
  } else {
    ctx.expect(!r.refusal.empty(), "refusal without diagnostics");
  }
  return ctx.finish();
}

TrialOutcome check_commuting_transform(Ctx& ctx) {
  spec_any(ctx, GenKind::commuting_pair, 1, 2);
  const Instance inst = generate(ctx.spec);
  ModuleOperator q = *inst.Q;
  if (ctx.trial % 5 == 4) q = cplx(2.0) * ModuleOperator::identity(ctx.spec.shape, ctx.spec.module_rank);
  if (ctx.corrupt) q = perturb(q);
  const QTransform t = transform_by_Q(inst.frame, inst.K, q, ctx.tol);
  ctx.measure("envelope_low", t.envelope_low);
  ctx.measure("measured_low", t.measured_low);
  ctx.measure("envelope_high", t.envelope_high);
  ctx.measure("measured_high", t.measured_high);
  ctx.measure("s_defect", t.s_defect);
  ctx.expect(t.inside, "measured bounds leave the envelope");
  ctx.expect(t.s_defect <= 1e-10, "S_new != Q S Q^*");
  return ctx.finish();
}

TrialOutcome check_isometry_transform(Ctx& ctx) {
  spec_common(ctx, GenKind::isometry);
  const Instance inst = generate(ctx.spec);
  const ModuleOperator w = ctx.corrupt ? cplx(1.1) * *inst.W : *inst.W;
  const GFrame moved = isometry_left_transform(inst.frame, w);
  const double c0 = optimal_kg_lower_bound(inst.frame, inst.K, ctx.tol);
  const double c1 = optimal_kg_lower_bound(moved, inst.K, ctx.tol);
  const double d0 = inst.frame.bounds().upper;
  const double d1 = moved.bounds().upper;
  ctx.measure("C", c0);
  ctx.measure("C_moved", c1);
  ctx.measure("D", d0);
  ctx.measure("D_moved", d1);
  ctx.expect(std::abs(c1 - c0) <= 1e-8 * (1.0 + c0), "lower bound changed");
  ctx.expect(std::abs(d1 - d0) <= 1e-8 * (1.0 + d0), "upper bound changed");
  return ctx.finish();
}

TrialOutcome check_tightness(Ctx& ctx) {
  static constexpr std::array<double, 3> kConstants = {0.25, 1.0, 4.0};
  const bool tight_kind = ctx.trial % 2 == 0 || ctx.corrupt;
  if (tight_kind) {
    spec_basis(ctx, GenKind::tight);
    ctx.spec.tight_constant = kConstants[(ctx.trial / 2) % 3];
    ctx.spec.frame_rank_deficient = ctx.trial % 4 == 2;
  } else {
    // d = 1 over a single 1 x 1 block is tight for every frame.
    spec_any(ctx, GenKind::generic, 2);
  }
  const Instance inst = generate(ctx.spec);
  const GFrame frame = ctx.corrupt ? perturb_first(inst.frame) : inst.frame;
  const TightnessReport t = tightness_check(frame, inst.K, ctx.tol);
  ctx.measure("fitted_A", t.fitted_A);
  ctx.measure("residual", t.residual);
  if (tight_kind && !t.tight) {
    const ModuleOperator kk = compose(inst.K, adjoint(inst.K));
    ctx.witness(largest_direction(cplx(t.fitted_A) * kk - frame.frame_operator()));
  }
  if (t.tight) ctx.expect(t.range_equal, "tight but Ran(K) != Ran(T)");
  if (tight_kind) {
    ctx.expect(t.tight, "generated tight frame not recognized");
    ctx.expect(std::abs(t.fitted_A - ctx.spec.tight_constant) <= 1e-8, "tight constant differs");
    ctx.expect(t.range_equal, "Ran(K) != Ran(T) for a tight frame");
  } else {
    ctx.expect(!t.tight, "generic frame reported tight");
  }
  return ctx.finish();
}

TrialOutcome check_resolution(Ctx& ctx) {
  const SizeCaps& caps = ctx.cfg.caps;
  GenSpec& s = ctx.spec;
  s.kind = GenKind::resolution;
  s.shape = draw_shape(ctx.rng, ctx.cfg);
  s.module_rank = draw(ctx.rng, 1, caps.max_module_rank);
  s.index_count = draw(ctx.rng, std::min<std::size_t>(2, caps.max_index_count), caps.max_index_count);
  s.codomain_ranks.assign(s.index_count, s.module_rank);
  s.oblique = ctx.trial % 2 == 1;
  s.seed = splitmix64(ctx.trial_seed);
  const Instance inst = generate(s);
  const GFrame psi = ctx.corrupt ? perturb_first(inst.frame) : inst.frame;
  const ResolutionReport r = resolution_check(psi, inst.K, ctx.tol);
  ctx.measure("sum_defect", r.sum_defect);
  ctx.expect(r.is_resolution, "generated family does not sum to the identity");
  if (!r.is_resolution) return ctx.finish();
  ctx.measure("bessel_D", r.bessel_D);
  ctx.measure("lower_C", r.kg->lower_C);
  ctx.measure("estimate_min_eigenvalue", r.audit.min_eigenvalue);

  if (!r.kg->is_k_g_frame) {
    const KGCounterexample& cx = *r.kg->counterexample;
    const double again = realized_margin(psi, inst.K, cx);
    ctx.witness(cx.xi);
    ctx.measure("margin", cx.margin);
    ctx.measure("margin_realized", again);
    if (std::abs(again - cx.margin) <= 1e-10) return ctx.audited_failure("conclusion fails on the witness");
    ctx.expect(false, "conclusion fails and the witness does not re-evaluate");
    return ctx.finish();
  }
  if (!r.audit.estimate_holds) {
    ctx.witness(*r.audit.xi);
    ctx.measure("violation", r.audit.violation);
    ctx.measure("violation_realized", r.audit.violation_realized);
    if (r.audit.reevaluation_agrees) {
      return ctx.audited_failure("<sum a_i, sum a_i> <= sum <a_i, a_i> fails on the witness");
    }
    ctx.expect(false, "estimate violation does not re-evaluate");
  }
  return ctx.finish();
}

TrialOutcome check_quotient_sqrt(Ctx& ctx) {
  const Instance inst = mixed_kg_instance(ctx, false);
  const KGFrameReport r = is_kg_frame(inst.frame, inst.K, ctx.tol);
  const ModuleOperator root = psd_sqrt(inst.frame.frame_operator(), ctx.tol.rank);
  const ModuleOperator k = ctx.corrupt ? inst.K + cplx(0.5) * unit_random(ctx.rng, ctx.spec.shape,
                                                                            ctx.spec.module_rank,
                                                                            ctx.spec.module_rank)
                                       : inst.K;
  const QuotientReport q = quotient_bounded(adjoint(k), root, ctx.tol);
  ctx.measure("lower_C", r.lower_C);
  if (q.beta) ctx.measure("beta", *q.beta);
  ctx.expect(q.bounded == r.is_k_g_frame, "quotient boundedness and K-g-frame verdict disagree");
  if (q.bounded && r.is_k_g_frame && std::isfinite(r.lower_C)) {
    ctx.expect(rel_gap(1.0 / (*q.beta * *q.beta), r.lower_C) <= 1e-6, "1/beta^2 != C");
  }
  return ctx.finish();
}

TrialOutcome check_quotient_sqrt_q(Ctx& ctx) {
  spec_any(ctx, GenKind::generic, 1, 2);
  const Instance inst = generate(ctx.spec);
  const AlgebraShape& shape = ctx.spec.shape;
  const std::size_t d = ctx.spec.module_rank;
  const bool invertible = ctx.trial % 2 == 0 || ctx.corrupt;
  const ModuleOperator q = invertible
                               ? random_invertible(ctx.rng, shape, d, 0.5, 2.0)
                               : compose(random_operator(ctx.rng, shape, d, d), random_projector(ctx.rng, shape, d, 1));
  const GFrame moved = map_frame(inst.frame, [&](std::size_t, const ModuleOperator& g) { return compose(g, q); });
  const KGFrameReport r = is_kg_frame(moved, inst.K, ctx.tol);
  const ModuleOperator root = psd_sqrt(inst.frame.frame_operator(), ctx.tol.rank);
  const ModuleOperator t = compose(root, ctx.corrupt ? cplx(0.0) * q : q);
  const QuotientReport qr = quotient_bounded(adjoint(inst.K), t, ctx.tol);
  ctx.measure("lower_C", r.lower_C);
  if (qr.beta) ctx.measure("beta", *qr.beta);
  ctx.expect(qr.bounded == r.is_k_g_frame, "quotient boundedness and verdict for {Gamma_i o Q} disagree");
  ctx.expect(r.is_k_g_frame == invertible, "verdict differs from the construction");
  if (qr.bounded && r.is_k_g_frame) {
    ctx.expect(rel_gap(1.0 / (*qr.beta * *qr.beta), r.lower_C) <= 1e-6, "1/beta^2 != C");
  }
  return ctx.finish();
}

using CheckFn = TrialOutcome (*)(Ctx&);

CheckFn lookup(std::string_view id) {
  static const std::array<CheckFn, kIds.size()> fns = {
      check_douglas,          check_norm_bounds,       check_synthesis_onto,     check_frame_operator_order,
      check_g_completeness,   check_g_operator,        check_range_inclusion,    check_parseval_coisometry,
      check_dual_qp,          check_coisometry_dual,   check_canonical_dual,     check_zero_overlap,
      check_dual_combination, check_dual_combination_converse,                   check_order_chain,
      check_sqrt_factor,      check_commuting_transform, check_isometry_transform, check_tightness,
      check_resolution,       check_quotient_sqrt,     check_quotient_sqrt_q,
  };
  for (std::size_t i = 0; i < kIds.size(); ++i) {
    if (kIds[i] == id) return fns[i];
  }
  throw std::invalid_argument("unknown theorem id '" + std::string(id) + "'");
}

TrialOutcome run_one(const SuiteConfig& config, std::string_view id, CheckFn fn, std::size_t trial) {
  const std::uint64_t trial_seed = derive_seed(config.seed, id, trial);
  const bool corrupt = config.fault && config.fault->theorem == id && config.fault->trial == trial;
  Ctx ctx(config, trial, trial_seed, corrupt);
  try {
    return fn(ctx);
  } catch (const InfeasibleError&) {
    TrialOutcome out;
    out.status = TrialOutcome::Status::skip;
    return out;
  } catch (const std::exception& e) {
    ctx.expect(false, std::string("exception: ") + e.what());
    return ctx.finish();
  }
}

std::vector<std::string_view> selected(const SuiteConfig& config) {
  std::vector<std::string_view> ids;
  if (config.theorems.empty()) return {kIds.begin(), kIds.end()};
  for (std::string_view id : kIds) {
    if (std::find(config.theorems.begin(), config.theorems.end(), id) != config.theorems.end()) ids.push_back(id);
  }
  for (const std::string& t : config.theorems) lookup(t);
  return ids;
}

}  // namespace

std::span<const std::string_view> theorem_ids() { return kIds; }

bool is_audited(std::string_view theorem_id) { return theorem_id == kAudited; }

std::vector<TheoremReport> run_theorem_suite(const SuiteConfig& config) {
  const std::vector<std::string_view> ids = selected(config);
  std::vector<CheckFn> fns;
  for (std::string_view id : ids) fns.push_back(lookup(id));

  const std::size_t trials = config.trials;
  if (trials == 0) return {};
  const std::size_t total = ids.size() * trials;
  std::vector<TrialOutcome> outcomes(total);
  const auto body = [&](std::size_t task) {
    const std::size_t t = task / trials;
    outcomes[task] = run_one(config, ids[t], fns[t], task % trials);
  };
  if (config.execution == Execution::parallel) {
    const auto n = static_cast<long long>(total);
#pragma omp parallel for schedule(dynamic)
    for (long long task = 0; task < n; ++task) body(static_cast<std::size_t>(task));
  } else {
    for (std::size_t task = 0; task < total; ++task) body(task);
  }

  std::vector<TheoremReport> reports;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    TheoremReport r;
    r.id = std::string(ids[t]);
    r.trials = trials;
    r.audited = is_audited(ids[t]);
    for (std::size_t i = 0; i < trials; ++i) {
      TrialOutcome& o = outcomes[t * trials + i];
      switch (o.status) {
        case TrialOutcome::Status::pass: ++r.passes; break;
        case TrialOutcome::Status::skip: ++r.skipped; break;
        case TrialOutcome::Status::fail: r.failures.push_back(std::move(*o.failure)); break;
      }
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

TrialOutcome rerun_trial(const SuiteConfig& config, std::string_view theorem_id, std::size_t trial) {
  return run_one(config, theorem_id, lookup(theorem_id), trial);
}

SuiteTally tally(std::span<const TheoremReport> reports) {
  SuiteTally out;
  for (const TheoremReport& r : reports) {
    for (const TrialFailure& f : r.failures) {
      if (f.audited) {
        ++out.audited_failures;
      } else {
        ++out.hard_failures;
      }
    }
  }
  return out;
}

}  // namespace kgf
