#include "support.hpp"

#include <kgf/duality.hpp>
#include <kgf/errors.hpp>
#include <kgf/instance_gen.hpp>

#include <Eigen/LU>
#include <doctest.h>

using namespace kgf;
using test::op;

namespace {

const AlgebraShape s1 = test::scalar_shape();
const AlgebraShape s23(std::vector<int>{2, 3});

GFrame random_frame(Rng& rng, std::size_t d, std::initializer_list<std::size_t> ranks) {
  std::vector<ModuleOperator> m;
  for (std::size_t c : ranks) m.push_back(random_operator(rng, s23, d, c));
  return GFrame(std::move(m));
}

GFrame times(const GFrame& f, const ModuleOperator& g) {
  std::vector<ModuleOperator> m;
  for (const ModuleOperator& x : f.members()) m.push_back(compose(x, g));
  return GFrame(std::move(m));
}

ModuleOperator inverse(const ModuleOperator& s) {
  std::vector<Mat> blocks;
  for (const Mat& r : s.realizations()) blocks.push_back(r.fullPivLu().inverse());
  return ModuleOperator::from_realization(s.shape(), s.domain_rank(), s.codomain_rank(), std::move(blocks));
}

}  // namespace

TEST_CASE("verify_k_dual") {
  const GFrame e = test::coordinate_frame(s23, 2);
  const DualCertificate self = verify_k_dual(e, e, ModuleOperator::identity(s23, 2));
  CHECK(self.is_dual);
  CHECK(self.residual == 0.0);

  Rng rng(1);
  const GFrame g = random_frame(rng, 3, {2, 2});
  const ModuleOperator k = random_operator(rng, s23, 3, 3);
  CHECK(verify_k_dual(g, times(g, compose(inverse(g.frame_operator()), k)), k).is_dual);

  std::vector<ModuleOperator> zeros;
  for (const ModuleOperator& m : g.members()) zeros.push_back(ModuleOperator::zero(s23, 3, m.codomain_rank()));
  const DualCertificate z = verify_k_dual(g, GFrame(zeros), k);
  CHECK_FALSE(z.is_dual);
  CHECK(z.residual == doctest::Approx(uniform_norm(k)).epsilon(1e-12));
  CHECK_THROWS_AS(verify_k_dual(g, e, ModuleOperator::identity(s23, 2)), ShapeError);
}

TEST_CASE("canonical K-dual") {
  Rng rng(2);
  SUBCASE("K = I reduces to Gamma S^-1") {
    const GFrame g = random_frame(rng, 3, {2, 2, 1});
    const CanonicalDual cd = canonical_k_dual(g, ModuleOperator::identity(s23, 3));
    REQUIRE(cd.dual.has_value());
    const ModuleOperator s_inv = inverse(g.frame_operator());
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(test::dist(cd.dual->member(i), compose(g.member(i), s_inv)) <= 1e-9);
    }
    CHECK(cd.certificate.residual <= 1e-9);
    CHECK(cd.residual_unprojected <= 1e-9);
  }
  SUBCASE("CI-1 with K = diag(1, 0)") {
    const CanonicalDual cd = canonical_k_dual(test::ci1(), op({{1, 0}, {0, 0}}));
    REQUIRE(cd.dual.has_value());
    CHECK(cd.certificate.is_dual);
    CHECK(cd.certificate.construction == DualConstruction::canonical);
    CHECK(cd.certificate.residual <= 1e-8);
    // Against the partner {Gamma_i o pi_K} by independent summation.
    ModuleOperator sum = ModuleOperator::zero(s1, 2, 2);
    for (std::size_t i = 0; i < 3; ++i) sum += compose(adjoint(cd.partner->member(i)), cd.dual->member(i));
    CHECK(test::dist(sum, op({{1, 0}, {0, 0}})) <= 1e-8);
  }
  SUBCASE("coordinate frame echoes E_i o K") {
    const GFrame e = test::coordinate_frame(s23, 2);
    const ModuleOperator k = random_operator(rng, s23, 2, 2);
    const CanonicalDual cd = canonical_k_dual(e, k);
    REQUIRE(cd.dual.has_value());
    for (std::size_t i = 0; i < 2; ++i) CHECK(test::dist(cd.dual->member(i), compose(e.member(i), k)) <= 1e-12);
    CHECK(cd.certificate.residual <= 1e-12);
  }
  SUBCASE("refusal") {
    const CanonicalDual cd = canonical_k_dual(GFrame({test::row_functional({1, 0})}), ModuleOperator::identity(s1, 2));
    CHECK_FALSE(cd.dual.has_value());
    CHECK_FALSE(cd.refusal.empty());
    CHECK_FALSE(cd.report.is_k_g_frame);
  }
}

TEST_CASE("duality through g-operators") {
  const GFrame e = test::coordinate_frame(s23, 3);
  CHECK(dual_via_g_operators(e, e, e, ModuleOperator::identity(s23, 3)).is_dual);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const ModuleOperator q0 = random_operator(rng, s23, 3, 3);
    const ModuleOperator p0 = random_operator(rng, s23, 3, 3);
    const ModuleOperator k = compose(q0, adjoint(p0));
    const GFrame g = frame_from_g_operator(q0, e);
    CHECK(dual_via_g_operators(g, frame_from_g_operator(p0, e), e, k).is_dual);
    const GFrame bent = frame_from_g_operator(p0 + cplx(1e-3) * random_operator(rng, s23, 3, 3), e);
    CHECK_FALSE(dual_via_g_operators(g, bent, e, k).is_dual);
    CHECK_FALSE(verify_k_dual(g, bent, k).is_dual);
  }
}

TEST_CASE("co-isometry transport") {
  Rng rng(4);
  const GFrame g = random_frame(rng, 2, {2, 2, 2});
  const ModuleOperator k = random_operator(rng, s23, 2, 2);
  const GFrame xi = times(g, compose(inverse(g.frame_operator()), k));
  const DualCertificate base = verify_k_dual(g, xi, k);
  const DualCertificate same = coisometry_transport(g, xi, k, ModuleOperator::identity(s23, 2));
  CHECK(same.residual == doctest::Approx(base.residual).epsilon(1e-12));
  CHECK(same.construction == DualConstruction::transported);

  const ModuleOperator u = random_invertible(rng, s23, 2, 1.0, 1.0);
  CHECK(std::abs(coisometry_transport(g, xi, k, u).residual - base.residual) <= 1e-10);

  const ModuleOperator wide = random_coisometry(rng, s23, 4, 2);
  CHECK(coisometry_transport(g, xi, k, wide).is_dual);
  CHECK_THROWS_AS(coisometry_transport(g, xi, k, cplx(2.0) * u), PreconditionError);
}

TEST_CASE("combinations of duals") {
  Rng rng(5);
  const GFrame g = random_frame(rng, 2, {2, 1, 2});
  const ModuleOperator k = random_invertible(rng, s23, 2, 0.5, 2.0);
  const ModuleOperator s_inv = inverse(g.frame_operator());
  const GFrame phi = times(g, compose(s_inv, k));
  // A second dual: Phi_i + Y_i - Gamma_i S^-1 sum_j Gamma_j^* Y_j.
  std::vector<ModuleOperator> y;
  ModuleOperator m = ModuleOperator::zero(s23, 2, 2);
  for (const ModuleOperator& x : g.members()) {
    y.push_back(random_operator(rng, s23, 2, x.codomain_rank()));
    m += compose(adjoint(x), y.back());
  }
  std::vector<ModuleOperator> xm;
  for (std::size_t i = 0; i < g.size(); ++i) xm.push_back(phi.member(i) + y[i] - compose(g.member(i), compose(s_inv, m)));
  const GFrame xi(xm);
  REQUIRE(verify_k_dual(g, xi, k).is_dual);

  const ModuleOperator id = ModuleOperator::identity(s23, 2);
  const ModuleOperator zero = ModuleOperator::zero(s23, 2, 2);
  const CombinedDual first = combine_duals(g, phi, xi, k, id, zero);
  CHECK(first.certificate.is_dual);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(test::dist(first.frame.member(i), phi.member(i)) <= 1e-14);
  CHECK(combine_duals(g, phi, xi, k, cplx(0.5) * id, cplx(0.5) * id).certificate.is_dual);

  const CombinedDual twice = combine_duals(g, phi, xi, k, id, id);
  CHECK_FALSE(twice.certificate.is_dual);
  CHECK(twice.certificate.residual == doctest::Approx(uniform_norm(k)).epsilon(1e-8));
  CHECK_THROWS_AS(combine_duals(g, g, xi, k, id, zero), PreconditionError);
}

TEST_CASE("zero-overlap perturbations") {
  Rng rng(6);
  const GFrame e = test::coordinate_frame(s23, 3);
  const ModuleOperator pi = random_projector(rng, s23, 3, 1);
  const ModuleOperator p0 = compose(random_invertible(rng, s23, 3, 0.5, 2.0), pi);
  const GFrame g = frame_from_g_operator(p0, e);
  const ModuleOperator k = compose(p0, random_operator(rng, s23, 3, 3));
  const GFrame v = times(g, compose(pinv(g.frame_operator()), k));

  std::vector<ModuleOperator> zeros;
  for (const ModuleOperator& m : g.members()) zeros.push_back(ModuleOperator::zero(s23, 3, m.codomain_rank()));
  const ZeroOverlap none = zero_overlap_perturbation(g, v, GFrame(zeros), e, k);
  CHECK(none.is_dual);
  CHECK(none.zero_overlap);

  const ModuleOperator qs = compose(ModuleOperator::identity(s23, 3) - pi, random_operator(rng, s23, 3, 3));
  const ZeroOverlap orth = zero_overlap_perturbation(g, v, frame_from_g_operator(adjoint(qs), e), e, k);
  CHECK(orth.is_dual);
  CHECK(orth.zero_overlap);

  const ZeroOverlap self = zero_overlap_perturbation(g, v, g, e, k);
  CHECK_FALSE(self.is_dual);
  CHECK_FALSE(self.zero_overlap);
  CHECK(self.overlap == doctest::Approx(uniform_norm(g.frame_operator())).epsilon(1e-10));
}

TEST_CASE("transform by a commuting Q") {
  Rng rng(7);
  const GFrame g = random_frame(rng, 2, {2, 2});
  const ModuleOperator k = random_operator(rng, s23, 2, 2);
  const ModuleOperator id = ModuleOperator::identity(s23, 2);
  const QTransform same = transform_by_Q(g, k, id);
  CHECK(same.envelope_low == doctest::Approx(same.C));
  CHECK(same.envelope_high == doctest::Approx(same.D));
  CHECK(same.inside);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(test::dist(same.frame.member(i), g.member(i)) <= 1e-15);

  const QTransform two = transform_by_Q(g, k, cplx(2.0) * id);
  CHECK(two.inside);
  CHECK(two.measured_high == doctest::Approx(4.0 * same.measured_high).epsilon(1e-10));
  CHECK(two.s_defect <= 1e-12);

  const ModuleOperator poly = cplx(0.5) * id + k + cplx(0.25) * compose(k, k);
  const QTransform pq = transform_by_Q(g, k, poly);
  CHECK(pq.inside);
  CHECK(pq.s_defect <= 1e-10);
  CHECK_THROWS_AS(transform_by_Q(g, k, random_operator(rng, s23, 2, 2)), PreconditionError);
}

TEST_CASE("isometric left transform") {
  Rng rng(8);
  const GFrame g({random_operator(rng, s23, 2, 2), random_operator(rng, s23, 2, 2)});
  const ModuleOperator k = random_operator(rng, s23, 2, 2);
  const GFrame same = isometry_left_transform(g, ModuleOperator::identity(s23, 2));
  CHECK(same.bounds().upper == doctest::Approx(g.bounds().upper).epsilon(1e-14));

  const GFrame tall = isometry_left_transform(g, random_isometry(rng, s23, 2, 3));
  CHECK(std::abs(tall.bounds().upper - g.bounds().upper) <= 1e-9);
  CHECK(std::abs(tall.bounds().lower - g.bounds().lower) <= 1e-9);
  CHECK(std::abs(optimal_kg_lower_bound(tall, k) - optimal_kg_lower_bound(g, k)) <= 1e-9);
  CHECK_THROWS_AS(isometry_left_transform(g, random_coisometry(rng, s23, 2, 1)), PreconditionError);
}
