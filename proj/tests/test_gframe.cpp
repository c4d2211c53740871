#include "support.hpp"

#include <kgf/errors.hpp>
#include <kgf/instance_gen.hpp>

#include <doctest.h>

using namespace kgf;
using test::op;

namespace {
const AlgebraShape s1 = test::scalar_shape();
const AlgebraShape s23(std::vector<int>{2, 3});
}

TEST_CASE("analysis and synthesis on CI-1") {
  const GFrame f = test::ci1();
  const ModuleVector e1 = ModuleVector::basis(s1, 2, 0);
  const ModuleVector a = analysis(f, e1);
  REQUIRE(a.rank() == 3);
  CHECK(a == ModuleVector::basis(s1, 3, 0) + ModuleVector::basis(s1, 3, 2));
  CHECK(synthesis(f, ModuleVector::basis(s1, 3, 0)) == e1);
  CHECK(analysis(f, ModuleVector::zero(s1, 2)) == ModuleVector::zero(s1, 3));
  CHECK(synthesis(f, ModuleVector::zero(s1, 3)) == ModuleVector::zero(s1, 2));
}

TEST_CASE("coordinate frame analysis is the identity") {
  const GFrame e = test::coordinate_frame(s23, 3);
  Rng rng(1);
  const ModuleVector x = test::random_vector(rng, s23, 3);
  CHECK(analysis(e, x) == x);
  CHECK(e.frame_operator() == ModuleOperator::identity(s23, 3));
}

TEST_CASE("frame operator") {
  Mat expect(2, 2);
  expect << 2, 1, 1, 2;
  CHECK((test::ci1().frame_operator().realization(0) - expect).norm() == 0.0);

  Rng rng(2);
  const GFrame f({random_operator(rng, s23, 3, 2), random_operator(rng, s23, 3, 1), random_operator(rng, s23, 3, 2)});
  const ModuleOperator chain = compose(synthesis_operator(f), analysis_operator(f));
  CHECK(test::dist(f.frame_operator(), chain) <= 1e-12);
  const ModuleVector x = test::random_vector(rng, s23, 3);
  CHECK(test::dist(synthesis(f, analysis(f, x)), f.frame_operator().apply(x)) <= 1e-12);
}

TEST_CASE("optimal g-frame bounds") {
  const FrameBounds& b = test::ci1().bounds();
  CHECK(std::abs(b.lower - 1.0) <= 1e-9);
  CHECK(std::abs(b.upper - 3.0) <= 1e-9);
  CHECK_FALSE(b.tight);

  const FrameBounds& c = test::coordinate_frame(s23, 2).bounds();
  CHECK(c.lower == doctest::Approx(1.0));
  CHECK(c.upper == doctest::Approx(1.0));
  CHECK(c.tight);

  const GFrame flat({test::row_functional({1, 0}), test::row_functional({2, 0})});
  CHECK(flat.bounds().lower == doctest::Approx(0.0));
  CHECK(flat.bounds().upper == doctest::Approx(5.0));

  // Witnesses attain the bounds.
  Rng rng(3);
  const GFrame f({random_operator(rng, s23, 2, 2), random_operator(rng, s23, 2, 1)});
  const FrameBounds& fb = f.bounds();
  const ModuleVector a = analysis(f, fb.witness_high);
  const AlgebraElement lhs = inner(a, a);
  const AlgebraElement rhs = cplx(fb.upper) * inner(fb.witness_high, fb.witness_high);
  CHECK(max_seminorm(lhs - rhs) <= 1e-10);
}

TEST_CASE("g-completeness") {
  CHECK(is_g_complete(test::ci1()));
  CHECK_FALSE(is_g_complete(GFrame({test::row_functional({1, 0})})));
  CHECK(is_g_complete(test::coordinate_frame(s23, 3)));
}

TEST_CASE("coordinate g-orthonormal basis") {
  const std::vector<std::size_t> parts = {1, 1};
  const GFrame e = canonical_g_orthonormal_basis(s1, 2, parts);
  CHECK(e.member(0) == test::row_functional({1, 0}));
  CHECK(e.member(1) == test::row_functional({0, 1}));

  const std::vector<std::size_t> uneven = {2, 1};
  const GFrame e3 = canonical_g_orthonormal_basis(s23, 3, uneven);
  ModuleOperator sum = ModuleOperator::zero(s23, 3, 3);
  for (const ModuleOperator& m : e3.members()) sum += compose(adjoint(m), m);
  CHECK(sum == ModuleOperator::identity(s23, 3));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const ModuleOperator ee = compose(e3.member(i), adjoint(e3.member(j)));
      if (i == j) {
        CHECK(ee == ModuleOperator::identity(s23, e3.member(i).codomain_rank()));
      } else {
        CHECK(uniform_norm(ee) == 0.0);
      }
    }
  }
  Rng rng(4);
  std::vector<ModuleVector> samples;
  for (int s = 0; s < 5; ++s) samples.push_back(test::random_vector(rng, s23, 3));
  const BasisAxiomReport r = basis_axiom_diagnostic(e3, samples);
  CHECK(r.delta_condition);
  CHECK(r.a_valued_parseval);
  // Norms of x_i x_i^* do not add inside a matrix block.
  CHECK_FALSE(r.seminorm_parseval);
  std::vector<ModuleVector> scalar_samples;
  for (int s = 0; s < 5; ++s) scalar_samples.push_back(test::random_vector(rng, s1, 2));
  CHECK(basis_axiom_diagnostic(e, scalar_samples).seminorm_parseval);
  const GFrame scaled({cplx(2.0) * e3.member(0), e3.member(1)});
  CHECK_FALSE(basis_axiom_diagnostic(scaled, samples).a_valued_parseval);

  const std::vector<std::size_t> bad = {2, 2};
  CHECK_THROWS_AS(canonical_g_orthonormal_basis(s1, 3, bad), PartitionError);
  const std::vector<std::size_t> zero = {3, 0};
  CHECK_THROWS_AS(canonical_g_orthonormal_basis(s1, 3, zero), PartitionError);
}

TEST_CASE("g-operator") {
  const GFrame e = test::coordinate_frame(s1, 3);
  CHECK(g_operator(e, e) == ModuleOperator::identity(s1, 3));
  const GFrame doubled({cplx(2.0) * e.member(0), cplx(2.0) * e.member(1), cplx(2.0) * e.member(2)});
  CHECK(test::dist(g_operator(doubled, e), cplx(2.0) * ModuleOperator::identity(s1, 3)) == 0.0);

  Rng rng(5);
  const std::vector<std::size_t> parts = {1, 2, 1};
  const GFrame basis = canonical_g_orthonormal_basis(s23, 4, parts);
  for (int t = 0; t < 20; ++t) {
    const ModuleOperator q0 = random_operator(rng, s23, 4, 4);
    const GFrame f = frame_from_g_operator(q0, basis);
    const ModuleOperator q = g_operator(f, basis);
    CHECK(test::dist(q, q0) <= 1e-12);
    CHECK(test::dist(compose(q, adjoint(q)), f.frame_operator()) <= 1e-10);
  }
  CHECK_THROWS_AS(g_operator(test::ci1(), test::coordinate_frame(s1, 2)), BasisIncompatibleError);
  const GFrame not_basis({cplx(2.0) * e.member(0), e.member(1), e.member(2)});
  CHECK_THROWS_AS(g_operator(e, not_basis), BasisIncompatibleError);
}

TEST_CASE("frame construction is validated") {
  CHECK_THROWS_AS(GFrame(std::vector<ModuleOperator>{}), ShapeError);
  CHECK_THROWS_AS(GFrame({test::row_functional({1, 0}), test::row_functional({1, 0, 0})}), ShapeError);
}
