#include "support.hpp"

#include <kgf/errors.hpp>
#include <kgf/instance_gen.hpp>

#include <doctest.h>

using namespace kgf;
using test::op;

namespace {
const AlgebraShape s23(std::vector<int>{2, 3});
}

TEST_CASE("realizations of simple operators") {
  const ModuleOperator id = ModuleOperator::identity(s23, 2);
  CHECK((id.realization(0) - Mat::Identity(4, 4)).norm() == 0.0);
  CHECK((id.realization(1) - Mat::Identity(6, 6)).norm() == 0.0);

  const ModuleOperator col = op({{1}, {0}, {1}});
  Mat expect(3, 1);
  expect << 1, 0, 1;
  CHECK((col.realization(0) - expect).norm() == 0.0);
  CHECK((adjoint(col).realization(0) - expect.transpose()).norm() == 0.0);
  CHECK(adjoint(id) == id);
}

TEST_CASE("coefficient and realization paths agree") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const ModuleOperator a = random_operator(rng, s23, 3, 2);
    const ModuleVector x = test::random_vector(rng, s23, 3);
    CHECK(test::dist(a.apply(x), a.apply_realized(x)) <= 1e-12 * (1.0 + uniform_norm(a)));
    const ModuleOperator b = random_operator(rng, s23, 2, 4);
    CHECK(test::dist(compose(b, a).apply(x), b.apply(a.apply(x))) <= 1e-11);
  }
}

TEST_CASE("adjoint pairing") {
  Rng rng(32);
  for (int t = 0; t < 30; ++t) {
    const ModuleOperator a = random_operator(rng, s23, 3, 2);
    const ModuleVector x = test::random_vector(rng, s23, 3);
    const ModuleVector y = test::random_vector(rng, s23, 2);
    const AlgebraElement lhs = inner(a.apply(x), y);
    const AlgebraElement rhs = inner(x, adjoint(a).apply(y));
    CHECK(max_seminorm(lhs - rhs) <= 1e-12 * (1.0 + max_seminorm(lhs)));
  }
}

TEST_CASE("uniform norm") {
  CHECK(uniform_norm(ModuleOperator::identity(s23, 3)) == doctest::Approx(1.0));
  CHECK(uniform_norm(op({{1}, {0}, {1}})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Rng rng(33);
  const ModuleOperator a = random_operator(rng, s23, 3, 3);
  const double n = uniform_norm(a);
  for (int s = 0; s < 100; ++s) {
    const ModuleVector x = test::random_vector(rng, s23, 3);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(vector_seminorm(a.apply(x), k) <= n * vector_seminorm(x, k) + 1e-9);
    }
  }
}

TEST_CASE("pseudo-inverse") {
  CHECK(pinv(ModuleOperator::identity(s23, 2)) == ModuleOperator::identity(s23, 2));
  CHECK(test::dist(pinv(op({{2, 0}, {0, 0}})), op({{0.5, 0}, {0, 0}})) <= 1e-15);
  Rng rng(34);
  for (int t = 0; t < 20; ++t) {
    ModuleOperator a = random_operator(rng, s23, 3, 4);
    if (t % 2 == 1) a = compose(random_projector(rng, s23, 4, 2), a);
    CHECK(test::dist(compose(a, compose(pinv(a), a)), a) <= 1e-9);
  }
}

TEST_CASE("range projection") {
  Rng rng(35);
  const ModuleOperator inv = random_invertible(rng, s23, 3, 0.5, 2.0);
  CHECK(test::dist(range_projection(inv), ModuleOperator::identity(s23, 3)) <= 1e-10);
  CHECK(test::dist(range_projection(op({{1, 0}, {0, 0}})), op({{1, 0}, {0, 0}})) <= 1e-15);
  for (int t = 0; t < 20; ++t) {
    const ModuleOperator a = compose(random_operator(rng, s23, 2, 3), random_projector(rng, s23, 2, 1));
    const ModuleOperator p = range_projection(a);
    CHECK(test::dist(compose(p, p), p) <= 1e-10);
    CHECK(test::dist(adjoint(p), p) <= 1e-10);
    // The image of a lies inside Ran(p).
    CHECK(test::dist(compose(p, a), a) <= 1e-10);
  }
}

TEST_CASE("norm sandwich") {
  const ModuleVector e1 = ModuleVector::basis(s23, 2, 0);
  Rng rng(36);
  CHECK(check_norm_sandwich(ModuleOperator::identity(s23, 2), test::random_vector(rng, s23, 2)));
  CHECK(check_norm_sandwich(cplx(2.0) * ModuleOperator::identity(s23, 2), e1));
  for (int t = 0; t < 500; ++t) {
    const ModuleOperator f = random_invertible(rng, s23, 2, 0.1, 5.0);
    CHECK(check_norm_sandwich(f, test::random_vector(rng, s23, 2)));
  }
  CHECK_THROWS_AS(check_norm_sandwich(op({{1, 0}, {0, 0}}), ModuleVector::basis(test::scalar_shape(), 2, 0)),
                  NotInvertibleError);
}

TEST_CASE("Douglas certificates") {
  SUBCASE("T = Z") {
    Rng rng(37);
    const ModuleOperator z = compose(random_operator(rng, s23, 3, 3), random_projector(rng, s23, 3, 1));
    const DouglasCertificate c = douglas(z, z);
    CHECK(c.range_included);
    CHECK(c.conditions_agree());
    CHECK(*c.alpha_min == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(test::dist(compose(z, *c.factor), z) <= 1e-10);
    CHECK(test::dist(compose(*c.factor, *c.factor), *c.factor) <= 1e-10);
  }
  SUBCASE("scalar pencil") {
    const DouglasCertificate c = douglas(op({{1, 0}, {0, 0}}), op({{2, 0}, {0, 0}}));
    CHECK(c.range_included);
    CHECK(c.majorized);
    CHECK(c.factorizes);
    CHECK(*c.alpha_min == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(test::dist(*c.factor, op({{0.5, 0}, {0, 0}})) <= 1e-15);
  }
  SUBCASE("orthogonal ranges") {
    const DouglasCertificate c = douglas(op({{0, 0}, {0, 1}}), op({{1, 0}, {0, 0}}));
    CHECK_FALSE(c.range_included);
    CHECK(c.conditions_agree());
    CHECK_FALSE(c.alpha_min.has_value());
    CHECK_FALSE(c.factor.has_value());
    CHECK(c.range_defect == doctest::Approx(1.0));
  }
  CHECK_THROWS_AS(douglas(op({{1, 0}}), op({{1, 0, 0}})), ShapeError);
}

TEST_CASE("positivity and (co)isometries") {
  Rng rng(38);
  const ModuleOperator a = random_operator(rng, s23, 3, 2);
  CHECK(is_positive(compose(a, adjoint(a))).is_positive);
  CHECK_FALSE(is_positive(cplx(-1.0) * ModuleOperator::identity(s23, 2)).is_positive);
  const ModuleOperator w = random_isometry(rng, s23, 2, 4);
  CHECK(is_isometry(w));
  CHECK_FALSE(is_coisometry(w));
  CHECK(is_coisometry(adjoint(w)));
  CHECK(smallest_singular_value(op({{3, 0}, {0, 0.5}})) == doctest::Approx(0.5));
}

TEST_CASE("PSD square root") {
  Rng rng(39);
  const ModuleOperator a = random_operator(rng, s23, 3, 3);
  const ModuleOperator s = compose(a, adjoint(a));
  const ModuleOperator r = psd_sqrt(s);
  CHECK(test::dist(compose(r, r), s) <= 1e-10 * (1.0 + uniform_norm(s)));
  CHECK(test::dist(adjoint(r), r) <= 1e-12);
}

TEST_CASE("spectral gaps") {
  const std::vector<SpectralGap> g = spectral_gaps(op({{1, 0}, {0, 1e-13}}));
  REQUIRE(g.size() == 1);
  CHECK(g[0].smallest_retained == doctest::Approx(1.0));
  CHECK(g[0].largest_discarded == doctest::Approx(1e-13));
}
