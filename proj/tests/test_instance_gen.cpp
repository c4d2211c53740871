#include "support.hpp"

#include <kgf/errors.hpp>
#include <kgf/instance_gen.hpp>
#include <kgf/kgframe.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace kgf;

namespace {

const AlgebraShape s23(std::vector<int>{2, 3});

GenSpec base(GenKind kind, std::size_t d, std::vector<std::size_t> ranks) {
  GenSpec s;
  s.seed = 7;
  s.shape = s23;
  s.module_rank = d;
  s.index_count = ranks.size();
  s.codomain_ranks = std::move(ranks);
  s.kind = kind;
  return s;
}

}  // namespace

TEST_CASE("seed mixing matches published constants") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(derive_seed(1, "douglas", 4) == splitmix64(splitmix64(splitmix64(1) ^ fnv1a("douglas")) ^ 4));
  CHECK(derive_seed(1, "douglas", 4) != derive_seed(1, "douglas", 5));
}

TEST_CASE("generator draws follow the named algorithm") {
  std::mt19937_64 engine(9);
  Rng rng(9);
  for (int i = 0; i < 5; ++i) CHECK(rng.uniform() == static_cast<double>(engine() >> 11) * 0x1.0p-53);

  Rng a(10);
  Rng b(10);
  const double u1 = b.uniform();
  const double u2 = b.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  CHECK(a.normal() == r * std::cos(2.0 * std::numbers::pi * u2));
  CHECK(a.normal() == r * std::sin(2.0 * std::numbers::pi * u2));
}

TEST_CASE("identical specs give identical instances") {
  GenSpec s = base(GenKind::generic, 2, {1, 1, 1});
  s.shape = test::scalar_shape();
  const Instance a = generate(s);
  const Instance b = generate(s);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.frame.member(i) == b.frame.member(i));
  CHECK(a.K == b.K);
  s.seed = 8;
  CHECK_FALSE(generate(s).K == a.K);
}

TEST_CASE("tight kind") {
  GenSpec s = base(GenKind::tight, 3, {1, 2});
  s.tight_constant = 4.0;
  const Instance inst = generate(s);
  const TightnessReport t = tightness_check(inst.frame, inst.K);
  CHECK(t.tight);
  CHECK(std::abs(*t.A - 4.0) <= 1e-8);
  s.codomain_ranks = {1, 1};
  CHECK_THROWS_AS(generate(s), InfeasibleError);
}

TEST_CASE("(co)isometry kinds") {
  const Instance co = generate(base(GenKind::coisometry, 3, {2, 2}));
  REQUIRE(co.W.has_value());
  const ModuleOperator& w = *co.W;
  CHECK(test::dist(compose(w, adjoint(w)), ModuleOperator::identity(s23, w.codomain_rank())) <= 1e-10);

  const Instance iso = generate(base(GenKind::isometry, 3, {2, 2}));
  REQUIRE(iso.W.has_value());
  CHECK(is_isometry(*iso.W));

  GenSpec small = base(GenKind::isometry, 3, {2, 2});
  small.target_rank = 1;
  CHECK_THROWS_AS(generate(small), InfeasibleError);
  CHECK_THROWS_AS(generate(base(GenKind::coisometry, 3, {2, 1})), InfeasibleError);
}

TEST_CASE("commuting pairs and resolutions") {
  const Instance cp = generate(base(GenKind::commuting_pair, 3, {2, 2}));
  REQUIRE(cp.Q.has_value());
  CHECK(test::dist(compose(*cp.Q, cp.K), compose(cp.K, *cp.Q)) <= 1e-10);

  for (bool oblique : {false, true}) {
    GenSpec s = base(GenKind::resolution, 3, {3, 3, 3});
    s.oblique = oblique;
    const Instance r = generate(s);
    ModuleOperator sum = ModuleOperator::zero(s23, 3, 3);
    for (const ModuleOperator& m : r.frame.members()) {
      sum += m;
      CHECK(test::dist(compose(m, m), m) <= 1e-9);
    }
    CHECK(test::dist(sum, ModuleOperator::identity(s23, 3)) <= 1e-12);
    CHECK(smallest_singular_value(r.K) >= 0.5 - 1e-12);
  }
}

TEST_CASE("rank-deficient frames and operators") {
  GenSpec s = base(GenKind::generic, 4, {2, 3});
  s.frame_rank_deficient = true;
  s.k_in_range = true;
  const Instance in = generate(s);
  CHECK_FALSE(is_g_complete(in.frame));
  CHECK(is_kg_frame(in.frame, in.K).is_k_g_frame);
  s.k_in_range = false;
  CHECK_FALSE(is_kg_frame(generate(s).frame, generate(s).K).is_k_g_frame);

  const Instance rd = generate(base(GenKind::rank_deficient_K, 3, {2, 2}));
  CHECK(smallest_singular_value(rd.K) <= 1e-12);
}

TEST_CASE("generator input validation") {
  GenSpec s = base(GenKind::generic, 2, {1, 1});
  s.codomain_ranks = {1};
  CHECK_THROWS_AS(generate(s), ShapeError);
  s = base(GenKind::generic, 0, {1});
  CHECK_THROWS_AS(generate(s), ShapeError);
  CHECK_THROWS_AS(gen_kind_from_string("spiral"), std::invalid_argument);
  CHECK(gen_kind_from_string(to_string(GenKind::commuting_pair)) == GenKind::commuting_pair);
}

TEST_CASE("helpers") {
  Rng rng(12);
  for (int t = 0; t < 50; ++t) {
    const std::vector<std::size_t> p = random_partition(rng, 6, 3);
    REQUIRE(p.size() == 3);
    std::size_t sum = 0;
    for (std::size_t x : p) {
      CHECK(x >= 1);
      sum += x;
    }
    CHECK(sum == 6);
  }
  const ModuleOperator inv = random_invertible(rng, s23, 3, 0.5, 2.0);
  CHECK(smallest_singular_value(inv) >= 0.5 - 1e-12);
  CHECK(uniform_norm(inv) <= 2.0 + 1e-12);
  const ModuleOperator p = random_projector(rng, s23, 3, 2);
  CHECK(test::dist(compose(p, p), p) <= 1e-12);
  CHECK(linalg::numerical_rank(p.realization(0), 1e-10) == 4);
}
