#include <kgf/serialize.hpp>
#include <kgf/suite.hpp>

#include <doctest.h>

#include <set>

using namespace kgf;

namespace {

std::string dump(const std::vector<TheoremReport>& reports) {
  Json j = Json::array();
  for (const TheoremReport& r : reports) j.push_back(to_json(r));
  return j.dump();
}

SuiteConfig small(std::size_t trials) {
  SuiteConfig c;
  c.trials = trials;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("check identifiers") {
  const auto ids = theorem_ids();
  CHECK(ids.size() == 22);
  CHECK(std::set<std::string_view>(ids.begin(), ids.end()).size() == ids.size());
  CHECK(is_audited("resolution"));
  CHECK_FALSE(is_audited("douglas"));
}

TEST_CASE("zero trials give an empty suite") {
  CHECK(run_theorem_suite(small(0)).empty());
}

TEST_CASE("unknown ids are rejected") {
  SuiteConfig c = small(1);
  c.theorems = {"douglas", "no_such_check"};
  CHECK_THROWS_AS(run_theorem_suite(c), std::invalid_argument);
}

TEST_CASE("selection keeps report order and counts") {
  SuiteConfig c = small(4);
  c.theorems = {"tightness", "g_operator"};
  const std::vector<TheoremReport> r = run_theorem_suite(c);
  REQUIRE(r.size() == 2);
  CHECK(r[0].id == "g_operator");
  CHECK(r[1].id == "tightness");
  for (const TheoremReport& t : r) CHECK(t.passes + t.skipped + t.failures.size() == t.trials);
}

TEST_CASE("serial and parallel runs are identical and repeatable") {
  SuiteConfig c = small(3);
  c.execution = Execution::serial;
  const std::string serial = dump(run_theorem_suite(c));
  c.execution = Execution::parallel;
  const std::string parallel = dump(run_theorem_suite(c));
  CHECK(serial == parallel);
  CHECK(parallel == dump(run_theorem_suite(c)));
  c.seed = 4;
  CHECK(parallel != dump(run_theorem_suite(c)));
}

TEST_CASE("all non-audited checks pass on the default caps") {
  const std::vector<TheoremReport> r = run_theorem_suite(small(8));
  const SuiteTally t = tally(r);
  CHECK(t.hard_failures == 0);
  for (const TheoremReport& rep : r) {
    if (!rep.audited) CHECK_MESSAGE(rep.failures.empty(), rep.id);
  }
}

TEST_CASE("all non-audited checks pass on randomly drawn algebras") {
  SuiteConfig c = small(8);
  c.shape.reset();
  c.seed = 11;
  const std::vector<TheoremReport> r = run_theorem_suite(c);
  CHECK(tally(r).hard_failures == 0);
  for (const TheoremReport& rep : r) {
    if (!rep.audited) CHECK_MESSAGE(rep.failures.empty(), rep.id);
  }
}

TEST_CASE("fault injection fails exactly the corrupted trial") {
  for (const char* id : {"canonical_dual", "dual_qp", "douglas", "g_operator", "tightness"}) {
    SuiteConfig c = small(5);
    c.theorems = {id};
    c.fault = FaultInjection{id, 2};
    const std::vector<TheoremReport> r = run_theorem_suite(c);
    REQUIRE(r.size() == 1);
    REQUIRE(r[0].failures.size() == 1);
    const TrialFailure& f = r[0].failures[0];
    CHECK(f.trial == 2);
    CHECK_FALSE(f.audited);
    CHECK(f.witness.has_value());
    CHECK(tally(r).hard_failures == 1);

    const TrialOutcome again = rerun_trial(c, id, 2);
    REQUIRE(again.failure.has_value());
    CHECK(again.failure->reason == f.reason);
    CHECK(again.failure->measured == f.measured);
    CHECK(again.failure->trial_seed == f.trial_seed);
  }
}

TEST_CASE("audited counterexamples re-evaluate") {
  SuiteConfig c = small(20);
  c.theorems = {"resolution"};
  const std::vector<TheoremReport> r = run_theorem_suite(c);
  REQUIRE(r.size() == 1);
  CHECK(r[0].audited);
  CHECK(tally(r).hard_failures == 0);
  CHECK(tally(r).audited_failures == r[0].failures.size());
  for (const TrialFailure& f : r[0].failures) {
    CHECK(f.audited);
    CHECK(f.witness.has_value());
    double v = 0.0;
    double vr = 0.0;
    for (const auto& [name, value] : f.measured) {
      if (name == "violation") v = value;
      if (name == "violation_realized") vr = value;
    }
    CHECK(v > 0.0);
    CHECK(std::abs(v - vr) <= 1e-10);
  }
}

TEST_CASE("fixed shape and caps are honoured") {
  SuiteConfig c = small(10);
  c.theorems = {"g_operator"};
  c.shape = AlgebraShape(std::vector<int>{1, 4});
  c.caps.max_module_rank = 2;
  c.fault = FaultInjection{"g_operator", 0};
  for (std::size_t t = 0; t < 10; ++t) {
    c.fault->trial = t;
    const TrialOutcome o = rerun_trial(c, "g_operator", t);
    REQUIRE(o.failure.has_value());
    CHECK(o.failure->spec.shape == *c.shape);
    CHECK(o.failure->spec.module_rank <= 2);
  }
}
