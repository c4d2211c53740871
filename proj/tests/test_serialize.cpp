#include "support.hpp"

#include <kgf/errors.hpp>
#include <kgf/instance_gen.hpp>
#include <kgf/serialize.hpp>

#include <doctest.h>

#include <limits>
#include <string>

using namespace kgf;

namespace {

const std::string data_dir = KGF_DATA_DIR;

bool same(const InstanceDocument& a, const InstanceDocument& b) {
  if (!(a.shape == b.shape) || a.module_rank != b.module_rank || a.frame.size() != b.frame.size()) return false;
  for (std::size_t i = 0; i < a.frame.size(); ++i) {
    if (!(a.frame[i] == b.frame[i])) return false;
  }
  if (a.operators.size() != b.operators.size()) return false;
  for (const auto& [name, t] : a.operators) {
    if (b.op(name) == nullptr || !(*b.op(name) == t)) return false;
  }
  return a.dual.has_value() == b.dual.has_value() && a.certificate.has_value() == b.certificate.has_value();
}

std::string parse_error_path(const Json& j) {
  try {
    parse_instance(j);
  } catch (const ParseError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("sample documents round-trip") {
  for (const char* name : {"ci1_k_diag.json", "ci1_k_identity.json", "coordinate_frame.json"}) {
    const InstanceDocument a = load_instance(data_dir + "/" + name);
    const Json j = to_json(a);
    const InstanceDocument b = parse_instance(j);
    CHECK(same(a, b));
    CHECK(to_json(b).dump() == j.dump());
  }
  const InstanceDocument ci = load_instance(data_dir + "/ci1_k_diag.json");
  CHECK(ci.module_rank == 2);
  CHECK(ci.frame.size() == 3);
  REQUIRE(ci.op("K") != nullptr);
  CHECK(ci.op("K")->coeff(0, 0) == AlgebraElement::identity(test::scalar_shape()));
}

TEST_CASE("random complex instances round-trip bit for bit") {
  GenSpec s;
  s.seed = 99;
  s.shape = AlgebraShape(std::vector<int>{2, 3});
  s.module_rank = 3;
  s.index_count = 2;
  s.codomain_ranks = {2, 2};
  s.kind = GenKind::isometry;
  const Instance inst = generate(s);
  InstanceDocument doc;
  doc.shape = s.shape;
  doc.module_rank = 3;
  doc.frame.assign(inst.frame.members().begin(), inst.frame.members().end());
  doc.operators.emplace("K", inst.K);
  doc.operators.emplace("W", *inst.W);
  doc.dual = doc.frame;
  doc.certificate = DualCertificate{1e-17, true, DualConstruction::canonical};
  const InstanceDocument back = parse_instance(Json::parse(to_json(doc).dump()));
  CHECK(same(doc, back));
  CHECK(*back.op("W") == *inst.W);
  CHECK(back.certificate->residual == 1e-17);
  CHECK(back.certificate->construction == DualConstruction::canonical);
}

TEST_CASE("malformed documents name the offending field") {
  const InstanceDocument ci = load_instance(data_dir + "/ci1_k_diag.json");
  const Json good = to_json(ci);

  Json j = good;
  j["version"] = "kgframe-instance/0";
  CHECK(parse_error_path(j) == "$.version");

  j = good;
  j.erase("module_rank");
  CHECK(parse_error_path(j) == "$.module_rank");

  j = good;
  j["algebra"]["blocks"] = Json::array({2});
  CHECK(parse_error_path(j) == "$.frame[0].coeffs[0][0][0]");

  j = good;
  j["frame"][1]["codomain_rank"] = 2;
  CHECK(parse_error_path(j) == "$.frame[1].coeffs[0]");

  j = good;
  j["frame"][2]["coeffs"][1][0][0][0][0][1] = "x";
  CHECK(parse_error_path(j) == "$.frame[2].coeffs[1][0][0][0][0][1]");

  j = good;
  j["operators"]["K"][1].push_back(j["operators"]["K"][1][0]);
  CHECK(parse_error_path(j) == "$.operators.K[1]");

  j = good;
  j["frame"] = Json::array();
  CHECK(parse_error_path(j) == "$.frame");

  j = good;
  j["certificate"] = {{"residual", 0.0}, {"is_dual", true}, {"construction", "guessed"}};
  CHECK(parse_error_path(j) == "$.certificate.construction");

  CHECK_THROWS_AS(load_instance(data_dir + "/missing.json"), ParseError);
}

TEST_CASE("non-finite numbers are written as strings") {
  CHECK(number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(number(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(number(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(number(0.25) == 0.25);
}

TEST_CASE("report fragments") {
  const Json h = report_header("check", Tolerances{});
  CHECK(h["version"] == kReportVersion);
  CHECK(h["tolerances"]["eq"] == 1e-8);

  TheoremReport r;
  r.id = "douglas";
  r.trials = 2;
  r.passes = 1;
  TrialFailure f;
  f.trial = 1;
  f.reason = "x";
  f.measured = {{"a", 1.0}};
  f.witness = ModuleVector::basis(test::scalar_shape(), 2, 0);
  r.failures.push_back(f);
  const Json j = to_json(r);
  CHECK(j["theorem_id"] == "douglas");
  CHECK(j["failures"][0]["measured"]["a"] == 1.0);
  CHECK(j["failures"][0]["witness"].size() == 2);
}
