#include <kgf/serialize.hpp>

#include <kgf/errors.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace kgf {

namespace {

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& obj, const std::string& path, const char* name) {
  if (!obj.contains(name)) throw ParseError(path + "." + name, "missing field");
  return obj.at(name);
}

std::size_t positive_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw ParseError(path, "expected a positive integer");
  return j.get<std::size_t>();
}

double real(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  return j.get<double>();
}

const Json& array(const Json& j, const std::string& path, std::size_t expected = 0, const char* what = "entries") {
  if (!j.is_array()) throw ParseError(path, "expected an array");
  if (expected != 0 && j.size() != expected) {
    throw ParseError(path, "expected " + std::to_string(expected) + " " + what + ", got " + std::to_string(j.size()));
  }
  return j;
}

std::vector<ModuleOperator> parse_family(const Json& j, const AlgebraShape& shape, std::size_t d,
                                         const std::string& path) {
  array(j, path);
  if (j.empty()) throw ParseError(path, "expected at least one member");
  std::vector<ModuleOperator> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = idx(path, i);
    const Json& m = j[i];
    if (!m.is_object()) throw ParseError(at, "expected an object");
    const std::size_t c = positive_int(field(m, at, "codomain_rank"), at + ".codomain_rank");
    const std::string cpath = at + ".coeffs";
    const Json& coeffs = field(m, at, "coeffs");
    array(coeffs, cpath, d, "rows (module_rank)");
    for (std::size_t r = 0; r < d; ++r) array(coeffs[r], idx(cpath, r), c, "columns (codomain_rank)");
    out.push_back(operator_from_json(coeffs, shape, cpath));
  }
  return out;
}

Json family_to_json(const std::vector<ModuleOperator>& members) {
  Json out = Json::array();
  for (const ModuleOperator& m : members) {
    Json e;
    e["codomain_rank"] = m.codomain_rank();
    e["coeffs"] = to_json(m);
    out.push_back(std::move(e));
  }
  return out;
}

DualConstruction construction_from_string(const std::string& s, const std::string& path) {
  for (DualConstruction c : {DualConstruction::given, DualConstruction::canonical, DualConstruction::combined,
                             DualConstruction::transported}) {
    if (s == to_string(c)) return c;
  }
  throw ParseError(path, "unknown construction '" + s + "'");
}

Json douglas_json(const DouglasCertificate& c) {
  Json j;
  j["range_included"] = c.range_included;
  j["majorized"] = c.majorized;
  j["factorizes"] = c.factorizes;
  j["alpha_min"] = c.alpha_min ? number(*c.alpha_min) : Json(nullptr);
  j["range_defect"] = number(c.range_defect);
  j["residual"] = number(c.residual);
  return j;
}

}  // namespace

const ModuleOperator* InstanceDocument::op(const std::string& name) const {
  const auto it = operators.find(name);
  return it == operators.end() ? nullptr : &it->second;
}

Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const AlgebraElement& a) {
  Json out = Json::array();
  for (const Mat& b : a.blocks()) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < b.cols(); ++c) row.push_back(Json::array({b(r, c).real(), b(r, c).imag()}));
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

Json to_json(const ModuleOperator& t) {
  Json out = Json::array();
  for (std::size_t i = 0; i < t.domain_rank(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < t.codomain_rank(); ++j) row.push_back(to_json(t.coeff(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json to_json(const ModuleVector& x) {
  Json out = Json::array();
  for (const AlgebraElement& c : x.components()) out.push_back(to_json(c));
  return out;
}

AlgebraElement element_from_json(const Json& j, const AlgebraShape& shape, const std::string& path) {
  array(j, path, shape.num_blocks(), "blocks");
  std::vector<Mat> blocks;
  for (std::size_t k = 0; k < shape.num_blocks(); ++k) {
    const std::string bpath = idx(path, k);
    const auto n = static_cast<std::size_t>(shape.dim(k));
    array(j[k], bpath, n, "rows");
    Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
      const std::string rpath = idx(bpath, r);
      array(j[k][r], rpath, n, "columns");
      for (std::size_t c = 0; c < n; ++c) {
        const std::string epath = idx(rpath, c);
        const Json& e = array(j[k][r][c], epath, 2, "numbers ([re, im])");
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            cplx(real(e[0], idx(epath, 0)), real(e[1], idx(epath, 1)));
      }
    }
    blocks.push_back(std::move(m));
  }
  return AlgebraElement(shape, std::move(blocks));
}

ModuleOperator operator_from_json(const Json& j, const AlgebraShape& shape, const std::string& path) {
  array(j, path);
  if (j.empty()) throw ParseError(path, "expected at least one row");
  const std::size_t d = j.size();
  std::size_t c = 0;
  std::vector<AlgebraElement> coeffs;
  for (std::size_t r = 0; r < d; ++r) {
    const std::string rpath = idx(path, r);
    array(j[r], rpath);
    if (r == 0) {
      c = j[r].size();
      if (c == 0) throw ParseError(rpath, "expected at least one column");
    } else if (j[r].size() != c) {
      throw ParseError(rpath, "ragged coefficient array: expected " + std::to_string(c) + " columns");
    }
    for (std::size_t col = 0; col < c; ++col) coeffs.push_back(element_from_json(j[r][col], shape, idx(rpath, col)));
  }
  return ModuleOperator(shape, d, c, std::move(coeffs));
}

InstanceDocument parse_instance(const Json& j) {
  if (!j.is_object()) throw ParseError("$", "expected an object");
  const Json& version = field(j, "$", "version");
  if (!version.is_string() || version.get<std::string>() != kInstanceVersion) {
    throw ParseError("$.version", std::string("expected \"") + kInstanceVersion + "\"");
  }
  const Json& algebra = field(j, "$", "algebra");
  if (!algebra.is_object()) throw ParseError("$.algebra", "expected an object");
  const Json& blocks = array(field(algebra, "$.algebra", "blocks"), "$.algebra.blocks");
  if (blocks.empty()) throw ParseError("$.algebra.blocks", "expected at least one block");
  std::vector<int> dims;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    dims.push_back(static_cast<int>(positive_int(blocks[k], idx("$.algebra.blocks", k))));
  }

  InstanceDocument doc;
  doc.shape = AlgebraShape(dims);
  doc.module_rank = positive_int(field(j, "$", "module_rank"), "$.module_rank");
  doc.frame = parse_family(field(j, "$", "frame"), doc.shape, doc.module_rank, "$.frame");
  if (j.contains("operators")) {
    const Json& ops = j.at("operators");
    if (!ops.is_object()) throw ParseError("$.operators", "expected an object");
    for (const auto& [name, value] : ops.items()) {
      doc.operators.emplace(name, operator_from_json(value, doc.shape, "$.operators." + name));
    }
  }
  if (j.contains("dual")) doc.dual = parse_family(j.at("dual"), doc.shape, doc.module_rank, "$.dual");
  if (j.contains("dual_partner")) {
    doc.dual_partner = parse_family(j.at("dual_partner"), doc.shape, doc.module_rank, "$.dual_partner");
  }
  if (j.contains("certificate")) {
    const Json& c = j.at("certificate");
    const std::string p = "$.certificate";
    if (!c.is_object()) throw ParseError(p, "expected an object");
    DualCertificate cert;
    cert.residual = real(field(c, p, "residual"), p + ".residual");
    const Json& is_dual = field(c, p, "is_dual");
    if (!is_dual.is_boolean()) throw ParseError(p + ".is_dual", "expected a boolean");
    cert.is_dual = is_dual.get<bool>();
    const Json& construction = field(c, p, "construction");
    if (!construction.is_string()) throw ParseError(p + ".construction", "expected a string");
    cert.construction = construction_from_string(construction.get<std::string>(), p + ".construction");
    doc.certificate = cert;
  }
  return doc;
}

InstanceDocument load_instance(const std::string& path) {
  std::string text;
  if (path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("$", std::string("invalid JSON: ") + e.what());
  }
  return parse_instance(j);
}

Json to_json(const InstanceDocument& doc) {
  Json j;
  j["version"] = kInstanceVersion;
  j["algebra"]["blocks"] = Json(std::vector<int>(doc.shape.dims().begin(), doc.shape.dims().end()));
  j["module_rank"] = doc.module_rank;
  j["frame"] = family_to_json(doc.frame);
  Json ops = Json::object();
  for (const auto& [name, t] : doc.operators) ops[name] = to_json(t);
  j["operators"] = std::move(ops);
  if (doc.dual) j["dual"] = family_to_json(*doc.dual);
  if (doc.dual_partner) j["dual_partner"] = family_to_json(*doc.dual_partner);
  if (doc.certificate) j["certificate"] = to_json(*doc.certificate);
  return j;
}

Json to_json(const Tolerances& tol) {
  Json j;
  j["psd"] = tol.psd;
  j["herm"] = tol.herm;
  j["rank"] = tol.rank;
  j["eq"] = tol.eq;
  return j;
}

Json to_json(const FrameBounds& b) {
  Json j;
  j["lower"] = number(b.lower);
  j["upper"] = number(b.upper);
  j["tight"] = b.tight;
  j["lower_block"] = b.lower_block;
  j["upper_block"] = b.upper_block;
  return j;
}

Json to_json(const KGFrameReport& r) {
  Json j;
  j["is_k_g_frame"] = r.is_k_g_frame;
  j["lower_C"] = number(r.lower_C);
  j["upper_D"] = number(r.upper_D);
  j["route"] = r.route == KGRoute::pencil ? "pencil" : "range_inclusion";
  j["degenerate"] = r.degenerate;
  j["range_included"] = r.pencil.range_included;
  j["leakage"] = number(r.pencil.leakage);
  j["worst_block"] = r.pencil.worst_block;
  j["douglas_vs_sqrt_S"] = douglas_json(r.douglas);
  if (r.counterexample) {
    const KGCounterexample& c = *r.counterexample;
    Json cx;
    cx["block"] = c.block;
    cx["k_energy"] = number(c.k_energy);
    cx["frame_energy"] = number(c.frame_energy);
    cx["margin"] = number(c.margin);
    cx["xi"] = to_json(c.xi);
    j["counterexample"] = std::move(cx);
  } else {
    j["counterexample"] = nullptr;
  }
  return j;
}

Json to_json(const TightnessReport& r) {
  Json j;
  j["tight"] = r.tight;
  j["A"] = r.A ? number(*r.A) : Json(nullptr);
  j["fitted_A"] = number(r.fitted_A);
  j["residual"] = number(r.residual);
  j["range_equal"] = r.range_equal;
  return j;
}

Json to_json(const DualCertificate& c) {
  Json j;
  j["residual"] = number(c.residual);
  j["is_dual"] = c.is_dual;
  j["construction"] = to_string(c.construction);
  return j;
}

Json to_json(const GenSpec& s) {
  Json j;
  j["seed"] = s.seed;
  j["shape"] = Json(std::vector<int>(s.shape.dims().begin(), s.shape.dims().end()));
  j["module_rank"] = s.module_rank;
  j["index_count"] = s.index_count;
  j["codomain_ranks"] = s.codomain_ranks;
  j["kind"] = to_string(s.kind);
  j["tight_constant"] = s.tight_constant;
  j["frame_rank_deficient"] = s.frame_rank_deficient;
  j["k_in_range"] = s.k_in_range;
  j["oblique"] = s.oblique;
  j["target_rank"] = s.target_rank;
  return j;
}

Json to_json(const TheoremReport& r) {
  Json j;
  j["theorem_id"] = r.id;
  j["audited"] = r.audited;
  j["trials"] = r.trials;
  j["passes"] = r.passes;
  j["skipped"] = r.skipped;
  Json failures = Json::array();
  for (const TrialFailure& f : r.failures) {
    Json e;
    e["trial"] = f.trial;
    e["trial_seed"] = f.trial_seed;
    e["reason"] = f.reason;
    e["audited"] = f.audited;
    e["spec"] = to_json(f.spec);
    Json measured = Json::object();
    for (const auto& [name, value] : f.measured) measured[name] = number(value);
    e["measured"] = std::move(measured);
    e["witness"] = f.witness ? to_json(*f.witness) : Json(nullptr);
    failures.push_back(std::move(e));
  }
  j["failures"] = std::move(failures);
  return j;
}

Json report_header(const std::string& command, const Tolerances& tol) {
  Json j;
  j["version"] = kReportVersion;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = command;
  j["tolerances"] = to_json(tol);
  return j;
}

}  // namespace kgf
