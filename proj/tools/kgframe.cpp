// kgframe: check instances, build canonical K-duals, run the randomized
// verification suite.
//
// Exit status: 0 success, 1 input or usage error, 2 a requested property
// fails (check, dual) or the suite found failures (verify), 3 the suite
// found only counterexamples in the audited check.

#include <kgf/duality.hpp>
#include <kgf/errors.hpp>
#include <kgf/serialize.hpp>
#include <kgf/suite.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using kgf::Json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFails = 2;
constexpr int kExitAudited = 3;

struct Common {
  kgf::Tolerances tol;
  std::string output = "-";
  bool timing = false;
};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--tol-psd", c.tol.psd, "Relative PSD threshold")->check(CLI::PositiveNumber);
  app.add_option("--tol-eq", c.tol.eq, "Relative threshold for operator identities")->check(CLI::PositiveNumber);
  app.add_option("--tol-rank", c.tol.rank, "Relative singular value cut-off")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", c.output, "Output file ('-' for stdout)");
  app.add_flag("--timing", c.timing, "Include wall time in the report");
}

int emit(const Json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "kgframe: cannot write " << path << "\n";
    return kExitInput;
  }
  out << text;
  return kExitOk;
}

const kgf::ModuleOperator* require_square(const kgf::InstanceDocument& doc, const std::string& name) {
  const kgf::ModuleOperator* k = doc.op(name);
  if (k == nullptr) return nullptr;
  if (k->domain_rank() != doc.module_rank || k->codomain_rank() != doc.module_rank) {
    throw kgf::ShapeError("operator '" + name + "' must be " + std::to_string(doc.module_rank) + " x " +
                          std::to_string(doc.module_rank) + ", got " + std::to_string(k->domain_rank()) + " x " +
                          std::to_string(k->codomain_rank()));
  }
  return k;
}

Json gap_warnings(const kgf::ModuleOperator& t, const std::string& name, const kgf::Tolerances& tol) {
  Json out = Json::array();
  for (const kgf::SpectralGap& g : kgf::spectral_gaps(t, tol)) {
    if (std::isfinite(g.ratio) && g.ratio < 1e3) {
      std::ostringstream msg;
      msg << name << ", block " << g.block << ": retained singular value " << g.smallest_retained
          << " is within a factor " << g.ratio << " of the discarded " << g.largest_discarded;
      out.push_back(msg.str());
    }
  }
  return out;
}

Json instance_summary(const kgf::InstanceDocument& doc) {
  Json j;
  j["algebra"]["blocks"] = Json(std::vector<int>(doc.shape.dims().begin(), doc.shape.dims().end()));
  j["module_rank"] = doc.module_rank;
  std::vector<std::size_t> ranks;
  for (const kgf::ModuleOperator& m : doc.frame) ranks.push_back(m.codomain_rank());
  j["codomain_ranks"] = ranks;
  return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------------ check

struct CheckArgs {
  Common common;
  std::string input;
  std::string k_name = "K";
  bool require_tight = false;
  bool require_g_frame = false;
  bool require_complete = false;
};

int run_check(const CheckArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const kgf::Tolerances& tol = a.common.tol;
  const kgf::InstanceDocument doc = kgf::load_instance(a.input);
  const kgf::ModuleOperator* k = require_square(doc, a.k_name);
  const kgf::GFrame frame(doc.frame);

  Json report = kgf::report_header("check", tol);
  report["input"] = a.input;
  report["instance"] = instance_summary(doc);

  const kgf::FrameBounds& b = kgf::optimal_g_bounds(frame);
  const bool g_frame = b.lower > tol.rank;
  const bool complete = kgf::is_g_complete(frame, tol);
  Json gj = kgf::to_json(b);
  gj["is_g_frame"] = g_frame;
  gj["g_complete"] = complete;
  report["g_frame"] = std::move(gj);
  Json warnings = gap_warnings(frame.frame_operator(), "frame operator", tol);

  Json predicates = Json::array();
  bool all_hold = true;
  const auto predicate = [&](const std::string& name, bool holds) {
    predicates.push_back({{"name", name}, {"holds", holds}});
    all_hold = all_hold && holds;
  };

  const kgf::ModuleOperator identity = kgf::ModuleOperator::identity(doc.shape, doc.module_rank);
  const kgf::ModuleOperator& kk = k != nullptr ? *k : identity;
  if (k != nullptr) {
    const kgf::KGFrameReport r = kgf::is_kg_frame(frame, *k, tol);
    report["k_g_frame"] = kgf::to_json(r);
    for (const Json& w : gap_warnings(*k, "operator '" + a.k_name + "'", tol)) warnings.push_back(w);
    predicate("k_g_frame", r.is_k_g_frame);
  } else {
    report["k_g_frame"] = nullptr;
  }
  report["tightness"] = kgf::to_json(kgf::tightness_check(frame, kk, tol));
  report["tightness"]["K"] = k != nullptr ? a.k_name : "identity";

  if (doc.dual) {
    const kgf::GFrame dual(*doc.dual);
    const kgf::GFrame partner(doc.dual_partner ? *doc.dual_partner : doc.frame);
    const kgf::DualCertificate c = kgf::verify_k_dual(partner, dual, kk, tol);
    report["dual"] = kgf::to_json(c);
    report["dual"]["against"] = doc.dual_partner ? "dual_partner" : "frame";
    predicate("k_dual", c.is_dual);
  }
  if (k == nullptr || a.require_g_frame) predicate("g_frame", g_frame);
  if (a.require_complete) predicate("g_complete", complete);
  if (a.require_tight) predicate("tight", report["tightness"]["tight"].get<bool>());

  report["warnings"] = std::move(warnings);
  report["predicates"] = std::move(predicates);
  const int status = all_hold ? kExitOk : kExitFails;
  report["exit_status"] = status;
  if (a.common.timing) report["wall_time_s"] = seconds_since(t0);
  const int written = emit(report, a.common.output);
  return written != kExitOk ? written : status;
}

// ------------------------------------------------------------------- dual

struct DualArgs {
  Common common;
  std::string input;
  std::string k_name = "K";
};

int run_dual(const DualArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const kgf::Tolerances& tol = a.common.tol;
  kgf::InstanceDocument doc = kgf::load_instance(a.input);
  const kgf::ModuleOperator* k = require_square(doc, a.k_name);
  if (k == nullptr) throw kgf::ParseError("$.operators." + a.k_name, "missing operator");
  const kgf::GFrame frame(doc.frame);
  const kgf::CanonicalDual cd = kgf::canonical_k_dual(frame, *k, tol);

  if (!cd.dual) {
    Json report = kgf::report_header("dual", tol);
    report["input"] = a.input;
    report["refusal"] = cd.refusal;
    report["k_g_frame"] = kgf::to_json(cd.report);
    report["exit_status"] = kExitFails;
    if (a.common.timing) report["wall_time_s"] = seconds_since(t0);
    const int written = emit(report, a.common.output);
    return written != kExitOk ? written : kExitFails;
  }

  doc.dual = std::vector<kgf::ModuleOperator>(cd.dual->members().begin(), cd.dual->members().end());
  const bool partner_needed = cd.residual_unprojected > tol.eq * (1.0 + kgf::uniform_norm(*k));
  if (partner_needed) {
    doc.dual_partner = std::vector<kgf::ModuleOperator>(cd.partner->members().begin(), cd.partner->members().end());
  } else {
    doc.dual_partner.reset();
  }
  doc.certificate = cd.certificate;
  Json out = kgf::to_json(doc);
  if (a.k_name != "K") out["certificate"]["K"] = a.k_name;
  Json diag;
  diag["residual_against_frame"] = kgf::number(cd.residual_unprojected);
  diag["smallest_retained"] = kgf::number(cd.smallest_retained);
  diag["conditioning_warning"] = cd.conditioning_warning ? Json(*cd.conditioning_warning) : Json(nullptr);
  if (a.common.timing) diag["wall_time_s"] = seconds_since(t0);
  out["diagnostics"] = std::move(diag);
  return emit(out, a.common.output);
}

// ----------------------------------------------------------------- verify

struct VerifyArgs {
  Common common;
  std::size_t trials = 50;
  std::uint64_t seed = 1;
  std::vector<std::string> theorems;
  std::string max_dims;
  std::vector<int> shape{2, 3};
  bool random_shape = false;
  bool serial = false;
  std::string fault;
};

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1 || v > 64) {
      throw CLI::ValidationError("--max-dims", "expected four integers in [1, 64], got '" + text + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.size() != 4) throw CLI::ValidationError("--max-dims", "expected N,D,I,B, got '" + text + "'");
  return out;
}

int run_verify(const VerifyArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  kgf::SuiteConfig cfg;
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.theorems = a.theorems;
  cfg.tol = a.common.tol;
  cfg.execution = a.serial ? kgf::Execution::serial : kgf::Execution::parallel;
  if (!a.max_dims.empty()) {
    const std::vector<std::size_t> d = parse_dims(a.max_dims);
    cfg.caps = {static_cast<int>(d[0]), d[1], d[2], d[3]};
  }
  if (a.random_shape) {
    cfg.shape.reset();
  } else {
    cfg.shape = kgf::AlgebraShape(a.shape);
  }
  if (!a.fault.empty()) {
    const auto colon = a.fault.rfind(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--inject-fault", "expected ID:TRIAL");
    cfg.fault = kgf::FaultInjection{a.fault.substr(0, colon), std::stoul(a.fault.substr(colon + 1))};
  }
  for (const std::string& id : a.theorems) {
    bool known = false;
    for (std::string_view t : kgf::theorem_ids()) known = known || t == id;
    if (!known) throw CLI::ValidationError("--theorems", "unknown theorem id '" + id + "'");
  }

  const std::vector<kgf::TheoremReport> reports = kgf::run_theorem_suite(cfg);
  const kgf::SuiteTally t = kgf::tally(reports);

  Json report = kgf::report_header("verify", cfg.tol);
  report["seed"] = cfg.seed;
  report["generator"] = std::string(kgf::kGeneratorName);
  Json config;
  config["trials"] = cfg.trials;
  config["theorems"] = cfg.theorems.empty() ? Json("all") : Json(cfg.theorems);
  config["max_dims"] = {{"block_dim", cfg.caps.max_block_dim},
                        {"module_rank", cfg.caps.max_module_rank},
                        {"index_count", cfg.caps.max_index_count},
                        {"blocks", cfg.caps.max_blocks}};
  config["shape"] = a.random_shape ? Json("random") : Json(a.shape);
  if (cfg.fault) config["injected_fault"] = {{"theorem", cfg.fault->theorem}, {"trial", cfg.fault->trial}};
  report["config"] = std::move(config);
  Json list = Json::array();
  std::size_t skipped = 0;
  for (const kgf::TheoremReport& r : reports) {
    list.push_back(kgf::to_json(r));
    skipped += r.skipped;
  }
  report["theorems"] = std::move(list);
  report["summary"] = {{"hard_failures", t.hard_failures}, {"audited_failures", t.audited_failures},
                       {"skipped", skipped}};
  const int status = t.hard_failures > 0 ? kExitFails : t.audited_failures > 0 ? kExitAudited : kExitOk;
  report["exit_status"] = status;
  if (a.common.timing) report["wall_time_s"] = seconds_since(t0);
  const int written = emit(report, a.common.output);
  return written != kExitOk ? written : status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-dimensional K-g-frames over block matrix algebras"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kgf::kToolVersion));

  CheckArgs check;
  CLI::App* check_cmd = app.add_subcommand("check", "Bounds, K-g-frame report, tightness and completeness");
  check_cmd->add_option("instance", check.input, "Instance document ('-' for stdin)")->required();
  check_cmd->add_option("--K", check.k_name, "Name of the operator to use as K");
  check_cmd->add_flag("--require-tight", check.require_tight, "Fail unless tight");
  check_cmd->add_flag("--require-g-frame", check.require_g_frame, "Fail unless a g-frame");
  check_cmd->add_flag("--require-complete", check.require_complete, "Fail unless g-complete");
  add_common(*check_cmd, check.common);

  DualArgs dual;
  CLI::App* dual_cmd = app.add_subcommand("dual", "Canonical K-dual with certificate");
  dual_cmd->add_option("instance", dual.input, "Instance document ('-' for stdin)")->required();
  dual_cmd->add_option("--K", dual.k_name, "Name of the operator to use as K");
  add_common(*dual_cmd, dual.common);

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "Randomized verification suite");
  verify_cmd->add_option("--trials", verify.trials, "Trials per check")->check(CLI::Range(0, 1000000));
  verify_cmd->add_option("--seed", verify.seed, "Master seed");
  verify_cmd->add_option("--theorems", verify.theorems, "Comma-separated check ids")->delimiter(',');
  verify_cmd->add_option("--max-dims", verify.max_dims, "Caps N,D,I,B: block dim, module rank, index count, blocks");
  verify_cmd->add_option("--shape", verify.shape, "Fix the algebra, e.g. 2,3")->delimiter(',')->check(
      CLI::Range(1, 64));
  verify_cmd->add_flag("--random-shape", verify.random_shape, "Draw the algebra per trial within --max-dims")
      ->excludes("--shape");
  verify_cmd->add_flag("--serial", verify.serial, "Run the serial reference path");
  verify_cmd->add_option("--inject-fault", verify.fault)->group("");
  add_common(*verify_cmd, verify.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*check_cmd) return run_check(check);
    if (*dual_cmd) return run_dual(dual);
    return run_verify(verify);
  } catch (const CLI::Error& e) {
    std::cerr << "kgframe: " << e.what() << "\n";
    return kExitInput;
  } catch (const kgf::ParseError& e) {
    std::cerr << "kgframe: invalid instance at " << e.what() << "\n";
    return kExitInput;
  } catch (const kgf::ShapeError& e) {
    std::cerr << "kgframe: shape error: " << e.what() << "\n";
    return kExitInput;
  } catch (const kgf::Error& e) {
    std::cerr << "kgframe: " << e.what() << "\n";
    return kExitInput;
  }
}
