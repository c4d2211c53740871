#pragma once

// JSON documents for instances and reports.
//
// An algebra element is an array over blocks of row-major matrices whose
// entries are [re, im] pairs. An operator A^d -> A^c is a d x c nested array
// of such elements. Doubles are written in shortest round-trip form, so
// parse(serialize(x)) reproduces x bit for bit.

#include <kgf/duality.hpp>
#include <kgf/kgframe.hpp>
#include <kgf/suite.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgf {

using Json = nlohmann::ordered_json;

inline constexpr const char* kInstanceVersion = "kgframe-instance/1";
inline constexpr const char* kReportVersion = "kgframe-report/1";
inline constexpr const char* kToolName = "kgframe";
inline constexpr const char* kToolVersion = "0.1.0";

struct InstanceDocument {
  AlgebraShape shape{std::vector<int>{1}};
  std::size_t module_rank = 1;
  std::vector<ModuleOperator> frame;
  std::map<std::string, ModuleOperator> operators;
  std::optional<std::vector<ModuleOperator>> dual;
  /// The family the dual is certified against, when it is not `frame`.
  std::optional<std::vector<ModuleOperator>> dual_partner;
  std::optional<DualCertificate> certificate;

  const ModuleOperator* op(const std::string& name) const;
};

Json to_json(const AlgebraElement& a);
Json to_json(const ModuleOperator& t);
Json to_json(const ModuleVector& x);
Json to_json(const InstanceDocument& doc);

/// Every ParseError carries the offending location, e.g.
/// "$.frame[1].coeffs[0][2][1]".
AlgebraElement element_from_json(const Json& j, const AlgebraShape& shape, const std::string& path);
ModuleOperator operator_from_json(const Json& j, const AlgebraShape& shape, const std::string& path);
InstanceDocument parse_instance(const Json& j);
/// Reads and parses a file ("-" for standard input).
InstanceDocument load_instance(const std::string& path);

// Report fragments.
Json to_json(const Tolerances& tol);
Json to_json(const FrameBounds& b);
Json to_json(const KGFrameReport& r);
Json to_json(const TightnessReport& r);
Json to_json(const DualCertificate& c);
Json to_json(const GenSpec& s);
Json to_json(const TheoremReport& r);

/// Common header: version, tool, command and tolerances.
Json report_header(const std::string& command, const Tolerances& tol);

/// +-infinity and NaN are not JSON numbers; they are written as strings.
Json number(double v);

}  // namespace kgf
