#pragma once

// JSON instance and report files (schema 1) plus CSV export.
//
// Instance:
//   { "schema": 1, "dimension": d,
//     "f": [[x_1, ..., x_d, num, den], ...], "g": [...],
//     "mean": {"p": "1/4", "lambda": "1/2"},        (optional)
//     "domain": "zd-add" }                           (optional)
// num/den are JSON integers or decimal strings (for values beyond 64 bits);
// p and lambda are rational strings or JSON numbers.
//
// Report:
//   { "schema": 1, "tool": "bbl-lab", "version": ..., "command": ...,
//     "instance_digest": "sha256:..." | null, "parameters": {...},
//     "records": [{"name", "trial"?, "lhs", "rhs", "margin", "relation",
//                  "tolerance", "hypothesis", "verdict"}, ...],
//     "summary": {...}, "details": {...}, "timing": {"elapsed_ms": ...} }

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bbl/functions.hpp"
#include "bbl/means.hpp"

namespace bbl {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolName = "bbl-lab";
inline constexpr const char* kToolVersion = "1.0.0";

struct Instance {
  std::size_t dimension = 1;
  SparseFunction f{1};
  SparseFunction g{1};
  std::optional<MeanSpec> mean;
  std::optional<std::string> domain;
};

Json function_to_json(const SparseFunction& f);
SparseFunction function_from_json(const Json& entries, std::size_t dimension, std::string_view field);

Json instance_to_json(const Instance& instance);
Instance instance_from_json(const Json& doc);

/// Parses and validates an instance. Malformed JSON raises parse_error with a
/// "line L, column C" location; schema violations raise invalid_argument.
Instance parse_instance(std::string_view text);
Instance load_instance(const std::filesystem::path& path);

/// "sha256:<hex>" of the canonical serialisation.
std::string instance_digest(const Instance& instance);

/// Reads a JSON document, reporting syntax errors with line and column.
Json parse_json_text(std::string_view text);

/// How a record's verdict follows from its numbers.
enum class Relation { at_least, at_most, equal };

std::string to_string(Relation r);
Relation relation_from_string(std::string_view s);

struct CheckRecord {
  std::string name;
  std::optional<std::int64_t> trial;
  double lhs = 0;
  double rhs = 0;
  double margin = 0;  ///< lhs - rhs
  Relation relation = Relation::at_least;
  double tolerance = 0;
  bool hypothesis = true;  ///< false: preconditions of the check were not met
  std::string verdict;
};

/// Builds a record with margin = lhs - rhs and the verdict implied by it:
/// "hypothesis-not-met" when !hypothesis; otherwise "pass" when
///   at_least: margin >= -tol,  at_most: margin <= tol,  equal: |margin| <= tol
/// and "fail" else.
CheckRecord make_record(std::string name, double lhs, double rhs, Relation relation, double tolerance,
                        std::optional<std::int64_t> trial = std::nullopt, bool hypothesis = true);

/// The verdict make_record would assign to these numbers.
std::string derive_verdict(const CheckRecord& record);

struct Report {
  std::string command;
  std::optional<std::string> instance_digest;
  Json parameters = Json::object();
  std::vector<CheckRecord> records;
  Json details = Json::object();
  double elapsed_ms = 0;
};

struct ReportSummary {
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::size_t hypothesis_not_met = 0;
};

ReportSummary summarize(const Report& report);

Json report_to_json(const Report& report);
Report report_from_json(const Json& doc);

/// One header line then one row per record.
std::string report_csv(const Report& report);

}  // namespace bbl
