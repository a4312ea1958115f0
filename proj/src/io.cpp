#include "bbl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <openssl/evp.h>

namespace bbl {

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

Integer integer_from_json(const Json& v, std::string_view what) {
  if (v.is_number_unsigned()) return Integer(std::to_string(v.get<std::uint64_t>()), 10);
  if (v.is_number_integer()) return Integer(std::to_string(v.get<std::int64_t>()), 10);
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    std::string_view digits = s;
    if (!digits.empty() && digits.front() == '-') digits.remove_prefix(1);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string_view::npos)
      schema_error(std::string(what) + ": '" + s + "' is not an integer");
    return Integer(s, 10);
  }
  schema_error(std::string(what) + " must be an integer");
}

Json integer_to_json(const Integer& z) {
  if (mpz_fits_slong_p(z.get_mpz_t())) return Json(static_cast<std::int64_t>(z.get_si()));
  return Json(z.get_str(10));
}

Rational rational_from_json(const Json& v, std::string_view what) {
  try {
    if (v.is_string()) return parse_rational(v.get_ref<const std::string&>());
    if (v.is_number_integer()) return Rational(integer_from_json(v, what));
    if (v.is_number_float()) return rational_from_double(v.get<double>());
  } catch (const Error& e) {
    schema_error(std::string(what) + ": " + e.what());
  }
  schema_error(std::string(what) + " must be a rational string or a number");
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

// Infinite or NaN values would silently become null in JSON.
Json number(double x) {
  if (std::isfinite(x)) return Json(x);
  return Json(format_double(x));
}

double number_from_json(const Json& v, std::string_view what) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan" || s == "-nan") return NAN;
  }
  schema_error(std::string(what) + " must be a number");
}

}  // namespace

Json function_to_json(const SparseFunction& f) {
  Json out = Json::array();
  for (const auto& [x, v] : f.entries()) {
    Json row = Json::array();
    for (auto c : x) row.push_back(c);
    row.push_back(integer_to_json(v.get_num()));
    row.push_back(integer_to_json(v.get_den()));
    out.push_back(std::move(row));
  }
  return out;
}

SparseFunction function_from_json(const Json& entries, std::size_t dimension, std::string_view field) {
  const std::string name(field);
  if (!entries.is_array()) schema_error("'" + name + "' must be an array of entries");
  SparseFunction f(dimension);
  std::set<Point> seen;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Json& row = entries[k];
    const std::string where = name + "[" + std::to_string(k) + "]";
    if (!row.is_array() || row.size() != dimension + 2)
      schema_error(where + " must hold " + std::to_string(dimension) + " coordinates then numerator and denominator");
    Point x(dimension);
    for (std::size_t i = 0; i < dimension; ++i) {
      if (!row[i].is_number_integer()) schema_error(where + ": coordinates must be integers");
      x[i] = row[i].get<std::int64_t>();
    }
    const Integer num = integer_from_json(row[dimension], where + " numerator");
    const Integer den = integer_from_json(row[dimension + 1], where + " denominator");
    if (sgn(den) <= 0) schema_error(where + ": denominator must be positive");
    if (sgn(num) <= 0) schema_error(where + ": value must be positive");
    if (!seen.insert(x).second) schema_error(where + ": duplicate point " + to_string(x));
    Rational value(num, den);
    value.canonicalize();
    f.set(x, value);
  }
  return f;
}

Json instance_to_json(const Instance& instance) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["dimension"] = instance.dimension;
  doc["f"] = function_to_json(instance.f);
  doc["g"] = function_to_json(instance.g);
  if (instance.mean)
    doc["mean"] = {{"p", to_string(instance.mean->p())}, {"lambda", to_string(instance.mean->lambda())}};
  if (instance.domain) doc["domain"] = *instance.domain;
  return doc;
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) schema_error("instance must be a JSON object");
  if (!doc.contains("schema") || doc["schema"] != kSchemaVersion)
    schema_error("instance must declare \"schema\": " + std::to_string(kSchemaVersion));
  if (!doc.contains("dimension") || !doc["dimension"].is_number_integer() || doc["dimension"].get<std::int64_t>() <= 0)
    schema_error("\"dimension\" must be a positive integer");
  Instance inst;
  inst.dimension = doc["dimension"].get<std::size_t>();
  if (!doc.contains("f") || !doc.contains("g")) schema_error("instance needs both \"f\" and \"g\"");
  inst.f = function_from_json(doc["f"], inst.dimension, "f");
  inst.g = function_from_json(doc["g"], inst.dimension, "g");
  if (doc.contains("mean")) {
    const Json& m = doc["mean"];
    if (!m.is_object() || !m.contains("p")) schema_error("\"mean\" must be an object with \"p\"");
    const Rational p = rational_from_json(m["p"], "mean.p");
    const Rational lambda = m.contains("lambda") ? rational_from_json(m["lambda"], "mean.lambda") : Rational(1, 2);
    try {
      inst.mean.emplace(p, lambda);
    } catch (const Error& e) {
      schema_error(std::string("mean: ") + e.what());
    }
  }
  if (doc.contains("domain")) {
    if (!doc["domain"].is_string()) schema_error("\"domain\" must be a string");
    inst.domain = doc["domain"].get<std::string>();
  }
  return inst;
}

Json parse_json_text(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string message = e.what();
    if (auto pos = message.find("syntax error"); pos != std::string::npos) message = message.substr(pos);
    throw Error(ErrorCode::parse_error,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message);
  }
}

Instance parse_instance(std::string_view text) { return instance_from_json(parse_json_text(text)); }

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_instance(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string instance_digest(const Instance& instance) {
  const std::string canonical = instance_to_json(instance).dump();
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(canonical.data(), canonical.size(), hash, &length, EVP_sha256(), nullptr);
  std::ostringstream os;
  os << "sha256:" << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < length; ++i) os << std::setw(2) << static_cast<int>(hash[i]);
  return os.str();
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::at_least:
      return ">=";
    case Relation::at_most:
      return "<=";
    case Relation::equal:
      return "==";
  }
  return ">=";
}

Relation relation_from_string(std::string_view s) {
  if (s == ">=") return Relation::at_least;
  if (s == "<=") return Relation::at_most;
  if (s == "==") return Relation::equal;
  schema_error("unknown relation '" + std::string(s) + "'");
}

std::string derive_verdict(const CheckRecord& r) {
  if (!r.hypothesis) return "hypothesis-not-met";
  bool ok = false;
  switch (r.relation) {
    case Relation::at_least:
      ok = r.margin >= -r.tolerance;
      break;
    case Relation::at_most:
      ok = r.margin <= r.tolerance;
      break;
    case Relation::equal:
      ok = std::fabs(r.margin) <= r.tolerance;
      break;
  }
  return ok ? "pass" : "fail";
}

CheckRecord make_record(std::string name, double lhs, double rhs, Relation relation, double tolerance,
                        std::optional<std::int64_t> trial, bool hypothesis) {
  CheckRecord r;
  r.name = std::move(name);
  r.trial = trial;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.relation = relation;
  r.tolerance = tolerance;
  r.hypothesis = hypothesis;
  r.verdict = derive_verdict(r);
  return r;
}

ReportSummary summarize(const Report& report) {
  ReportSummary s;
  for (const auto& r : report.records) {
    if (r.verdict == "pass")
      ++s.passes;
    else if (r.verdict == "hypothesis-not-met")
      ++s.hypothesis_not_met;
    else
      ++s.failures;
  }
  return s;
}

Json report_to_json(const Report& report) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["tool"] = kToolName;
  doc["version"] = kToolVersion;
  doc["command"] = report.command;
  doc["instance_digest"] = report.instance_digest ? Json(*report.instance_digest) : Json(nullptr);
  doc["parameters"] = report.parameters;

  Json records = Json::array();
  // Slack: how far each record is from failing, in the record's own sense.
  std::map<std::string, double> worst;
  for (const auto& r : report.records) {
    Json j;
    j["name"] = r.name;
    if (r.trial) j["trial"] = *r.trial;
    j["lhs"] = number(r.lhs);
    j["rhs"] = number(r.rhs);
    j["margin"] = number(r.margin);
    j["relation"] = to_string(r.relation);
    j["tolerance"] = r.tolerance;
    j["hypothesis"] = r.hypothesis;
    j["verdict"] = r.verdict;
    records.push_back(std::move(j));
    if (!r.hypothesis) continue;
    const double slack = r.relation == Relation::at_least ? r.margin
                         : r.relation == Relation::at_most ? -r.margin
                                                           : -std::fabs(r.margin);
    auto [it, inserted] = worst.try_emplace(r.name, slack);
    if (!inserted) it->second = std::min(it->second, slack);
  }
  doc["records"] = std::move(records);

  const ReportSummary s = summarize(report);
  Json summary;
  summary["records"] = report.records.size();
  summary["pass"] = s.passes;
  summary["fail"] = s.failures;
  summary["hypothesis_not_met"] = s.hypothesis_not_met;
  Json worst_json = Json::object();
  for (const auto& [name, slack] : worst) worst_json[name] = number(slack);
  summary["worst_slack"] = std::move(worst_json);
  summary["verdict"] = s.failures ? "fail" : (s.passes == 0 && s.hypothesis_not_met ? "hypothesis-not-met" : "pass");
  doc["summary"] = std::move(summary);
  doc["details"] = report.details;
  doc["timing"] = {{"elapsed_ms", report.elapsed_ms}};
  return doc;
}

Report report_from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != kSchemaVersion)
    schema_error("report must declare \"schema\": " + std::to_string(kSchemaVersion));
  if (!doc.contains("records") || !doc["records"].is_array()) schema_error("report has no \"records\" array");
  Report report;
  report.command = doc.value("command", "");
  if (doc.contains("instance_digest") && doc["instance_digest"].is_string())
    report.instance_digest = doc["instance_digest"].get<std::string>();
  if (doc.contains("parameters")) report.parameters = doc["parameters"];
  if (doc.contains("details")) report.details = doc["details"];
  if (doc.contains("timing") && doc["timing"].contains("elapsed_ms"))
    report.elapsed_ms = doc["timing"]["elapsed_ms"].get<double>();
  for (const auto& j : doc["records"]) {
    if (!j.is_object() || !j.contains("name") || !j.contains("verdict"))
      schema_error("every record needs \"name\" and \"verdict\"");
    CheckRecord r;
    r.name = j["name"].get<std::string>();
    if (j.contains("trial")) r.trial = j["trial"].get<std::int64_t>();
    r.lhs = number_from_json(j.at("lhs"), "lhs");
    r.rhs = number_from_json(j.at("rhs"), "rhs");
    r.margin = number_from_json(j.at("margin"), "margin");
    r.relation = relation_from_string(j.value("relation", ">="));
    r.tolerance = j.value("tolerance", 0.0);
    r.hypothesis = j.value("hypothesis", true);
    r.verdict = j["verdict"].get<std::string>();
    report.records.push_back(std::move(r));
  }
  return report;
}

std::string report_csv(const Report& report) {
  std::ostringstream os;
  os << "name,trial,lhs,rhs,margin,relation,tolerance,hypothesis,verdict\n";
  for (const auto& r : report.records) {
    os << r.name << ',' << (r.trial ? std::to_string(*r.trial) : "") << ',' << format_double(r.lhs) << ','
       << format_double(r.rhs) << ',' << format_double(r.margin) << ',' << to_string(r.relation) << ','
       << format_double(r.tolerance) << ',' << (r.hypothesis ? "true" : "false") << ',' << r.verdict << '\n';
  }
  return os.str();
}

}  // namespace bbl
