#include "bbl/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bbl/campaign.hpp"
#include "bbl/geometry.hpp"
#include "bbl/io.hpp"
#include "bbl/lifting.hpp"
#include "bbl/supconv.hpp"

namespace bbl::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct OutputOptions {
  std::string out_path;
  std::string csv_path;
};

void add_output_options(CLI::App& cmd, OutputOptions& o) {
  cmd.add_option("--out", o.out_path, "Write the JSON report to this file instead of stdout");
  cmd.add_option("--csv", o.csv_path, "Also write the per-record rows as CSV");
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::parse_error, "cannot write " + path);
  file << content;
  if (!file) throw Error(ErrorCode::parse_error, "failed writing " + path);
}

void emit(const Report& report, const OutputOptions& o, std::ostream& out) {
  const std::string text = report_to_json(report).dump(2) + "\n";
  if (o.out_path.empty())
    out << text;
  else
    write_file(o.out_path, text);
  if (!o.csv_path.empty()) write_file(o.csv_path, report_csv(report));
}

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Json point_json(const Point& x) { return Json(x); }

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string instance;
  std::string p;
  std::string lambda;
  double epsilon = 0.1;
  std::size_t n = 3;
  std::int64_t direction_bound = 5;
  OutputOptions output;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const Instance inst = load_instance(a.instance);
  Rational p;
  if (!a.p.empty())
    p = parse_rational(a.p);
  else if (inst.mean)
    p = inst.mean->p();
  else
    throw Error(ErrorCode::invalid_argument, "no exponent: pass --p or give \"mean\" in the instance");
  Rational lambda = !a.lambda.empty() ? parse_rational(a.lambda) : inst.mean ? inst.mean->lambda() : Rational(1, 2);
  const MeanSpec spec(p, lambda);

  const VerificationReport v = verify_main_theorem(inst.f, inst.g, spec, a.epsilon, a.n, a.direction_bound);
  const double sum_f = to_double(v.sum_f);

  Report report;
  report.command = "verify";
  report.instance_digest = instance_digest(inst);
  report.parameters = {{"p", to_string(p)},      {"lambda", to_string(lambda)},
                       {"epsilon", a.epsilon},    {"n", a.n},
                       {"direction_bound", a.direction_bound}};
  const auto& nd = v.nondegeneracy;
  report.records.push_back(make_record("nondegeneracy", nd.threshold.value, to_double(nd.worst.fraction),
                                       Relation::at_least, 0.0, std::nullopt, nd.ok));
  report.records.push_back(make_record("main_inequality", v.sum_h, v.bound, Relation::at_least, kTolerance * sum_f,
                                       std::nullopt, nd.ok));
  Json nondeg;
  nondeg["ok"] = nd.ok;
  nondeg["worst_normal"] = point_json(nd.worst.normal);
  nondeg["worst_fraction"] = to_string(nd.worst.fraction);
  nondeg["threshold"] = nd.threshold.exact ? Json(to_string(*nd.threshold.exact)) : Json(nd.threshold.value);
  nondeg["directions_checked"] = nd.directions_checked;
  report.details = {{"sum_f", to_string(v.sum_f)},
                    {"sum_g", to_string(v.sum_g)},
                    {"sum_h_star", v.sum_h},
                    {"bound", v.bound},
                    {"verdict", to_string(v.verdict)},
                    {"nondegeneracy", std::move(nondeg)}};
  report.elapsed_ms = elapsed_ms(start);
  emit(report, a.output, out);
  switch (v.verdict) {
    case Verdict::pass:
      return kExitPass;
    case Verdict::fail:
      return kExitFail;
    case Verdict::hypothesis_not_met:
      return kExitHypothesisNotMet;
  }
  return kExitFail;
}

// --- extremal ---------------------------------------------------------------

struct ExtremalArgs {
  std::string gamma;
  std::int64_t side = 0;
  std::string p;
  std::size_t dimension = 1;
  double epsilon = 0.1;
  std::size_t n = 1;
  std::int64_t direction_bound = 3;
  OutputOptions output;
};

int cmd_extremal(const ExtremalArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const Rational gamma = parse_rational(a.gamma);
  const Rational p = parse_rational(a.p);
  if (a.n == 0) throw Error(ErrorCode::invalid_argument, "n must be positive");
  const ExtremalInstance inst = extremal_instance(gamma, a.side, p, a.dimension);
  const MeanSpec spec(p, Rational(1, 2));

  Report report;
  report.command = "extremal";
  report.parameters = {{"gamma", to_string(gamma)}, {"N", a.side},         {"p", to_string(p)},
                       {"d", a.dimension},          {"epsilon", a.epsilon}, {"n", a.n},
                       {"direction_bound", a.direction_bound}};

  const double mass_h = inst.h.mass();
  report.records.push_back(make_record("mass_h_identity", mass_h, inst.predicted_h_mass, Relation::equal,
                                       1e-9 * inst.predicted_h_mass));

  // Smallest h(x+y) / M_{-p,1/2}(f(x), g(y)) over every pair.
  const MeanSpec constraint = spec.negated();
  double worst_ratio = INFINITY;
  for (const auto& [x, fx] : inst.f.entries())
    for (const auto& [y, gy] : inst.g.entries())
      worst_ratio = std::min(worst_ratio, inst.h.at(add_points(x, y)) / p_mean(constraint, fx, gy));
  report.records.push_back(make_record("admissibility", worst_ratio, 1.0, Relation::at_least, 1e-12));

  const double sum_h_star = min_admissible_h(inst.f, inst.g, spec).mass();
  report.records.push_back(make_record("minimal_h_dominated", mass_h, sum_h_star, Relation::at_least,
                                       1e-12 * mass_h));

  // Every primitive hyperplane meets [N]^d in at most N^{d-1} points, so n
  // hyperplanes carry at most (1-gamma) + min(n,N) gamma / N.
  const std::int64_t reach = std::min<std::int64_t>(static_cast<std::int64_t>(a.n), a.side);
  const Rational bound = 1 - gamma + gamma * fraction(reach, a.side);
  Point axis(a.dimension, 0);
  axis[0] = 1;
  const Rational axis_fraction = top_n_hyperplane_mass(inst.f, axis, a.n);
  Rational worst = 0;
  Point worst_normal = axis;
  for (const auto& u : primitive_directions(a.dimension, a.direction_bound)) {
    Rational fr = top_n_hyperplane_mass(inst.f, u, a.n);
    if (fr > worst) {
      worst = fr;
      worst_normal = u;
    }
  }
  report.records.push_back(make_record("axis_coverage", to_double(axis_fraction), to_double(bound), Relation::equal,
                                       0.0));
  report.records.push_back(make_record("coverage_bound", to_double(bound), to_double(worst), Relation::at_least, 0.0));

  Json coverage;
  coverage["axis_fraction"] = to_string(axis_fraction);
  coverage["worst_fraction"] = to_string(worst);
  coverage["worst_normal"] = point_json(worst_normal);
  coverage["excess_over_atom"] = to_string(Rational(worst - (1 - gamma)));
  coverage["fitted_C"] = to_double(Rational((worst - (1 - gamma)) * a.side / static_cast<unsigned long>(a.n)));
  if (sgn(p) > 0 && p * static_cast<unsigned long>(a.dimension) < 1) {
    const CoverageThreshold t = nondegeneracy_threshold(a.dimension, p);
    coverage["nondegeneracy_threshold"] = t.exact ? Json(to_string(*t.exact)) : Json(t.value);
    coverage["nondegenerate"] = t.admits(worst);
  } else {
    coverage["nondegeneracy_threshold"] = nullptr;
    coverage["nondegenerate"] = nullptr;
  }
  const double target = std::ldexp(1.0, static_cast<int>(a.dimension)) - a.epsilon;
  report.details = {{"sum_h", mass_h},
                    {"predicted_sum_h", inst.predicted_h_mass},
                    {"sum_h_star", sum_h_star},
                    {"target", target},
                    {"tightness_condition_met", inst.predicted_h_mass >= target},
                    {"coverage", std::move(coverage)}};
  report.elapsed_ms = elapsed_ms(start);
  emit(report, a.output, out);
  return summarize(report).failures ? kExitFail : kExitPass;
}

// --- campaign ---------------------------------------------------------------

struct CampaignArgs {
  std::string mode = "lemma21";
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  std::size_t dimension = 1;
  std::size_t support_max = 20;
  std::string p;
  std::string lambda = "1/2";
  double epsilon = 0.1;
  std::size_t n = 3;
  std::int64_t direction_bound = 5;
  OutputOptions output;
};

int cmd_campaign(const CampaignArgs& a, std::ostream& out) {
  CampaignConfig c;
  c.mode = parse_campaign_mode(a.mode);
  c.seed = a.seed;
  c.trials = a.trials;
  c.dimension = a.dimension;
  c.support_max = a.support_max;
  if (!a.p.empty()) c.p = parse_rational(a.p);
  c.lambda = parse_rational(a.lambda);
  c.epsilon = a.epsilon;
  c.n = a.n;
  c.direction_bound = a.direction_bound;
  c.threads = configured_threads();
  const Report report = run_campaign(c);
  emit(report, a.output, out);
  return summarize(report).failures ? kExitFail : kExitPass;
}

// --- sumset -----------------------------------------------------------------

struct SumsetArgs {
  std::string instance;
  std::string domain;
  OutputOptions output;
};

int cmd_sumset(const SumsetArgs& a, std::ostream& out) {
  const auto start = Clock::now();
  const Instance inst = load_instance(a.instance);
  const PointSet A = support(inst.f);
  const PointSet B = support(inst.g);
  if (A.empty() || B.empty()) throw Error(ErrorCode::empty_input, "sumset needs nonempty supports");
  const PointSet S = sumset(A, B);

  Report report;
  report.command = "sumset";
  report.instance_digest = instance_digest(inst);
  const std::string domain_name = !a.domain.empty() ? a.domain : inst.domain.value_or("");
  report.parameters = {{"domain", domain_name.empty() ? Json(nullptr) : Json(domain_name)}};
  report.records.push_back(make_record("sumset_size", static_cast<double>(S.size()),
                                       static_cast<double>(A.size() + B.size() - 1), Relation::at_least, 0.0));
  Json details;
  details["size_a"] = A.size();
  details["size_b"] = B.size();
  details["size_sum"] = S.size();
  details["bm_deficit"] = bm_deficit(A, B);
  Json points = Json::array();
  for (const auto& z : S.points()) points.push_back(z);
  details["sumset"] = std::move(points);
  if (!domain_name.empty()) {
    const LiftingDomain domain = make_domain(domain_name, inst.dimension);
    const SetBmCheck check = check_set_bm(domain, A, B);
    report.records.push_back(make_record("set_bm", check.lhs, check.rhs, Relation::at_least, 1e-12 * check.rhs));
    details["domain_convention"] = domain.convention();
    details["domain_constant"] = domain.constant();
  }
  report.details = std::move(details);
  report.elapsed_ms = elapsed_ms(start);
  emit(report, a.output, out);
  return summarize(report).failures ? kExitFail : kExitPass;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
  std::string path;
  std::string csv_path;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + a.path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const Report report = report_from_json(parse_json_text(buffer.str()));

  std::size_t inconsistent = 0;
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const CheckRecord& r = report.records[i];
    const double scale = std::max({1.0, std::fabs(r.lhs), std::fabs(r.rhs)});
    const bool margin_ok = std::fabs(r.margin - (r.lhs - r.rhs)) <= 1e-12 * scale;
    if (!margin_ok || derive_verdict(r) != r.verdict) {
      ++inconsistent;
      err << "record " << i << " (" << r.name << "): verdict '" << r.verdict << "' does not follow from its numbers\n";
    }
  }
  const ReportSummary s = summarize(report);
  out << "command: " << report.command << "\n"
      << "records: " << report.records.size() << "\n"
      << "pass: " << s.passes << "\n"
      << "fail: " << s.failures << "\n"
      << "hypothesis-not-met: " << s.hypothesis_not_met << "\n"
      << "inconsistent: " << inconsistent << "\n";
  if (!a.csv_path.empty()) write_file(a.csv_path, report_csv(report));
  if (inconsistent) return kExitError;
  return s.failures ? kExitFail : kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Checks for discrete Brunn-Minkowski and Borell-Brascamp-Lieb type inequalities", "bbl-lab"};
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check the discrete functional inequality on an instance file");
  verify_cmd->add_option("instance", verify.instance, "Instance JSON file")->required();
  verify_cmd->add_option("--p", verify.p, "Exponent p in (0, 1/d), e.g. 1/4");
  verify_cmd->add_option("--lambda", verify.lambda, "Mean weight (default 1/2)");
  verify_cmd->add_option("--epsilon", verify.epsilon, "Slack in (2^d - epsilon)")->capture_default_str();
  verify_cmd->add_option("--n", verify.n, "Number of parallel hyperplanes")->capture_default_str();
  verify_cmd->add_option("--direction-bound", verify.direction_bound, "Max |coefficient| of scanned normals")
      ->capture_default_str();
  add_output_options(*verify_cmd, verify.output);

  ExtremalArgs extremal;
  auto* extremal_cmd = app.add_subcommand("extremal", "Generate and check the atom-plus-box family");
  extremal_cmd->add_option("--gamma", extremal.gamma, "Diffuse mass in (0,1)")->required();
  extremal_cmd->add_option("--N", extremal.side, "Box side")->required();
  extremal_cmd->add_option("--p", extremal.p, "Exponent p > 0")->required();
  extremal_cmd->add_option("--d", extremal.dimension, "Dimension")->capture_default_str();
  extremal_cmd->add_option("--epsilon", extremal.epsilon, "Slack in (2^d - epsilon)")->capture_default_str();
  extremal_cmd->add_option("--n", extremal.n, "Number of hyperplanes for coverage")->capture_default_str();
  extremal_cmd->add_option("--direction-bound", extremal.direction_bound, "Max |coefficient| of scanned normals")
      ->capture_default_str();
  add_output_options(*extremal_cmd, extremal.output);

  CampaignArgs campaign;
  auto* campaign_cmd = app.add_subcommand("campaign", "Run a seeded random property campaign");
  campaign_cmd
      ->add_option("--mode", campaign.mode,
                   "lemma21 | lemma22 | prop14 | cube-exhaustive | cube-sampled | main-theorem | transport | "
                   "meanderiv")
      ->capture_default_str();
  campaign_cmd->add_option("--seed", campaign.seed, "Random seed")->capture_default_str();
  campaign_cmd->add_option("--trials", campaign.trials, "Number of trials")->capture_default_str();
  campaign_cmd->add_option("--d", campaign.dimension, "Dimension (maximum for mixed-dimension modes)")
      ->capture_default_str();
  campaign_cmd->add_option("--support-max", campaign.support_max, "Largest support size")->capture_default_str();
  campaign_cmd->add_option("--p", campaign.p, "Exponent (mode default when omitted)");
  campaign_cmd->add_option("--lambda", campaign.lambda, "Mean weight")->capture_default_str();
  campaign_cmd->add_option("--epsilon", campaign.epsilon, "Slack for main-theorem mode")->capture_default_str();
  campaign_cmd->add_option("--n", campaign.n, "Hyperplane count for main-theorem mode")->capture_default_str();
  campaign_cmd->add_option("--direction-bound", campaign.direction_bound, "Max |coefficient| of scanned normals")
      ->capture_default_str();
  add_output_options(*campaign_cmd, campaign.output);

  SumsetArgs sumset_args;
  auto* sumset_cmd = app.add_subcommand("sumset", "Sumset of the supports of f and g, with an optional domain check");
  sumset_cmd->add_option("instance", sumset_args.instance, "Instance JSON file")->required();
  sumset_cmd->add_option("--domain", sumset_args.domain, "zd-add | cube-midpoint | grid-scaled");
  add_output_options(*sumset_cmd, sumset_args.output);

  ReportArgs report_args;
  auto* report_cmd = app.add_subcommand("report", "Summarise and validate a report file");
  report_cmd->add_option("report", report_args.path, "Report JSON file")->required();
  report_cmd->add_option("--csv", report_args.csv_path, "Write the records as CSV");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }

  try {
    if (*verify_cmd) return cmd_verify(verify, out);
    if (*extremal_cmd) return cmd_extremal(extremal, out);
    if (*campaign_cmd) return cmd_campaign(campaign, out);
    if (*sumset_cmd) return cmd_sumset(sumset_args, out);
    if (*report_cmd) return cmd_report(report_args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace bbl::cli
