#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "idm/cohort_csv.hpp"
#include "idm/errors.hpp"
#include "idm/estimators.hpp"
#include "idm/inference.hpp"
#include "idm/report.hpp"
#include "idm/simulation.hpp"

namespace idm::cli {

namespace {

using nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_time_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size() || !std::isfinite(v)) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::logic_error&) {
      throw UsageError(std::string("bad time '") + item + "' in " + flag);
    }
  }
  if (out.empty()) throw UsageError(std::string(flag) + " needs at least one time");
  return out;
}

// Where results and the manifest go. With --output, the manifest defaults
// to <output>.manifest.json; on stdout it is echoed to stderr.
class Sink {
 public:
  Sink(const std::string& output, const std::string& manifest, std::ostream& out, std::ostream& err)
      : out_(out), err_(err), manifest_path_(manifest) {
    if (!output.empty()) {
      file_ = std::make_unique<std::ofstream>(output, std::ios::binary);
      if (!*file_) throw UsageError("cannot write '" + output + "'");
      if (manifest_path_.empty()) manifest_path_ = output + ".manifest.json";
    }
  }

  std::ostream& stream() { return file_ ? *file_ : out_; }

  void write_manifest(const ordered_json& manifest) {
    if (manifest_path_.empty()) {
      err_ << "manifest: " << manifest.dump() << '\n';
      return;
    }
    std::ofstream m(manifest_path_, std::ios::binary);
    m << manifest.dump(2) << '\n';
  }

 private:
  std::ostream& out_;
  std::ostream& err_;
  std::string manifest_path_;
  std::unique_ptr<std::ofstream> file_;
};

ordered_json base_manifest(const std::string& subcommand, const std::vector<std::string>& args) {
  ordered_json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["subcommand"] = subcommand;
  m["command_line"] = args;
  return m;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string s;
  for (const auto& f : flags) {
    if (!s.empty()) s += ';';
    s += f;
  }
  return s;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string input;
  double s = 0.0;
  std::string t_list;
  std::string method = "check";
  int boot = 0;
  double level = 0.95;
  std::uint64_t seed = 1;
  std::optional<double> tau;
  std::string output;
  std::string manifest;
  std::string curve;
};

struct Row {
  Method method;
  TransitionQuery q;
  std::optional<MethodResult> result;
  std::optional<CiResult> ci;
  std::vector<std::string> flags;
};

int cmd_estimate(const EstimateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  std::vector<Method> methods;
  if (a.method == "all") {
    methods = {Method::Check, Method::MM, Method::MMStute, Method::AalenJohansen};
  } else if (auto m = parse_method(a.method)) {
    methods = {*m};
  } else {
    throw UsageError("unknown --method '" + a.method + "'");
  }
  const auto times = parse_time_list(a.t_list, "--t");
  std::vector<TransitionQuery> queries;
  for (double t : times) {
    try {
      queries.push_back(TransitionQuery::make(a.s, t));
    } catch (const Error& e) {
      throw UsageError(e.message());
    }
  }
  if (a.boot < 0) throw UsageError("--boot must be >= 0");
  if (a.tau && !(*a.tau > 0.0)) throw UsageError("--tau must be positive");
  if (!a.curve.empty() && (queries.size() != 1 || methods.size() != 1 ||
                           (methods[0] != Method::Check && methods[0] != Method::MM))) {
    throw UsageError("--curve needs a single --t and --method check or mm");
  }

  Cohort cohort = read_cohort_csv_file(a.input);
  if (a.tau) cohort = artificial_censoring(cohort, *a.tau);

  std::vector<Row> rows;
  for (const auto& q : queries) {
    for (Method m : methods) {
      Row row{m, q, std::nullopt, std::nullopt, {}};
      try {
        row.result = run_method(m, cohort, q, true);
        if (a.boot > 0) row.ci = bootstrap_ci(cohort, q, m, a.boot, a.level, a.seed);
        const auto& d = row.result->estimate.diagnostics;
        if (d.support_warning) row.flags.emplace_back("support");
        if (d.exceeds_one) row.flags.emplace_back("exceeds_one");
        if (d.min_risk_ratio) row.flags.push_back("min_risk_ratio=" + format_number(*d.min_risk_ratio));
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidArgument) throw;
        row.result.reset();
        row.ci.reset();
        row.flags.push_back("error=" + std::string(to_string(e.kind())));
      }
      rows.push_back(std::move(row));
    }
  }

  // Internal-consistency check between the two algebraically equal forms.
  if (a.method == "all") {
    for (std::size_t i = 0; i < rows.size(); i += methods.size()) {
      const Row& mm = rows[i + 1];
      const Row& stute = rows[i + 2];
      if (mm.result && stute.result &&
          std::abs(mm.result->estimate.value - stute.result->estimate.value) > 1e-9) {
        rows[i + 1].flags.emplace_back("mm_stute_mismatch");
        rows[i + 2].flags.emplace_back("mm_stute_mismatch");
      }
    }
  }

  Sink sink(a.output, a.manifest, out, err);
  std::ostream& o = sink.stream();
  if (a.boot > 0) {
    write_ci_csv_header(o);
    o << ",flags\n";
  } else {
    o << "method,s,t,estimate,variance,flags\n";
  }
  std::size_t failed = 0;
  for (const auto& row : rows) {
    if (!row.result) ++failed;
    if (a.boot > 0) {
      if (row.ci) {
        write_ci_csv_row(o, row.method, row.q, *row.ci);
      } else {
        o << to_string(row.method) << ',' << format_number(row.q.s) << ',' << format_number(row.q.t)
          << ",,,,,,,,";
      }
    } else {
      o << to_string(row.method) << ',' << format_number(row.q.s) << ',' << format_number(row.q.t) << ',';
      if (row.result) {
        o << format_number(row.result->estimate.value) << ',';
        if (row.result->variance) o << format_number(*row.result->variance);
      } else {
        o << ',';
      }
    }
    o << ',' << join_flags(row.flags) << '\n';
  }

  if (!a.curve.empty() && rows[0].result) {
    std::ofstream c(a.curve, std::ios::binary);
    if (!c) throw UsageError("cannot write '" + a.curve + "'");
    const bool landmark = methods[0] == Method::Check;
    write_step_function_csv(c, cif_curve(build_counting(cohort, queries[0], landmark)));
  }

  auto m = base_manifest("estimate", args);
  m["parameters"] = {{"input", a.input},   {"s", a.s},         {"t", times},
                     {"method", a.method}, {"boot", a.boot},   {"level", a.level},
                     {"tau", a.tau ? ordered_json(*a.tau) : ordered_json(nullptr)}};
  m["seed"] = a.seed;
  m["input_sha256"] = file_sha256(a.input);
  m["subjects"] = cohort.size();
  sink.write_manifest(m);

  if (failed == rows.size()) {
    err << "error: every requested estimate failed\n";
    return kAllFailed;
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string scenario = "table1";
  std::string config;
  int reps = 1000;
  int n = 100;
  std::uint64_t seed = 1;
  double s = 10.0;
  std::string t_list = "30,40,50,60,70,80,90,100";
  std::string estimators;
  std::string output;
  std::string manifest;
  bool reps_set = false;
  bool n_set = false;
  bool seed_set = false;
};

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  ScenarioConfig cfg;
  std::vector<Method> methods = {Method::Check, Method::MM, Method::AalenJohansen};
  if (a.scenario == "table1") {
    cfg = ScenarioConfig::table1();
  } else if (a.scenario == "table2") {
    cfg = ScenarioConfig::table2();
  } else if (a.scenario == "table3") {
    cfg = ScenarioConfig::table3();
    methods = {Method::AalenJohansen, Method::Check};
  } else if (a.scenario != "custom") {
    throw UsageError("unknown --scenario '" + a.scenario + "'");
  }
  if (a.scenario == "custom") {
    if (a.config.empty()) throw UsageError("--scenario custom needs --config");
    std::ifstream in(a.config);
    if (!in) throw UsageError("cannot open '" + a.config + "'");
    cfg = read_scenario_config(in);
  } else if (!a.config.empty()) {
    throw UsageError("--config is only valid with --scenario custom");
  }
  if (a.scenario != "custom" || a.n_set) cfg.n = a.n;
  if (a.scenario != "custom" || a.reps_set) cfg.replications = a.reps;
  if (a.scenario != "custom" || a.seed_set) cfg.seed = a.seed;
  if (cfg.replications < 1) throw UsageError("--reps must be >= 1");

  if (!a.estimators.empty()) {
    methods.clear();
    std::stringstream ss(a.estimators);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto m = parse_method(name);
      if (!m || *m == Method::MMStute) throw UsageError("--estimators takes check, mm, aj");
      methods.push_back(*m);
    }
  }
  const auto times = parse_time_list(a.t_list, "--t");

  BiasVarianceTable table;
  try {
    table = run_monte_carlo(cfg, methods, times, a.s);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::DegenerateCohort) {
      err << "error: " << e.what() << '\n';
      return kAllDegenerate;
    }
    throw UsageError(e.message());
  }

  Sink sink(a.output, a.manifest, out, err);
  write_bias_variance_csv(sink.stream(), table);

  auto m = base_manifest("simulate", args);
  ordered_json est = ordered_json::array();
  for (Method x : methods) est.push_back(std::string(to_string(x)));
  m["parameters"] = {{"scenario", a.scenario},
                     {"n", cfg.n},
                     {"replications", cfg.replications},
                     {"hazard_ill", cfg.hazard_ill},
                     {"hazard_direct", cfg.hazard_direct},
                     {"progression_factor", cfg.progression_factor},
                     {"censor_hazard", cfg.censor_hazard},
                     {"truncation", cfg.truncation ? ordered_json{{"location", cfg.truncation->location},
                                                                  {"scale", cfg.truncation->scale},
                                                                  {"shape", cfg.truncation->shape}}
                                                   : ordered_json(nullptr)},
                     {"s", a.s},
                     {"t", times},
                     {"estimators", est}};
  m["seed"] = cfg.seed;
  m["input_sha256"] = a.config.empty() ? ordered_json(nullptr) : ordered_json(file_sha256(a.config));
  m["mean_cohort_size"] = table.mean_cohort_size;
  m["degenerate_replications"] = table.degenerate_replications;
  sink.write_manifest(m);
  return kOk;
}

// ---------------------------------------------------------------- transform

struct TransformArgs {
  std::string input;
  double tau = 0.0;
  std::string output;
  std::string manifest;
};

int cmd_transform(const TransformArgs& a, const std::vector<std::string>& args, std::ostream& out,
                  std::ostream& err) {
  if (!(a.tau > 0.0)) throw UsageError("--tau must be positive");
  const Cohort cohort = read_cohort_csv_file(a.input);
  const Cohort clipped = artificial_censoring(cohort, a.tau);
  Sink sink(a.output, a.manifest, out, err);
  write_cohort_csv(sink.stream(), clipped);

  auto m = base_manifest("transform", args);
  m["parameters"] = {{"input", a.input}, {"tau", a.tau}};
  m["seed"] = nullptr;
  m["input_sha256"] = file_sha256(a.input);
  sink.write_manifest(m);
  return kOk;
}

}  // namespace

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open '" + path + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transition probabilities in illness-death models", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "estimate P01(s,t) from a cohort CSV");
  est->add_option("--input", ea.input, "cohort CSV")->required();
  est->add_option("--s", ea.s, "landmark time s")->required();
  est->add_option("--t", ea.t_list, "comma-separated times t >= s")->required();
  est->add_option("--method", ea.method, "check | mm | mm-stute | aj | all");
  est->add_option("--boot", ea.boot, "bootstrap resamples (0 = none)");
  est->add_option("--level", ea.level, "confidence level");
  est->add_option("--seed", ea.seed, "bootstrap seed");
  est->add_option("--tau", ea.tau, "artificial censoring time");
  est->add_option("--output", ea.output, "output CSV (default stdout)");
  est->add_option("--manifest", ea.manifest, "run manifest JSON path");
  est->add_option("--curve", ea.curve, "write the partial CIF step function as time,value CSV");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo bias/variance study");
  sim->add_option("--scenario", sa.scenario, "table1 | table2 | table3 | custom");
  sim->add_option("--config", sa.config, "key=value scenario file (custom)");
  auto* reps_opt = sim->add_option("--reps", sa.reps, "replications");
  auto* n_opt = sim->add_option("--n", sa.n, "subjects per replication");
  auto* seed_opt = sim->add_option("--seed", sa.seed, "master seed");
  sim->add_option("--s", sa.s, "landmark time");
  sim->add_option("--t", sa.t_list, "comma-separated evaluation times");
  sim->add_option("--estimators", sa.estimators, "comma-separated subset of check,mm,aj");
  sim->add_option("--output", sa.output, "output CSV (default stdout)");
  sim->add_option("--manifest", sa.manifest, "run manifest JSON path");

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "apply artificial censoring at tau");
  tr->add_option("--input", ta.input, "cohort CSV")->required();
  tr->add_option("--tau", ta.tau, "censoring horizon")->required();
  tr->add_option("--output", ta.output, "output CSV (default stdout)");
  tr->add_option("--manifest", ta.manifest, "run manifest JSON path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*est) return cmd_estimate(ea, args, out, err);
    if (*sim) {
      sa.reps_set = reps_opt->count() > 0;
      sa.n_set = n_opt->count() > 0;
      sa.seed_set = seed_opt->count() > 0;
      return cmd_simulate(sa, args, out, err);
    }
    if (*tr) return cmd_transform(ta, args, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const MalformedRecord& e) {
    err << "malformed input: " << e.message() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace idm::cli
