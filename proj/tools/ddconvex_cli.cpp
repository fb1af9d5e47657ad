// SPDX-License-Identifier: Apache-2.0

// ddconvex: solve penalized regression problems globally, run the benchmark
// protocol, and dump diagrams.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddconvex/dd.hpp"
#include "ddconvex/error.hpp"
#include "ddconvex/regress.hpp"
#include "ddconvex/report.hpp"
#include "ddconvex/sbc.hpp"

namespace {

using nlohmann::ordered_json;

struct CommonFlags {
  std::string penalty = "scad";
  double lambda = 1.0;
  double gamma = 3.0;
  double power = 1.0;
  std::string form = "objective";
  double budget = 0.0;

  int width = 1000;
  int sub_intervals = 64;
  int t_parts = 32;
  int subgrad_iters = 50;
  int oa_iters = 100;
  double gap = 0.05;
  double time_limit = std::numeric_limits<double>::infinity();
  std::int64_t node_limit = 100000;
  std::uint64_t seed = 0;
  bool deterministic = false;
  int threads = 1;
  bool full_profile = false;
  bool exact_separation = false;
  bool polish = false;
  bool no_tighten = false;
  std::optional<double> box_bound;
  bool unbounded_box = false;
  double kappa = 10.0;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--penalty", f.penalty, "scad, mcp, l0 or lp")->capture_default_str();
  app->add_option("--lambda", f.lambda, "SCAD / MCP lambda (0 disables the penalty)")->capture_default_str();
  app->add_option("--gamma", f.gamma, "SCAD / MCP gamma")->capture_default_str();
  app->add_option("--power", f.power, "exponent for --penalty lp")->capture_default_str();
  app->add_option("--form", f.form, "objective or budget")->capture_default_str();
  app->add_option("--budget", f.budget, "penalty budget for --form budget");
  app->add_option("--width", f.width, "diagram width limit")->capture_default_str();
  app->add_option("--sub-intervals", f.sub_intervals, "sub-intervals per variable")->capture_default_str();
  app->add_option("--t-parts", f.t_parts, "sub-intervals of the epigraph variable")->capture_default_str();
  app->add_option("--subgrad-iters", f.subgrad_iters, "subgradient iterations per separation")
      ->capture_default_str();
  app->add_option("--oa-iters", f.oa_iters, "OA iterations per node")->capture_default_str();
  app->add_option("--gap", f.gap, "relative gap target")->capture_default_str();
  app->add_option("--time-limit", f.time_limit, "seconds");
  app->add_option("--node-limit", f.node_limit, "maximum number of nodes")->capture_default_str();
  app->add_option("--seed", f.seed, "seed recorded in the report")->capture_default_str();
  app->add_flag("--deterministic", f.deterministic, "serial processing, no wall time in JSON");
  app->add_option("--threads", f.threads, "parallel node evaluations")->capture_default_str();
  app->add_flag("--full-profile", f.full_profile, "width 10000 and 2500 sub-intervals");
  app->add_flag("--exact-separation", f.exact_separation, "separate with the exact LP");
  app->add_flag("--polish", f.polish, "improve incumbents by coordinate descent");
  app->add_flag("--no-tighten", f.no_tighten, "skip level-set box tightening at nodes");
  app->add_option("--box-bound", f.box_bound, "root box [-B, B] for every coefficient");
  app->add_flag("--unbounded-box", f.unbounded_box, "start from an unbounded box and tighten it");
  app->add_option("--kappa", f.kappa, "root box scale")->capture_default_str();
}

ddconvex::SbcConfig make_config(const CommonFlags& f, int p) {
  ddconvex::SbcConfig c = f.full_profile ? ddconvex::SbcConfig::full_profile() : ddconvex::SbcConfig{};
  if (!f.full_profile) {
    c.diagram.width = f.width;
    c.diagram.sub_intervals = f.sub_intervals;
  }
  c.diagram.t_parts = f.t_parts;
  c.oa.max_iters = f.oa_iters;
  c.oa.subgradient.max_iters = f.subgrad_iters;
  c.oa.exact_separation = f.exact_separation;
  c.polish = f.polish;
  c.tighten = !f.no_tighten;
  c.gap = f.gap;
  c.time_limit_s = f.time_limit;
  c.node_limit = f.node_limit;
  c.seed = f.seed;
  c.deterministic = f.deterministic;
  c.threads = f.threads;
  c.kappa = f.kappa;
  if (f.box_bound) {
    c.box = ddconvex::Box(std::vector<ddconvex::Interval>(p, ddconvex::Interval{-*f.box_bound, *f.box_bound}));
  } else if (f.unbounded_box) {
    c.box = ddconvex::Box(std::vector<ddconvex::Interval>(
        p, ddconvex::Interval{-ddconvex::kUnbounded, ddconvex::kUnbounded}));
  }
  return c;
}

ordered_json nullable(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json config_json(const CommonFlags& f, const ddconvex::SbcConfig& c, const ddconvex::RegressionProblem& rp) {
  ordered_json j;
  j["penalty"] = rp.penalty.describe();
  j["form"] = f.form;
  if (rp.form == ddconvex::PenaltyForm::kBudget) j["budget"] = rp.budget;
  j["intercept"] = rp.intercept;
  j["width"] = c.diagram.width;
  j["sub_intervals"] = c.diagram.sub_intervals;
  j["t_parts"] = c.diagram.t_parts;
  j["subgrad_iters"] = c.oa.subgradient.max_iters;
  j["oa_iters"] = c.oa.max_iters;
  j["separation"] = c.oa.exact_separation ? "exact-lp" : "subgradient";
  j["polish"] = c.polish;
  j["tighten"] = c.tighten;
  j["gap"] = c.gap;
  j["time_limit_s"] = nullable(c.time_limit_s);
  j["node_limit"] = c.node_limit;
  j["seed"] = c.seed;
  j["deterministic"] = c.deterministic;
  j["threads"] = c.deterministic ? 1 : c.threads;
  j["kappa"] = c.kappa;
  if (c.box) {
    auto b = ordered_json::array();
    for (const auto& iv : c.box->intervals()) b.push_back({nullable(iv.lo), nullable(iv.hi)});
    j["box"] = b;
  }
  return j;
}

ddconvex::SynthSpec parse_synthetic(const std::string& text) {
  ddconvex::SynthSpec spec;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ddconvex::ParseError("synthetic spec item '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "n") {
        spec.n = std::stoi(value);
      } else if (key == "p") {
        spec.p = std::stoi(value);
      } else if (key == "sparsity") {
        spec.sparsity = std::stoi(value);
      } else if (key == "noise") {
        spec.noise_sd = std::stod(value);
      } else {
        throw ddconvex::ParseError("unknown synthetic spec key '" + key + "'");
      }
    } catch (const std::logic_error&) {
      throw ddconvex::ParseError("bad value '" + value + "' for synthetic spec key '" + key + "'");
    }
  }
  spec.sparsity = std::min(spec.sparsity, spec.p);
  return spec;
}

ddconvex::RegressionProblem make_regression(ddconvex::Dataset data, const CommonFlags& f, bool intercept) {
  ddconvex::RegressionProblem rp;
  rp.data = std::move(data);
  rp.penalty.kind = ddconvex::parse_penalty_kind(f.penalty);
  rp.penalty.lambda = f.lambda;
  rp.penalty.gamma = f.gamma;
  rp.penalty.power = f.power;
  if (f.form == "budget") {
    rp.form = ddconvex::PenaltyForm::kBudget;
  } else if (f.form != "objective") {
    throw ddconvex::ParameterError("--form must be objective or budget");
  }
  rp.budget = f.budget;
  rp.intercept = intercept;
  return rp;
}

struct RunResult {
  ddconvex::ReportRecord record;
  std::string json;
  ddconvex::SolveReport report;
};

RunResult run(const ddconvex::RegressionProblem& rp, const CommonFlags& f, const std::string& name) {
  const auto problem = rp.to_problem();
  const auto config = make_config(f, problem.dim());
  const auto report = ddconvex::solve(problem, config);
  ddconvex::ReportMeta meta;
  meta.name = name;
  meta.n = rp.data.n();
  meta.config = config_json(f, config, rp);
  meta.provenance = rp.data.provenance;
  meta.deterministic = f.deterministic;
  RunResult r{ddconvex::make_record(report, meta), "", report};
  r.json = ddconvex::to_json(r.record).dump();
  return r;
}

void write_json(const std::string& path, const std::vector<std::string>& lines) {
  if (path == "-") {
    for (const auto& l : lines) std::cout << l << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ddconvex::ParseError("cannot write '" + path + "'");
  for (const auto& l : lines) out << l << '\n';
}

bool hit_limit(const ddconvex::SolveReport& r) {
  return r.status == ddconvex::SbcStatus::kTimeLimit || r.status == ddconvex::SbcStatus::kNodeLimit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global solver for regression with nonconvex separable penalties"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  std::string data_path;
  std::string response;
  std::vector<std::string> drop;
  std::string synthetic;
  bool no_standardize = false;
  bool intercept = false;
  std::string json_path;
  std::string name;
  std::string dump_instance;
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  add_common(solve_cmd, solve_flags);
  auto* data_opt = solve_cmd->add_option("--data", data_path, "CSV file with a header row");
  auto* syn_opt = solve_cmd->add_option("--synthetic", synthetic, "seed=S,n=N,p=P[,sparsity=K,noise=SD]");
  data_opt->excludes(syn_opt);
  solve_cmd->add_option("--response", response, "response column (unique prefix allowed)");
  solve_cmd->add_option("--drop", drop, "columns to discard")->take_all();
  solve_cmd->add_flag("--no-standardize", no_standardize, "keep raw columns");
  solve_cmd->add_flag("--intercept", intercept, "append an unpenalized intercept column");
  solve_cmd->add_option("--json", json_path, "write the JSON report to this path ('-' for stdout)");
  solve_cmd->add_option("--name", name, "instance name in the report");
  solve_cmd->add_option("--dump-instance", dump_instance, "write the instance as JSON");

  CommonFlags bench_flags;
  std::string bench_json;
  std::vector<std::string> bench_data;
  auto* bench_cmd = app.add_subcommand("bench", "run the benchmark instances at (1,3) and (10,30)");
  add_common(bench_cmd, bench_flags);
  bench_cmd->add_option("--json", bench_json, "write one JSON report per line");
  bench_cmd->add_option("--data", bench_data, "extra CSV rows as path:response")->take_all();

  std::string dd_penalty = "l1";
  double dd_lambda = 1.0;
  double dd_gamma = 3.0;
  int dd_dims = 2;
  double dd_lo = -1.0;
  double dd_hi = 1.0;
  int dd_parts = 2;
  double dd_budget = 1.0;
  int dd_width = 0;
  auto* dd_cmd = app.add_subcommand("dd", "print the diagram of { x in [lo,hi]^n : eta(x) <= budget }");
  dd_cmd->add_option("--penalty", dd_penalty, "l0, l1, l2, scad or mcp")->capture_default_str();
  dd_cmd->add_option("--lambda", dd_lambda)->capture_default_str();
  dd_cmd->add_option("--gamma", dd_gamma)->capture_default_str();
  dd_cmd->add_option("--dims", dd_dims)->capture_default_str();
  dd_cmd->add_option("--lo", dd_lo)->capture_default_str();
  dd_cmd->add_option("--hi", dd_hi)->capture_default_str();
  dd_cmd->add_option("--parts", dd_parts, "uniform sub-intervals per variable")->capture_default_str();
  dd_cmd->add_option("--budget", dd_budget)->capture_default_str();
  dd_cmd->add_option("--width", dd_width, "merge layers wider than this (0: exact)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve_cmd) {
      ddconvex::Dataset data;
      std::string default_name;
      if (!data_path.empty()) {
        if (response.empty()) throw ddconvex::SchemaError("--data requires --response");
        ddconvex::CsvOptions opts;
        opts.response = response;
        opts.standardize = !no_standardize;
        opts.drop = drop;
        data = ddconvex::load_csv(data_path, opts);
        default_name = data_path;
      } else if (!synthetic.empty()) {
        data = ddconvex::synth(parse_synthetic(synthetic)).data;
        default_name = "synthetic(" + synthetic + ")";
      } else {
        throw ddconvex::ParameterError("solve needs --data or --synthetic");
      }
      const auto rp = make_regression(std::move(data), solve_flags, intercept);
      if (!dump_instance.empty()) write_json(dump_instance, {rp.instance_json().dump()});
      const auto r = run(rp, solve_flags, name.empty() ? default_name : name);
      std::cout << ddconvex::table_header() << '\n' << ddconvex::table_row(r.record) << '\n';
      std::cout << "status " << r.record.status << ", gap " << (r.record.gap ? std::to_string(*r.record.gap) : "-")
                << ", nodes " << r.record.nodes << '\n';
      if (!json_path.empty()) write_json(json_path, {r.json});
      return hit_limit(r.report) ? 2 : 0;
    }

    if (*bench_cmd) {
      struct Row {
        std::string name;
        ddconvex::Dataset data;
      };
      std::vector<Row> rows;
      const std::vector<ddconvex::SynthSpec> specs{{bench_flags.seed + 1, 40, 3, 2, 0.5},
                                                   {bench_flags.seed + 2, 60, 4, 2, 0.5},
                                                   {bench_flags.seed + 3, 80, 5, 3, 0.5}};
      for (const auto& s : specs) {
        rows.push_back({"synthetic-p" + std::to_string(s.p) + "-n" + std::to_string(s.n), ddconvex::synth(s).data});
      }
      for (const auto& item : bench_data) {
        const auto colon = item.rfind(':');
        if (colon == std::string::npos) throw ddconvex::ParameterError("--data expects path:response");
        ddconvex::CsvOptions opts;
        opts.response = item.substr(colon + 1);
        rows.push_back({item.substr(0, colon), ddconvex::load_csv(item.substr(0, colon), opts)});
      }
      std::vector<std::string> lines;
      bool limited = false;
      for (const auto& [lam, gam] : {std::pair{1.0, 3.0}, std::pair{10.0, 30.0}}) {
        CommonFlags f = bench_flags;
        f.lambda = lam;
        f.gamma = gam;
        std::cout << "(lambda, gamma) = (" << lam << ", " << gam << ")\n" << ddconvex::table_header() << '\n';
        for (const auto& row : rows) {
          const auto rp = make_regression(row.data, f, false);
          const auto r = run(rp, f, row.name);
          std::cout << ddconvex::table_row(r.record) << '\n';
          lines.push_back(r.json);
          limited = limited || hit_limit(r.report);
        }
      }
      if (!bench_json.empty()) write_json(bench_json, lines);
      return limited ? 2 : 0;
    }

    if (*dd_cmd) {
      ddconvex::ScaleComponent c = ddconvex::ScaleComponent::lp_power(1.0);
      if (dd_penalty == "l0") {
        c = ddconvex::ScaleComponent::l0();
      } else if (dd_penalty == "l2") {
        c = ddconvex::ScaleComponent::lp_power(2.0);
      } else if (dd_penalty == "scad") {
        c = ddconvex::ScaleComponent::scad(dd_lambda, dd_gamma);
      } else if (dd_penalty == "mcp") {
        c = ddconvex::ScaleComponent::mcp(dd_lambda, dd_gamma);
      } else if (dd_penalty != "l1") {
        throw ddconvex::ParameterError("unknown --penalty '" + dd_penalty + "'");
      }
      const ddconvex::Box box(std::vector<ddconvex::Interval>(dd_dims, ddconvex::Interval{dd_lo, dd_hi}));
      ddconvex::BuildOptions opts;
      opts.width_limit = dd_width;
      const auto d = ddconvex::build(ddconvex::SeparableScale::broadcast(c, dd_dims), box,
                                     ddconvex::PartitionScheme::uniform(box, dd_parts), dd_budget, opts);
      std::cout << d.to_text();
      return 0;
    }
  } catch (const ddconvex::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
