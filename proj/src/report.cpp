// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/report.hpp"

#include <cmath>
#include <cstdio>

#include "ddconvex/error.hpp"

namespace ddconvex {

namespace {

using nlohmann::ordered_json;

std::optional<double> finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> read_opt(const ordered_json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::string fmt(const std::optional<double>& v, const char* spec) {
  if (!v) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, *v);
  return buf;
}

}  // namespace

ReportRecord make_record(const SolveReport& report, const ReportMeta& meta) {
  ReportRecord r;
  r.name = meta.name;
  r.status = to_string(report.status);
  r.p = report.p;
  r.n = meta.n;
  r.primal_bound = finite_or_null(report.primal_bound);
  r.dual_bound = finite_or_null(report.dual_bound);
  r.gap = finite_or_null(report.gap);
  r.beta = report.beta;
  r.nodes = report.nodes;
  r.cuts = report.cuts;
  if (!meta.deterministic) r.time_s = report.time_s;
  r.config = meta.config;
  r.provenance = meta.provenance;
  return r;
}

ordered_json to_json(const ReportRecord& r) {
  ordered_json j;
  j["schema"] = r.schema;
  j["name"] = r.name;
  j["status"] = r.status;
  j["p"] = r.p;
  j["n"] = r.n;
  j["primal_bound"] = opt(r.primal_bound);
  j["dual_bound"] = opt(r.dual_bound);
  j["gap"] = opt(r.gap);
  j["beta"] = r.beta;
  j["nodes"] = r.nodes;
  ordered_json cuts;
  for (int o = 0; o < 3; ++o) cuts[to_string(static_cast<CutOrigin>(o))] = r.cuts[o];
  j["cuts"] = cuts;
  j["time_s"] = opt(r.time_s);
  j["config"] = r.config;
  j["provenance"] = r.provenance;
  return j;
}

std::string report_json(const SolveReport& report, const ReportMeta& meta) {
  return to_json(make_record(report, meta)).dump();
}

ReportRecord parse_report_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what());
  }
  try {
    ReportRecord r;
    r.schema = j.at("schema").get<int>();
    if (r.schema != kReportSchema) throw ParseError("unsupported report schema " + std::to_string(r.schema));
    r.name = j.at("name").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.p = j.at("p").get<int>();
    r.n = j.at("n").get<int>();
    r.primal_bound = read_opt(j, "primal_bound");
    r.dual_bound = read_opt(j, "dual_bound");
    r.gap = read_opt(j, "gap");
    r.beta = j.at("beta").get<std::vector<double>>();
    r.nodes = j.at("nodes").get<std::int64_t>();
    for (int o = 0; o < 3; ++o) r.cuts[o] = j.at("cuts").at(to_string(static_cast<CutOrigin>(o))).get<std::int64_t>();
    r.time_s = read_opt(j, "time_s");
    r.config = j.at("config");
    r.provenance = j.at("provenance");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report is missing fields: ") + e.what());
  }
}

std::string table_header() {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-28s %5s %6s %14s %14s %9s", "name", "p", "n", "primal bound", "dual bound",
                "time (s)");
  return buf;
}

std::string table_row(const ReportRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-28s %5d %6d %14s %14s %9s", r.name.c_str(), r.p, r.n,
                fmt(r.primal_bound, "%.3f").c_str(), fmt(r.dual_bound, "%.3f").c_str(),
                fmt(r.time_s, "%.2f").c_str());
  return buf;
}

}  // namespace ddconvex
