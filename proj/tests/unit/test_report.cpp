#include <doctest.h>

#include <limits>

#include "ddconvex/error.hpp"
#include "ddconvex/regress.hpp"
#include "ddconvex/report.hpp"

using namespace ddconvex;

namespace {

SolveReport sample_report() {
  SolveReport r;
  r.status = SbcStatus::kGapReached;
  r.primal_bound = 20.304;
  r.dual_bound = 20.295;
  r.gap = (20.304 - 20.295) / 20.295;
  r.beta = {0.125, -1.0 / 3.0, 0.0};
  r.nodes = 17;
  r.cuts = {1, 250, 40};
  r.time_s = 1.5;
  r.p = 3;
  return r;
}

ReportMeta sample_meta(bool deterministic) {
  ReportMeta m;
  m.name = "sample";
  m.n = 400;
  m.config = {{"penalty", "scad(lambda=1,gamma=3)"}, {"width", 1000}};
  m.provenance = {{"source", "synthetic"}, {"seed", 7}};
  m.deterministic = deterministic;
  return m;
}

}  // namespace

TEST_CASE("round trip") {
  for (bool det : {false, true}) {
    const auto rec = make_record(sample_report(), sample_meta(det));
    const auto text = report_json(sample_report(), sample_meta(det));
    CHECK(text.find('\n') == std::string::npos);
    const auto back = parse_report_json(text);
    CHECK(back == rec);
    CHECK(back.time_s.has_value() == !det);
    CHECK(report_json(sample_report(), sample_meta(det)) == text);
  }
}

TEST_CASE("key order and values") {
  const auto j = to_json(make_record(sample_report(), sample_meta(true)));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"schema", "name", "status", "p", "n", "primal_bound", "dual_bound", "gap",
                                         "beta", "nodes", "cuts", "time_s", "config", "provenance"});
  CHECK(j["schema"] == 1);
  CHECK(j["status"] == "gap-reached");
  CHECK(j["cuts"]["exact-lp"] == 1);
  CHECK(j["cuts"]["subgradient"] == 250);
  CHECK(j["cuts"]["objective-gradient"] == 40);
  CHECK(j["time_s"].is_null());
}

TEST_CASE("non-finite bounds are written as null") {
  auto r = sample_report();
  r.dual_bound = -std::numeric_limits<double>::infinity();
  r.gap = std::numeric_limits<double>::infinity();
  const auto back = parse_report_json(report_json(r, sample_meta(false)));
  CHECK_FALSE(back.dual_bound.has_value());
  CHECK_FALSE(back.gap.has_value());
  CHECK(back.primal_bound == 20.304);
}

TEST_CASE("malformed reports") {
  CHECK_THROWS_AS(parse_report_json("{"), ParseError);
  CHECK_THROWS_AS(parse_report_json("{\"schema\":1}"), ParseError);
  auto j = to_json(make_record(sample_report(), sample_meta(true)));
  j["schema"] = 2;
  CHECK_THROWS_AS(parse_report_json(j.dump()), ParseError);
}

TEST_CASE("table") {
  const auto rec = make_record(sample_report(), sample_meta(false));
  const auto header = table_header();
  const auto row = table_row(rec);
  CHECK(header.rfind("name", 0) == 0);
  CHECK(header.size() == row.size());
  CHECK(row.find("20.304") != std::string::npos);
  CHECK(row.find("20.295") != std::string::npos);
  const auto det = table_row(make_record(sample_report(), sample_meta(true)));
  CHECK(det.substr(det.size() - 1) == "-");
}

TEST_CASE("dataset provenance reaches the report") {
  const auto s = synth(SynthSpec{7, 10, 2, 1, 0.5});
  auto meta = sample_meta(true);
  meta.provenance = s.data.provenance;
  const auto back = parse_report_json(report_json(sample_report(), meta));
  CHECK(back.provenance["seed"] == 7);
  CHECK(back.provenance["source"] == "synthetic");
}
