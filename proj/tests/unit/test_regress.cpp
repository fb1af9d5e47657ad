#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ddconvex/error.hpp"
#include "ddconvex/regress.hpp"

using namespace ddconvex;

namespace {

Dataset parse(const std::string& text, CsvOptions opts) {
  std::istringstream in(text);
  return parse_csv(in, opts, "test.csv");
}

std::string error_of(const std::string& text, CsvOptions opts) {
  try {
    parse(text, std::move(opts));
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("hand-written CSV is recovered exactly") {
  CsvOptions opts;
  opts.response = "y";
  opts.standardize = false;
  const auto ds = parse("a,b,y\n1,2,3\n4,5,6\n7,8.5,-9\n", opts);
  CHECK(ds.n() == 3);
  CHECK(ds.p() == 2);
  CHECK(ds.columns == std::vector<std::string>{"a", "b"});
  CHECK(ds.response == "y");
  Eigen::MatrixXd x(3, 2);
  x << 1, 2, 4, 5, 7, 8.5;
  CHECK(ds.x == x);
  CHECK(ds.y == Eigen::Vector3d(3, 6, -9));
  CHECK(ds.provenance["standardized"] == false);
}

TEST_CASE("header matching, quoting and dropped columns") {
  CsvOptions opts;
  opts.response = "chance";
  opts.standardize = false;
  opts.drop = {"Serial No."};
  const auto ds = parse("\xEF\xBB\xBFSerial No.,\"GRE, total\", Chance of Admit \n1, 320 ,0.9\n\n2,300,0.5\n", opts);
  CHECK(ds.columns == std::vector<std::string>{"GRE, total"});
  CHECK(ds.response == "Chance of Admit");
  CHECK(ds.x(1, 0) == 300);
  CHECK(ds.y[0] == 0.9);
}

TEST_CASE("standardization") {
  CsvOptions opts;
  opts.response = "y";
  const auto ds = parse("a,b,y\n1,10,1\n2,30,2\n4,20,6\n9,0,3\n", opts);
  const int n = ds.n();
  for (int j = 0; j < ds.p(); ++j) {
    const double mean = ds.x.col(j).mean();
    const double sd = std::sqrt((ds.x.col(j).array() - mean).square().sum() / (n - 1));
    CHECK(std::abs(mean) <= 1e-12);
    CHECK(std::abs(sd - 1.0) <= 1e-12);
  }
  CHECK(std::abs(ds.y.mean()) <= 1e-12);
  CHECK(ds.provenance["standardized"] == true);

  CHECK_THROWS_AS(parse("a,b,y\n1,5,1\n2,5,2\n", opts), DegenerateColumnError);
  CHECK(error_of("a,b,y\n1,5,1\n2,5,2\n", opts).find("'b'") != std::string::npos);
}

TEST_CASE("parse errors are located") {
  CsvOptions opts;
  opts.response = "y";
  const std::string msg = error_of("a,b,y\n1,2,3\n4,oops,6\n", opts);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column 2") != std::string::npos);
  CHECK(msg.find("oops") != std::string::npos);
  CHECK_THROWS_AS(parse("a,b,y\n1,2\n", opts), ParseError);
  CHECK_THROWS_AS(parse("", opts), ParseError);
  CHECK_THROWS_AS(parse("a,b,y\n", opts), ParseError);
}

TEST_CASE("schema errors") {
  CsvOptions opts;
  opts.response = "target";
  CHECK_THROWS_AS(parse("a,b,y\n1,2,3\n", opts), SchemaError);
  opts.response = "c";
  CHECK_THROWS_AS(parse("ca,cb,y\n1,2,3\n", opts), SchemaError);
  opts.response = "y";
  opts.drop = {"y"};
  CHECK_THROWS_AS(parse("a,y\n1,2\n", opts), SchemaError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", opts), ParseError);
}

TEST_CASE("synthetic instances") {
  SUBCASE("noise-free least squares recovers beta") {
    const auto s = synth(SynthSpec{3, 20, 2, 2, 0.0});
    const auto b = least_squares(s.data.x, s.data.y);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(b[i] - s.beta[i]) <= 1e-8);
    for (double v : s.beta) CHECK(std::abs(v) == 1.0);
  }
  SUBCASE("fixed seeds repeat exactly") {
    const auto a = synth(SynthSpec{9, 30, 4, 2, 0.5});
    const auto b = synth(SynthSpec{9, 30, 4, 2, 0.5});
    CHECK(a.data.x == b.data.x);
    CHECK(a.data.y == b.data.y);
    CHECK(a.beta == b.beta);
    const auto c = synth(SynthSpec{10, 30, 4, 2, 0.5});
    CHECK(a.data.x != c.data.x);
  }
  SUBCASE("sparsity counts nonzeros") {
    const auto s = synth(SynthSpec{4, 10, 5, 3, 0.5});
    int nz = 0;
    for (double v : s.beta) nz += v != 0.0;
    CHECK(nz == 3);
    const auto z = synth(SynthSpec{4, 10, 5, 0, 0.5});
    for (double v : z.beta) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(synth(SynthSpec{0, 10, 2, 3, 0.5}), ParameterError);
  CHECK_THROWS_AS(synth(SynthSpec{0, 0, 2, 1, 0.5}), ParameterError);
}

TEST_CASE("penalty specs") {
  CHECK(parse_penalty_kind("SCAD") == PenaltySpec::Kind::kScad);
  CHECK(parse_penalty_kind("mcp") == PenaltySpec::Kind::kMcp);
  CHECK(parse_penalty_kind("l0") == PenaltySpec::Kind::kL0);
  CHECK(parse_penalty_kind("lp") == PenaltySpec::Kind::kLp);
  CHECK_THROWS_AS(parse_penalty_kind("lasso2"), ParameterError);
  PenaltySpec off{PenaltySpec::Kind::kScad, 0.0, 3.0, 1.0};
  CHECK_FALSE(off.active());
  PenaltySpec on{PenaltySpec::Kind::kScad, 1.0, 3.0, 1.0};
  CHECK(on.active());
  CHECK(on.component()(10.0) == doctest::Approx(2.0));
}

TEST_CASE("problem assembly") {
  RegressionProblem rp;
  rp.data = synth(SynthSpec{1, 12, 3, 1, 0.5}).data;
  rp.penalty = PenaltySpec{PenaltySpec::Kind::kMcp, 1.0, 2.0, 1.0};
  auto prob = rp.to_problem();
  CHECK(prob.dim() == 3);
  CHECK(prob.penalized == std::vector<int>{0, 1, 2});

  rp.intercept = true;
  prob = rp.to_problem();
  CHECK(prob.dim() == 4);
  CHECK(prob.penalized == std::vector<int>{0, 1, 2});

  rp.intercept = false;
  rp.penalty.lambda = 0.0;
  CHECK(rp.to_problem().penalized.empty());
  rp.form = PenaltyForm::kBudget;
  CHECK_THROWS_AS(rp.to_problem(), ParameterError);

  rp.penalty = PenaltySpec{PenaltySpec::Kind::kL0, 1, 3, 1};
  rp.budget = 2;
  const auto j = rp.instance_json();
  CHECK(j["n"] == 12);
  CHECK(j["form"] == "budget");
  CHECK(j["X"].size() == 12);
}
