// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/regress.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "ddconvex/error.hpp"

namespace ddconvex {

void Dataset::validate() const {
  if (x.rows() < 1 || x.cols() < 1) throw ParameterError("dataset needs n >= 1 and p >= 1");
  if (y.size() != x.rows()) throw DimensionError("y length differs from X rows");
  if (!x.allFinite() || !y.allFinite()) throw ParameterError("dataset has non-finite entries");
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

int match_column(const std::vector<std::string>& header, const std::string& want, const char* what) {
  const std::string key = lower(trim(want));
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (lower(header[j]) == key) return static_cast<int>(j);
  }
  int found = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!key.empty() && lower(header[j]).rfind(key, 0) == 0) {
      if (found >= 0) throw SchemaError(std::string(what) + " '" + want + "' is ambiguous");
      found = static_cast<int>(j);
    }
  }
  if (found < 0) throw SchemaError(std::string(what) + " '" + want + "' not found in header");
  return found;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_line(line);
    break;
  }
  if (header.empty()) throw ParseError(source + ": missing header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0] = header[0].substr(3);

  const int resp = match_column(header, options.response, "response column");
  std::vector<bool> keep(header.size(), true);
  keep[resp] = false;
  for (const auto& d : options.drop) {
    const int j = match_column(header, d, "dropped column");
    if (j == resp) throw SchemaError("cannot drop the response column");
    keep[j] = false;
  }
  std::vector<int> feature_cols;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (keep[j]) feature_cols.push_back(static_cast<int>(j));
  }
  if (feature_cols.empty()) throw SchemaError(source + ": no feature columns left");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (!keep[j] && static_cast<int>(j) != resp) continue;
      if (!parse_double(cells[j], row[j])) {
        throw ParseError(source + ": line " + std::to_string(line_no) + ", column " + std::to_string(j + 1) + " ('" +
                         header[j] + "'): cannot parse '" + cells[j] + "' as a number");
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no data rows");

  Dataset ds;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = static_cast<Eigen::Index>(feature_cols.size());
  ds.x.resize(n, p);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    ds.y[i] = rows[i][resp];
    for (Eigen::Index j = 0; j < p; ++j) ds.x(i, j) = rows[i][feature_cols[j]];
  }
  for (int j : feature_cols) ds.columns.push_back(header[j]);
  ds.response = header[resp];
  ds.provenance["source"] = source;
  ds.provenance["response"] = ds.response;
  ds.provenance["dropped"] = options.drop;
  ds.provenance["standardized"] = options.standardize;
  if (options.standardize) {
    if (n < 2) throw DegenerateColumnError("standardization needs at least two rows");
    for (Eigen::Index j = 0; j < p; ++j) {
      const double mean = ds.x.col(j).mean();
      ds.x.col(j).array() -= mean;
      const double sd = std::sqrt(ds.x.col(j).squaredNorm() / static_cast<double>(n - 1));
      if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) {
        throw DegenerateColumnError("column '" + ds.columns[j] + "' is constant and cannot be standardized");
      }
      ds.x.col(j) /= sd;
    }
    ds.y.array() -= ds.y.mean();
    ds.provenance["preprocessing"] = "X columns z-scored (sample sd), y centered";
  } else {
    ds.provenance["preprocessing"] = "none";
  }
  ds.validate();
  return ds;
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_csv(in, options, path);
}

Synthetic synth(const SynthSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw ParameterError("synthetic instances need n >= 1 and p >= 1");
  if (spec.sparsity < 0 || spec.sparsity > spec.p) throw ParameterError("sparsity must lie in [0, p]");
  if (!(spec.noise_sd >= 0.0)) throw ParameterError("noise_sd must be non-negative");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Synthetic out;
  Dataset& ds = out.data;
  ds.x.resize(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i) {
    for (int j = 0; j < spec.p; ++j) ds.x(i, j) = normal(rng);
  }
  std::vector<int> idx(spec.p);
  for (int j = 0; j < spec.p; ++j) idx[j] = j;
  for (int k = 0; k < spec.sparsity; ++k) {
    std::uniform_int_distribution<int> pick(k, spec.p - 1);
    std::swap(idx[k], idx[pick(rng)]);
  }
  out.beta.assign(spec.p, 0.0);
  std::bernoulli_distribution sign(0.5);
  for (int k = 0; k < spec.sparsity; ++k) out.beta[idx[k]] = sign(rng) ? 1.0 : -1.0;
  const Eigen::Map<const Eigen::VectorXd> b(out.beta.data(), spec.p);
  ds.y = ds.x * b;
  for (int i = 0; i < spec.n; ++i) ds.y[i] += spec.noise_sd * normal(rng);
  for (int j = 0; j < spec.p; ++j) ds.columns.push_back("x" + std::to_string(j + 1));
  ds.response = "y";
  ds.provenance["source"] = "synthetic";
  ds.provenance["seed"] = spec.seed;
  ds.provenance["n"] = spec.n;
  ds.provenance["p"] = spec.p;
  ds.provenance["sparsity"] = spec.sparsity;
  ds.provenance["noise_sd"] = spec.noise_sd;
  ds.provenance["preprocessing"] = "none";
  return out;
}

bool PenaltySpec::active() const {
  if (kind == Kind::kScad || kind == Kind::kMcp) return lambda != 0.0;
  return true;
}

ScaleComponent PenaltySpec::component() const {
  switch (kind) {
    case Kind::kScad:
      return ScaleComponent::scad(lambda, gamma);
    case Kind::kMcp:
      return ScaleComponent::mcp(lambda, gamma);
    case Kind::kL0:
      return ScaleComponent::l0();
    case Kind::kLp:
      return ScaleComponent::lp_power(power);
  }
  throw ParameterError("unknown penalty kind");
}

std::string PenaltySpec::describe() const {
  if (!active()) return "none";
  return component().describe();
}

PenaltySpec::Kind parse_penalty_kind(const std::string& name) {
  const std::string k = lower(name);
  if (k == "scad") return PenaltySpec::Kind::kScad;
  if (k == "mcp") return PenaltySpec::Kind::kMcp;
  if (k == "l0") return PenaltySpec::Kind::kL0;
  if (k == "lp") return PenaltySpec::Kind::kLp;
  throw ParameterError("unknown penalty '" + name + "' (expected scad, mcp, l0 or lp)");
}

ScaleProblem RegressionProblem::to_problem() const {
  data.validate();
  const int p = data.p();
  Eigen::MatrixXd x = data.x;
  if (intercept) {
    x.conservativeResize(Eigen::NoChange, p + 1);
    x.col(p).setOnes();
  }
  ScaleProblem prob;
  prob.loss = std::make_shared<LeastSquaresLoss>(std::move(x), data.y);
  prob.form = form;
  prob.budget = budget;
  if (penalty.active()) {
    prob.penalty = SeparableScale::broadcast(penalty.component(), p);
    for (int i = 0; i < p; ++i) prob.penalized.push_back(i);
  } else if (form == PenaltyForm::kBudget) {
    throw ParameterError("budget form needs an active penalty");
  }
  prob.validate();
  return prob;
}

nlohmann::ordered_json RegressionProblem::instance_json() const {
  nlohmann::ordered_json j;
  j["n"] = data.n();
  j["p"] = data.p();
  j["columns"] = data.columns;
  j["response"] = data.response;
  j["penalty"] = penalty.describe();
  j["form"] = form == PenaltyForm::kBudget ? "budget" : "objective";
  if (form == PenaltyForm::kBudget) j["budget"] = budget;
  j["intercept"] = intercept;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < data.n(); ++i) {
    std::vector<double> r(data.p());
    for (int k = 0; k < data.p(); ++k) r[k] = data.x(i, k);
    rows.push_back(r);
  }
  j["X"] = rows;
  j["y"] = std::vector<double>(data.y.data(), data.y.data() + data.y.size());
  j["provenance"] = data.provenance;
  return j;
}

std::vector<double> least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd b = x.completeOrthogonalDecomposition().solve(y);
  return std::vector<double>(b.data(), b.data() + b.size());
}

}  // namespace ddconvex
