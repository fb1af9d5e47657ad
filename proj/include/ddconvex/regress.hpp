// SPDX-License-Identifier: Apache-2.0

// Penalized least squares  min ||y - X beta||^2 + sum_i eta_i(beta_i):
// datasets, CSV ingestion, synthetic instances and problem assembly.

#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ddconvex/problem.hpp"

namespace ddconvex {

struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> columns;
  std::string response;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  int n() const { return static_cast<int>(x.rows()); }
  int p() const { return static_cast<int>(x.cols()); }
  /// Throws ParameterError on non-finite entries or empty matrices.
  void validate() const;
};

struct CsvOptions {
  /// Exact (case-insensitive, trimmed) header or a unique prefix of one.
  std::string response;
  /// z-score every X column (sample standard deviation) and center y.
  bool standardize = true;
  /// Columns to discard, matched like `response`.
  std::vector<std::string> drop;
};

Dataset load_csv(const std::string& path, const CsvOptions& options);
Dataset parse_csv(std::istream& in, const CsvOptions& options, const std::string& source = "<stream>");

struct SynthSpec {
  std::uint64_t seed = 0;
  int n = 40;
  int p = 3;
  int sparsity = 2;
  double noise_sd = 0.5;
};

struct Synthetic {
  Dataset data;
  std::vector<double> beta;
};

/// Standard normal X, `sparsity` entries of beta at +-1 on random coordinates,
/// y = X beta + N(0, noise_sd^2). Identical output for identical specs.
Synthetic synth(const SynthSpec& spec);

struct PenaltySpec {
  enum class Kind { kScad, kMcp, kL0, kLp };
  Kind kind = Kind::kScad;
  double lambda = 1.0;
  double gamma = 3.0;
  double power = 1.0;

  /// The component for one coordinate; lambda = 0 (SCAD / MCP) means no penalty.
  bool active() const;
  ScaleComponent component() const;
  std::string describe() const;
};

PenaltySpec::Kind parse_penalty_kind(const std::string& name);

struct RegressionProblem {
  Dataset data;
  PenaltySpec penalty;
  PenaltyForm form = PenaltyForm::kObjective;
  double budget = 0.0;
  /// Appends an unpenalized column of ones.
  bool intercept = false;

  ScaleProblem to_problem() const;
  nlohmann::ordered_json instance_json() const;
};

/// Unpenalized least squares (normal equations, pseudo-inverse fallback).
std::vector<double> least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace ddconvex
