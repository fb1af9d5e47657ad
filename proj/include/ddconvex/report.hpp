// SPDX-License-Identifier: Apache-2.0

// Solve reports as single-line JSON (schema 1, fixed key order) and as table rows
// with the columns name, p, n, primal bound, dual bound, time.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddconvex/sbc.hpp"

namespace ddconvex {

inline constexpr int kReportSchema = 1;

struct ReportMeta {
  std::string name;
  int n = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();
  /// Omits wall time so that repeated runs produce identical bytes.
  bool deterministic = false;
};

/// Plain-value view of a report, as written and as parsed back.
struct ReportRecord {
  int schema = kReportSchema;
  std::string name;
  std::string status;
  int p = 0;
  int n = 0;
  std::optional<double> primal_bound;
  std::optional<double> dual_bound;
  std::optional<double> gap;
  std::vector<double> beta;
  std::int64_t nodes = 0;
  std::array<std::int64_t, 3> cuts{};  // by CutOrigin
  std::optional<double> time_s;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

ReportRecord make_record(const SolveReport& report, const ReportMeta& meta);

nlohmann::ordered_json to_json(const ReportRecord& record);
/// Single line, no trailing newline.
std::string report_json(const SolveReport& report, const ReportMeta& meta);
/// Throws ParseError on malformed input or an unknown schema.
ReportRecord parse_report_json(const std::string& text);

std::string table_header();
std::string table_row(const ReportRecord& record);

}  // namespace ddconvex
