// SPDX-License-Identifier: Apache-2.0

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ddconvex/dd.hpp"
#include "ddconvex/error.hpp"
#include "ddconvex/hull.hpp"
#include "ddconvex/regress.hpp"
#include "ddconvex/report.hpp"
#include "ddconvex/sbc.hpp"

namespace py = pybind11;
using namespace ddconvex;

namespace {

Box to_box(const std::vector<std::pair<double, double>>& bounds) {
  std::vector<Interval> iv;
  for (const auto& [lo, hi] : bounds) iv.push_back({lo, hi});
  return Box(std::move(iv));
}

std::vector<std::pair<double, double>> from_box(const Box& box) {
  std::vector<std::pair<double, double>> out;
  for (const auto& iv : box.intervals()) out.emplace_back(iv.lo, iv.hi);
  return out;
}

SeparableScale to_scale(const std::vector<ScaleComponent>& components) { return SeparableScale(components); }

py::dict cut_dict(const Cut& cut) {
  py::dict d;
  d["coeffs"] = cut.coeffs;
  d["t_coeff"] = cut.t_coeff;
  d["rhs"] = cut.rhs;
  d["origin"] = to_string(cut.origin);
  return d;
}

struct SolveArgs {
  std::string penalty = "scad";
  double lam = 1.0;
  double gamma = 3.0;
  double power = 1.0;
  std::string form = "objective";
  double budget = 0.0;
  bool intercept = false;
};

RegressionProblem regression(Eigen::MatrixXd x, Eigen::VectorXd y, const SolveArgs& a) {
  RegressionProblem rp;
  rp.data.x = std::move(x);
  rp.data.y = std::move(y);
  for (int j = 0; j < rp.data.p(); ++j) rp.data.columns.push_back("x" + std::to_string(j + 1));
  rp.data.response = "y";
  rp.data.provenance["source"] = "python";
  rp.data.validate();
  rp.penalty.kind = parse_penalty_kind(a.penalty);
  rp.penalty.lambda = a.lam;
  rp.penalty.gamma = a.gamma;
  rp.penalty.power = a.power;
  if (a.form == "budget") {
    rp.form = PenaltyForm::kBudget;
  } else if (a.form != "objective") {
    throw ParameterError("form must be 'objective' or 'budget'");
  }
  rp.budget = a.budget;
  rp.intercept = a.intercept;
  return rp;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Decision-diagram convexification and spatial branch-and-cut for penalized regression";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", error.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", error.ptr());
  py::register_exception<IntervalError>(m, "IntervalError", error.ptr());
  py::register_exception<NoPathError>(m, "NoPathError", error.ptr());
  py::register_exception<EnumerationOverflow>(m, "EnumerationOverflow", error.ptr());
  py::register_exception<SeparationError>(m, "SeparationError", error.ptr());
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<SchemaError>(m, "SchemaError", error.ptr());
  py::register_exception<DegenerateColumnError>(m, "DegenerateColumnError", error.ptr());

  py::class_<ScaleComponent>(m, "ScaleComponent")
      .def_static("lp_power", &ScaleComponent::lp_power, py::arg("p"))
      .def_static("l0", &ScaleComponent::l0)
      .def_static("scad", &ScaleComponent::scad, py::arg("lam"), py::arg("gamma"))
      .def_static("mcp", &ScaleComponent::mcp, py::arg("lam"), py::arg("gamma"))
      .def("__call__", &ScaleComponent::operator(), py::arg("x"))
      .def("__repr__", &ScaleComponent::describe);

  m.def("interval_lower_bound", &interval_lower_bound, py::arg("component"), py::arg("lo"), py::arg("hi"));
  m.def("interval_upper_bound", &interval_upper_bound, py::arg("component"), py::arg("lo"), py::arg("hi"));

  py::class_<Diagram>(m, "Diagram")
      .def_property_readonly("dims", &Diagram::dims)
      .def_property_readonly("num_nodes", &Diagram::num_nodes)
      .def_property_readonly("num_arcs", &Diagram::num_arcs)
      .def_property_readonly("width", &Diagram::width)
      .def_property_readonly("has_path", &Diagram::has_path)
      .def_property_readonly("is_epigraph", &Diagram::is_epigraph)
      .def("count_paths", [](const Diagram& d) { return count_paths(d); })
      .def("points", [](const Diagram& d, std::size_t cap) { return enumerate_paths(d, cap); },
           py::arg("cap") = 1 << 20)
      .def("longest_path", [](const Diagram& d, const std::vector<double>& c) {
        const auto path = longest_path_linear(d, c);
        return py::make_tuple(path.value, path.point);
      }, py::arg("coeffs"))
      .def("to_text", &Diagram::to_text);

  m.def(
      "build_diagram",
      [](const std::vector<ScaleComponent>& components, const std::vector<std::pair<double, double>>& box,
         double budget, int parts, int width) {
        const Box b = to_box(box);
        BuildOptions opts;
        opts.width_limit = width;
        return build(to_scale(components), b, PartitionScheme::uniform(b, parts), budget, opts);
      },
      py::arg("components"), py::arg("box"), py::arg("budget"), py::arg("parts") = 1, py::arg("width") = 0,
      "Relaxed diagram of {x in box : sum_i eta_i(x_i) <= budget} with `parts` uniform sub-intervals.");
  m.def(
      "build_epigraph",
      [](const std::vector<ScaleComponent>& components, const std::vector<std::pair<double, double>>& box,
         double t_lo, double t_hi, int parts, int t_parts, int width) {
        const Box b = to_box(box);
        BuildOptions opts;
        opts.width_limit = width;
        return build_epigraph(to_scale(components), b, PartitionScheme::uniform(b, parts), t_lo, t_hi, t_parts, opts);
      },
      py::arg("components"), py::arg("box"), py::arg("t_lo"), py::arg("t_hi"), py::arg("parts") = 1,
      py::arg("t_parts") = 8, py::arg("width") = 0);

  m.def(
      "is_member",
      [](const Diagram& d, const std::vector<double>& x, double tol) { return membership(d, x, tol) == Membership::kInside; },
      py::arg("diagram"), py::arg("point"), py::arg("tol") = 1e-7);
  m.def(
      "separate",
      [](const Diagram& d, const std::vector<double>& x, bool exact, int iters) -> py::object {
        std::optional<Cut> cut;
        if (exact) {
          cut = separate_exact(d, x).cut;
        } else {
          SubgradientOptions opts;
          opts.max_iters = iters;
          cut = separate_subgradient(d, x, opts).cut;
        }
        if (!cut) return py::none();
        return cut_dict(*cut);
      },
      py::arg("diagram"), py::arg("point"), py::arg("exact") = false, py::arg("iters") = 50,
      "A normalised cut separating the point from the diagram's hull, or None.");

  py::class_<SolveReport>(m, "SolveReport")
      .def_property_readonly("status", [](const SolveReport& r) { return to_string(r.status); })
      .def_readonly("primal_bound", &SolveReport::primal_bound)
      .def_readonly("dual_bound", &SolveReport::dual_bound)
      .def_readonly("gap", &SolveReport::gap)
      .def_readonly("beta", &SolveReport::beta)
      .def_readonly("nodes", &SolveReport::nodes)
      .def_readonly("time_s", &SolveReport::time_s)
      .def_property_readonly("cuts", [](const SolveReport& r) {
        py::dict d;
        for (int o = 0; o < 3; ++o) d[py::str(to_string(static_cast<CutOrigin>(o)))] = r.cuts[o];
        return d;
      })
      .def_property_readonly("root_box", [](const SolveReport& r) { return from_box(r.root_box); })
      .def("to_json", [](const SolveReport& r, const std::string& name, int n, bool deterministic) {
        ReportMeta meta;
        meta.name = name;
        meta.n = n;
        meta.deterministic = deterministic;
        return report_json(r, meta);
      }, py::arg("name") = "python", py::arg("n") = 0, py::arg("deterministic") = false);

  m.def(
      "solve",
      [](Eigen::MatrixXd x, Eigen::VectorXd y, const std::string& penalty, double lam, double gamma, double power,
         const std::string& form, double budget, bool intercept, double gap, double time_limit, std::int64_t node_limit,
         int width, int sub_intervals, int t_parts, bool deterministic, int threads, bool polish,
         std::optional<std::vector<std::pair<double, double>>> box) {
        const auto rp = regression(std::move(x), std::move(y),
                                   SolveArgs{penalty, lam, gamma, power, form, budget, intercept});
        const auto problem = rp.to_problem();
        SbcConfig cfg;
        cfg.gap = gap;
        cfg.time_limit_s = time_limit;
        cfg.node_limit = node_limit;
        cfg.diagram.width = width;
        cfg.diagram.sub_intervals = sub_intervals;
        cfg.diagram.t_parts = t_parts;
        cfg.deterministic = deterministic;
        cfg.threads = threads;
        cfg.polish = polish;
        if (box) cfg.box = to_box(*box);
        py::gil_scoped_release release;
        return solve(problem, cfg);
      },
      py::arg("X"), py::arg("y"), py::arg("penalty") = "scad", py::arg("lam") = 1.0, py::arg("gamma") = 3.0,
      py::arg("power") = 1.0, py::arg("form") = "objective", py::arg("budget") = 0.0, py::arg("intercept") = false,
      py::arg("gap") = 0.05, py::arg("time_limit") = std::numeric_limits<double>::infinity(),
      py::arg("node_limit") = 100000, py::arg("width") = 1000, py::arg("sub_intervals") = 64, py::arg("t_parts") = 32,
      py::arg("deterministic") = false, py::arg("threads") = 1, py::arg("polish") = false,
      py::arg("box") = py::none(),
      "Globally minimise ||y - X beta||^2 + penalty (or the loss under a penalty budget).");

  m.def(
      "synth",
      [](std::uint64_t seed, int n, int p, int sparsity, double noise_sd) {
        auto s = synth(SynthSpec{seed, n, p, sparsity, noise_sd});
        return py::make_tuple(s.data.x, s.data.y, s.beta);
      },
      py::arg("seed"), py::arg("n") = 40, py::arg("p") = 3, py::arg("sparsity") = 2, py::arg("noise_sd") = 0.5,
      "Synthetic (X, y, beta) with Gaussian design.");

  m.def(
      "load_csv",
      [](const std::string& path, const std::string& response, bool standardize, std::vector<std::string> drop) {
        CsvOptions opts;
        opts.response = response;
        opts.standardize = standardize;
        opts.drop = std::move(drop);
        auto ds = load_csv(path, opts);
        return py::make_tuple(ds.x, ds.y, ds.columns);
      },
      py::arg("path"), py::arg("response"), py::arg("standardize") = true, py::arg("drop") = std::vector<std::string>{});

  m.def("relative_gap", &relative_gap, py::arg("primal"), py::arg("dual"), py::arg("abs_gap") = 1e-9);
}
