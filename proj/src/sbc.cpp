// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/sbc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <queue>

#include "ddconvex/error.hpp"

namespace ddconvex {

SbcConfig SbcConfig::full_profile() {
  SbcConfig c;
  c.diagram.width = 10000;
  c.diagram.sub_intervals = 2500;
  return c;
}

std::string to_string(SbcStatus status) {
  switch (status) {
    case SbcStatus::kGapReached:
      return "gap-reached";
    case SbcStatus::kTreeExhausted:
      return "tree-exhausted";
    case SbcStatus::kNodeLimit:
      return "node-limit";
    case SbcStatus::kTimeLimit:
      return "time-limit";
    case SbcStatus::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

double relative_gap(double primal, double dual, double abs_gap) {
  if (!std::isfinite(primal)) return std::numeric_limits<double>::infinity();
  if (primal - dual <= abs_gap) return 0.0;
  if (dual <= 0.0) return std::numeric_limits<double>::infinity();
  return (primal - dual) / dual;
}

Box initial_box(const ScaleProblem& problem, const SbcConfig& config) {
  const int p = problem.dim();
  if (config.box) {
    if (config.box->size() != p) throw DimensionError("configured box size differs from problem dim");
    if (config.box->finite()) return *config.box;
  }
  const auto* ls = dynamic_cast<const LeastSquaresLoss*>(problem.loss.get());
  if (!ls) throw ParameterError("automatic boxes need a least-squares loss; configure a finite box");
  const Eigen::MatrixXd& x = ls->x();
  const Eigen::VectorXd& y = ls->y();
  const Eigen::MatrixXd gram = x.transpose() * x;
  if (config.box) {
    Box box = *config.box;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() <= 1e-12 * gram.trace()) {
      throw ParameterError("bound tightening needs a full-rank design matrix");
    }
    const Eigen::VectorXd b_ls = ldlt.solve(x.transpose() * y);
    const double r_ls = (y - x * b_ls).squaredNorm();
    // beta = 0 has objective ||y||^2 in either form.
    const double level = std::max(0.0, y.squaredNorm() - r_ls);
    const Eigen::MatrixXd inv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
    for (int i = 0; i < p; ++i) {
      const double half = std::sqrt(level * std::max(0.0, inv(i, i)));
      box[i].lo = std::max(box[i].lo, b_ls[i] - half);
      box[i].hi = std::min(box[i].hi, b_ls[i] + half);
      if (box[i].lo > box[i].hi) box[i].lo = box[i].hi = std::clamp(0.0, box[i].lo, box[i].hi);
    }
    return box;
  }
  const Eigen::MatrixXd reg = gram + config.ridge * Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd b_ridge = reg.ldlt().solve(x.transpose() * y);
  const double ynorm = y.norm();
  std::vector<Interval> iv(p);
  for (int i = 0; i < p; ++i) {
    const double sigma = x.col(i).norm();
    if (sigma == 0.0) throw DegenerateColumnError("column " + std::to_string(i) + " of X is zero");
    const double b = config.kappa * (std::abs(b_ridge[i]) + ynorm / sigma);
    iv[i] = Interval{-b, b};
  }
  return Box(std::move(iv));
}

std::optional<std::pair<int, double>> branch_choice(const Box& box, std::span<const double> beta,
                                                    std::span<const int> candidates) {
  int best = -1;
  double best_score = std::numeric_limits<double>::infinity();
  for (int i : candidates) {
    const auto& iv = box[i];
    const double w = iv.width();
    if (!(w > 0.0)) continue;
    const double score = std::abs(beta[i] - iv.mid()) / w;
    if (score < best_score) {
      best_score = score;
      best = i;
    }
  }
  if (best < 0) return std::nullopt;
  const auto& iv = box[best];
  double at = beta[best];
  const double margin = 1e-6 * iv.width();
  if (!(at > iv.lo + margin && at < iv.hi - margin)) at = iv.mid();
  return std::pair{best, at};
}

std::optional<std::pair<Box, Box>> branch(const Box& box, std::span<const double> beta,
                                          std::span<const int> candidates) {
  const auto choice = branch_choice(box, beta, candidates);
  if (!choice) return std::nullopt;
  return box.split(choice->first, choice->second);
}

double primal_from_point(const ScaleProblem& problem, std::span<const double> beta, std::vector<double>* repaired) {
  std::vector<double> b(beta.begin(), beta.end());
  if (problem.form == PenaltyForm::kBudget && !problem.feasible(b)) {
    std::vector<int> order(problem.penalized.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int c) {
      return std::abs(b[problem.penalized[a]]) < std::abs(b[problem.penalized[c]]);
    });
    for (int k : order) {
      if (problem.feasible(b)) break;
      b[problem.penalized[k]] = 0.0;
    }
  }
  const double value = problem.objective(b);
  if (repaired) *repaired = std::move(b);
  return value;
}

namespace {

// argmin over [lo, hi] of a b^2 - 2 c b + eta(b), a > 0.
double coordinate_min(const ScaleComponent* eta, double a, double c, double lo, double hi) {
  auto f = [&](double b) { return a * b * b - 2.0 * c * b + (eta ? (*eta)(b) : 0.0); };
  if (!eta) return std::clamp(c / a, lo, hi);
  std::vector<double> cuts{lo, hi, 0.0};
  if (eta->kind() == ScaleComponent::Kind::kScad || eta->kind() == ScaleComponent::Kind::kMcp) {
    for (double v : {eta->lambda(), eta->gamma() * eta->lambda()}) {
      cuts.push_back(v);
      cuts.push_back(-v);
    }
  }
  std::erase_if(cuts, [&](double v) { return v < lo || v > hi; });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double best = cuts.front();
  double best_f = f(best);
  auto consider = [&](double b) {
    const double fb = f(b);
    if (fb < best_f) {
      best_f = fb;
      best = b;
    }
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double l = cuts[k];
    const double h = cuts[k + 1];
    consider(h);
    constexpr int kSamples = 32;
    double at = l;
    double at_f = f(l);
    for (int j = 1; j < kSamples; ++j) {
      const double b = l + (h - l) * j / kSamples;
      const double fb = f(b);
      if (fb < at_f) {
        at_f = fb;
        at = b;
      }
    }
    // Golden section on the sampled bracket; open at the piece ends so that
    // discontinuities at 0 are never straddled.
    double u = std::max(l, at - (h - l) / kSamples);
    double v = std::min(h, at + (h - l) / kSamples);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double m1 = v - phi * (v - u);
    double m2 = u + phi * (v - u);
    double f1 = f(m1);
    double f2 = f(m2);
    for (int it = 0; it < 80 && v - u > 1e-13 * (1.0 + std::abs(u)); ++it) {
      if (f1 <= f2) {
        v = m2;
        m2 = m1;
        f2 = f1;
        m1 = v - phi * (v - u);
        f1 = f(m1);
      } else {
        u = m1;
        m1 = m2;
        f1 = f2;
        m2 = u + phi * (v - u);
        f2 = f(m2);
      }
    }
    consider(at);
    consider(f1 <= f2 ? m1 : m2);
  }
  return best;
}

struct OpenNode {
  std::int64_t id = 0;
  std::int64_t parent = -1;
  int depth = 0;
  double bound = 0.0;
  Box box;
  std::vector<MasterCut> cuts;
};

struct NodeOrder {
  bool operator()(const OpenNode& a, const OpenNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

// Bounding box of {beta : ||y - X beta||^2 <= level}.
class LevelSetBounds {
 public:
  static std::optional<LevelSetBounds> make(const ScaleProblem& problem) {
    const auto* ls = dynamic_cast<const LeastSquaresLoss*>(problem.loss.get());
    if (!ls) return std::nullopt;
    const Eigen::MatrixXd gram = ls->x().transpose() * ls->x();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-10 * std::max(1.0, gram.trace())) {
      return std::nullopt;
    }
    LevelSetBounds b;
    b.center = ldlt.solve(ls->x().transpose() * ls->y());
    b.floor = (ls->y() - ls->x() * b.center).squaredNorm();
    b.diag = ldlt.solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).diagonal();
    return b;
  }

  /// False if no point of `box` is within the level set.
  bool apply(Box& box, double level) const {
    if (!(level > floor)) return false;
    const double excess = level - floor;
    for (int i = 0; i < box.size(); ++i) {
      const double half = std::sqrt(excess * std::max(0.0, diag[i]));
      const double lo = std::max(box[i].lo, center[i] - half);
      const double hi = std::min(box[i].hi, center[i] + half);
      if (lo > hi) return false;
      box[i] = Interval{lo, hi};
    }
    return true;
  }

  Eigen::VectorXd center;
  Eigen::VectorXd diag;
  double floor = 0.0;
};

double penalty_floor(const ScaleProblem& problem, const Box& box) {
  if (problem.form == PenaltyForm::kBudget) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < problem.penalized.size(); ++j) {
    const auto& iv = box[problem.penalized[j]];
    sum += interval_lower_bound(problem.penalty[static_cast<int>(j)], iv.lo, iv.hi);
  }
  return sum;
}

}  // namespace

std::vector<double> polish(const ScaleProblem& problem, std::span<const double> beta, const Box& box) {
  std::vector<double> b(beta.begin(), beta.end());
  const auto* ls = dynamic_cast<const LeastSquaresLoss*>(problem.loss.get());
  if (!ls || static_cast<int>(b.size()) != problem.dim() || box.size() != problem.dim()) return b;
  const Eigen::MatrixXd& x = ls->x();
  const int p = problem.dim();
  std::vector<int> slot(p, -1);
  for (std::size_t j = 0; j < problem.penalized.size(); ++j) slot[problem.penalized[j]] = static_cast<int>(j);

  if (problem.form == PenaltyForm::kBudget) {
    std::vector<int> support;
    for (int i = 0; i < p; ++i) {
      if (slot[i] < 0 || b[i] != 0.0) support.push_back(i);
    }
    if (support.empty()) return b;
    Eigen::MatrixXd xs(x.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) xs.col(static_cast<Eigen::Index>(k)) = x.col(support[k]);
    const Eigen::VectorXd fit = xs.completeOrthogonalDecomposition().solve(ls->y());
    std::vector<double> cand = b;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const int i = support[k];
      cand[i] = std::clamp(fit[static_cast<Eigen::Index>(k)], box[i].lo, box[i].hi);
    }
    if (problem.feasible(cand) && problem.objective(cand) < problem.objective(b)) b = std::move(cand);
    return b;
  }

  Eigen::VectorXd r = ls->y() - x * Eigen::Map<const Eigen::VectorXd>(b.data(), p);
  double value = problem.objective(b);
  for (int sweep = 0; sweep < 200; ++sweep) {
    for (int i = 0; i < p; ++i) {
      const double a = x.col(i).squaredNorm();
      if (!(a > 0.0)) continue;
      const double c = x.col(i).dot(r) + a * b[i];
      const ScaleComponent* eta = slot[i] >= 0 ? &problem.penalty[slot[i]] : nullptr;
      const double nb = coordinate_min(eta, a, c, box[i].lo, box[i].hi);
      const double old_f = a * b[i] * b[i] - 2.0 * c * b[i] + (eta ? (*eta)(b[i]) : 0.0);
      const double new_f = a * nb * nb - 2.0 * c * nb + (eta ? (*eta)(nb) : 0.0);
      if (new_f < old_f) {
        r -= x.col(i) * (nb - b[i]);
        b[i] = nb;
      }
    }
    const double next = problem.objective(b);
    const bool done = value - next <= 1e-13 * (1.0 + std::abs(value));
    value = next;
    if (done) break;
  }
  return b;
}

namespace {

NodeResult process(const ScaleProblem& problem, const OpenNode& node, const SbcConfig& config) {
  const auto diagram = build_node_diagram(problem, node.box, config.diagram);
  return run_node(problem, node.box, diagram, node.cuts, node.bound, config.oa);
}

}  // namespace

SolveReport solve(const ScaleProblem& problem, const SbcConfig& config) {
  problem.validate();
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  SolveReport report;
  report.p = problem.dim();
  report.root_box = initial_box(problem, config);

  auto offer = [&](std::span<const double> beta) {
    std::vector<double> repaired;
    double value = primal_from_point(problem, beta, &repaired);
    if (config.polish) {
      auto polished = polish(problem, repaired, report.root_box);
      const double pv = problem.objective(polished);
      if (pv < value && problem.feasible(polished)) {
        value = pv;
        repaired = std::move(polished);
      }
    }
    if (value < report.primal_bound) {
      report.primal_bound = value;
      report.beta = std::move(repaired);
    }
  };
  // beta = 0 is always feasible.
  offer(std::vector<double>(problem.dim(), 0.0));
  const auto level_set = config.tighten ? LevelSetBounds::make(problem) : std::nullopt;

  std::vector<int> candidates = problem.penalized;
  if (candidates.empty()) {
    candidates.resize(problem.dim());
    std::iota(candidates.begin(), candidates.end(), 0);
  }

  std::priority_queue<OpenNode, std::vector<OpenNode>, NodeOrder> open;
  std::int64_t next_id = 0;
  open.push(OpenNode{next_id++, -1, 0, problem.loss->lower_bound(), report.root_box, {}});
  // Bounds of nodes closed without being solved (no branchable coordinate left).
  double stuck_floor = std::numeric_limits<double>::infinity();
  bool any_feasible_region = false;

  const int threads = config.deterministic ? 1 : std::max(1, config.threads);
  auto global_dual = [&] {
    double d = std::min(report.primal_bound, stuck_floor);
    if (!open.empty()) d = std::min(d, open.top().bound);
    return d;
  };

  report.status = SbcStatus::kTreeExhausted;
  while (!open.empty()) {
    if (open.top().bound >= report.primal_bound - 1e-9) {
      open.pop();
      continue;
    }
    const double dual = global_dual();
    if (relative_gap(report.primal_bound, dual, config.abs_gap) <= config.gap) {
      report.status = SbcStatus::kGapReached;
      break;
    }
    if (report.nodes >= config.node_limit) {
      report.status = SbcStatus::kNodeLimit;
      break;
    }
    if (elapsed() >= config.time_limit_s) {
      report.status = SbcStatus::kTimeLimit;
      break;
    }

    std::vector<OpenNode> batch;
    while (!open.empty() && static_cast<int>(batch.size()) < threads &&
           report.nodes + static_cast<std::int64_t>(batch.size()) < config.node_limit) {
      OpenNode node = open.top();
      open.pop();
      if (node.bound >= report.primal_bound - 1e-9) continue;
      if (level_set && !level_set->apply(node.box, report.primal_bound - penalty_floor(problem, node.box))) continue;
      batch.push_back(std::move(node));
    }
    std::vector<NodeResult> results(batch.size());
    if (batch.size() == 1) {
      results[0] = process(problem, batch[0], config);
    } else {
      std::vector<std::future<NodeResult>> futures;
      for (const auto& node : batch) {
        futures.push_back(std::async(std::launch::async, [&problem, &node, &config] {
          return process(problem, node, config);
        }));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) results[k] = futures[k].get();
    }

    for (std::size_t k = 0; k < batch.size(); ++k) {
      const OpenNode& node = batch[k];
      NodeResult& res = results[k];
      ++report.nodes;
      report.max_depth = std::max(report.max_depth, node.depth);
      for (int o = 0; o < 3; ++o) report.cuts[o] += res.cuts_added[o];
      NodeEvent ev;
      ev.id = node.id;
      ev.parent = node.parent;
      ev.depth = node.depth;
      ev.bound_in = node.bound;
      ev.bound_out = res.dual_bound;
      ev.status = res.status;
      if (!res.bound_trace.empty()) ev.first_master = res.bound_trace.front();

      if (res.status == OaStatus::kInfeasible) {
        if (config.record_log) report.log.push_back(ev);
        continue;
      }
      any_feasible_region = true;
      if (!res.beta.empty()) offer(res.beta);
      const bool solved = res.status == OaStatus::kFeasible;
      if (!solved && res.dual_bound < report.primal_bound - 1e-9) {
        std::vector<double> at = res.beta;
        if (at.empty()) {
          at.resize(problem.dim());
          for (int i = 0; i < problem.dim(); ++i) at[i] = node.box[i].mid();
        }
        const auto choice = branch_choice(node.box, at, candidates);
        if (choice) {
          ev.branch_coord = choice->first;
          ev.branch_at = choice->second;
          auto [lo, hi] = node.box.split(choice->first, choice->second);
          open.push(OpenNode{next_id++, node.id, node.depth + 1, res.dual_bound, std::move(lo), res.active_cuts});
          open.push(OpenNode{next_id++, node.id, node.depth + 1, res.dual_bound, std::move(hi),
                             std::move(res.active_cuts)});
        } else {
          stuck_floor = std::min(stuck_floor, res.dual_bound);
        }
      }
      if (config.record_log) report.log.push_back(ev);
    }
  }

  while (!open.empty() && open.top().bound >= report.primal_bound - 1e-9) open.pop();
  report.dual_bound = global_dual();
  report.gap = relative_gap(report.primal_bound, report.dual_bound, config.abs_gap);
  if (report.status == SbcStatus::kTreeExhausted && report.gap <= config.gap && !open.empty()) {
    report.status = SbcStatus::kGapReached;
  }
  if (!any_feasible_region && report.nodes > 0 && report.status == SbcStatus::kTreeExhausted &&
      problem.form == PenaltyForm::kBudget) {
    // Every node was infeasible, yet beta = 0 satisfies any budget: the box excluded it.
    report.status = SbcStatus::kInfeasible;
  }
  report.time_s = elapsed();
  return report;
}

}  // namespace ddconvex
