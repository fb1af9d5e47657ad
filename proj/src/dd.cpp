// SPDX-License-Identifier: Apache-2.0

#include "ddconvex/dd.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "ddconvex/error.hpp"

namespace ddconvex {

bool Interval::finite() const { return std::isfinite(lo) && std::isfinite(hi); }

Box::Box(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_) {
    if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
      throw IntervalError("box interval with lo > hi");
    }
  }
}

bool Box::finite() const {
  return std::all_of(intervals_.begin(), intervals_.end(),
                     [](const Interval& iv) { return iv.finite(); });
}

bool Box::contains(std::span<const double> x, double tol) const {
  if (x.size() != intervals_.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < intervals_[i].lo - tol || x[i] > intervals_[i].hi + tol) return false;
  }
  return true;
}

std::pair<Box, Box> Box::split(int coord, double at) const {
  const auto& iv = intervals_.at(coord);
  if (!(iv.lo <= at && at <= iv.hi)) throw IntervalError("split point outside the interval");
  Box lower = *this;
  Box upper = *this;
  lower.intervals_[coord].hi = at;
  upper.intervals_[coord].lo = at;
  return {std::move(lower), std::move(upper)};
}

PartitionScheme PartitionScheme::single(const Box& box) {
  std::vector<std::vector<Interval>> parts;
  parts.reserve(box.size());
  for (const auto& iv : box.intervals()) parts.push_back({iv});
  return PartitionScheme(std::move(parts));
}

PartitionScheme PartitionScheme::uniform(const Box& box, int count, bool split_at_zero) {
  if (count < 1) throw ParameterError("partition needs at least one sub-interval");
  std::vector<std::vector<Interval>> parts;
  parts.reserve(box.size());
  for (const auto& iv : box.intervals()) {
    if (!iv.finite() || iv.lo == iv.hi) {
      parts.push_back({iv});
      continue;
    }
    std::vector<double> cuts;
    cuts.reserve(count + 2);
    for (int k = 0; k <= count; ++k) {
      cuts.push_back(k == count ? iv.hi : iv.lo + (iv.hi - iv.lo) * (static_cast<double>(k) / count));
    }
    if (split_at_zero && iv.lo < 0.0 && 0.0 < iv.hi &&
        std::find(cuts.begin(), cuts.end(), 0.0) == cuts.end()) {
      cuts.insert(std::upper_bound(cuts.begin(), cuts.end(), 0.0), 0.0);
    }
    std::vector<Interval> list;
    list.reserve(cuts.size() - 1);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) list.push_back({cuts[k], cuts[k + 1]});
    parts.push_back(std::move(list));
  }
  return PartitionScheme(std::move(parts));
}

void PartitionScheme::validate(const Box& box) const {
  if (size() != box.size()) throw DimensionError("partition and box dimensions differ");
  for (int i = 0; i < size(); ++i) {
    const auto& list = parts_[i];
    if (list.empty()) throw IntervalError("empty sub-interval list for coordinate " + std::to_string(i));
    if (list.front().lo != box[i].lo || list.back().hi != box[i].hi) {
      throw IntervalError("sub-intervals do not span coordinate " + std::to_string(i));
    }
    for (std::size_t j = 0; j < list.size(); ++j) {
      if (!(list[j].lo <= list[j].hi)) throw IntervalError("sub-interval with lo > hi");
      if (j > 0 && list[j].lo != list[j - 1].hi) {
        throw IntervalError("sub-intervals of coordinate " + std::to_string(i) + " are not contiguous");
      }
    }
  }
}

std::span<const ArcId> Diagram::in_arcs(NodeId id) const {
  const auto b = in_offsets_[id.index()];
  const auto e = in_offsets_[id.index() + 1];
  return std::span<const ArcId>(in_list_).subspan(b, e - b);
}

std::span<const ArcId> Diagram::out_arcs(NodeId id) const {
  const auto b = out_offsets_[id.index()];
  const auto e = out_offsets_[id.index() + 1];
  return std::span<const ArcId>(out_list_).subspan(b, e - b);
}

std::size_t Diagram::width() const {
  std::size_t w = 0;
  for (const auto& layer : node_layers_) w = std::max(w, layer.size());
  return w;
}

namespace {

void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string Diagram::to_text() const {
  std::string out;
  for (int k = 0; k < dims(); ++k) {
    for (NodeId u : node_layers_[k]) {
      for (ArcId a : out_arcs(u)) {
        const auto& arc = arcs_[a.index()];
        out += "layer ";
        out += std::to_string(k + 1);
        out += ": node ";
        out += std::to_string(u.value);
        out += '(';
        append_number(out, nodes_[u.index()].state);
        out += ") -> ";
        append_number(out, arc.label);
        out += " \xE2\x86\x92 ";  // U+2192
        out += std::to_string(arc.head.value);
        out += '\n';
      }
    }
  }
  return out;
}

class DiagramBuilder {
 public:
  explicit DiagramBuilder(int dims) {
    d_.node_layers_.resize(dims + 1);
    d_.arc_layers_.resize(dims);
  }

  NodeId add_node(int layer, double state) {
    NodeId id{static_cast<std::int32_t>(d_.nodes_.size())};
    d_.nodes_.push_back(DdNode{state, layer});
    d_.node_layers_[layer].push_back(id);
    return id;
  }

  void add_arc(NodeId tail, NodeId head, double label) {
    const int layer = d_.nodes_[tail.index()].layer;
    ArcId id{static_cast<std::int32_t>(d_.arcs_.size())};
    d_.arcs_.push_back(DdArc{tail, head, label, layer});
    d_.arc_layers_[layer].push_back(id);
  }

  double state(NodeId id) const { return d_.nodes_[id.index()].state; }
  std::span<const NodeId> layer(int k) const { return d_.node_layers_[k]; }

  Diagram finish(double budget, Box box, bool epigraph) {
    auto& d = d_;
    d.budget_ = budget;
    d.box_ = std::move(box);
    d.epigraph_ = epigraph;
    const std::size_t nn = d.nodes_.size();
    d.in_offsets_.assign(nn + 1, 0);
    d.out_offsets_.assign(nn + 1, 0);
    for (const auto& a : d.arcs_) {
      ++d.in_offsets_[a.head.index() + 1];
      ++d.out_offsets_[a.tail.index() + 1];
    }
    std::partial_sum(d.in_offsets_.begin(), d.in_offsets_.end(), d.in_offsets_.begin());
    std::partial_sum(d.out_offsets_.begin(), d.out_offsets_.end(), d.out_offsets_.begin());
    d.in_list_.resize(d.arcs_.size());
    d.out_list_.resize(d.arcs_.size());
    std::vector<std::int32_t> in_fill(d.in_offsets_.begin(), d.in_offsets_.end() - 1);
    std::vector<std::int32_t> out_fill(d.out_offsets_.begin(), d.out_offsets_.end() - 1);
    for (std::size_t a = 0; a < d.arcs_.size(); ++a) {
      const ArcId id{static_cast<std::int32_t>(a)};
      d.in_list_[in_fill[d.arcs_[a].head.index()]++] = id;
      d.out_list_[out_fill[d.arcs_[a].tail.index()]++] = id;
    }
    // Forward reachability from the root.
    std::vector<char> reach(nn, 0);
    reach[d.root().index()] = 1;
    for (int k = 0; k < d.dims(); ++k) {
      for (ArcId a : d.arc_layers_[k]) {
        const auto& arc = d.arcs_[a.index()];
        if (reach[arc.tail.index()]) reach[arc.head.index()] = 1;
      }
    }
    d.has_path_ = reach[d.terminal().index()] != 0;
    d.finite_labels_ = std::all_of(d.arcs_.begin(), d.arcs_.end(), [](const DdArc& a) { return std::isfinite(a.label); });
    return std::move(d_);
  }

 private:
  Diagram d_;
};

namespace {

/// Cluster index per state after bucket merging; cluster ids follow first appearance.
std::vector<int> bucket_clusters(std::span<const double> states, int width_limit, int buckets,
                                 int& num_clusters) {
  const std::size_t n = states.size();
  std::vector<int> cluster(n);
  if (width_limit <= 0 || n <= static_cast<std::size_t>(width_limit)) {
    std::iota(cluster.begin(), cluster.end(), 0);
    num_clusters = static_cast<int>(n);
    return cluster;
  }
  const auto [mn_it, mx_it] = std::minmax_element(states.begin(), states.end());
  const double mn = *mn_it;
  const double range = *mx_it - mn;
  long long count = buckets > 0 ? buckets : 10LL * width_limit;
  std::vector<long long> bucket(n);
  while (true) {
    std::unordered_set<long long> used;
    for (std::size_t i = 0; i < n; ++i) {
      long long b = range > 0.0 ? static_cast<long long>(std::floor((states[i] - mn) / range * count)) : 0;
      b = std::clamp<long long>(b, 0, count - 1);
      bucket[i] = b;
      used.insert(b);
    }
    if (used.size() <= static_cast<std::size_t>(width_limit) || count == 1) break;
    count = std::max<long long>(1, count / 2);
  }
  std::unordered_map<long long, int> ids;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = ids.try_emplace(bucket[i], static_cast<int>(ids.size()));
    cluster[i] = it->second;
  }
  num_clusters = static_cast<int>(ids.size());
  return cluster;
}

struct ArcKey {
  std::int32_t tail;
  std::int32_t head;
  std::uint64_t label_bits;
  friend bool operator==(const ArcKey&, const ArcKey&) = default;
};

struct ArcKeyHash {
  std::size_t operator()(const ArcKey& k) const {
    std::uint64_t h = k.label_bits * 0x9E3779B97F4A7C15ULL;
    h ^= (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k.tail)) << 32) ^
         static_cast<std::uint32_t>(k.head);
    h *= 0xBF58476D1CE4E5B9ULL;
    return static_cast<std::size_t>(h ^ (h >> 31));
  }
};

struct PendingChild {
  NodeId tail;
  double state;
  Interval part;
};

void validate_inputs(const SeparableScale& scale, const Box& box, const PartitionScheme& parts) {
  if (scale.size() != box.size() || parts.size() != box.size()) {
    throw DimensionError("scale, box and partition dimensions differ");
  }
  if (box.size() == 0) throw DimensionError("diagram needs at least one variable");
  parts.validate(box);
}

/// Creates node layer `layer + 1` from pending children, merging when the layer
/// exceeds the width limit.
void emit_layer(DiagramBuilder& builder, int layer, const std::vector<PendingChild>& pending,
                const BuildOptions& options) {
  std::vector<double> states;
  std::unordered_map<std::uint64_t, int> state_index;
  std::vector<int> child_of(pending.size());
  for (std::size_t p = 0; p < pending.size(); ++p) {
    // +0.0 and -0.0 share a key.
    const double s = pending[p].state == 0.0 ? 0.0 : pending[p].state;
    auto [it, inserted] = state_index.try_emplace(std::bit_cast<std::uint64_t>(s), static_cast<int>(states.size()));
    if (inserted) states.push_back(s);
    child_of[p] = it->second;
  }
  int num_clusters = 0;
  const auto cluster = bucket_clusters(states, options.width_limit, options.buckets, num_clusters);
  const bool merged = num_clusters < static_cast<int>(states.size());

  std::vector<double> cluster_state(num_clusters, kUnbounded);
  for (std::size_t s = 0; s < states.size(); ++s) {
    cluster_state[cluster[s]] = std::min(cluster_state[cluster[s]], states[s]);
  }
  std::vector<NodeId> node_of(num_clusters);
  for (int c = 0; c < num_clusters; ++c) node_of[c] = builder.add_node(layer + 1, cluster_state[c]);

  std::unordered_set<ArcKey, ArcKeyHash> seen;
  for (std::size_t p = 0; p < pending.size(); ++p) {
    const NodeId head = node_of[cluster[child_of[p]]];
    for (double label : {pending[p].part.lo, pending[p].part.hi}) {
      if (merged) {
        const double key_label = label == 0.0 ? 0.0 : label;
        if (!seen.insert(ArcKey{pending[p].tail.value, head.value, std::bit_cast<std::uint64_t>(key_label)}).second) {
          continue;
        }
      }
      builder.add_arc(pending[p].tail, head, label);
    }
  }
}

/// Expands arc layers 0..last-1, each creating the next node layer.
void expand_layers(DiagramBuilder& builder, const SeparableScale& scale, const PartitionScheme& parts,
                   int last, double prune_above, const BuildOptions& options) {
  for (int i = 0; i < last; ++i) {
    std::vector<PendingChild> pending;
    for (NodeId u : builder.layer(i)) {
      const double su = builder.state(u);
      for (const auto& part : parts[i]) {
        const double s = su + interval_lower_bound(scale[i], part.lo, part.hi);
        // Children above the budget can never reach the terminal because states only
        // grow; dropping them keeps merged layers tight. The exact build keeps them.
        if (options.width_limit > 0 && s > prune_above) continue;
        pending.push_back(PendingChild{u, s, part});
      }
    }
    emit_layer(builder, i, pending, options);
  }
}

}  // namespace

Diagram build(const SeparableScale& scale, const Box& box, const PartitionScheme& parts,
              double budget, const BuildOptions& options) {
  validate_inputs(scale, box, parts);
  if (!std::isfinite(budget)) throw ParameterError("budget must be finite");
  const int n = box.size();
  DiagramBuilder builder(n);
  builder.add_node(0, 0.0);
  expand_layers(builder, scale, parts, n - 1, budget, options);
  const NodeId terminal = builder.add_node(n, 0.0);
  for (NodeId u : builder.layer(n - 1)) {
    const double su = builder.state(u);
    for (const auto& part : parts[n - 1]) {
      const double s_bar = su + interval_lower_bound(scale[n - 1], part.lo, part.hi);
      if (s_bar <= budget) {
        builder.add_arc(u, terminal, part.lo);
        builder.add_arc(u, terminal, part.hi);
      }
    }
  }
  return builder.finish(budget, box, false);
}

Diagram build_epigraph(const SeparableScale& scale, const Box& box, const PartitionScheme& parts,
                       double t_lo, double t_hi, int t_parts, const BuildOptions& options) {
  validate_inputs(scale, box, parts);
  if (std::isnan(t_lo) || std::isnan(t_hi) || t_lo > t_hi) {
    throw IntervalError("epigraph range requires t_lo <= t_hi");
  }
  if (!std::isfinite(t_lo) || !std::isfinite(t_hi)) throw IntervalError("epigraph range must be finite");
  if (t_parts < 1) throw ParameterError("epigraph needs at least one t sub-interval");
  const int n = box.size();
  DiagramBuilder builder(n + 1);
  builder.add_node(0, 0.0);
  expand_layers(builder, scale, parts, n, t_hi, options);
  const NodeId terminal = builder.add_node(n + 1, 0.0);

  std::vector<Interval> t_cuts;
  t_cuts.reserve(t_parts);
  for (int j = 0; j < t_parts; ++j) {
    const double lo = j == 0 ? t_lo : t_lo + (t_hi - t_lo) * (static_cast<double>(j) / t_parts);
    const double hi = j + 1 == t_parts ? t_hi : t_lo + (t_hi - t_lo) * (static_cast<double>(j + 1) / t_parts);
    t_cuts.push_back({lo, hi});
  }
  for (NodeId u : builder.layer(n)) {
    const double su = builder.state(u);
    for (const auto& part : t_cuts) {
      if (su <= part.hi) {
        builder.add_arc(u, terminal, part.lo);
        builder.add_arc(u, terminal, part.hi);
      }
    }
  }
  return builder.finish(kUnbounded, box, true);
}

Diagram relax_width(const Diagram& d, int width_limit, int buckets) {
  if (width_limit < 1) throw ParameterError("width limit must be positive");
  const int layers = d.num_node_layers();
  // Representative cluster per old node, computed layer by layer.
  std::vector<int> rep(d.num_nodes(), -1);
  std::vector<char> merged_node(d.num_nodes(), 0);
  DiagramBuilder builder(d.dims());
  std::vector<NodeId> new_id_of_cluster;
  std::vector<NodeId> new_of_old(d.num_nodes());
  for (int k = 0; k < layers; ++k) {
    const auto nodes = d.layer_nodes(k);
    std::vector<double> states;
    states.reserve(nodes.size());
    for (NodeId u : nodes) states.push_back(d.node(u).state);
    int num_clusters = 0;
    const bool interior = k > 0 && k + 1 < layers;
    const auto cluster = interior ? bucket_clusters(states, width_limit, buckets, num_clusters)
                                  : bucket_clusters(states, 0, 0, num_clusters);
    std::vector<double> cluster_state(num_clusters, kUnbounded);
    std::vector<int> cluster_size(num_clusters, 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      cluster_state[cluster[i]] = std::min(cluster_state[cluster[i]], states[i]);
      ++cluster_size[cluster[i]];
    }
    std::vector<NodeId> ids(num_clusters);
    for (int c = 0; c < num_clusters; ++c) ids[c] = builder.add_node(k, cluster_state[c]);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      new_of_old[nodes[i].index()] = ids[cluster[i]];
      merged_node[nodes[i].index()] = cluster_size[cluster[i]] > 1;
    }
  }
  std::unordered_set<ArcKey, ArcKeyHash> seen;
  for (int k = 0; k < d.dims(); ++k) {
    for (ArcId a : d.layer_arcs(k)) {
      const auto& arc = d.arc(a);
      const NodeId tail = new_of_old[arc.tail.index()];
      const NodeId head = new_of_old[arc.head.index()];
      if (merged_node[arc.tail.index()] || merged_node[arc.head.index()]) {
        const double key_label = arc.label == 0.0 ? 0.0 : arc.label;
        if (!seen.insert(ArcKey{tail.value, head.value, std::bit_cast<std::uint64_t>(key_label)}).second) {
          continue;
        }
      }
      builder.add_arc(tail, head, arc.label);
    }
  }
  return builder.finish(d.budget(), d.box(), d.is_epigraph());
}

namespace {

void require_finite_labels(const Diagram& d) {
  if (!d.finite_labels()) throw IntervalError("diagram has a non-finite arc label");
}

Path longest_path_impl(const Diagram& d, auto&& weight_of) {
  if (!d.has_path()) throw NoPathError("diagram encodes no root-terminal path");
  require_finite_labels(d);
  const std::size_t nn = d.num_nodes();
  std::vector<double> best(nn, -kUnbounded);
  std::vector<double> pred_label(nn, kUnbounded);
  std::vector<std::int32_t> pred(nn, -1);
  best[d.root().index()] = 0.0;
  const auto arcs = d.arcs();
  for (int k = 0; k < d.dims(); ++k) {
    for (ArcId a : d.layer_arcs(k)) {
      const DdArc& arc = arcs[a.index()];
      const double base = best[arc.tail.index()];
      if (base == -kUnbounded) continue;
      const double cand = base + weight_of(a, arc);
      const std::size_t h = arc.head.index();
      if (cand > best[h] || (cand == best[h] && arc.label < pred_label[h])) {
        best[h] = cand;
        pred[h] = a.value;
        pred_label[h] = arc.label;
      }
    }
  }
  Path path;
  path.value = best[d.terminal().index()];
  path.arcs.resize(d.dims());
  path.point.resize(d.dims());
  NodeId cur = d.terminal();
  for (int k = d.dims() - 1; k >= 0; --k) {
    const ArcId a{pred[cur.index()]};
    path.arcs[k] = a;
    path.point[k] = d.arc(a).label;
    cur = d.arc(a).tail;
  }
  return path;
}

}  // namespace

Path longest_path(const Diagram& d, std::span<const double> arc_weights) {
  if (arc_weights.size() != d.num_arcs()) throw DimensionError("one weight per arc is required");
  return longest_path_impl(d, [&](ArcId a, const DdArc&) { return arc_weights[a.index()]; });
}

Path longest_path_linear(const Diagram& d, std::span<const double> layer_coeffs) {
  if (static_cast<int>(layer_coeffs.size()) != d.dims()) {
    throw DimensionError("one coefficient per arc layer is required");
  }
  return longest_path_impl(d, [&](ArcId, const DdArc& arc) { return arc.label * layer_coeffs[arc.layer]; });
}

std::size_t count_paths(const Diagram& d) {
  std::vector<std::size_t> count(d.num_nodes(), 0);
  count[d.root().index()] = 1;
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  for (int k = 0; k < d.dims(); ++k) {
    for (ArcId a : d.layer_arcs(k)) {
      const auto& arc = d.arc(a);
      auto& c = count[arc.head.index()];
      const auto add = count[arc.tail.index()];
      c = (kMax - c < add) ? kMax : c + add;
    }
  }
  return count[d.terminal().index()];
}

std::vector<std::vector<double>> enumerate_paths(const Diagram& d, std::size_t cap) {
  std::vector<std::vector<double>> points;
  if (!d.has_path()) return points;
  const std::size_t total = count_paths(d);
  if (total > cap) {
    throw EnumerationOverflow("diagram has " + std::to_string(total) + " paths, cap is " +
                              std::to_string(cap));
  }
  // Nodes that reach the terminal.
  std::vector<char> alive(d.num_nodes(), 0);
  alive[d.terminal().index()] = 1;
  for (int k = d.dims() - 1; k >= 0; --k) {
    for (ArcId a : d.layer_arcs(k)) {
      const auto& arc = d.arc(a);
      if (alive[arc.head.index()]) alive[arc.tail.index()] = 1;
    }
  }
  points.reserve(total);
  std::vector<double> current(d.dims());
  auto dfs = [&](auto&& self, NodeId u, int depth) -> void {
    if (depth == d.dims()) {
      points.push_back(current);
      return;
    }
    for (ArcId a : d.out_arcs(u)) {
      const auto& arc = d.arc(a);
      if (!alive[arc.head.index()]) continue;
      current[depth] = arc.label;
      self(self, arc.head, depth + 1);
    }
  };
  dfs(dfs, d.root(), 0);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

}  // namespace ddconvex
