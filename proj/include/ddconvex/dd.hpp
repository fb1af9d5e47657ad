// SPDX-License-Identifier: Apache-2.0

// Layered decision diagrams for norm-bounding sets
//
//   F = { x in prod_i [l_i, u_i] : eta(x) <= budget }.
//
// Node layer k holds the nodes reached after fixing k coordinates; every node
// carries a state value that lower-bounds the penalty accumulated along any path
// into it. Arcs in arc layer k carry a real label, the value of coordinate k.
// Every sub-interval of the domain partition contributes a pair of arcs, one per
// endpoint, so the convex hull of the encoded points covers the sub-interval.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ddconvex/scale.hpp"

namespace ddconvex {

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool finite() const;
};

class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> intervals);

  int size() const { return static_cast<int>(intervals_.size()); }
  const Interval& operator[](int i) const { return intervals_.at(i); }
  Interval& operator[](int i) { return intervals_.at(i); }
  std::span<const Interval> intervals() const { return intervals_; }
  bool finite() const;
  bool contains(std::span<const double> x, double tol = 0.0) const;

  /// Splits coordinate `coord` at `at`.
  std::pair<Box, Box> split(int coord, double at) const;

 private:
  std::vector<Interval> intervals_;
};

class PartitionScheme {
 public:
  PartitionScheme() = default;
  explicit PartitionScheme(std::vector<std::vector<Interval>> parts) : parts_(std::move(parts)) {}

  /// One sub-interval per coordinate: the coordinate's full domain.
  static PartitionScheme single(const Box& box);
  /// `count` equal-width sub-intervals per finite coordinate (infinite coordinates get
  /// one). With `split_at_zero`, zero is added as a breakpoint when it is interior.
  static PartitionScheme uniform(const Box& box, int count, bool split_at_zero = false);

  int size() const { return static_cast<int>(parts_.size()); }
  std::span<const Interval> operator[](int i) const { return parts_.at(i); }

  /// Throws IntervalError unless every coordinate's list is nonempty, contiguous
  /// and spans exactly the box interval.
  void validate(const Box& box) const;

 private:
  std::vector<std::vector<Interval>> parts_;
};

template <typename Tag>
struct StrongId {
  std::int32_t value = -1;
  constexpr std::size_t index() const { return static_cast<std::size_t>(value); }
  friend constexpr bool operator==(StrongId, StrongId) = default;
  friend constexpr auto operator<=>(StrongId, StrongId) = default;
};

using NodeId = StrongId<struct NodeTag>;
using ArcId = StrongId<struct ArcTag>;

struct DdNode {
  double state = 0.0;
  int layer = 0;
};

struct DdArc {
  NodeId tail;
  NodeId head;
  double label = 0.0;
  int layer = 0;  // arc layer k joins node layer k to node layer k + 1
};

/// Immutable layered DAG. Node layers are numbered 0..dims (root in 0, terminal in
/// dims), arc layers 0..dims-1.
class Diagram {
 public:
  int dims() const { return static_cast<int>(arc_layers_.size()); }
  int num_node_layers() const { return static_cast<int>(node_layers_.size()); }
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_arcs() const { return arcs_.size(); }

  NodeId root() const { return node_layers_.front().front(); }
  NodeId terminal() const { return node_layers_.back().front(); }

  const DdNode& node(NodeId id) const { return nodes_[id.index()]; }
  const DdArc& arc(ArcId id) const { return arcs_[id.index()]; }
  std::span<const DdArc> arcs() const { return arcs_; }
  std::span<const NodeId> layer_nodes(int k) const { return node_layers_.at(k); }
  std::span<const ArcId> layer_arcs(int k) const { return arc_layers_.at(k); }
  std::span<const ArcId> in_arcs(NodeId id) const;
  std::span<const ArcId> out_arcs(NodeId id) const;

  /// Largest node-layer size.
  std::size_t width() const;
  /// True iff at least one root-terminal path exists.
  bool has_path() const { return has_path_; }
  /// True iff every arc label is finite.
  bool finite_labels() const { return finite_labels_; }

  /// Budget used by the terminal filter (for epigraph diagrams: +inf).
  double budget() const { return budget_; }
  const Box& box() const { return box_; }
  /// True when the last arc layer encodes the epigraph variable t.
  bool is_epigraph() const { return epigraph_; }

  /// `layer k: node id(state) -> label → head-id`, one arc per line.
  std::string to_text() const;

 private:
  friend class DiagramBuilder;

  std::vector<DdNode> nodes_;
  std::vector<DdArc> arcs_;
  std::vector<std::vector<NodeId>> node_layers_;
  std::vector<std::vector<ArcId>> arc_layers_;
  std::vector<std::int32_t> in_offsets_, out_offsets_;
  std::vector<ArcId> in_list_, out_list_;
  double budget_ = 0.0;
  Box box_;
  bool epigraph_ = false;
  bool has_path_ = false;
  bool finite_labels_ = true;
};

struct BuildOptions {
  /// 0 builds the diagram exactly as the top-down procedure prescribes. A positive
  /// value merges nodes of any layer wider than the limit right after the layer is
  /// created (min-state merging), so later layers are computed from merged states.
  int width_limit = 0;
  /// Initial bucket count for merging; 0 means 10 * width_limit.
  int buckets = 0;
};

/// Top-down construction for { x in box : eta(x) <= budget } over the partition.
Diagram build(const SeparableScale& scale, const Box& box, const PartitionScheme& parts,
              double budget, const BuildOptions& options = {});

/// Diagram over (x, t) relaxing { (x, t) : x in box, eta(x) <= t, t in [t_lo, t_hi] }.
/// The extra arc layer splits [t_lo, t_hi] into `t_parts` uniform sub-intervals; a
/// node with accumulated state s connects through sub-interval j iff s <= its upper end.
Diagram build_epigraph(const SeparableScale& scale, const Box& box, const PartitionScheme& parts,
                       double t_lo, double t_hi, int t_parts, const BuildOptions& options = {});

/// Merges nodes of every layer wider than `width_limit` (post-hoc): states in the
/// layer's [min, max] range are bucketed, each bucket becomes one node with the
/// minimum state, and the bucket count halves until the layer fits. The result
/// encodes every path of `d`. `buckets` = 0 means 10 * width_limit.
Diagram relax_width(const Diagram& d, int width_limit, int buckets = 0);

struct Path {
  std::vector<ArcId> arcs;
  std::vector<double> point;
  double value = 0.0;
};

/// Longest root-terminal path for per-arc weights (indexed by arc id). Ties prefer
/// the smaller arc label, then the earlier arc. Throws NoPathError on an empty
/// diagram and IntervalError on non-finite labels.
Path longest_path(const Diagram& d, std::span<const double> arc_weights);

/// Longest path for weights label(a) * coeffs[layer(a)].
Path longest_path_linear(const Diagram& d, std::span<const double> layer_coeffs);

/// Number of root-terminal paths (saturates at SIZE_MAX).
std::size_t count_paths(const Diagram& d);

/// All points encoded by root-terminal paths, deduplicated, in lexicographic order.
/// Throws EnumerationOverflow when the number of paths exceeds `cap`.
std::vector<std::vector<double>> enumerate_paths(const Diagram& d, std::size_t cap);

}  // namespace ddconvex
