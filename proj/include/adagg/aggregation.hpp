// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adagg/graph.hpp"

namespace adagg
{

class AggregationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Position of an aggregate in a matching hierarchy: group `group` of the
/// aggregation produced after `level` matching rounds.
struct HierarchyNode
{
  int level = 0;
  int group = 0;

  friend bool operator==(const HierarchyNode &, const HierarchyNode &) = default;
};

/// Edges joining aggregates `first` < `second`.
struct Interface
{
  int first = 0;
  int second = 0;
  std::vector<EdgeId> edges;
};

/// Partition of the vertices into connected aggregates, with the induced
/// split of the edges into aggregate-interior edges and interfaces.
class Aggregation
{
public:
  Aggregation() = default;

  int num_aggregates() const { return static_cast<int>(aggregates_.size()); }
  int num_vertices() const { return static_cast<int>(labels_.size()); }

  const std::vector<int> &labels() const { return labels_; }
  int label(VertexId v) const { return labels_[v]; }
  /// Vertices of aggregate k in increasing order.
  const std::vector<VertexId> &vertices(int k) const { return aggregates_[k]; }
  int size(int k) const { return static_cast<int>(aggregates_[k].size()); }
  const std::vector<EdgeId> &interior_edges(int k) const { return interior_[k]; }

  /// Interfaces sorted by (first, second); the position is the interface id.
  const std::vector<Interface> &interfaces() const { return interfaces_; }
  int num_interfaces() const { return static_cast<int>(interfaces_.size()); }
  std::optional<int> interface_id(int a, int b) const;
  /// Ids of the interfaces touching aggregate k.
  const std::vector<int> &interfaces_of(int k) const { return touching_[k]; }

  bool has_origin() const { return !origin_.empty(); }
  const HierarchyNode &origin(int k) const { return origin_.at(k); }
  const std::vector<HierarchyNode> &origins() const { return origin_; }
  /// Copy tagged with one hierarchy node per aggregate.
  Aggregation with_origin(std::vector<HierarchyNode> origin) const;

  friend Aggregation compute_interfaces(const Graph &g, std::span<const int> labels,
                                        std::vector<HierarchyNode> origin);

private:
  std::vector<int> labels_;
  std::vector<std::vector<VertexId>> aggregates_;
  std::vector<std::vector<EdgeId>> interior_;
  std::vector<Interface> interfaces_;
  std::map<std::pair<int, int>, int> interface_index_;
  std::vector<std::vector<int>> touching_;
  std::vector<HierarchyNode> origin_;
};

/// Builds the aggregation with the given labels, which must use every id in
/// [0, n_c). Throws AggregationError naming a disconnected aggregate.
/// `origin`, when given, tags every aggregate with its hierarchy node.
Aggregation compute_interfaces(const Graph &g, std::span<const int> labels,
                               std::vector<HierarchyNode> origin = {});

Aggregation singleton_aggregation(const Graph &g);

/// True when both aggregations induce the same partition, ignoring ids.
bool same_partition(const Aggregation &a, const Aggregation &b);
/// True when every aggregate of `fine` lies inside one aggregate of `coarse`.
bool refines(const Aggregation &fine, const Aggregation &coarse);

struct MatchResult
{
  /// current aggregate id -> coarse aggregate id
  std::vector<int> grouping;
  Aggregation coarse;
  /// False when the quotient graph had no edges; `coarse` is then the input.
  bool matched = false;
  /// Groups that absorbed at least one isolated aggregate.
  int fallback_groups = 0;
};

/// One round of pairwise matching on the quotient graph of `current`.
///
/// Aggregates are visited by increasing current degree (number of neighboring
/// aggregates still unmatched, updated as pairs form), ties by id; each
/// unmatched one is paired with the
/// unmatched neighbor sharing the largest total edge weight, ties by id.
/// Aggregates left without an unmatched neighbor then join the neighboring
/// group with the largest total connecting weight.
MatchResult match_once(const Graph &g, const Aggregation &current);

/// Record of repeated matching starting from singletons.
class MatchHierarchy
{
public:
  /// Number of matching rounds actually performed.
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  int requested_depth() const { return requested_depth_; }

  /// Aggregation after `level` rounds; level 0 is the singleton aggregation.
  const Aggregation &level(int level) const;
  /// Maps level-`level` aggregate ids to level-(`level`+1) ids.
  const std::vector<int> &grouping(int level) const;
  /// Level-(`level`-1) ids merged into group `group` of level `level`.
  const std::vector<int> &children(int level, int group) const;

  friend MatchHierarchy build_hierarchy(const Graph &g, int k);

private:
  int requested_depth_ = 0;
  std::vector<Aggregation> levels_;
  std::vector<std::vector<int>> groupings_;
  std::vector<std::vector<std::vector<int>>> children_;
};

/// Applies match_once k times; stops early if the quotient graph runs out of
/// edges.
MatchHierarchy build_hierarchy(const Graph &g, int k);

/// Aggregation at `level` with every aggregate tagged by its hierarchy node.
Aggregation aggregation_from_level(const MatchHierarchy &h, int level);

struct SplitResult
{
  Aggregation aggregation;
  /// Number of aggregates that were actually split.
  int split_count = 0;
  /// Requested aggregates that were hierarchy leaves.
  std::vector<int> leaves;
};

/// Replaces each listed aggregate by the groups it was merged from in the
/// hierarchy. Unaffected aggregates keep their relative order; the pieces of a
/// split aggregate take its place in the id sequence.
SplitResult split_aggregates(const Graph &g, const Aggregation &current,
                             std::span<const int> agg_ids, const MatchHierarchy &h);

inline SplitResult split_aggregate(const Graph &g, const Aggregation &current, int agg_id,
                                   const MatchHierarchy &h)
{
  const int ids[] = {agg_id};
  return split_aggregates(g, current, ids, h);
}

}  // namespace adagg
