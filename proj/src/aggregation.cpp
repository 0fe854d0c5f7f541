// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/aggregation.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>

namespace adagg
{

std::optional<int> Aggregation::interface_id(int a, int b) const
{
  if (a > b)
    std::swap(a, b);
  auto it = interface_index_.find({a, b});
  if (it == interface_index_.end())
    return std::nullopt;
  return it->second;
}

Aggregation compute_interfaces(const Graph &g, std::span<const int> labels,
                               std::vector<HierarchyNode> origin)
{
  const int n = g.num_vertices();
  if (static_cast<int>(labels.size()) != n)
    throw AggregationError("compute_interfaces: expected " + std::to_string(n) +
                           " labels, got " + std::to_string(labels.size()));
  int n_c = 0;
  for (int label : labels)
  {
    if (label < 0)
      throw AggregationError("compute_interfaces: negative aggregate label");
    n_c = std::max(n_c, label + 1);
  }

  Aggregation agg;
  agg.labels_.assign(labels.begin(), labels.end());
  agg.aggregates_.resize(n_c);
  for (VertexId v = 0; v < n; ++v)
    agg.aggregates_[labels[v]].push_back(v);
  for (int k = 0; k < n_c; ++k)
  {
    if (agg.aggregates_[k].empty())
      throw AggregationError("compute_interfaces: aggregate " + std::to_string(k) +
                             " is empty; labels must be contiguous");
    if (agg.aggregates_[k].size() > 1 && count_components(g, agg.aggregates_[k]) != 1)
      throw AggregationError("compute_interfaces: aggregate " + std::to_string(k) +
                             " is not connected");
  }

  agg.interior_.resize(n_c);
  std::map<std::pair<int, int>, std::vector<EdgeId>> by_pair;
  for (EdgeId e = 0; e < g.num_edges(); ++e)
  {
    const int a = labels[g.edge(e).head];
    const int b = labels[g.edge(e).tail];
    if (a == b)
      agg.interior_[a].push_back(e);
    else
      by_pair[std::minmax(a, b)].push_back(e);
  }
  agg.touching_.resize(n_c);
  agg.interfaces_.reserve(by_pair.size());
  for (auto &[key, edges] : by_pair)
  {
    const int id = static_cast<int>(agg.interfaces_.size());
    agg.interfaces_.push_back({key.first, key.second, std::move(edges)});
    agg.interface_index_.emplace(key, id);
    agg.touching_[key.first].push_back(id);
    agg.touching_[key.second].push_back(id);
  }

  if (!origin.empty() && static_cast<int>(origin.size()) != n_c)
    throw AggregationError("compute_interfaces: origin list does not match aggregate count");
  agg.origin_ = std::move(origin);
  return agg;
}

Aggregation Aggregation::with_origin(std::vector<HierarchyNode> origin) const
{
  if (static_cast<int>(origin.size()) != num_aggregates())
    throw AggregationError("with_origin: origin list does not match aggregate count");
  Aggregation out = *this;
  out.origin_ = std::move(origin);
  return out;
}

Aggregation singleton_aggregation(const Graph &g)
{
  std::vector<int> labels(g.num_vertices());
  std::iota(labels.begin(), labels.end(), 0);
  std::vector<HierarchyNode> origin(labels.size());
  for (std::size_t k = 0; k < origin.size(); ++k)
    origin[k] = {0, static_cast<int>(k)};
  return compute_interfaces(g, labels, std::move(origin));
}

namespace
{

// Relabels so that aggregates are numbered by their smallest vertex.
std::vector<int> canonical_labels(const Aggregation &a)
{
  std::vector<int> remap(a.num_aggregates(), -1);
  std::vector<int> out(a.num_vertices());
  int next = 0;
  for (VertexId v = 0; v < a.num_vertices(); ++v)
  {
    int &r = remap[a.label(v)];
    if (r < 0)
      r = next++;
    out[v] = r;
  }
  return out;
}

}  // namespace

bool same_partition(const Aggregation &a, const Aggregation &b)
{
  return a.num_vertices() == b.num_vertices() && canonical_labels(a) == canonical_labels(b);
}

bool refines(const Aggregation &fine, const Aggregation &coarse)
{
  if (fine.num_vertices() != coarse.num_vertices())
    return false;
  for (int k = 0; k < fine.num_aggregates(); ++k)
  {
    const int target = coarse.label(fine.vertices(k).front());
    for (VertexId v : fine.vertices(k))
      if (coarse.label(v) != target)
        return false;
  }
  return true;
}

MatchResult match_once(const Graph &g, const Aggregation &current)
{
  const int n_c = current.num_aggregates();

  // Quotient graph: neighbors sorted by id with summed connecting weight.
  std::vector<std::vector<std::pair<int, double>>> quotient(n_c);
  for (const auto &face : current.interfaces())
  {
    double w = 0.0;
    for (EdgeId e : face.edges)
      w += g.weight(e);
    quotient[face.first].emplace_back(face.second, w);
    quotient[face.second].emplace_back(face.first, w);
  }
  for (auto &row : quotient)
    std::sort(row.begin(), row.end());

  MatchResult result;
  if (current.num_interfaces() == 0)
  {
    result.grouping.resize(n_c);
    std::iota(result.grouping.begin(), result.grouping.end(), 0);
    result.coarse = current;
    result.matched = false;
    return result;
  }

  // Visit by current degree: the number of neighboring aggregates that are
  // still unmatched. Stale heap entries are skipped when popped.
  std::vector<int> live_degree(n_c);
  using Entry = std::pair<int, int>;  // (degree, id)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (int v = 0; v < n_c; ++v)
  {
    live_degree[v] = static_cast<int>(quotient[v].size());
    heap.emplace(live_degree[v], v);
  }

  std::vector<int> group(n_c, -1);
  std::vector<int> isolated;
  int n_groups = 0;
  auto retire = [&](int v) {
    for (const auto &[w, weight] : quotient[v])
      if (group[w] == -1)
        heap.emplace(--live_degree[w], w);
  };
  while (!heap.empty())
  {
    const auto [degree, v] = heap.top();
    heap.pop();
    if (group[v] != -1 || degree != live_degree[v])
      continue;
    int partner = -1;
    double best = 0.0;
    for (const auto &[w, weight] : quotient[v])
      if (group[w] == -1 && (partner < 0 || weight > best))
      {
        partner = w;
        best = weight;
      }
    if (partner < 0)
    {
      // Mark visited so the isolated aggregate is not popped again.
      group[v] = -2;
      isolated.push_back(v);
      continue;
    }
    group[v] = group[partner] = n_groups++;
    retire(v);
    retire(partner);
  }

  std::vector<char> absorbed(n_groups, 0);
  std::vector<int> lonely;
  for (int v : isolated)
  {
    // All neighbors were matched when v was visited, so each has a group.
    std::map<int, double> weight_to_group;
    for (const auto &[w, weight] : quotient[v])
      weight_to_group[group[w]] += weight;
    if (weight_to_group.empty())
    {
      lonely.push_back(v);
      continue;
    }
    int target = -1;
    double best = 0.0;
    for (const auto &[grp, weight] : weight_to_group)
      if (target < 0 || weight > best)
      {
        target = grp;
        best = weight;
      }
    group[v] = target;
    absorbed[target] = 1;
  }
  for (int v : lonely)
    group[v] = n_groups++;

  std::vector<int> labels(current.num_vertices());
  for (VertexId v = 0; v < current.num_vertices(); ++v)
    labels[v] = group[current.label(v)];

  result.grouping = std::move(group);
  result.coarse = compute_interfaces(g, labels);
  result.matched = true;
  result.fallback_groups = static_cast<int>(std::count(absorbed.begin(), absorbed.end(), 1));
  return result;
}

const Aggregation &MatchHierarchy::level(int level) const
{
  if (level < 0 || level > depth())
    throw AggregationError("hierarchy level " + std::to_string(level) + " out of range [0, " +
                           std::to_string(depth()) + "]");
  return levels_[level];
}

const std::vector<int> &MatchHierarchy::grouping(int level) const
{
  if (level < 0 || level >= depth())
    throw AggregationError("hierarchy grouping " + std::to_string(level) + " out of range");
  return groupings_[level];
}

const std::vector<int> &MatchHierarchy::children(int level, int group) const
{
  if (level < 1 || level > depth())
    throw AggregationError("hierarchy level " + std::to_string(level) + " has no children");
  return children_[level - 1].at(group);
}

MatchHierarchy build_hierarchy(const Graph &g, int k)
{
  if (k < 0)
    throw AggregationError("build_hierarchy: negative depth");
  MatchHierarchy h;
  h.requested_depth_ = k;
  h.levels_.push_back(singleton_aggregation(g));
  for (int round = 0; round < k; ++round)
  {
    MatchResult step = match_once(g, h.levels_.back());
    if (!step.matched)
      break;
    const int n_groups = step.coarse.num_aggregates();
    std::vector<std::vector<int>> kids(n_groups);
    for (int child = 0; child < static_cast<int>(step.grouping.size()); ++child)
      kids[step.grouping[child]].push_back(child);
    h.groupings_.push_back(std::move(step.grouping));
    h.children_.push_back(std::move(kids));
    std::vector<HierarchyNode> origin(n_groups);
    for (int grp = 0; grp < n_groups; ++grp)
      origin[grp] = {round + 1, grp};
    h.levels_.push_back(step.coarse.with_origin(std::move(origin)));
  }
  return h;
}

Aggregation aggregation_from_level(const MatchHierarchy &h, int level)
{
  return h.level(level);
}

SplitResult split_aggregates(const Graph &g, const Aggregation &current,
                             std::span<const int> agg_ids, const MatchHierarchy &h)
{
  if (!current.has_origin())
    throw AggregationError("split_aggregates: aggregation carries no hierarchy origin");
  std::vector<char> requested(current.num_aggregates(), 0);
  for (int id : agg_ids)
  {
    if (id < 0 || id >= current.num_aggregates())
      throw AggregationError("split_aggregates: unknown aggregate " + std::to_string(id));
    requested[id] = 1;
  }

  SplitResult result;
  std::vector<int> labels(current.num_vertices(), -1);
  std::vector<HierarchyNode> origin;
  origin.reserve(current.num_aggregates() + agg_ids.size());
  for (int k = 0; k < current.num_aggregates(); ++k)
  {
    HierarchyNode node = current.origin(k);
    std::vector<int> pieces;
    if (requested[k])
    {
      // Single-child groups carry no split; descend until the node branches.
      while (node.level > 0)
      {
        const auto &kids = h.children(node.level, node.group);
        if (kids.size() >= 2)
        {
          pieces = kids;
          break;
        }
        node = {node.level - 1, kids.front()};
      }
      if (pieces.empty())
        result.leaves.push_back(k);
    }
    if (pieces.empty())
    {
      const int id = static_cast<int>(origin.size());
      for (VertexId v : current.vertices(k))
        labels[v] = id;
      origin.push_back(current.origin(k));
      continue;
    }
    ++result.split_count;
    const Aggregation &below = h.level(node.level - 1);
    for (int piece : pieces)
    {
      const int id = static_cast<int>(origin.size());
      for (VertexId v : below.vertices(piece))
        labels[v] = id;
      origin.push_back({node.level - 1, piece});
    }
  }
  if (result.split_count == 0)
  {
    result.aggregation = current;
    return result;
  }
  result.aggregation = compute_interfaces(g, labels, std::move(origin));
  return result;
}

}  // namespace adagg
