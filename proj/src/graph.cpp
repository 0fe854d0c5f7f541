// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>

namespace adagg
{

namespace
{

std::string describe(const WeightedEdge &e)
{
  return "(" + std::to_string(e.i) + ", " + std::to_string(e.j) + ", " +
         std::to_string(e.weight) + ")";
}

// Position of every subset vertex; -1 marks vertices outside the subset.
class SubsetIndex
{
public:
  explicit SubsetIndex(std::span<const VertexId> subset)
  {
    index_.reserve(subset.size() * 2);
    for (std::size_t k = 0; k < subset.size(); ++k)
      index_.emplace(subset[k], static_cast<int>(k));
  }
  int operator()(VertexId v) const
  {
    auto it = index_.find(v);
    return it == index_.end() ? -1 : it->second;
  }

private:
  std::unordered_map<VertexId, int> index_;
};

}  // namespace

Graph::Graph(int n_vertices, std::span<const WeightedEdge> edges, Orientation orientation)
    : n_vertices_(n_vertices)
{
  if (n_vertices < 0)
    throw GraphError("negative vertex count");
  edges_.reserve(edges.size());
  weights_.resize(static_cast<Eigen::Index>(edges.size()));
  std::set<std::pair<VertexId, VertexId>> seen;
  for (std::size_t k = 0; k < edges.size(); ++k)
  {
    const auto &e = edges[k];
    if (e.i < 0 || e.j < 0 || e.i >= n_vertices || e.j >= n_vertices)
      throw GraphError("edge " + describe(e) + ": vertex id out of range [0, " +
                       std::to_string(n_vertices) + ")");
    if (e.i == e.j)
      throw GraphError("edge " + describe(e) + ": self-loop");
    if (!(e.weight > 0.0))
      throw GraphError("edge " + describe(e) + ": weight must be positive");
    const auto key = std::minmax(e.i, e.j);
    if (!seen.insert(key).second)
      throw GraphError("edge " + describe(e) + ": duplicate undirected edge");
    if (orientation == Orientation::canonical)
      edges_.push_back({key.first, key.second});
    else
      edges_.push_back({e.i, e.j});
    weights_[static_cast<Eigen::Index>(k)] = e.weight;
  }

  offsets_.assign(n_vertices + 1, 0);
  for (const auto &e : edges_)
  {
    ++offsets_[e.head + 1];
    ++offsets_[e.tail + 1];
  }
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  adjacency_.resize(2 * edges_.size());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (EdgeId e = 0; e < num_edges(); ++e)
  {
    adjacency_[fill[edges_[e].head]++] = {edges_[e].tail, e};
    adjacency_[fill[edges_[e].tail]++] = {edges_[e].head, e};
  }
  for (VertexId v = 0; v < n_vertices; ++v)
    std::sort(adjacency_.begin() + offsets_[v], adjacency_.begin() + offsets_[v + 1],
              [](const Neighbor &a, const Neighbor &b) { return a.vertex < b.vertex; });
}

double Graph::average_degree() const
{
  return n_vertices_ == 0 ? 0.0 : 2.0 * num_edges() / n_vertices_;
}

void Graph::check_vertex_size(const VertexVector &v, const char *what) const
{
  if (v.size() != n_vertices_)
    throw GraphError(std::string(what) + ": vertex vector has size " +
                     std::to_string(v.size()) + ", graph has " +
                     std::to_string(n_vertices_) + " vertices");
}

void Graph::check_edge_size(const EdgeVector &t, const char *what) const
{
  if (t.size() != num_edges())
    throw GraphError(std::string(what) + ": edge vector has size " +
                     std::to_string(t.size()) + ", graph has " +
                     std::to_string(num_edges()) + " edges");
}

EdgeVector Graph::gradient(const VertexVector &v) const
{
  check_vertex_size(v, "gradient");
  EdgeVector out(num_edges());
  for (EdgeId e = 0; e < num_edges(); ++e)
    out[e] = v[edges_[e].head] - v[edges_[e].tail];
  return out;
}

VertexVector Graph::divergence(const EdgeVector &t) const
{
  check_edge_size(t, "divergence");
  VertexVector out = VertexVector::Zero(n_vertices_);
  for (EdgeId e = 0; e < num_edges(); ++e)
  {
    out[edges_[e].head] += t[e];
    out[edges_[e].tail] -= t[e];
  }
  return out;
}

EdgeVector Graph::apply_weights(const EdgeVector &t) const
{
  check_edge_size(t, "apply_weights");
  return weights_.cwiseProduct(t);
}

EdgeVector Graph::apply_weights_inverse(const EdgeVector &t) const
{
  check_edge_size(t, "apply_weights_inverse");
  return t.cwiseQuotient(weights_);
}

VertexVector Graph::laplacian(const VertexVector &v) const
{
  check_vertex_size(v, "laplacian");
  VertexVector out = VertexVector::Zero(n_vertices_);
  for (EdgeId e = 0; e < num_edges(); ++e)
  {
    const double flux = weights_[e] * (v[edges_[e].head] - v[edges_[e].tail]);
    out[edges_[e].head] += flux;
    out[edges_[e].tail] -= flux;
  }
  return out;
}

double Graph::energy_norm(const VertexVector &v) const
{
  const EdgeVector gv = gradient(v);
  return std::sqrt(gv.cwiseAbs2().dot(weights_));
}

double Graph::inverse_weighted_norm(const EdgeVector &t) const
{
  check_edge_size(t, "inverse_weighted_norm");
  return std::sqrt(t.cwiseAbs2().cwiseQuotient(weights_).sum());
}

Eigen::SparseMatrix<double> Graph::incidence() const
{
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * edges_.size());
  for (EdgeId e = 0; e < num_edges(); ++e)
  {
    entries.emplace_back(e, edges_[e].head, 1.0);
    entries.emplace_back(e, edges_[e].tail, -1.0);
  }
  Eigen::SparseMatrix<double> g(num_edges(), n_vertices_);
  g.setFromTriplets(entries.begin(), entries.end());
  return g;
}

Eigen::SparseMatrix<double> Graph::laplacian_matrix() const
{
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * edges_.size());
  for (EdgeId e = 0; e < num_edges(); ++e)
  {
    const auto [h, t] = edges_[e];
    const double a = weights_[e];
    entries.emplace_back(h, h, a);
    entries.emplace_back(t, t, a);
    entries.emplace_back(h, t, -a);
    entries.emplace_back(t, h, -a);
  }
  Eigen::SparseMatrix<double> a(n_vertices_, n_vertices_);
  a.setFromTriplets(entries.begin(), entries.end());
  return a;
}

std::vector<WeightedEdge> Graph::edge_list() const
{
  std::vector<WeightedEdge> out;
  out.reserve(edges_.size());
  for (EdgeId e = 0; e < num_edges(); ++e)
    out.push_back({edges_[e].head, edges_[e].tail, weights_[e]});
  return out;
}

Graph Graph::with_flipped_edges(std::span<const EdgeId> flipped) const
{
  auto list = edge_list();
  for (EdgeId e : flipped)
    std::swap(list.at(e).i, list.at(e).j);
  return Graph(n_vertices_, list, Orientation::as_given);
}

Tree spanning_tree(const Graph &g, std::span<const VertexId> subset, VertexId root)
{
  const SubsetIndex index(subset);
  if (index(root) < 0)
    throw GraphError("spanning_tree: root " + std::to_string(root) + " not in subset");

  const auto n = subset.size();
  Tree tree;
  tree.root = root;
  tree.order.reserve(n);
  std::vector<char> visited(n, 0);
  std::vector<int> parent_slot(n, -1);  // tree-edge slot of each visited vertex
  visited[index(root)] = 1;
  tree.order.push_back(root);
  for (std::size_t head = 0; head < tree.order.size(); ++head)
  {
    const VertexId v = tree.order[head];
    for (const auto &nb : g.neighbors(v))
    {
      const int k = index(nb.vertex);
      if (k < 0 || visited[k])
        continue;
      visited[k] = 1;
      parent_slot[k] = static_cast<int>(tree.edge.size());
      tree.order.push_back(nb.vertex);
      tree.child.push_back(nb.vertex);
      tree.parent.push_back(v);
      tree.edge.push_back(nb.edge);
    }
  }
  if (tree.order.size() != n)
  {
    for (std::size_t k = 0; k < n; ++k)
      if (!visited[k])
        throw GraphError("spanning_tree: subset is disconnected; vertex " +
                         std::to_string(subset[k]) + " unreachable from " +
                         std::to_string(root));
  }

  // Accumulate subtree sizes bottom-up; BFS order lists children after parents.
  tree.subtree_size.assign(tree.edge.size(), 1);
  for (std::size_t k = tree.edge.size(); k-- > 0;)
  {
    const int up = parent_slot[index(tree.parent[k])];
    if (up >= 0)
      tree.subtree_size[up] += tree.subtree_size[k];
  }
  return tree;
}

std::vector<int> connected_components(const Graph &g, std::span<const VertexId> subset)
{
  const SubsetIndex index(subset);
  std::vector<int> label(subset.size(), -1);
  int next = 0;
  std::vector<int> stack;
  for (std::size_t s = 0; s < subset.size(); ++s)
  {
    if (label[s] >= 0)
      continue;
    label[s] = next;
    stack.assign(1, static_cast<int>(s));
    while (!stack.empty())
    {
      const int k = stack.back();
      stack.pop_back();
      for (const auto &nb : g.neighbors(subset[k]))
      {
        const int m = index(nb.vertex);
        if (m >= 0 && label[m] < 0)
        {
          label[m] = next;
          stack.push_back(m);
        }
      }
    }
    ++next;
  }
  return label;
}

int count_components(const Graph &g, std::span<const VertexId> subset)
{
  const auto labels = connected_components(g, subset);
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

}  // namespace adagg
