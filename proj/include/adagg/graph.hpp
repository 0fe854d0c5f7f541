// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace adagg
{

using VertexId = int;
using EdgeId = int;

/// Real value per vertex.
using VertexVector = Eigen::VectorXd;
/// Real value per edge, in the graph's stored edge order.
using EdgeVector = Eigen::VectorXd;

class GraphError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct WeightedEdge
{
  VertexId i;
  VertexId j;
  double weight;
};

struct Edge
{
  VertexId head;
  VertexId tail;
};

struct Neighbor
{
  VertexId vertex;
  EdgeId edge;
};

enum class Orientation
{
  canonical,  // head = smaller vertex id
  as_given    // head = i, tail = j of the input triple
};

/// Undirected weighted graph with a fixed orientation on every edge. Owns the
/// discrete gradient G, its adjoint G*, the weight operator D and A = G*DG.
/// Immutable after construction.
class Graph
{
public:
  Graph() = default;

  /// Throws GraphError naming the offending edge on self-loops, duplicate
  /// undirected pairs, nonpositive weights, or out-of-range ids.
  Graph(int n_vertices, std::span<const WeightedEdge> edges,
        Orientation orientation = Orientation::canonical);

  int num_vertices() const { return n_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const Edge &edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge> &edges() const { return edges_; }
  double weight(EdgeId e) const { return weights_[e]; }
  const Eigen::VectorXd &weights() const { return weights_; }

  /// Neighbors of v sorted by neighbor id.
  std::span<const Neighbor> neighbors(VertexId v) const
  {
    return {adjacency_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  int degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  double average_degree() const;

  /// (Gv)_e = v_head - v_tail
  EdgeVector gradient(const VertexVector &v) const;
  /// (G*t)_k = sum_{head(e)=k} t_e - sum_{tail(e)=k} t_e
  VertexVector divergence(const EdgeVector &t) const;
  EdgeVector apply_weights(const EdgeVector &t) const;
  EdgeVector apply_weights_inverse(const EdgeVector &t) const;
  VertexVector laplacian(const VertexVector &v) const;

  /// Energy norm ||v||_A.
  double energy_norm(const VertexVector &v) const;
  /// ||t||_{D^{-1}}
  double inverse_weighted_norm(const EdgeVector &t) const;

  /// G as a |E| x |V| sparse matrix.
  Eigen::SparseMatrix<double> incidence() const;
  /// A assembled as degree-minus-adjacency.
  Eigen::SparseMatrix<double> laplacian_matrix() const;

  /// Returns a copy with the stored orientation of the listed edges reversed.
  Graph with_flipped_edges(std::span<const EdgeId> flipped) const;

  std::vector<WeightedEdge> edge_list() const;

private:
  void check_vertex_size(const VertexVector &v, const char *what) const;
  void check_edge_size(const EdgeVector &t, const char *what) const;

  int n_vertices_ = 0;
  std::vector<Edge> edges_;
  Eigen::VectorXd weights_;
  std::vector<int> offsets_{0};
  std::vector<Neighbor> adjacency_;
};

/// Rooted spanning tree of a vertex subset.
struct Tree
{
  VertexId root = -1;
  /// Vertices in breadth-first order, root first.
  std::vector<VertexId> order;
  /// One entry per non-root vertex of `order` (same position minus one).
  std::vector<VertexId> child;
  std::vector<VertexId> parent;
  std::vector<EdgeId> edge;
  /// Number of vertices in the subtree hanging below `child[k]`.
  std::vector<int> subtree_size;

  int num_edges() const { return static_cast<int>(edge.size()); }
};

/// Breadth-first spanning tree of the subgraph induced by `subset`, visiting
/// neighbors in increasing id. Throws GraphError if the subset is disconnected.
Tree spanning_tree(const Graph &g, std::span<const VertexId> subset, VertexId root);

/// Component label per entry of `subset` (same order), counting from zero in
/// order of first appearance. Only edges with both endpoints in the subset
/// are traversed.
std::vector<int> connected_components(const Graph &g, std::span<const VertexId> subset);

int count_components(const Graph &g, std::span<const VertexId> subset);

}  // namespace adagg
