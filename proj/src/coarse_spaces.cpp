// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/coarse_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include <Eigen/SparseCholesky>

namespace adagg
{

VertexCoarseSpace::VertexCoarseSpace(const Aggregation &agg) : labels_(agg.labels())
{
  sizes_.resize(agg.num_aggregates());
  for (int k = 0; k < agg.num_aggregates(); ++k)
    sizes_[k] = agg.size(k);
}

VertexVector VertexCoarseSpace::prolong(const Eigen::VectorXd &coarse) const
{
  VertexVector out(num_vertices());
  for (int v = 0; v < num_vertices(); ++v)
    out[v] = coarse[labels_[v]];
  return out;
}

Eigen::VectorXd VertexCoarseSpace::restrict_sum(const VertexVector &v) const
{
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_aggregates());
  for (int k = 0; k < num_vertices(); ++k)
    out[labels_[k]] += v[k];
  return out;
}

VertexVector VertexCoarseSpace::project(const VertexVector &v) const
{
  Eigen::VectorXd sums = restrict_sum(v);
  for (int k = 0; k < num_aggregates(); ++k)
    sums[k] /= sizes_[k];
  return prolong(sums);
}

Eigen::SparseMatrix<double> VertexCoarseSpace::prolongation() const
{
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(labels_.size());
  for (int v = 0; v < num_vertices(); ++v)
    entries.emplace_back(v, labels_[v], 1.0);
  Eigen::SparseMatrix<double> p(num_vertices(), num_aggregates());
  p.setFromTriplets(entries.begin(), entries.end());
  return p;
}

VertexVector solve_coarse(const Graph &g, const VertexVector &f, const Aggregation &agg)
{
  if (f.size() != g.num_vertices())
    throw GraphError("solve_coarse: right-hand side has wrong size");
  if (std::abs(f.sum()) > 1e-10 * std::max(f.lpNorm<1>(), 1e-300))
    throw SolverError("solve_coarse: right-hand side is incompatible, (f, 1) = " +
                          std::to_string(f.sum()),
                      std::abs(f.sum()));
  const VertexCoarseSpace space(agg);
  const int n_c = agg.num_aggregates();
  if (n_c == 1)
    return VertexVector::Zero(g.num_vertices());

  // P^T A P is the Laplacian of the quotient graph; pin the last aggregate.
  const int m = n_c - 1;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * agg.num_interfaces());
  for (const auto &face : agg.interfaces())
  {
    double w = 0.0;
    for (EdgeId e : face.edges)
      w += g.weight(e);
    const int a = face.first, b = face.second;
    if (a < m)
      entries.emplace_back(a, a, w);
    if (b < m)
      entries.emplace_back(b, b, w);
    if (a < m && b < m)
    {
      entries.emplace_back(a, b, -w);
      entries.emplace_back(b, a, -w);
    }
  }
  Eigen::SparseMatrix<double> coarse(m, m);
  coarse.setFromTriplets(entries.begin(), entries.end());
  const Eigen::VectorXd rhs = space.restrict_sum(f);

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(coarse);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("solve_coarse: coarse Laplacian factorization failed "
                      "(disconnected quotient graph?)",
                      0.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_c);
  x.head(m) = ldlt.solve(rhs.head(m));
  if (ldlt.info() != Eigen::Success || !x.allFinite())
    throw SolverError("solve_coarse: coarse solve failed", 0.0);

  double weighted = 0.0;
  for (int k = 0; k < n_c; ++k)
    weighted += space.aggregate_sizes()[k] * x[k];
  x.array() -= weighted / g.num_vertices();
  return space.prolong(x);
}

InterfaceSignature interface_signature(const Graph &g, const Aggregation &agg, int interface_id)
{
  if (interface_id < 0 || interface_id >= agg.num_interfaces())
    throw AggregationError("interface_signature: unknown interface " +
                           std::to_string(interface_id));
  const Interface &face = agg.interfaces()[interface_id];
  InterfaceSignature sig;
  sig.interface_id = interface_id;
  sig.sign = 1;
  sig.support = face.edges;
  sig.values.reserve(face.edges.size());
  for (EdgeId e : face.edges)
    sig.values.push_back(agg.label(g.edge(e).head) == face.first ? 1.0 : -1.0);
  sig.norm_sq = static_cast<double>(face.edges.size());
  return sig;
}

double average_on_interface(const EdgeVector &psi, const InterfaceSignature &sig)
{
  double dot = 0.0;
  for (std::size_t k = 0; k < sig.support.size(); ++k)
    dot += psi[sig.support[k]] * sig.values[k];
  return dot / sig.norm_sq;
}

EdgeVector SparseEdgeVector::dense(int n_edges) const
{
  EdgeVector out = EdgeVector::Zero(n_edges);
  for (std::size_t k = 0; k < edges.size(); ++k)
    out[edges[k]] += values[k];
  return out;
}

std::string_view to_string(BasisConstruction c)
{
  return c == BasisConstruction::saddle_point ? "saddle" : "tree";
}

Eigen::SparseMatrix<double> EdgeCoarseBasis::matrix() const
{
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < size(); ++i)
    for (std::size_t k = 0; k < basis[i].edges.size(); ++k)
      entries.emplace_back(basis[i].edges[k], i, basis[i].values[k]);
  Eigen::SparseMatrix<double> pi(num_edges, size());
  pi.setFromTriplets(entries.begin(), entries.end());
  return pi;
}

namespace
{

SparseEdgeVector from_map(const std::map<EdgeId, double> &entries)
{
  SparseEdgeVector out;
  out.edges.reserve(entries.size());
  out.values.reserve(entries.size());
  for (const auto &[e, value] : entries)
  {
    out.edges.push_back(e);
    out.values.push_back(value);
  }
  return out;
}

std::vector<InterfaceSignature> all_signatures(const Graph &g, const Aggregation &agg)
{
  std::vector<InterfaceSignature> out;
  out.reserve(agg.num_interfaces());
  for (int i = 0; i < agg.num_interfaces(); ++i)
    out.push_back(interface_signature(g, agg, i));
  return out;
}

// Divergence-correcting interior flux for every interface touching one
// aggregate, from a single factorization of its local KKT system.
void add_saddle_side(const Graph &g, const Aggregation &agg, int k, BilinearForm form,
                     const std::vector<InterfaceSignature> &sigs,
                     std::vector<std::map<EdgeId, double>> &columns)
{
  const auto &verts = agg.vertices(k);
  const auto &interior = agg.interior_edges(k);
  if (verts.size() < 2)
    return;
  const int n_v = static_cast<int>(verts.size());
  const int n_e = static_cast<int>(interior.size());
  std::unordered_map<VertexId, int> local;
  for (int i = 0; i < n_v; ++i)
    local.emplace(verts[i], i);

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_e, n_e);
  for (int j = 0; j < n_e; ++j)
    b(j, j) = form == BilinearForm::euclidean ? 1.0 : 1.0 / g.weight(interior[j]);
  // Divergence rows for all but the last vertex: both sides of the constraint
  // sum to zero over the aggregate, so the last row is implied.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_v - 1, n_e);
  for (int j = 0; j < n_e; ++j)
  {
    const int h = local.at(g.edge(interior[j]).head);
    const int t = local.at(g.edge(interior[j]).tail);
    if (h < n_v - 1)
      c(h, j) += 1.0;
    if (t < n_v - 1)
      c(t, j) -= 1.0;
  }
  const LocalKktSolver solver(b, c, "aggregate " + std::to_string(k));

  const Eigen::VectorXd zero_primal = Eigen::VectorXd::Zero(n_e);
  for (int id : agg.interfaces_of(k))
  {
    const auto &sig = sigs[id];
    Eigen::VectorXd div_sigma = Eigen::VectorXd::Zero(n_v);
    for (std::size_t s = 0; s < sig.support.size(); ++s)
    {
      const Edge &edge = g.edge(sig.support[s]);
      if (agg.label(edge.head) == k)
        div_sigma[local.at(edge.head)] += sig.values[s];
      else
        div_sigma[local.at(edge.tail)] -= sig.values[s];
    }
    // G* psi = -G* sigma + mean(G* sigma) on the aggregate.
    const Eigen::VectorXd target = (-div_sigma).array() + div_sigma.mean();
    // sigma vanishes on interior edges, so -B sigma contributes nothing.
    const KktSolution sol = solver.solve(zero_primal, target.head(n_v - 1));
    for (int j = 0; j < n_e; ++j)
      if (sol.primal[j] != 0.0)
        columns[id][interior[j]] += sol.primal[j];
  }
}

}  // namespace

EdgeCoarseBasis build_basis_saddle(const Graph &g, const Aggregation &agg, BilinearForm form)
{
  EdgeCoarseBasis out;
  out.construction = BasisConstruction::saddle_point;
  out.num_edges = g.num_edges();
  out.signatures = all_signatures(g, agg);
  std::vector<std::map<EdgeId, double>> columns(agg.num_interfaces());
  for (int i = 0; i < agg.num_interfaces(); ++i)
    for (std::size_t s = 0; s < out.signatures[i].support.size(); ++s)
      columns[i][out.signatures[i].support[s]] = out.signatures[i].values[s];
  for (int k = 0; k < agg.num_aggregates(); ++k)
    add_saddle_side(g, agg, k, form, out.signatures, columns);
  out.basis.reserve(columns.size());
  for (const auto &col : columns)
    out.basis.push_back(from_map(col));
  return out;
}

namespace
{

// Tree flux on one aggregate: the entry on each tree edge is m/|V_A| with
// sign + when the child endpoint is the head, so that its divergence is
// 1/|V_A| everywhere on the aggregate except -(|V_A|-1)/|V_A| at the root.
class TreeFluxCache
{
public:
  TreeFluxCache(const Graph &g, const Aggregation &agg) : g_(g), agg_(agg) {}

  const std::vector<std::pair<EdgeId, double>> &flux(VertexId root)
  {
    auto it = cache_.find(root);
    if (it != cache_.end())
      return it->second;
    const int k = agg_.label(root);
    const auto size = static_cast<double>(agg_.size(k));
    std::vector<std::pair<EdgeId, double>> entries;
    if (agg_.size(k) > 1)
    {
      const Tree tree = spanning_tree(g_, agg_.vertices(k), root);
      entries.reserve(tree.edge.size());
      for (int t = 0; t < tree.num_edges(); ++t)
      {
        const double sign = g_.edge(tree.edge[t]).head == tree.child[t] ? 1.0 : -1.0;
        entries.emplace_back(tree.edge[t], sign * tree.subtree_size[t] / size);
      }
    }
    return cache_.emplace(root, std::move(entries)).first->second;
  }

private:
  const Graph &g_;
  const Aggregation &agg_;
  std::unordered_map<VertexId, std::vector<std::pair<EdgeId, double>>> cache_;
};

}  // namespace

EdgeCoarseBasis build_basis_tree(const Graph &g, const Aggregation &agg)
{
  EdgeCoarseBasis out;
  out.construction = BasisConstruction::spanning_tree;
  out.num_edges = g.num_edges();
  out.signatures = all_signatures(g, agg);
  out.edge_vectors.resize(agg.num_interfaces());
  out.basis.reserve(agg.num_interfaces());
  TreeFluxCache trees(g, agg);
  for (int i = 0; i < agg.num_interfaces(); ++i)
  {
    const Interface &face = agg.interfaces()[i];
    const auto &sig = out.signatures[i];
    std::map<EdgeId, double> column;
    for (std::size_t s = 0; s < sig.support.size(); ++s)
    {
      const EdgeId e = sig.support[s];
      const Edge &edge = g.edge(e);
      const bool head_first = agg.label(edge.head) == face.first;
      const VertexId root_a = head_first ? edge.head : edge.tail;
      const VertexId root_b = head_first ? edge.tail : edge.head;

      // Oriented from face.first to face.second:
      // G* phi = 1_A / |V_A| - 1_B / |V_B|.
      std::map<EdgeId, double> phi;
      phi[e] = sig.values[s];
      for (const auto &[te, value] : trees.flux(root_a))
        phi[te] += value;
      for (const auto &[te, value] : trees.flux(root_b))
        phi[te] -= value;
      for (const auto &[te, value] : phi)
        column[te] += value;
      out.edge_vectors[i].push_back(from_map(phi));
    }
    out.basis.push_back(from_map(column));
  }
  return out;
}

EdgeCoarseBasis build_basis(const Graph &g, const Aggregation &agg, BasisConstruction c,
                            BilinearForm form)
{
  return c == BasisConstruction::saddle_point ? build_basis_saddle(g, agg, form)
                                              : build_basis_tree(g, agg);
}

Interpolant project_pi_H(const EdgeCoarseBasis &basis, const EdgeVector &psi,
                         TreeInterpolation mode)
{
  if (psi.size() != basis.num_edges)
    throw GraphError("project_pi_H: edge vector has wrong size");
  Interpolant out;
  out.coefficients.resize(basis.size());
  out.value = EdgeVector::Zero(basis.num_edges);
  const bool per_edge = basis.construction == BasisConstruction::spanning_tree &&
                        mode == TreeInterpolation::edge_values;
  for (int i = 0; i < basis.size(); ++i)
  {
    const auto &sig = basis.signatures[i];
    out.coefficients[i] = average_on_interface(psi, sig);
    if (per_edge)
    {
      // pi_H 1_e = phi^e in the stored orientation of e, which differs from
      // the lower-to-higher vector by the signature sign.
      for (std::size_t s = 0; s < sig.support.size(); ++s)
      {
        const double scale = psi[sig.support[s]] * sig.values[s];
        const auto &phi = basis.edge_vectors[i][s];
        for (std::size_t k = 0; k < phi.edges.size(); ++k)
          out.value[phi.edges[k]] += scale * phi.values[k];
      }
    }
    else
    {
      const auto &phi = basis.basis[i];
      for (std::size_t k = 0; k < phi.edges.size(); ++k)
        out.value[phi.edges[k]] += out.coefficients[i] * phi.values[k];
    }
  }
  return out;
}

}  // namespace adagg
