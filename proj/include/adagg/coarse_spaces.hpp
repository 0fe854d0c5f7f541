// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "adagg/aggregation.hpp"
#include "adagg/graph.hpp"
#include "adagg/linalg.hpp"

namespace adagg
{

/// Piecewise-constant vertex space V_H of an aggregation.
class VertexCoarseSpace
{
public:
  explicit VertexCoarseSpace(const Aggregation &agg);

  int num_aggregates() const { return static_cast<int>(sizes_.size()); }
  int num_vertices() const { return static_cast<int>(labels_.size()); }
  const std::vector<int> &aggregate_sizes() const { return sizes_; }

  /// P x: broadcast one value per aggregate.
  VertexVector prolong(const Eigen::VectorXd &coarse) const;
  /// P^T v: sum over each aggregate.
  Eigen::VectorXd restrict_sum(const VertexVector &v) const;
  /// Q_H v: average over each aggregate, broadcast back.
  VertexVector project(const VertexVector &v) const;

  Eigen::SparseMatrix<double> prolongation() const;

private:
  std::vector<int> labels_;
  std::vector<int> sizes_;
};

/// Galerkin solution u_H = P x of (A u_H, v_H) = (f, v_H) for all v_H in V_H,
/// normalized so that u_H has zero mean.
VertexVector solve_coarse(const Graph &g, const VertexVector &f, const Aggregation &agg);

/// sigma_I = eps * Q_I G 1_A with eps = +1 for the lower-numbered aggregate A:
/// +1 on interface edges whose head lies in A, -1 otherwise.
struct InterfaceSignature
{
  int interface_id = 0;
  int sign = 1;
  std::vector<EdgeId> support;
  std::vector<double> values;
  double norm_sq = 0.0;
};

InterfaceSignature interface_signature(const Graph &g, const Aggregation &agg, int interface_id);

/// <psi>_I = (psi, sigma_I) / ||sigma_I||^2
double average_on_interface(const EdgeVector &psi, const InterfaceSignature &sig);

struct SparseEdgeVector
{
  std::vector<EdgeId> edges;
  std::vector<double> values;

  EdgeVector dense(int n_edges) const;
};

enum class BasisConstruction
{
  saddle_point,
  spanning_tree
};

std::string_view to_string(BasisConstruction c);

/// Inner product the saddle-point construction minimizes.
enum class BilinearForm
{
  euclidean,       // sum phi_e psi_e
  inverse_weights  // sum phi_e psi_e / a_e
};

/// Basis {phi_I} of the coarse edge space W_H, one vector per interface.
struct EdgeCoarseBasis
{
  BasisConstruction construction = BasisConstruction::saddle_point;
  int num_edges = 0;
  std::vector<SparseEdgeVector> basis;
  std::vector<InterfaceSignature> signatures;
  /// Spanning-tree construction only: per interface, one vector per support
  /// edge (same order), oriented from the lower to the higher aggregate.
  std::vector<std::vector<SparseEdgeVector>> edge_vectors;

  int size() const { return static_cast<int>(basis.size()); }
  /// |E| x |Gamma| matrix whose columns are the phi_I.
  Eigen::SparseMatrix<double> matrix() const;
};

/// Local saddle-point construction: on each side of every interface, the
/// B-smallest interior flux that makes the divergence of phi_I constant on
/// that aggregate. Throws KktError naming the aggregate on failure.
EdgeCoarseBasis build_basis_saddle(const Graph &g, const Aggregation &agg,
                                   BilinearForm form = BilinearForm::euclidean);

/// Spanning-tree construction: per interface edge, subtree-size fluxes on
/// breadth-first trees of both aggregates rooted at the edge endpoints.
EdgeCoarseBasis build_basis_tree(const Graph &g, const Aggregation &agg);

EdgeCoarseBasis build_basis(const Graph &g, const Aggregation &agg, BasisConstruction c,
                            BilinearForm form = BilinearForm::euclidean);

/// How pi_H treats interface values for the spanning-tree construction.
enum class TreeInterpolation
{
  edge_values,       // pi_H 1_e = phi^e, extended linearly
  interface_average  // sum_I <psi>_I phi_I, as for the saddle construction
};

struct Interpolant
{
  /// <psi>_I per interface.
  Eigen::VectorXd coefficients;
  EdgeVector value;
};

/// pi_H psi. Interior edges map to zero; G* pi_H psi = Q_H G* psi.
Interpolant project_pi_H(const EdgeCoarseBasis &basis, const EdgeVector &psi,
                         TreeInterpolation mode = TreeInterpolation::edge_values);

}  // namespace adagg
