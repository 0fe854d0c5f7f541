// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

// Generators and dense reference computations shared by the tests. Nothing
// here calls the iterative solvers under test.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "adagg/aggregation.hpp"
#include "adagg/graph.hpp"

namespace testing_support
{

using adagg::Graph;
using adagg::VertexId;
using adagg::WeightedEdge;

class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  int integer(int lo, int hi)  // inclusive
  {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  Eigen::VectorXd vector(int n, double lo = -1.0, double hi = 1.0)
  {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
      v[i] = uniform(lo, hi);
    return v;
  }
  std::mt19937_64 &engine() { return engine_; }

private:
  std::mt19937_64 engine_;
};

/// Random tree on n vertices plus about extra * n chords, labels shuffled,
/// weights uniform in [w_lo, w_hi].
inline Graph random_connected_graph(Rng &rng, int n, double extra = 0.6, double w_lo = 0.1,
                                    double w_hi = 10.0)
{
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  std::set<std::pair<int, int>> used;
  std::vector<WeightedEdge> edges;
  auto add = [&](int a, int b) {
    if (a == b)
      return;
    auto key = std::minmax(perm[a], perm[b]);
    if (!used.insert(key).second)
      return;
    edges.push_back({perm[a], perm[b], rng.uniform(w_lo, w_hi)});
  };
  for (int i = 1; i < n; ++i)
    add(i, rng.integer(0, i - 1));
  const int chords = static_cast<int>(extra * n);
  for (int k = 0; k < chords; ++k)
    add(rng.integer(0, n - 1), rng.integer(0, n - 1));
  return Graph(n, edges);
}

/// Connected aggregates grown breadth-first from n_seeds random seeds.
inline std::vector<int> random_aggregate_labels(Rng &rng, const Graph &g, int n_seeds)
{
  const int n = g.num_vertices();
  std::vector<int> label(n, -1);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  std::deque<VertexId> queue;
  n_seeds = std::clamp(n_seeds, 1, n);
  for (int k = 0; k < n_seeds; ++k)
  {
    label[order[k]] = k;
    queue.push_back(order[k]);
  }
  while (!queue.empty())
  {
    const VertexId v = queue.front();
    queue.pop_front();
    for (const auto &nb : g.neighbors(v))
      if (label[nb.vertex] < 0)
      {
        label[nb.vertex] = label[v];
        queue.push_back(nb.vertex);
      }
  }
  return label;
}

inline adagg::Aggregation random_aggregation(Rng &rng, const Graph &g, int n_seeds)
{
  const auto labels = random_aggregate_labels(rng, g, n_seeds);
  return adagg::compute_interfaces(g, labels);
}

inline Eigen::MatrixXd dense_laplacian(const Graph &g)
{
  const int n = g.num_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int e = 0; e < g.num_edges(); ++e)
  {
    const int i = g.edge(e).head, j = g.edge(e).tail;
    const double w = g.weight(e);
    a(i, i) += w;
    a(j, j) += w;
    a(i, j) -= w;
    a(j, i) -= w;
  }
  return a;
}

/// Mean-zero solution of A u = f by a dense eigen-decomposition.
inline Eigen::VectorXd dense_solve(const Graph &g, const Eigen::VectorXd &f)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g));
  const Eigen::VectorXd coeff = es.eigenvectors().transpose() * f;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(coeff.size());
  const double cutoff = 1e-10 * es.eigenvalues().maxCoeff();
  for (int k = 0; k < coeff.size(); ++k)
    if (es.eigenvalues()[k] > cutoff)
      scaled[k] = coeff[k] / es.eigenvalues()[k];
  Eigen::VectorXd u = es.eigenvectors() * scaled;
  u.array() -= u.mean();
  return u;
}

inline double dense_lambda2(const Graph &g)
{
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_laplacian(g), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[1];
}

inline Eigen::VectorXd mean_zero(Eigen::VectorXd v)
{
  v.array() -= v.mean();
  return v;
}

/// Minimizer of a convex function on [lo, hi] by golden-section search.
template <class F>
double golden_minimize(F &&fn, double lo, double hi, int iterations = 200)
{
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = fn(c), fd = fn(d);
  for (int it = 0; it < iterations; ++it)
  {
    if (fc < fd)
    {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = fn(c);
    }
    else
    {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

/// Vertices within `hops` edges of source.
inline std::vector<char> hop_ball(const Graph &g, VertexId source, int hops)
{
  std::vector<int> dist(g.num_vertices(), -1);
  std::deque<VertexId> queue{source};
  dist[source] = 0;
  while (!queue.empty())
  {
    const VertexId v = queue.front();
    queue.pop_front();
    if (dist[v] == hops)
      continue;
    for (const auto &nb : g.neighbors(v))
      if (dist[nb.vertex] < 0)
      {
        dist[nb.vertex] = dist[v] + 1;
        queue.push_back(nb.vertex);
      }
  }
  std::vector<char> in(g.num_vertices(), 0);
  for (int v = 0; v < g.num_vertices(); ++v)
    in[v] = dist[v] >= 0;
  return in;
}

}  // namespace testing_support
