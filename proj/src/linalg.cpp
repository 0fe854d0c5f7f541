// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace adagg
{

namespace
{

void project_mean_zero(Eigen::VectorXd &v)
{
  if (v.size() > 0)
    v.array() -= v.mean();
}

}  // namespace

Eigen::VectorXd solve_spd(const LinearOperator &op, const Eigen::VectorXd &rhs,
                          const SolverOptions &opts, Deflation deflation)
{
  if (!(opts.rel_tolerance > 0.0))
    throw std::invalid_argument("solve_spd: tolerance must be positive");
  const bool deflate = deflation == Deflation::constants;
  const auto n = rhs.size();
  const int max_it = opts.max_iterations > 0 ? opts.max_iterations
                                             : std::max<int>(10 * static_cast<int>(n), 10);

  Eigen::VectorXd b = rhs;
  if (deflate)
    project_mean_zero(b);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0)
    return x;
  const double target = opts.rel_tolerance * b_norm;

  Eigen::VectorXd r = b, p(n), ap(n);
  int it = 0;
  // The outer loop restarts from the true residual whenever the recursive one
  // has drifted below target without the true one following.
  while (true)
  {
    p = r;
    double rr = r.squaredNorm();
    while (std::sqrt(rr) > target && it < max_it)
    {
      op(p, ap);
      if (deflate)
        project_mean_zero(ap);
      const double p_ap = p.dot(ap);
      if (!(p_ap > 0.0))
        throw SolverError("solve_spd: operator is not positive definite on the search space",
                          std::sqrt(rr) / b_norm);
      const double alpha = rr / p_ap;
      x += alpha * p;
      r -= alpha * ap;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
      ++it;
    }
    op(x, ap);
    r = b - ap;
    if (deflate)
      project_mean_zero(r);
    const double true_res = r.norm();
    if (true_res <= target)
      return x;
    if (it >= max_it)
      throw SolverError("solve_spd: no convergence after " + std::to_string(it) +
                            " iterations (relative residual " +
                            std::to_string(true_res / b_norm) + ")",
                        true_res / b_norm);
  }
}

VertexVector solve_singular_laplacian(const Graph &g, const VertexVector &f,
                                      const SolverOptions &opts, MeanHandling mean)
{
  if (f.size() != g.num_vertices())
    throw GraphError("solve_singular_laplacian: right-hand side has wrong size");
  VertexVector rhs = f;
  const double sum = f.sum();
  if (std::abs(sum) > 1e-10 * std::max(f.lpNorm<1>(), 1e-300))
  {
    if (mean == MeanHandling::reject)
      throw SolverError("solve_singular_laplacian: right-hand side is incompatible, (f, 1) = " +
                            std::to_string(sum),
                        std::abs(sum));
  }
  project_mean_zero(rhs);
  const auto op = [&g](const Eigen::VectorXd &x, Eigen::VectorXd &y) { y = g.laplacian(x); };
  VertexVector x = solve_spd(op, rhs, opts, Deflation::constants);
  project_mean_zero(x);
  return x;
}

namespace
{

EigenResult dense_second_eigenvalue(const Graph &g)
{
  const Eigen::MatrixXd a = Eigen::MatrixXd(g.laplacian_matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  EigenResult out;
  out.lambda2 = std::max(eig.eigenvalues()[1], 0.0);
  out.vector = eig.eigenvectors().col(1);
  project_mean_zero(out.vector);
  out.vector.normalize();
  out.residual = (a * out.vector - out.lambda2 * out.vector).norm();
  return out;
}

// Block inverse iteration on the mean-zero hyperplane with Rayleigh-Ritz
// extraction; the block keeps clustered low eigenvalues from stalling it.
EigenResult iterative_second_eigenvalue(const Graph &g, const SolverOptions &opts)
{
  const int n = g.num_vertices();
  const int block = std::min(4, n - 1);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::MatrixXd x(n, block);
  for (int c = 0; c < block; ++c)
    for (int k = 0; k < n; ++k)
      x(k, c) = uniform(rng);

  SolverOptions inner = opts;
  inner.rel_tolerance = std::min(opts.rel_tolerance, 1e-10);
  const double residual_target = std::sqrt(opts.rel_tolerance);
  const int max_rounds = 500;

  EigenResult out;
  double previous = 0.0;
  for (int round = 0; round < max_rounds; ++round)
  {
    for (int c = 0; c < block; ++c)
    {
      Eigen::VectorXd col = x.col(c);
      project_mean_zero(col);
      x.col(c) = solve_singular_laplacian(g, col, inner, MeanHandling::project);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, block);
    for (int c = 0; c < block; ++c)
    {
      Eigen::VectorXd col = q.col(c);
      project_mean_zero(col);
      q.col(c) = col;
    }
    Eigen::MatrixXd aq(n, block);
    for (int c = 0; c < block; ++c)
      aq.col(c) = g.laplacian(q.col(c));
    const Eigen::MatrixXd gram = q.transpose() * q;
    const Eigen::MatrixXd h = q.transpose() * aq;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(h, gram);
    x = q * ritz.eigenvectors();

    Eigen::VectorXd v = x.col(0);
    project_mean_zero(v);
    v.normalize();
    const double theta = v.dot(g.laplacian(v));
    const double residual = (g.laplacian(v) - theta * v).norm();
    out.lambda2 = theta;
    out.vector = v;
    out.residual = residual;
    if (residual <= residual_target * theta &&
        std::abs(theta - previous) <= opts.rel_tolerance * theta)
      return out;
    previous = theta;
  }
  throw SolverError("second_eigenvalue: block inverse iteration did not converge",
                    out.residual / std::max(out.lambda2, 1e-300));
}

}  // namespace

EigenResult second_eigenvalue(const Graph &g, const SolverOptions &opts)
{
  const int n = g.num_vertices();
  if (n < 2)
    throw GraphError("second_eigenvalue: graph needs at least two vertices");
  std::vector<VertexId> all(n);
  for (int k = 0; k < n; ++k)
    all[k] = k;
  if (count_components(g, all) != 1)
    throw GraphError(
        "second_eigenvalue: graph is disconnected (lambda2 = 0); treat each component separately");
  if (n < kDenseEigenThreshold)
    return dense_second_eigenvalue(g);
  return iterative_second_eigenvalue(g, opts);
}

LocalKktSolver::LocalKktSolver(const Eigen::MatrixXd &b_matrix,
                               const Eigen::MatrixXd &constraint_rows, const std::string &context)
    : constraints_(constraint_rows)
{
  if (b_matrix.rows() != b_matrix.cols())
    throw KktError(context + ": primal block is not square");
  if (constraint_rows.rows() > 0 && constraint_rows.cols() != b_matrix.rows())
    throw KktError(context + ": constraint block has wrong width");
  if (b_matrix.rows() == 0)
  {
    if (constraint_rows.rows() > 0)
      throw KktError(context + ": singular KKT system (constraints without primal unknowns)");
    return;
  }
  b_factor_.compute(b_matrix);
  if (b_factor_.info() != Eigen::Success)
    throw KktError(context + ": primal block is not positive definite");
  if (constraints_.rows() == 0)
    return;
  const Eigen::MatrixXd b_inv_ct = b_factor_.solve(constraints_.transpose());
  const Eigen::MatrixXd schur = constraints_ * b_inv_ct;
  schur_factor_.compute(schur);
  bool singular = schur_factor_.info() != Eigen::Success;
  if (!singular)
  {
    const Eigen::VectorXd diag = Eigen::MatrixXd(schur_factor_.matrixL()).diagonal();
    singular = diag.minCoeff() <= 1e-7 * diag.maxCoeff();
  }
  if (singular)
    throw KktError(context + ": singular KKT system (constraints are rank deficient)");
}

KktSolution LocalKktSolver::solve(const Eigen::VectorXd &rhs_primal,
                                  const Eigen::VectorXd &rhs_constraints) const
{
  KktSolution out;
  if (rhs_primal.size() == 0)
  {
    out.primal.resize(0);
    out.multipliers.resize(0);
    return out;
  }
  if (constraints_.rows() == 0)
  {
    out.primal = b_factor_.solve(rhs_primal);
    out.multipliers.resize(0);
    return out;
  }
  const Eigen::VectorXd b_inv_g = b_factor_.solve(rhs_primal);
  out.multipliers = schur_factor_.solve(constraints_ * b_inv_g - rhs_constraints);
  out.primal = b_factor_.solve(rhs_primal - constraints_.transpose() * out.multipliers);
  return out;
}

KktSolution solve_local_kkt(const Eigen::MatrixXd &b_matrix, const Eigen::MatrixXd &constraint_rows,
                            const Eigen::VectorXd &rhs_primal,
                            const Eigen::VectorXd &rhs_constraints, const std::string &context)
{
  return LocalKktSolver(b_matrix, constraint_rows, context).solve(rhs_primal, rhs_constraints);
}

}  // namespace adagg
