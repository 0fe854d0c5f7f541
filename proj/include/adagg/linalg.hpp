// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "adagg/graph.hpp"

namespace adagg
{

class SolverError : public std::runtime_error
{
public:
  SolverError(const std::string &what, double residual)
      : std::runtime_error(what), residual_(residual)
  {
  }
  /// Relative residual at the point of failure.
  double residual() const { return residual_; }

private:
  double residual_;
};

struct SolverOptions
{
  double rel_tolerance = 1e-10;
  /// Zero selects 10 * problem size.
  int max_iterations = 0;
  std::uint64_t seed = 0;
};

/// y = op(x)
using LinearOperator = std::function<void(const Eigen::VectorXd &, Eigen::VectorXd &)>;

enum class Deflation
{
  none,
  constants  // iterate on the hyperplane orthogonal to the constant vector
};

/// Conjugate gradients. With Deflation::constants the right-hand side and
/// every iterate are projected onto the mean-zero hyperplane, so `op` need
/// only be SPD there. Throws SolverError on non-convergence.
Eigen::VectorXd solve_spd(const LinearOperator &op, const Eigen::VectorXd &rhs,
                          const SolverOptions &opts, Deflation deflation = Deflation::none);

enum class MeanHandling
{
  reject,  // throw if (f, 1) is not zero to within 1e-10 ||f||_1
  project  // subtract the mean of f first
};

/// Mean-zero x with Ax = f.
VertexVector solve_singular_laplacian(const Graph &g, const VertexVector &f,
                                      const SolverOptions &opts,
                                      MeanHandling mean = MeanHandling::reject);

struct EigenResult
{
  double lambda2 = 0.0;
  VertexVector vector;  // unit norm, mean zero
  double residual = 0.0;  // ||A x - lambda2 x||
};

/// Below this many vertices second_eigenvalue uses a dense eigensolver.
inline constexpr int kDenseEigenThreshold = 300;

/// Smallest positive Laplacian eigenvalue of a connected graph. Throws
/// GraphError for disconnected graphs.
EigenResult second_eigenvalue(const Graph &g, const SolverOptions &opts);

struct KktSolution
{
  Eigen::VectorXd primal;
  Eigen::VectorXd multipliers;
};

class KktError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Solves the bordered system
///
///   [ B  C^T ] [x]   [g]
///   [ C   0  ] [y] = [h]
///
/// for SPD B and full-row-rank C through the Schur complement C B^{-1} C^T.
/// `context` is prepended to KktError messages.
KktSolution solve_local_kkt(const Eigen::MatrixXd &b_matrix, const Eigen::MatrixXd &constraint_rows,
                            const Eigen::VectorXd &rhs_primal,
                            const Eigen::VectorXd &rhs_constraints,
                            const std::string &context = "local KKT");

/// Factor-once variant for many right-hand sides against the same matrices.
class LocalKktSolver
{
public:
  LocalKktSolver(const Eigen::MatrixXd &b_matrix, const Eigen::MatrixXd &constraint_rows,
                 const std::string &context = "local KKT");

  KktSolution solve(const Eigen::VectorXd &rhs_primal,
                    const Eigen::VectorXd &rhs_constraints) const;

private:
  Eigen::MatrixXd constraints_;
  Eigen::LLT<Eigen::MatrixXd> b_factor_;
  Eigen::LLT<Eigen::MatrixXd> schur_factor_;
};

}  // namespace adagg
