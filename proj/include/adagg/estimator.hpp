// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string_view>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "adagg/aggregation.hpp"
#include "adagg/coarse_spaces.hpp"
#include "adagg/graph.hpp"
#include "adagg/linalg.hpp"

namespace adagg
{

class EstimatorError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class PoincareConvention
{
  lambda2,       // C_P = lambda2
  sqrt_lambda2   // C_P = sqrt(lambda2), the sharp constant in C_P ||v|| <= ||v||_A
};

std::string_view to_string(PoincareConvention c);

/// Constant C_P in C_P ||v|| <= ||v||_A on the mean-zero hyperplane.
struct PoincareConstant
{
  double value = 1.0;
  PoincareConvention convention = PoincareConvention::sqrt_lambda2;
  double lambda2 = 1.0;

  static PoincareConstant from_lambda2(double lambda2, PoincareConvention convention);

  /// The bound ||u - v||_A <= eta is guaranteed only if value <= sqrt(lambda2).
  bool guaranteed() const;
};

struct PragerSyngeSides
{
  double lhs = 0.0;  // ||u - v||_A^2 + ||DGu - tau||_{D^-1}^2
  double rhs = 0.0;  // ||DGv - tau||_{D^-1}^2
};

/// Both sides of the hypercircle identity. Throws EstimatorError when tau is
/// not equilibrated, i.e. ||G* tau - A u|| > 1e-9 ||A u||.
PragerSyngeSides prager_synge_gap(const Graph &g, const VertexVector &u, const VertexVector &v,
                                  const EdgeVector &tau);

/// tau = DGz + phi with Az = f - G* phi, so that G* tau = f.
EdgeVector equilibrated_lift(const Graph &g, const EdgeVector &phi, const VertexVector &f,
                             const SolverOptions &opts);

struct EtaParts
{
  double eta = 0.0;
  double b1 = 0.0;  // ||DGv - phi||_{D^-1}
  double b2 = 0.0;  // ||G* phi - f|| / C_P
};

/// Guaranteed upper bound ||u - v||_A <= b1 + b2 (for a valid C_P).
EtaParts eta(const Graph &g, const VertexVector &v, const EdgeVector &phi, const VertexVector &f,
             const PoincareConstant &cp);

/// E(beta) = (1 + beta) b1^2 + (1 + 1/beta) b2^2 >= (b1 + b2)^2.
double majorant_E(double beta, double b1, double b2);
double majorant_E(double beta, const Graph &g, const VertexVector &v, const EdgeVector &phi,
                  const VertexVector &f, const PoincareConstant &cp);

struct BetaUpdate
{
  double beta = 1.0;
  /// b1 or b2 vanished; beta is left unchanged.
  bool degenerate = false;
};

/// argmin_beta E(beta) = b2 / b1.
BetaUpdate minimize_beta(double b1, double b2, double current_beta = 1.0);

/// Restricted normal equations for phi = Pi c over span{phi_I}:
///   Pi^T (a1 D^-1 + a2 G G*) Pi c = Pi^T G (a1 v + a2 f),
/// a1 = 1 + beta, a2 = (1 + 1/beta) / C_P^2. The beta-independent blocks are
/// assembled once so repeated solves only refactor a sparse SPD matrix.
class RestrictedMajorant
{
public:
  RestrictedMajorant(const Graph &g, const VertexVector &v, const VertexVector &f,
                     const EdgeCoarseBasis &basis, const PoincareConstant &cp);

  int size() const { return static_cast<int>(flux_rhs_.size()); }
  double a1(double beta) const { return 1.0 + beta; }
  double a2(double beta) const { return (1.0 + 1.0 / beta) / (cp_ * cp_); }

  /// Coefficients minimizing E(beta, Pi c).
  Eigen::VectorXd minimize(double beta);
  EdgeVector flux(const Eigen::VectorXd &coefficients) const;
  /// ||Pi^T [(a1 D^-1 + a2 G G*) Pi c - G (a1 v + a2 f)]|| and the norm of
  /// the right-hand side, for stationarity checks.
  std::pair<double, double> stationarity(double beta, const Eigen::VectorXd &coefficients) const;

private:
  Eigen::SparseMatrix<double> pi_;
  Eigen::SparseMatrix<double> mass_;        // Pi^T D^-1 Pi
  Eigen::SparseMatrix<double> div_;         // Pi^T G G* Pi
  Eigen::VectorXd flux_rhs_;                // Pi^T G v
  Eigen::VectorXd source_rhs_;              // Pi^T G f
  double cp_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

struct PhiMinimizer
{
  EdgeVector phi;
  Eigen::VectorXd coefficients;
  /// W_H is trivial (no interfaces); phi = 0.
  bool degenerate = false;
};

PhiMinimizer minimize_phi(double beta, const Graph &g, const VertexVector &v,
                          const VertexVector &f, const EdgeCoarseBasis &basis,
                          const PoincareConstant &cp);

struct InterleaveOptions
{
  double rel_tolerance = 1e-8;
  int max_rounds = 100;
  double initial_beta = 1.0;
};

struct EstimatorState
{
  EdgeVector phi;
  Eigen::VectorXd coefficients;
  double beta = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double eta = 0.0;
  /// E(beta, phi) at the returned pair.
  double majorant = 0.0;
  int rounds = 0;
  bool converged = false;
  /// E after every half-step, in order.
  std::vector<double> history;
};

/// Alternates the phi and beta minimizations from beta = initial_beta until
/// the relative change of E between phi-steps drops below rel_tolerance. The
/// returned phi is optimal for the returned beta. Throws EstimatorError if a
/// half-step increases E beyond rounding.
EstimatorState interleave_minimize(const Graph &g, const VertexVector &v, const VertexVector &f,
                                   const EdgeCoarseBasis &basis, const PoincareConstant &cp,
                                   const InterleaveOptions &opts = {});

struct LocalizedEstimate
{
  std::vector<double> per_aggregate;
  double total = 0.0;
};

/// Splits b1^2 + b2^2 over aggregates: interior edge terms and vertex
/// residuals go to their aggregate, interface edge terms half to each side.
LocalizedEstimate localize(const Graph &g, const VertexVector &v, const EdgeVector &phi,
                           const VertexVector &f, const Aggregation &agg,
                           const PoincareConstant &cp);

}  // namespace adagg
