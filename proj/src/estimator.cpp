// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace adagg
{

std::string_view to_string(PoincareConvention c)
{
  return c == PoincareConvention::lambda2 ? "paper" : "sharp";
}

PoincareConstant PoincareConstant::from_lambda2(double lambda2, PoincareConvention convention)
{
  if (!(lambda2 > 0.0))
    throw EstimatorError("Poincare constant needs lambda2 > 0, got " + std::to_string(lambda2));
  PoincareConstant cp;
  cp.lambda2 = lambda2;
  cp.convention = convention;
  cp.value = convention == PoincareConvention::lambda2 ? lambda2 : std::sqrt(lambda2);
  return cp;
}

bool PoincareConstant::guaranteed() const
{
  return value <= std::sqrt(lambda2) + 1e-8;
}

PragerSyngeSides prager_synge_gap(const Graph &g, const VertexVector &u, const VertexVector &v,
                                  const EdgeVector &tau)
{
  const VertexVector f = g.laplacian(u);
  const double residual = (g.divergence(tau) - f).norm();
  if (residual > 1e-9 * f.norm() + 1e-12 * tau.norm())
    throw EstimatorError("prager_synge_gap: tau is not equilibrated, ||G* tau - f|| = " +
                         std::to_string(residual));
  PragerSyngeSides out;
  const EdgeVector flux_u = g.apply_weights(g.gradient(u));
  const EdgeVector flux_v = g.apply_weights(g.gradient(v));
  const double err = g.energy_norm(u - v);
  const double gap_u = g.inverse_weighted_norm(flux_u - tau);
  const double gap_v = g.inverse_weighted_norm(flux_v - tau);
  out.lhs = err * err + gap_u * gap_u;
  out.rhs = gap_v * gap_v;
  return out;
}

EdgeVector equilibrated_lift(const Graph &g, const EdgeVector &phi, const VertexVector &f,
                             const SolverOptions &opts)
{
  const VertexVector defect = f - g.divergence(phi);
  const VertexVector z = solve_singular_laplacian(g, defect, opts, MeanHandling::reject);
  return g.apply_weights(g.gradient(z)) + phi;
}

EtaParts eta(const Graph &g, const VertexVector &v, const EdgeVector &phi, const VertexVector &f,
             const PoincareConstant &cp)
{
  EtaParts out;
  out.b1 = g.inverse_weighted_norm(g.apply_weights(g.gradient(v)) - phi);
  out.b2 = (g.divergence(phi) - f).norm() / cp.value;
  out.eta = out.b1 + out.b2;
  return out;
}

double majorant_E(double beta, double b1, double b2)
{
  if (!(beta > 0.0))
    throw EstimatorError("majorant_E: beta must be positive, got " + std::to_string(beta));
  return (1.0 + beta) * b1 * b1 + (1.0 + 1.0 / beta) * b2 * b2;
}

double majorant_E(double beta, const Graph &g, const VertexVector &v, const EdgeVector &phi,
                  const VertexVector &f, const PoincareConstant &cp)
{
  const EtaParts parts = eta(g, v, phi, f, cp);
  return majorant_E(beta, parts.b1, parts.b2);
}

BetaUpdate minimize_beta(double b1, double b2, double current_beta)
{
  if (b1 > 0.0 && b2 > 0.0)
    return {b2 / b1, false};
  return {current_beta, true};
}

RestrictedMajorant::RestrictedMajorant(const Graph &g, const VertexVector &v,
                                       const VertexVector &f, const EdgeCoarseBasis &basis,
                                       const PoincareConstant &cp)
    : pi_(basis.matrix()), cp_(cp.value)
{
  Eigen::SparseMatrix<double> scaled = pi_;
  for (int col = 0; col < scaled.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(scaled, col); it; ++it)
      it.valueRef() /= g.weight(static_cast<EdgeId>(it.row()));
  mass_ = pi_.transpose() * scaled;
  const Eigen::SparseMatrix<double> div_pi = Eigen::SparseMatrix<double>(g.incidence().transpose()) * pi_;
  div_ = div_pi.transpose() * div_pi;
  flux_rhs_ = pi_.transpose() * g.gradient(v);
  source_rhs_ = div_pi.transpose() * f;
}

Eigen::VectorXd RestrictedMajorant::minimize(double beta)
{
  if (!(beta > 0.0))
    throw EstimatorError("minimize_phi: beta must be positive");
  const double w1 = a1(beta), w2 = a2(beta);
  const Eigen::SparseMatrix<double> system = w1 * mass_ + w2 * div_;
  if (!analyzed_)
  {
    ldlt_.analyzePattern(system);
    analyzed_ = true;
  }
  ldlt_.factorize(system);
  if (ldlt_.info() != Eigen::Success)
    throw EstimatorError("minimize_phi: restricted system is not positive definite (size " +
                         std::to_string(size()) + ")");
  Eigen::VectorXd c = ldlt_.solve(w1 * flux_rhs_ + w2 * source_rhs_);
  if (!c.allFinite())
  {
    const Eigen::VectorXd d = ldlt_.vectorD();
    throw EstimatorError("minimize_phi: restricted solve produced non-finite values; pivot range [" +
                         std::to_string(d.minCoeff()) + ", " + std::to_string(d.maxCoeff()) + "]");
  }
  return c;
}

EdgeVector RestrictedMajorant::flux(const Eigen::VectorXd &coefficients) const
{
  return pi_ * coefficients;
}

std::pair<double, double> RestrictedMajorant::stationarity(double beta,
                                                           const Eigen::VectorXd &coefficients) const
{
  const double w1 = a1(beta), w2 = a2(beta);
  const Eigen::VectorXd rhs = w1 * flux_rhs_ + w2 * source_rhs_;
  const Eigen::VectorXd lhs = w1 * (mass_ * coefficients) + w2 * (div_ * coefficients);
  return {(lhs - rhs).norm(), rhs.norm()};
}

PhiMinimizer minimize_phi(double beta, const Graph &g, const VertexVector &v,
                          const VertexVector &f, const EdgeCoarseBasis &basis,
                          const PoincareConstant &cp)
{
  PhiMinimizer out;
  if (basis.size() == 0)
  {
    out.phi = EdgeVector::Zero(g.num_edges());
    out.coefficients.resize(0);
    out.degenerate = true;
    return out;
  }
  RestrictedMajorant problem(g, v, f, basis, cp);
  out.coefficients = problem.minimize(beta);
  out.phi = problem.flux(out.coefficients);
  return out;
}

namespace
{

// Relative size of rounding noise in E, measured against the majorant at phi = 0.
constexpr double kMajorantRoundoff = 1e-13;

void check_descent(double before, double after, double floor, const char *step)
{
  if (after > before * (1.0 + 1e-9) + floor)
    throw EstimatorError(std::string("interleave_minimize: ") + step + " increased E from " +
                         std::to_string(before) + " to " + std::to_string(after));
}

}  // namespace

EstimatorState interleave_minimize(const Graph &g, const VertexVector &v, const VertexVector &f,
                                   const EdgeCoarseBasis &basis, const PoincareConstant &cp,
                                   const InterleaveOptions &opts)
{
  EstimatorState state;
  state.beta = opts.initial_beta;

  if (basis.size() == 0)
  {
    state.phi = EdgeVector::Zero(g.num_edges());
    state.coefficients.resize(0);
    const EtaParts parts = eta(g, v, state.phi, f, cp);
    state.b1 = parts.b1;
    state.b2 = parts.b2;
    state.eta = parts.eta;
    state.beta = minimize_beta(parts.b1, parts.b2, state.beta).beta;
    state.majorant = majorant_E(state.beta, parts.b1, parts.b2);
    state.history.push_back(state.majorant);
    state.converged = true;
    return state;
  }

  RestrictedMajorant problem(g, v, f, basis, cp);
  const EtaParts at_zero = eta(g, v, EdgeVector::Zero(g.num_edges()), f, cp);
  const double data_scale = at_zero.b1 * at_zero.b1 + at_zero.b2 * at_zero.b2;
  auto noise = [&](double beta) {
    return kMajorantRoundoff * data_scale * (2.0 + beta + 1.0 / beta);
  };
  double previous = std::numeric_limits<double>::infinity();
  for (int round = 1; round <= opts.max_rounds; ++round)
  {
    state.rounds = round;
    state.coefficients = problem.minimize(state.beta);
    state.phi = problem.flux(state.coefficients);
    const EtaParts parts = eta(g, v, state.phi, f, cp);
    const double e_phi = majorant_E(state.beta, parts.b1, parts.b2);
    if (!state.history.empty())
      check_descent(state.history.back(), e_phi, noise(state.beta), "phi-step");
    state.history.push_back(e_phi);
    state.b1 = parts.b1;
    state.b2 = parts.b2;
    state.eta = parts.eta;
    state.majorant = e_phi;

    if (std::abs(previous - e_phi) <= opts.rel_tolerance * e_phi + noise(state.beta))
    {
      state.converged = true;
      break;
    }
    previous = e_phi;

    const BetaUpdate update = minimize_beta(parts.b1, parts.b2, state.beta);
    if (update.degenerate)
    {
      // One residual vanished: E is already (b1 + b2)^2 in the limit and
      // another phi-step at the same beta cannot move.
      state.converged = true;
      break;
    }
    const double e_beta = majorant_E(update.beta, parts.b1, parts.b2);
    check_descent(e_phi, e_beta, noise(state.beta), "beta-step");
    state.history.push_back(e_beta);
    state.beta = update.beta;
  }
  return state;
}

LocalizedEstimate localize(const Graph &g, const VertexVector &v, const EdgeVector &phi,
                           const VertexVector &f, const Aggregation &agg,
                           const PoincareConstant &cp)
{
  LocalizedEstimate out;
  out.per_aggregate.assign(agg.num_aggregates(), 0.0);
  const EdgeVector grad = g.gradient(v);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
  {
    const double w = g.weight(e);
    const double r = w * grad[e] - phi[e];
    const double term = r * r / w;
    const int a = agg.label(g.edge(e).head);
    const int b = agg.label(g.edge(e).tail);
    if (a == b)
      out.per_aggregate[a] += term;
    else
    {
      out.per_aggregate[a] += 0.5 * term;
      out.per_aggregate[b] += 0.5 * term;
    }
  }
  const VertexVector defect = g.divergence(phi) - f;
  const double scale = 1.0 / (cp.value * cp.value);
  for (VertexId k = 0; k < g.num_vertices(); ++k)
    out.per_aggregate[agg.label(k)] += scale * defect[k] * defect[k];
  for (double x : out.per_aggregate)
    out.total += x;
  return out;
}

}  // namespace adagg
