// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace adagg
{

RhsSpec RhsSpec::smoothed(int sweeps, std::uint64_t seed)
{
  RhsSpec s;
  s.kind = Kind::smoothed_random;
  s.smooth = {sweeps, seed};
  return s;
}

RhsSpec RhsSpec::point_at(VertexId v)
{
  RhsSpec s;
  s.kind = Kind::point_source;
  s.point = {v};
  return s;
}

VertexVector smoothed_random_rhs(const Graph &g, int sweeps, std::uint64_t seed)
{
  if (sweeps < 0)
    throw ReshapeError("smoothed_random_rhs: negative sweep count");
  const int n = g.num_vertices();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  VertexVector x(n);
  for (int i = 0; i < n; ++i)
    x[i] = uniform(rng);

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
  {
    diag[g.edge(e).head] += g.weight(e);
    diag[g.edge(e).tail] += g.weight(e);
  }
  for (int sweep = 0; sweep < sweeps; ++sweep)
    for (VertexId i = 0; i < n; ++i)
    {
      if (diag[i] == 0.0)
        continue;
      double sum = 0.0;
      for (const Neighbor &nb : g.neighbors(i))
        sum += g.weight(nb.edge) * x[nb.vertex];
      x[i] = sum / diag[i];
    }

  x.array() -= x.mean();
  if (std::abs(x.sum()) > 1e-12 * std::max(1.0, x.lpNorm<1>()))
    throw ReshapeError("smoothed_random_rhs: projection failed to remove the mean");
  return x;
}

Problem point_source_problem(const Graph &g, VertexId vertex)
{
  const int n = g.num_vertices();
  if (vertex < 0 || vertex >= n)
    throw ReshapeError("point source vertex " + std::to_string(vertex) + " out of range [0, " +
                       std::to_string(n) + ")");
  VertexVector u = VertexVector::Constant(n, -1.0 / n);
  u[vertex] += 1.0;
  Problem p;
  p.f = g.laplacian(u);
  p.exact_energy = g.energy_norm(u);
  p.exact = std::move(u);
  return p;
}

Problem make_problem(const Graph &g, const RhsSpec &spec, bool solve_exact,
                     const SolverOptions &opts)
{
  if (spec.kind == RhsSpec::Kind::point_source)
    return point_source_problem(g, spec.point.vertex);
  Problem p;
  p.f = smoothed_random_rhs(g, spec.smooth.sweeps, spec.smooth.seed);
  if (solve_exact)
  {
    VertexVector u = solve_singular_laplacian(g, p.f, opts, MeanHandling::project);
    p.exact_energy = g.energy_norm(u);
    p.exact = std::move(u);
  }
  return p;
}

VertexVector make_rhs(const Graph &g, const RhsSpec &spec)
{
  return make_problem(g, spec, false).f;
}

void ReshapeConfig::validate() const
{
  if (!stop_max_aggregates && !stop_eta_target && !stop_error_target && !stop_max_iterations)
    throw ReshapeError("reshape: no stopping criterion enabled");
  if (stop_max_aggregates && *stop_max_aggregates < 1)
    throw ReshapeError("reshape: stop_max_aggregates must be at least 1");
  if (stop_eta_target && !(*stop_eta_target >= 0.0))
    throw ReshapeError("reshape: stop_eta_target must be non-negative");
  if (stop_error_target && !(*stop_error_target >= 0.0))
    throw ReshapeError("reshape: stop_error_target must be non-negative");
  if (stop_max_iterations && *stop_max_iterations < 0)
    throw ReshapeError("reshape: stop_max_iterations must be non-negative");
}

std::string_view to_string(StopReason r)
{
  switch (r)
  {
    case StopReason::none:
      return "none";
    case StopReason::max_iterations:
      return "max_iterations";
    case StopReason::max_aggregates:
      return "max_aggregates";
    case StopReason::eta_target:
      return "eta_target";
    case StopReason::error_target:
      return "error_target";
    case StopReason::irreducible:
      return "irreducible";
  }
  return "unknown";
}

double IterationRecord::localized_bound() const
{
  return std::sqrt(2.0 * local_total);
}

Evaluation evaluate_aggregation(const Graph &g, const Problem &problem, const Aggregation &agg,
                                const PoincareConstant &cp, const ReshapeConfig &cfg)
{
  Evaluation ev;
  ev.u_H = solve_coarse(g, problem.f, agg);
  ev.basis = build_basis(g, agg, cfg.construction, cfg.form);
  ev.state = interleave_minimize(g, ev.u_H, problem.f, ev.basis, cp, cfg.interleave);
  ev.local = localize(g, ev.u_H, ev.state.phi, problem.f, agg, cp);

  IterationRecord &r = ev.record;
  r.n_c = agg.num_aggregates();
  r.eta = ev.state.eta;
  r.b1 = ev.state.b1;
  r.b2 = ev.state.b2;
  r.beta = ev.state.beta;
  r.rounds = ev.state.rounds;
  r.local_total = ev.local.total;
  if (problem.has_exact())
  {
    const double err = g.energy_norm(*problem.exact - ev.u_H);
    r.error = err;
    if (problem.exact_energy > 0.0)
      r.rel_error = err / problem.exact_energy;
    if (err > 0.0)
      r.eff = r.eta / err;
  }
  return ev;
}

std::vector<int> mark_aggregates(const LocalizedEstimate &local)
{
  const auto &values = local.per_aggregate;
  if (values.empty())
    throw ReshapeError("mark_aggregates: no aggregates");
  double sum = 0.0;
  for (double x : values)
    sum += x;
  const double mean = sum / static_cast<double>(values.size());
  std::vector<int> marked;
  for (int k = 0; k < static_cast<int>(values.size()); ++k)
    if (values[k] > mean)
      marked.push_back(k);
  if (marked.empty())
  {
    int best = 0;
    for (int k = 1; k < static_cast<int>(values.size()); ++k)
      if (values[k] > values[best])
        best = k;
    marked.push_back(best);
  }
  return marked;
}

namespace
{

StepResult split_marked(const Graph &g, const Aggregation &agg, const MatchHierarchy &h,
                        Evaluation &ev)
{
  StepResult step;
  step.record = ev.record;
  step.record.marked = mark_aggregates(ev.local);
  SplitResult split = split_aggregates(g, agg, step.record.marked, h);
  for (int id : step.record.marked)
    if (std::find(split.leaves.begin(), split.leaves.end(), id) == split.leaves.end())
      step.record.split.push_back(id);
  step.irreducible = split.split_count == 0;
  step.aggregation = std::move(split.aggregation);
  return step;
}

}  // namespace

StepResult reshape_step(const Graph &g, const Problem &problem, const Aggregation &agg,
                        const MatchHierarchy &h, const PoincareConstant &cp,
                        const ReshapeConfig &cfg)
{
  Evaluation ev = evaluate_aggregation(g, problem, agg, cp, cfg);
  return split_marked(g, agg, h, ev);
}

ReshapeTrace run_reshape(const Graph &g, const Problem &problem, int start_level,
                         const MatchHierarchy &h, const PoincareConstant &cp,
                         const ReshapeConfig &cfg)
{
  cfg.validate();
  if (start_level < 0 || start_level > h.depth())
    throw ReshapeError("run_reshape: start level " + std::to_string(start_level) +
                       " exceeds hierarchy depth " + std::to_string(h.depth()));
  if (cfg.stop_error_target && !problem.has_exact())
    throw ReshapeError("run_reshape: error target needs the exact solution");

  ReshapeTrace trace;
  Aggregation current = aggregation_from_level(h, start_level);
  for (int iteration = 0;; ++iteration)
  {
    Evaluation ev = evaluate_aggregation(g, problem, current, cp, cfg);
    ev.record.iteration = iteration;
    const IterationRecord &r = ev.record;

    StopReason reason = StopReason::none;
    if (cfg.stop_eta_target && r.eta <= *cfg.stop_eta_target)
      reason = StopReason::eta_target;
    else if (cfg.stop_error_target && *r.error <= *cfg.stop_error_target)
      reason = StopReason::error_target;
    else if (cfg.stop_max_aggregates && r.n_c > *cfg.stop_max_aggregates)
      reason = StopReason::max_aggregates;
    else if (cfg.stop_max_iterations && iteration >= *cfg.stop_max_iterations)
      reason = StopReason::max_iterations;
    if (reason != StopReason::none)
    {
      trace.records.push_back(ev.record);
      trace.reason = reason;
      break;
    }

    StepResult step = split_marked(g, current, h, ev);
    trace.records.push_back(std::move(step.record));
    if (step.irreducible)
    {
      trace.reason = StopReason::irreducible;
      break;
    }
    current = std::move(step.aggregation);
  }
  trace.final_aggregation = std::move(current);
  return trace;
}

GuidedResult guided_experiment(const Graph &g, const Problem &problem, int k0, int k1,
                               const MatchHierarchy &h, const PoincareConstant &cp,
                               ReshapeConfig cfg)
{
  if (!(k0 < k1))
    throw ReshapeError("guided_experiment: need k0 < k1, got k0 = " + std::to_string(k0) +
                       ", k1 = " + std::to_string(k1));
  if (k1 > h.depth())
    throw ReshapeError("guided_experiment: k1 = " + std::to_string(k1) +
                       " exceeds hierarchy depth " + std::to_string(h.depth()));
  if (!problem.has_exact())
    throw ReshapeError("guided_experiment: needs the exact solution");

  GuidedResult out;
  out.k0 = k0;
  out.k1 = k1;
  out.direct = evaluate_aggregation(g, problem, h.level(k0), cp, cfg).record;
  const double target =
      *out.direct.error + kErrorMatchSlack * (*out.direct.error + problem.exact_energy);
  cfg.stop_error_target = target;
  out.reshaped = run_reshape(g, problem, k1, h, cp, cfg);
  out.reached = *out.reshaped.records.back().error <= target;
  return out;
}

std::string format_number(double x)
{
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace
{

std::string optional_number(const std::optional<double> &x)
{
  return x ? format_number(*x) : std::string();
}

}  // namespace

void write_trace_csv(std::ostream &out, const ReshapeTrace &trace)
{
  out << "iteration,n_c,eta,b1,b2,rel_err,eff\n";
  for (const IterationRecord &r : trace.records)
    out << r.iteration << ',' << r.n_c << ',' << format_number(r.eta) << ','
        << format_number(r.b1) << ',' << format_number(r.b2) << ','
        << optional_number(r.rel_error) << ',' << optional_number(r.eff) << '\n';
}

}  // namespace adagg
