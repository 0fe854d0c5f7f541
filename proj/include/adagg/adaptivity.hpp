// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adagg/aggregation.hpp"
#include "adagg/coarse_spaces.hpp"
#include "adagg/estimator.hpp"
#include "adagg/graph.hpp"
#include "adagg/linalg.hpp"

namespace adagg
{

class ReshapeError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Right-hand sides
// ---------------------------------------------------------------------------

struct SmoothedRandom
{
  int sweeps = 10;
  std::uint64_t seed = 0;
};

struct PointSource
{
  VertexId vertex = 0;
};

struct RhsSpec
{
  enum class Kind
  {
    smoothed_random,
    point_source
  };
  Kind kind = Kind::smoothed_random;
  SmoothedRandom smooth;
  PointSource point;

  static RhsSpec smoothed(int sweeps, std::uint64_t seed);
  static RhsSpec point_at(VertexId v);
};

/// Right-hand side together with the exact solution, when known.
struct Problem
{
  VertexVector f;
  std::optional<VertexVector> exact;

  bool has_exact() const { return exact.has_value(); }
  /// ||u||_A, or 0 without an exact solution.
  double exact_energy = 0.0;
};

/// Seeded uniform(-1, 1) start, forward Gauss-Seidel sweeps on A x = 0, then
/// mean projection.
VertexVector smoothed_random_rhs(const Graph &g, int sweeps, std::uint64_t seed);

/// u = 1_p - 1/n and f = A u.
Problem point_source_problem(const Graph &g, VertexId vertex);

/// Builds f from the spec. With solve_exact, smoothed right-hand sides also
/// get u from the fine-level solver.
Problem make_problem(const Graph &g, const RhsSpec &spec, bool solve_exact,
                     const SolverOptions &opts = {});

/// f only, as in make_problem.
VertexVector make_rhs(const Graph &g, const RhsSpec &spec);

// ---------------------------------------------------------------------------
// Reshaping
// ---------------------------------------------------------------------------

struct ReshapeConfig
{
  /// Stop once n_c exceeds this.
  std::optional<int> stop_max_aggregates;
  /// Stop once eta drops to this value.
  std::optional<double> stop_eta_target;
  /// Stop once ||u - u_H||_A drops to this value (needs the exact solution).
  std::optional<double> stop_error_target;
  std::optional<int> stop_max_iterations = 50;

  BasisConstruction construction = BasisConstruction::saddle_point;
  BilinearForm form = BilinearForm::euclidean;
  InterleaveOptions interleave;

  /// Throws ReshapeError when no stopping criterion is enabled or a value is
  /// out of range.
  void validate() const;
};

enum class StopReason
{
  none,
  max_iterations,
  max_aggregates,
  eta_target,
  error_target,
  irreducible
};

std::string_view to_string(StopReason r);

struct IterationRecord
{
  int iteration = 0;
  int n_c = 0;
  double eta = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double beta = 1.0;
  /// sum of the localized indicators, b1^2 + b2^2
  double local_total = 0.0;
  int rounds = 0;
  /// Aggregates of this record's aggregation marked for splitting.
  std::vector<int> marked;
  /// Marked aggregates that were actually split (not hierarchy leaves).
  std::vector<int> split;
  std::optional<double> error;      // ||u - u_H||_A
  std::optional<double> rel_error;  // ||u - u_H||_A / ||u||_A
  std::optional<double> eff;        // eta / ||u - u_H||_A

  /// sqrt(2 * local_total), the alternative bound on eta.
  double localized_bound() const;
};

/// Everything computed for one aggregation.
struct Evaluation
{
  VertexVector u_H;
  EdgeCoarseBasis basis;
  EstimatorState state;
  LocalizedEstimate local;
  IterationRecord record;
};

Evaluation evaluate_aggregation(const Graph &g, const Problem &problem, const Aggregation &agg,
                                const PoincareConstant &cp, const ReshapeConfig &cfg);

/// Ids with indicator strictly above the mean; if none, the argmax (smallest
/// id among ties).
std::vector<int> mark_aggregates(const LocalizedEstimate &local);

struct StepResult
{
  Aggregation aggregation;
  IterationRecord record;
  /// Every marked aggregate was a hierarchy leaf; nothing changed.
  bool irreducible = false;
};

StepResult reshape_step(const Graph &g, const Problem &problem, const Aggregation &agg,
                        const MatchHierarchy &h, const PoincareConstant &cp,
                        const ReshapeConfig &cfg);

struct ReshapeTrace
{
  std::vector<IterationRecord> records;
  Aggregation final_aggregation;
  StopReason reason = StopReason::none;
};

/// Reshapes starting from hierarchy level start_level until a stopping
/// criterion fires. The stopping criteria are checked on each evaluated
/// aggregation before it is split, so the last record describes
/// final_aggregation.
ReshapeTrace run_reshape(const Graph &g, const Problem &problem, int start_level,
                         const MatchHierarchy &h, const PoincareConstant &cp,
                         const ReshapeConfig &cfg);

struct GuidedResult
{
  int k0 = 0;
  int k1 = 0;
  IterationRecord direct;  // matching alone, level k0
  ReshapeTrace reshaped;   // from level k1
  /// Reshaping reached ||u - u_H||_A <= ||u - u_direct||_A.
  bool reached = false;

  int direct_n_c() const { return direct.n_c; }
  int reshaped_n_c() const { return reshaped.records.back().n_c; }
};

/// Errors within kErrorMatchSlack * (e + ||u||_A) of the matching error e
/// count as reached.
inline constexpr double kErrorMatchSlack = 1e-12;

/// Compares direct matching at level k0 against reshaping from level k1.
/// Needs an exact solution in problem. cfg's error target is replaced by the
/// level-k0 error; its other stopping criteria still apply.
GuidedResult guided_experiment(const Graph &g, const Problem &problem, int k0, int k1,
                               const MatchHierarchy &h, const PoincareConstant &cp,
                               ReshapeConfig cfg);

/// Columns: iteration,n_c,eta,b1,b2,rel_err,eff. Missing values are empty.
void write_trace_csv(std::ostream &out, const ReshapeTrace &trace);

/// Fixed-format number for CSV and JSON output.
std::string format_number(double x);

}  // namespace adagg
