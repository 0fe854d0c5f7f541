// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "adagg/adaptivity.hpp"
#include "adagg/coarse_spaces.hpp"
#include "adagg/estimator.hpp"
#include "adagg/graph.hpp"
#include "adagg/matrix_market.hpp"

namespace adagg
{

/// Failure inside run_experiment, tagged with the stage that failed.
class ExperimentError : public std::runtime_error
{
public:
  ExperimentError(std::string stage, const std::string &what)
      : std::runtime_error("stage '" + stage + "' failed: " + what), stage_(std::move(stage))
  {
  }
  const std::string &stage() const { return stage_; }

private:
  std::string stage_;
};

struct RunConfig
{
  /// Matrix Market path, or a generator name such as "grid:64x64".
  std::string input;
  ReadOptions read;
  /// The smoothed seed is taken from `seed` unless set explicitly.
  RhsSpec rhs;
  bool rhs_seed_explicit = false;
  int k0 = 3;
  int k1 = 4;
  std::vector<BasisConstruction> constructions{BasisConstruction::saddle_point};
  BilinearForm form = BilinearForm::euclidean;
  PoincareConvention cp_convention = PoincareConvention::sqrt_lambda2;
  SolverOptions solver;
  InterleaveOptions interleave;
  std::optional<int> max_reshape_iterations;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  bool write_basis = false;

  /// Throws ExperimentError("config", ...) on inconsistent settings.
  void validate() const;
  RhsSpec effective_rhs() const;
};

struct ConstructionResult
{
  BasisConstruction construction = BasisConstruction::saddle_point;
  GuidedResult guided;
  double seconds = 0.0;
};

struct ExperimentResult
{
  int n_vertices = 0;
  int n_edges = 0;
  double average_degree = 0.0;
  double lambda2 = 0.0;
  PoincareConstant cp;
  int hierarchy_depth = 0;
  std::vector<int> level_sizes;
  std::vector<ConstructionResult> runs;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, double>> timings;
};

/// Loads the graph named by input (generator or Matrix Market file).
LoadedGraph load_graph(const std::string &input, const ReadOptions &opts);

/// Runs direct matching at k0 against guided reshaping from k1 for every
/// requested construction and writes results.csv, trace_<c>.csv,
/// aggregation snapshots (.csv and .dot) and summary.json into output_dir.
ExperimentResult run_experiment(const RunConfig &cfg);

/// Columns: level_or_iter,n_c,eta,eff,rel_err,construction.
void write_results_csv(std::ostream &out, const std::vector<ConstructionResult> &runs);

/// Columns: vertex,aggregate.
void write_aggregation_csv(std::ostream &out, const Aggregation &agg);

/// Undirected DOT graph: every node carries its aggregate as color class,
/// interface edges are drawn bold and dashed.
void export_aggregation_dot(std::ostream &out, const Graph &g, const Aggregation &agg);
void export_aggregation_dot(const Graph &g, const Aggregation &agg,
                            const std::filesystem::path &path);

/// Columns: interface,first,second,edge,head,tail,value.
void write_basis_csv(std::ostream &out, const Graph &g, const Aggregation &agg,
                     const EdgeCoarseBasis &basis);

}  // namespace adagg
