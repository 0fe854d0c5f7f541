// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>

#include "adagg/generators.hpp"
#include "json.hpp"

namespace adagg
{

void RunConfig::validate() const
{
  if (input.empty())
    throw ExperimentError("config", "no input given");
  if (k0 < 0)
    throw ExperimentError("config", "k0 must be non-negative");
  if (!(k0 < k1))
    throw ExperimentError("config", "need k0 < k1, got k0 = " + std::to_string(k0) +
                                        ", k1 = " + std::to_string(k1));
  if (constructions.empty())
    throw ExperimentError("config", "no basis construction selected");
  if (output_dir.empty())
    throw ExperimentError("config", "no output directory given");
  if (max_reshape_iterations && *max_reshape_iterations < 0)
    throw ExperimentError("config", "negative reshape iteration limit");
}

RhsSpec RunConfig::effective_rhs() const
{
  RhsSpec spec = rhs;
  if (spec.kind == RhsSpec::Kind::smoothed_random && !rhs_seed_explicit)
    spec.smooth.seed = seed;
  return spec;
}

LoadedGraph load_graph(const std::string &input, const ReadOptions &opts)
{
  LoadedGraph out;
  if (synthetic_graph(input, out.graph))
  {
    out.file_vertices = out.graph.num_vertices();
    out.original_ids.resize(out.graph.num_vertices());
    for (int v = 0; v < out.graph.num_vertices(); ++v)
      out.original_ids[v] = v;
    return out;
  }
  return read_matrix_market(std::filesystem::path(input), opts);
}

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <class F>
auto stage(const std::string &name, F &&body)
{
  try
  {
    return body();
  }
  catch (const ExperimentError &)
  {
    throw;
  }
  catch (const std::exception &e)
  {
    throw ExperimentError(name, e.what());
  }
}

std::ofstream open_output(const std::filesystem::path &path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  return out;
}

nlohmann::json record_json(const IterationRecord &r)
{
  nlohmann::json j;
  j["n_c"] = r.n_c;
  j["eta"] = r.eta;
  j["b1"] = r.b1;
  j["b2"] = r.b2;
  j["beta"] = r.beta;
  j["localized_bound"] = r.localized_bound();
  j["interleave_rounds"] = r.rounds;
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json();
  j["rel_err"] = r.rel_error ? nlohmann::json(*r.rel_error) : nlohmann::json();
  j["eff"] = r.eff ? nlohmann::json(*r.eff) : nlohmann::json();
  return j;
}

std::string optional_number(const std::optional<double> &x)
{
  return x ? format_number(*x) : std::string();
}

void write_row(std::ostream &out, const std::string &tag, const IterationRecord &r,
               BasisConstruction c)
{
  out << tag << ',' << r.n_c << ',' << format_number(r.eta) << ',' << optional_number(r.eff)
      << ',' << optional_number(r.rel_error) << ',' << to_string(c) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const RunConfig &cfg)
{
  cfg.validate();
  ExperimentResult result;
  const auto total_start = Clock::now();

  auto start = Clock::now();
  LoadedGraph loaded = stage("load", [&] { return load_graph(cfg.input, cfg.read); });
  result.timings.emplace_back("load", seconds_since(start));
  const Graph &g = loaded.graph;
  result.warnings = loaded.warnings;
  result.n_vertices = g.num_vertices();
  result.n_edges = g.num_edges();
  result.average_degree = g.average_degree();

  start = Clock::now();
  stage("eigenvalue", [&] {
    SolverOptions opts = cfg.solver;
    opts.seed = cfg.seed;
    result.lambda2 = second_eigenvalue(g, opts).lambda2;
    result.cp = PoincareConstant::from_lambda2(result.lambda2, cfg.cp_convention);
    return 0;
  });
  result.timings.emplace_back("eigenvalue", seconds_since(start));
  if (!result.cp.guaranteed())
    result.warnings.push_back("the Poincare constant convention in use does not guarantee the "
                              "error bound for this graph");

  start = Clock::now();
  const MatchHierarchy h = stage("hierarchy", [&] {
    MatchHierarchy built = build_hierarchy(g, cfg.k1);
    if (built.depth() < cfg.k1)
      throw std::runtime_error("matching stalled at depth " + std::to_string(built.depth()) +
                               " before reaching k1 = " + std::to_string(cfg.k1));
    return built;
  });
  result.timings.emplace_back("hierarchy", seconds_since(start));
  result.hierarchy_depth = h.depth();
  for (int l = 0; l <= h.depth(); ++l)
    result.level_sizes.push_back(h.level(l).num_aggregates());

  start = Clock::now();
  const Problem problem =
      stage("rhs", [&] { return make_problem(g, cfg.effective_rhs(), true, cfg.solver); });
  result.timings.emplace_back("exact_solve", seconds_since(start));

  for (BasisConstruction c : cfg.constructions)
  {
    const std::string name = "reshape_" + std::string(to_string(c));
    start = Clock::now();
    ConstructionResult run;
    run.construction = c;
    run.guided = stage(name, [&] {
      ReshapeConfig rc;
      rc.construction = c;
      rc.form = cfg.form;
      rc.interleave = cfg.interleave;
      rc.stop_max_iterations = cfg.max_reshape_iterations;
      return guided_experiment(g, problem, cfg.k0, cfg.k1, h, result.cp, rc);
    });
    run.seconds = seconds_since(start);
    result.timings.emplace_back(name, run.seconds);
    result.runs.push_back(std::move(run));
  }

  stage("output", [&] {
    std::filesystem::create_directories(cfg.output_dir);
    const auto &dir = cfg.output_dir;
    {
      auto out = open_output(dir / "results.csv");
      write_results_csv(out, result.runs);
    }
    auto snapshot = [&](const std::string &stem, const Aggregation &agg) {
      auto csv = open_output(dir / (stem + ".csv"));
      write_aggregation_csv(csv, agg);
      auto dot = open_output(dir / (stem + ".dot"));
      export_aggregation_dot(dot, g, agg);
    };
    snapshot("aggregation_k0", h.level(cfg.k0));
    snapshot("aggregation_k1", h.level(cfg.k1));
    for (const ConstructionResult &run : result.runs)
    {
      const std::string tag(to_string(run.construction));
      auto trace = open_output(dir / ("trace_" + tag + ".csv"));
      write_trace_csv(trace, run.guided.reshaped);
      snapshot("aggregation_reshaped_" + tag, run.guided.reshaped.final_aggregation);
      if (cfg.write_basis)
      {
        const Aggregation &agg = run.guided.reshaped.final_aggregation;
        const EdgeCoarseBasis basis = build_basis(g, agg, run.construction, cfg.form);
        auto out = open_output(dir / ("basis_" + tag + ".csv"));
        write_basis_csv(out, g, agg, basis);
      }
    }

    result.timings.emplace_back("total", seconds_since(total_start));
    nlohmann::json summary;
    summary["input"] = cfg.input;
    summary["mode"] = std::string(to_string(cfg.read.mode));
    summary["n_vertices"] = result.n_vertices;
    summary["n_edges"] = result.n_edges;
    summary["file_vertices"] = loaded.file_vertices;
    summary["average_degree"] = result.average_degree;
    summary["lambda2"] = result.lambda2;
    summary["cp"] = result.cp.value;
    summary["cp_convention"] = std::string(to_string(result.cp.convention));
    summary["bound_guaranteed"] = result.cp.guaranteed();
    summary["k0"] = cfg.k0;
    summary["k1"] = cfg.k1;
    summary["seed"] = cfg.seed;
    summary["hierarchy_level_sizes"] = result.level_sizes;
    summary["exact_energy"] = problem.exact_energy;
    nlohmann::json runs = nlohmann::json::array();
    for (const ConstructionResult &run : result.runs)
    {
      nlohmann::json j;
      j["construction"] = std::string(to_string(run.construction));
      j["direct"] = record_json(run.guided.direct);
      j["reshaped"] = record_json(run.guided.reshaped.records.back());
      j["reached"] = run.guided.reached;
      j["stop_reason"] = std::string(to_string(run.guided.reshaped.reason));
      j["reshape_iterations"] = static_cast<int>(run.guided.reshaped.records.size()) - 1;
      runs.push_back(std::move(j));
    }
    summary["runs"] = std::move(runs);
    nlohmann::json timings = nlohmann::json::object();
    for (const auto &[key, value] : result.timings)
      timings[key] = value;
    summary["timings_seconds"] = std::move(timings);
    summary["warnings"] = result.warnings;
    auto out = open_output(dir / "summary.json");
    out << summary.dump(2) << '\n';
    return 0;
  });
  return result;
}

void write_results_csv(std::ostream &out, const std::vector<ConstructionResult> &runs)
{
  out << "level_or_iter,n_c,eta,eff,rel_err,construction\n";
  for (const ConstructionResult &run : runs)
  {
    const GuidedResult &gr = run.guided;
    write_row(out, "k0=" + std::to_string(gr.k0), gr.direct, run.construction);
    for (const IterationRecord &r : gr.reshaped.records)
      write_row(out, "k1=" + std::to_string(gr.k1) + "+it" + std::to_string(r.iteration), r,
                run.construction);
  }
}

void write_aggregation_csv(std::ostream &out, const Aggregation &agg)
{
  out << "vertex,aggregate\n";
  for (VertexId v = 0; v < agg.num_vertices(); ++v)
    out << v << ',' << agg.label(v) << '\n';
}

void export_aggregation_dot(std::ostream &out, const Graph &g, const Aggregation &agg)
{
  // set312 has 12 colors; the class attribute keeps the exact aggregate id.
  out << "graph aggregation {\n";
  out << "  node [shape=circle, style=filled, colorscheme=set312];\n";
  for (VertexId v = 0; v < g.num_vertices(); ++v)
  {
    const int k = agg.label(v);
    out << "  " << v << " [class=\"agg" << k << "\", aggregate=" << k
        << ", fillcolor=" << (k % 12) + 1 << "];\n";
  }
  for (EdgeId e = 0; e < g.num_edges(); ++e)
  {
    const Edge &edge = g.edge(e);
    out << "  " << edge.head << " -- " << edge.tail;
    if (agg.label(edge.head) != agg.label(edge.tail))
      out << " [interface=true, style=\"bold,dashed\"]";
    out << ";\n";
  }
  out << "}\n";
}

void export_aggregation_dot(const Graph &g, const Aggregation &agg,
                            const std::filesystem::path &path)
{
  auto out = open_output(path);
  export_aggregation_dot(out, g, agg);
}

void write_basis_csv(std::ostream &out, const Graph &g, const Aggregation &agg,
                     const EdgeCoarseBasis &basis)
{
  out << "interface,first,second,edge,head,tail,value\n";
  for (int k = 0; k < basis.size(); ++k)
  {
    const Interface &face = agg.interfaces()[k];
    const SparseEdgeVector &col = basis.basis[k];
    std::vector<std::size_t> order(col.edges.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return col.edges[a] < col.edges[b]; });
    for (std::size_t i : order)
    {
      const EdgeId e = col.edges[i];
      out << k << ',' << face.first << ',' << face.second << ',' << e << ',' << g.edge(e).head
          << ',' << g.edge(e).tail << ',' << format_number(col.values[i]) << '\n';
    }
  }
}

}  // namespace adagg
