// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: direct matching vs guided reshaping on one graph.

#include <charconv>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "adagg/experiment.hpp"

namespace
{

std::uint64_t parse_u64(const std::string &text, const std::string &what)
{
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw CLI::ValidationError("--rhs", "bad " + what + " '" + text + "'");
  return value;
}

// smooth, smooth:SWEEPS, smooth:SWEEPS:SEED or point:VERTEX
void parse_rhs(const std::string &text, adagg::RunConfig &cfg)
{
  const auto first = text.find(':');
  const std::string kind = text.substr(0, first);
  if (kind == "point")
  {
    if (first == std::string::npos)
      throw CLI::ValidationError("--rhs", "point needs a vertex, e.g. point:17");
    cfg.rhs = adagg::RhsSpec::point_at(
        static_cast<adagg::VertexId>(parse_u64(text.substr(first + 1), "vertex")));
    return;
  }
  if (kind != "smooth")
    throw CLI::ValidationError("--rhs", "expected smooth:SWEEPS:SEED or point:VERTEX");
  cfg.rhs = adagg::RhsSpec::smoothed(10, 0);
  if (first == std::string::npos)
    return;
  const std::string rest = text.substr(first + 1);
  const auto second = rest.find(':');
  cfg.rhs.smooth.sweeps = static_cast<int>(parse_u64(rest.substr(0, second), "sweep count"));
  if (second != std::string::npos)
  {
    cfg.rhs.smooth.seed = parse_u64(rest.substr(second + 1), "seed");
    cfg.rhs_seed_explicit = true;
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Compare matching and estimator-driven reshaping of graph aggregations."};

  adagg::RunConfig cfg;
  std::string mode = "laplacian";
  std::string rhs = "smooth:10";
  std::string basis = "saddle";
  std::string cp = "sharp";
  std::string form = "euclidean";
  std::string out_dir;
  int max_iterations = -1;

  app.add_option("--input", cfg.input,
                 "Matrix Market file, or a generator: path:N, cycle:N, star:N, grid:RxC")
      ->required();
  app.add_option("--mode", mode, "How matrix entries become edge weights")
      ->check(CLI::IsMember({"laplacian", "adjacency"}));
  app.add_flag("--drop-wrong-sign", cfg.read.drop_wrong_sign,
               "Discard off-diagonal entries of the wrong sign instead of failing");
  app.add_option("--rhs", rhs, "smooth[:SWEEPS[:SEED]] or point:VERTEX");
  app.add_option("--k0", cfg.k0, "Matching depth of the reference aggregation");
  app.add_option("--k1", cfg.k1, "Matching depth reshaping starts from");
  app.add_option("--basis", basis, "Coarse edge space construction")
      ->check(CLI::IsMember({"saddle", "tree", "both"}));
  app.add_option("--form", form, "Inner product of the saddle construction")
      ->check(CLI::IsMember({"euclidean", "inverse-weights"}));
  app.add_option("--cp", cp, "Poincare constant: sharp = sqrt(lambda2), paper = lambda2")
      ->check(CLI::IsMember({"paper", "sharp"}));
  app.add_option("--tol", cfg.interleave.rel_tolerance,
                 "Relative tolerance of the alternating minimization");
  app.add_option("--solver-tol", cfg.solver.rel_tolerance, "Relative tolerance of CG solves");
  app.add_option("--max-iterations", max_iterations,
                 "Limit on reshaping steps (default: until the error is matched)");
  app.add_option("--seed", cfg.seed, "Seed for every random choice");
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_flag("--write-basis", cfg.write_basis, "Also write the final coarse edge basis");

  CLI11_PARSE(app, argc, argv);

  try
  {
    parse_rhs(rhs, cfg);
  }
  catch (const CLI::Error &e)
  {
    return app.exit(e);
  }
  cfg.read.mode = mode == "laplacian" ? adagg::InputMode::laplacian : adagg::InputMode::adjacency;
  cfg.cp_convention = cp == "paper" ? adagg::PoincareConvention::lambda2
                                    : adagg::PoincareConvention::sqrt_lambda2;
  cfg.form = form == "euclidean" ? adagg::BilinearForm::euclidean
                                 : adagg::BilinearForm::inverse_weights;
  if (basis == "saddle")
    cfg.constructions = {adagg::BasisConstruction::saddle_point};
  else if (basis == "tree")
    cfg.constructions = {adagg::BasisConstruction::spanning_tree};
  else
    cfg.constructions = {adagg::BasisConstruction::saddle_point,
                         adagg::BasisConstruction::spanning_tree};
  if (max_iterations >= 0)
    cfg.max_reshape_iterations = max_iterations;
  cfg.output_dir = out_dir;

  try
  {
    const adagg::ExperimentResult result = adagg::run_experiment(cfg);
    for (const auto &w : result.warnings)
      std::cerr << "warning: " << w << '\n';
    std::cout << "graph: " << result.n_vertices << " vertices, " << result.n_edges
              << " edges, lambda2 = " << adagg::format_number(result.lambda2) << '\n';
    for (const auto &run : result.runs)
    {
      const auto &gr = run.guided;
      const auto &last = gr.reshaped.records.back();
      std::cout << adagg::to_string(run.construction) << ": level " << gr.k0 << " n_c "
                << gr.direct.n_c << " eff " << adagg::format_number(gr.direct.eff.value_or(0))
                << " | reshaped from " << gr.k1 << " n_c " << last.n_c << " eff "
                << adagg::format_number(last.eff.value_or(0)) << " ("
                << adagg::to_string(gr.reshaped.reason) << ")\n";
    }
    std::cout << "wrote " << cfg.output_dir.string() << '\n';
  }
  catch (const adagg::ExperimentError &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
