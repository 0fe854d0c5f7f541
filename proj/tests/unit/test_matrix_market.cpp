// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"

#include <sstream>

#include "adagg/generators.hpp"
#include "adagg/matrix_market.hpp"
#include "support/oracles.hpp"

using namespace adagg;
using testing_support::Rng;

namespace
{

LoadedGraph read(const std::string &text, ReadOptions opts = {})
{
  std::istringstream in(text);
  return read_matrix_market(in, opts);
}

bool identical(const Graph &a, const Graph &b)
{
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges())
    return false;
  for (EdgeId e = 0; e < a.num_edges(); ++e)
    if (a.edge(e).head != b.edge(e).head || a.edge(e).tail != b.edge(e).tail ||
        a.weight(e) != b.weight(e))
      return false;
  return true;
}

}  // namespace

TEST_CASE("Laplacian of the three-vertex path")
{
  const LoadedGraph g = read("%%MatrixMarket matrix coordinate real symmetric\n"
                             "% comment\n"
                             "3 3 5\n"
                             "1 1 1\n2 1 -1\n2 2 2\n3 2 -1\n3 3 1\n");
  CHECK(identical(g.graph, path_graph(3)));
  CHECK(g.warnings.empty());
}

TEST_CASE("general storage, adjacency and pattern files")
{
  const LoadedGraph general = read("%%MatrixMarket matrix coordinate real general\n"
                                   "2 2 2\n1 2 -2.5\n2 1 -2.5\n");
  CHECK(general.graph.weight(0) == 2.5);

  ReadOptions adjacency;
  adjacency.mode = InputMode::adjacency;
  const LoadedGraph adj = read("%%MatrixMarket matrix coordinate integer symmetric\n"
                               "3 3 2\n2 1 3\n3 2 4\n",
                               adjacency);
  CHECK(adj.graph.num_edges() == 2);
  CHECK(adj.graph.weight(1) == 4.0);

  const LoadedGraph pattern = read("%%MatrixMarket matrix coordinate pattern symmetric\n"
                                   "3 3 3\n1 1\n2 1\n3 1\n");
  CHECK(pattern.graph.num_edges() == 2);
  CHECK(pattern.graph.weights().sum() == 2.0);
}

TEST_CASE("rejected inputs")
{
  CHECK_THROWS_AS(read("garbage\n"), MatrixMarketError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n"),
                  MatrixMarketError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real general\n2 3 1\n1 2 -1\n"),
                  MatrixMarketError);
  CHECK_THROWS_WITH_AS(read("%%MatrixMarket matrix coordinate real general\n"
                            "2 2 2\n1 2 -1\n2 1 -2\n"),
                       doctest::Contains("not symmetric"), MatrixMarketError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1\n2 2 1\n"),
                  MatrixMarketError);
  CHECK_THROWS_AS(read("%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n2 1 -1\n"),
                  MatrixMarketError);
}

TEST_CASE("wrong-sign and zero entries")
{
  const std::string text = "%%MatrixMarket matrix coordinate real symmetric\n"
                           "3 3 3\n2 1 -1\n3 2 -1\n3 1 0.5\n";
  CHECK_THROWS_WITH_AS(read(text), doctest::Contains("wrong sign"), MatrixMarketError);
  ReadOptions drop;
  drop.drop_wrong_sign = true;
  const LoadedGraph g = read(text, drop);
  CHECK(g.graph.num_edges() == 2);
  CHECK(g.dropped_wrong_sign == 1);

  const LoadedGraph z = read("%%MatrixMarket matrix coordinate real symmetric\n"
                             "3 3 3\n2 1 -1\n3 2 -1\n3 1 0\n");
  CHECK(z.graph.num_edges() == 2);
  CHECK(z.dropped_zero == 1);
  CHECK(z.warnings.size() == 1);
}

TEST_CASE("disconnected inputs keep the largest component")
{
  const LoadedGraph g = read("%%MatrixMarket matrix coordinate real symmetric\n"
                             "6 6 3\n2 1 -1\n5 4 -1\n6 5 -1\n");
  CHECK(g.graph.num_vertices() == 3);
  CHECK(g.graph.num_edges() == 2);
  CHECK(g.original_ids == std::vector<VertexId>{3, 4, 5});
  CHECK(g.file_vertices == 6);
  REQUIRE(g.warnings.size() == 1);
  CHECK(g.warnings[0].find("components") != std::string::npos);
}

TEST_CASE("property: writing and re-reading a Laplacian is lossless")
{
  Rng rng(107);
  for (int trial = 0; trial < 10; ++trial)
  {
    const Graph g = testing_support::random_connected_graph(rng, rng.integer(2, 80));
    std::stringstream first;
    write_matrix_market_laplacian(first, g);
    const LoadedGraph once = read(first.str());
    std::stringstream second;
    write_matrix_market_laplacian(second, once.graph);
    const LoadedGraph twice = read(second.str());
    CHECK(identical(once.graph, twice.graph));
    CHECK(first.str() == second.str());
    const VertexVector v = rng.vector(g.num_vertices());
    CHECK((once.graph.laplacian(v) - g.laplacian(v)).norm() <= 1e-14 * (v.norm() + 1) * 10);
  }
}
