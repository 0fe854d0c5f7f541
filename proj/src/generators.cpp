// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/generators.hpp"

#include <charconv>
#include <string>
#include <vector>

namespace adagg
{

Graph path_graph(int n)
{
  if (n < 1)
    throw GraphError("path_graph: need at least one vertex");
  std::vector<WeightedEdge> edges;
  for (int i = 0; i + 1 < n; ++i)
    edges.push_back({i, i + 1, 1.0});
  return Graph(n, edges);
}

Graph cycle_graph(int n)
{
  if (n < 3)
    throw GraphError("cycle_graph: need at least three vertices");
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i)
    edges.push_back({i, (i + 1) % n, 1.0});
  return Graph(n, edges);
}

Graph grid_graph(int rows, int cols)
{
  if (rows < 1 || cols < 1)
    throw GraphError("grid_graph: dimensions must be positive");
  std::vector<WeightedEdge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
    {
      const int v = r * cols + c;
      if (c + 1 < cols)
        edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows)
        edges.push_back({v, v + cols, 1.0});
    }
  return Graph(rows * cols, edges);
}

Graph star_graph(int n_leaves)
{
  if (n_leaves < 1)
    throw GraphError("star_graph: need at least one leaf");
  std::vector<WeightedEdge> edges;
  for (int k = 1; k <= n_leaves; ++k)
    edges.push_back({0, k, 1.0});
  return Graph(n_leaves + 1, edges);
}

namespace
{

int parse_size(std::string_view text, std::string_view whole)
{
  int value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw GraphError("bad size '" + std::string(text) + "' in '" + std::string(whole) + "'");
  return value;
}

}  // namespace

bool synthetic_graph(std::string_view name, Graph &out)
{
  const auto colon = name.find(':');
  if (colon == std::string_view::npos)
    return false;
  const std::string_view kind = name.substr(0, colon);
  const std::string_view arg = name.substr(colon + 1);
  if (kind == "path")
    out = path_graph(parse_size(arg, name));
  else if (kind == "cycle")
    out = cycle_graph(parse_size(arg, name));
  else if (kind == "star")
    out = star_graph(parse_size(arg, name));
  else if (kind == "grid")
  {
    const auto x = arg.find('x');
    if (x == std::string_view::npos)
      throw GraphError("grid size must look like RxC, got '" + std::string(arg) + "'");
    out = grid_graph(parse_size(arg.substr(0, x), name), parse_size(arg.substr(x + 1), name));
  }
  else
    return false;
  return true;
}

}  // namespace adagg
