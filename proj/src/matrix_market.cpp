// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#include "adagg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace adagg
{

std::string_view to_string(InputMode m)
{
  return m == InputMode::laplacian ? "laplacian" : "adjacency";
}

namespace
{

enum class Field
{
  real,
  integer,
  pattern
};

struct Header
{
  Field field = Field::real;
  bool symmetric = false;
};

std::string lower(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Header parse_banner(const std::string &line)
{
  std::istringstream in(line);
  std::string banner, object, format, field, symmetry;
  in >> banner >> object >> format >> field >> symmetry;
  if (lower(banner) != "%%matrixmarket")
    throw MatrixMarketError("missing %%MatrixMarket banner");
  if (lower(object) != "matrix")
    throw MatrixMarketError("unsupported object '" + object + "'");
  if (lower(format) != "coordinate")
    throw MatrixMarketError("only coordinate format is supported, got '" + format + "'");
  Header h;
  field = lower(field);
  if (field == "real" || field == "double")
    h.field = Field::real;
  else if (field == "integer")
    h.field = Field::integer;
  else if (field == "pattern")
    h.field = Field::pattern;
  else
    throw MatrixMarketError("unsupported field '" + field + "'");
  symmetry = lower(symmetry);
  if (symmetry == "symmetric")
    h.symmetric = true;
  else if (symmetry != "general")
    throw MatrixMarketError("unsupported symmetry '" + symmetry + "'");
  return h;
}

bool skip_line(const std::string &line)
{
  for (char c : line)
  {
    if (c == '%')
      return true;
    if (!std::isspace(static_cast<unsigned char>(c)))
      return false;
  }
  return true;
}

std::string entry_name(long i, long j)
{
  return "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
}

}  // namespace

LoadedGraph read_matrix_market(std::istream &in, const ReadOptions &opts)
{
  std::string line;
  if (!std::getline(in, line))
    throw MatrixMarketError("empty input");
  const Header header = parse_banner(line);

  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line))
  {
    if (skip_line(line))
      continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> nnz))
      throw MatrixMarketError("malformed size line '" + line + "'");
    break;
  }
  if (rows < 0)
    throw MatrixMarketError("missing size line");
  if (rows != cols)
    throw MatrixMarketError("matrix is not square: " + std::to_string(rows) + " x " +
                            std::to_string(cols));
  if (nnz < 0)
    throw MatrixMarketError("negative entry count");

  // Off-diagonal values keyed by (row, col), 0-based.
  std::map<std::pair<long, long>, double> entries;
  long read = 0;
  while (read < nnz && std::getline(in, line))
  {
    if (skip_line(line))
      continue;
    const char *p = line.c_str();
    char *end = nullptr;
    const long i = std::strtol(p, &end, 10) - 1;
    if (end == p)
      throw MatrixMarketError("malformed entry line '" + line + "'");
    p = end;
    const long j = std::strtol(p, &end, 10) - 1;
    if (end == p)
      throw MatrixMarketError("malformed entry line '" + line + "'");
    p = end;
    double value = 1.0;
    if (header.field != Field::pattern)
    {
      value = std::strtod(p, &end);
      if (end == p)
        throw MatrixMarketError("entry line '" + line + "' has no value");
    }
    if (i < 0 || j < 0 || i >= rows || j >= rows)
      throw MatrixMarketError("entry " + entry_name(i, j) + " out of range");
    ++read;
    if (i == j)
      continue;
    if (header.symmetric)
      entries[std::minmax(i, j)] += value;
    else
      entries[{i, j}] += value;
  }
  if (read < nnz)
    throw MatrixMarketError("expected " + std::to_string(nnz) + " entries, found " +
                            std::to_string(read));

  LoadedGraph out;
  out.file_vertices = static_cast<int>(rows);
  std::vector<WeightedEdge> edges;
  auto keep = [&](long i, long j, double value) {
    double w = header.field == Field::pattern ? 1.0
               : opts.mode == InputMode::laplacian ? -value
                                                   : value;
    if (w == 0.0)
    {
      ++out.dropped_zero;
      return;
    }
    if (w < 0.0)
    {
      if (!opts.drop_wrong_sign)
        throw MatrixMarketError(
            "entry " + entry_name(i, j) + " = " + std::to_string(value) + " has the wrong sign for " +
            std::string(to_string(opts.mode)) + " input (use the drop override to discard it)");
      ++out.dropped_wrong_sign;
      return;
    }
    edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), w});
  };

  if (header.symmetric)
  {
    for (const auto &[key, value] : entries)
      keep(key.first, key.second, value);
  }
  else
  {
    for (const auto &[key, value] : entries)
    {
      const auto [i, j] = key;
      auto mirror = entries.find({j, i});
      const double other = mirror == entries.end() ? 0.0 : mirror->second;
      if (mirror == entries.end() ||
          std::abs(value - other) > opts.symmetry_tolerance * std::max(std::abs(value), std::abs(other)))
        throw MatrixMarketError("matrix is not symmetric at entry " + entry_name(i, j));
      if (i < j)
        keep(i, j, value);
    }
  }
  if (out.dropped_zero > 0)
    out.warnings.push_back("dropped " + std::to_string(out.dropped_zero) +
                           " explicit zero off-diagonal entries");
  if (out.dropped_wrong_sign > 0)
    out.warnings.push_back("dropped " + std::to_string(out.dropped_wrong_sign) +
                           " off-diagonal entries of the wrong sign");

  const int n = static_cast<int>(rows);
  Graph full(n, edges);
  std::vector<VertexId> all(n);
  for (int v = 0; v < n; ++v)
    all[v] = v;
  const std::vector<int> labels = connected_components(full, all);
  const int n_comp = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<int> comp_size(n_comp, 0);
  for (int l : labels)
    ++comp_size[l];
  const int largest =
      n_comp == 0 ? 0 : static_cast<int>(std::max_element(comp_size.begin(), comp_size.end()) -
                                         comp_size.begin());
  if (n_comp == 0 || comp_size[largest] < 2)
    throw MatrixMarketError("graph has no edges");

  if (n_comp == 1)
  {
    out.original_ids = std::move(all);
    out.graph = std::move(full);
    return out;
  }
  std::vector<VertexId> new_id(n, -1);
  for (VertexId v = 0; v < n; ++v)
    if (labels[v] == largest)
    {
      new_id[v] = static_cast<VertexId>(out.original_ids.size());
      out.original_ids.push_back(v);
    }
  std::vector<WeightedEdge> kept;
  for (const auto &e : edges)
    if (new_id[e.i] >= 0)
      kept.push_back({new_id[e.i], new_id[e.j], e.weight});
  out.warnings.push_back("graph has " + std::to_string(n_comp) +
                         " connected components; keeping the largest (" +
                         std::to_string(comp_size[largest]) + " of " + std::to_string(n) +
                         " vertices)");
  out.graph = Graph(comp_size[largest], kept);
  return out;
}

LoadedGraph read_matrix_market(const std::filesystem::path &path, const ReadOptions &opts)
{
  std::ifstream in(path);
  if (!in)
    throw MatrixMarketError("cannot open " + path.string());
  try
  {
    return read_matrix_market(in, opts);
  }
  catch (const MatrixMarketError &e)
  {
    throw MatrixMarketError(path.string() + ": " + e.what());
  }
}

void write_matrix_market_laplacian(std::ostream &out, const Graph &g)
{
  const int n = g.num_vertices();
  // incident (neighbor, weight) lists, sorted so the diagonal sum does not
  // depend on edge numbering
  std::vector<std::vector<std::pair<VertexId, double>>> incident(n);
  for (EdgeId e = 0; e < g.num_edges(); ++e)
  {
    const Edge &edge = g.edge(e);
    incident[edge.head].emplace_back(edge.tail, g.weight(e));
    incident[edge.tail].emplace_back(edge.head, g.weight(e));
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << n << ' ' << n << ' ' << n + g.num_edges() << '\n';
  char buf[40];
  for (VertexId col = 0; col < n; ++col)
  {
    auto &entries = incident[col];
    std::sort(entries.begin(), entries.end());
    double diag = 0.0;
    for (const auto &entry : entries)
      diag += entry.second;
    std::snprintf(buf, sizeof buf, "%.17g", diag);
    out << col + 1 << ' ' << col + 1 << ' ' << buf << '\n';
    for (const auto &[row, weight] : entries)
    {
      if (row < col)
        continue;
      std::snprintf(buf, sizeof buf, "%.17g", -weight);
      out << row + 1 << ' ' << col + 1 << ' ' << buf << '\n';
    }
  }
}

}  // namespace adagg
