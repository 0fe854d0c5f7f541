// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adagg/graph.hpp"

namespace adagg
{

class MatrixMarketError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

enum class InputMode
{
  laplacian,  // off-diagonal L_ij < 0 gives weight -L_ij; diagonal ignored
  adjacency   // off-diagonal A_ij > 0 gives weight A_ij
};

std::string_view to_string(InputMode m);

struct ReadOptions
{
  InputMode mode = InputMode::laplacian;
  /// Drop off-diagonals of the wrong sign instead of rejecting the file.
  bool drop_wrong_sign = false;
  /// Relative tolerance for the symmetry check of general files.
  double symmetry_tolerance = 1e-10;
};

struct LoadedGraph
{
  Graph graph;
  /// Original (0-based) row index of every kept vertex.
  std::vector<VertexId> original_ids;
  int file_vertices = 0;
  int dropped_zero = 0;
  int dropped_wrong_sign = 0;
  std::vector<std::string> warnings;
};

/// Coordinate-format real, integer or pattern matrices, symmetric or general
/// with symmetric support. Pattern entries get unit weight. If the graph is
/// disconnected, only the largest component is kept (with a warning).
LoadedGraph read_matrix_market(std::istream &in, const ReadOptions &opts = {});
LoadedGraph read_matrix_market(const std::filesystem::path &path, const ReadOptions &opts = {});

/// Writes A = G*DG as a symmetric coordinate matrix (lower triangle).
void write_matrix_market_laplacian(std::ostream &out, const Graph &g);

}  // namespace adagg
