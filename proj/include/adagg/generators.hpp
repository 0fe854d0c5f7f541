// Copyright the adagg authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "adagg/graph.hpp"

namespace adagg
{

/// Unit-weight path 0 - 1 - ... - (n-1).
Graph path_graph(int n);

/// Unit-weight cycle on n >= 3 vertices.
Graph cycle_graph(int n);

/// Unit-weight rows x cols lattice; vertex (r, c) has id r * cols + c.
Graph grid_graph(int rows, int cols);

/// Vertex 0 joined to n_leaves leaves.
Graph star_graph(int n_leaves);

/// Parses "path:N", "cycle:N", "grid:RxC" or "star:N". Returns false if the
/// text does not name a generator; throws GraphError on bad sizes.
bool synthetic_graph(std::string_view name, Graph &out);

}  // namespace adagg
