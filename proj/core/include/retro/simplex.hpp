#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace retro {

/// Calls `visit` with every point of the simplex grid {x >= 0, sum x = 1}
/// whose coordinates are multiples of 1/divisions, in lexicographic order of
/// the integer counts. Returning false from `visit` stops the walk early.
/// Returns the number of points visited.
std::size_t for_each_simplex_point(std::size_t dimension, std::size_t divisions,
                                   const std::function<bool(std::span<const double>)>& visit);

/// C(divisions + dimension - 1, dimension - 1).
std::size_t simplex_grid_size(std::size_t dimension, std::size_t divisions);

}  // namespace retro
