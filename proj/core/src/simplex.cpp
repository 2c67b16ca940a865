#include "retro/simplex.hpp"

#include <vector>

#include "retro/error.hpp"

namespace retro {

std::size_t simplex_grid_size(std::size_t dimension, std::size_t divisions) {
  if (dimension == 0) return 0;
  std::size_t result = 1;
  const std::size_t k = dimension - 1;
  for (std::size_t j = 1; j <= k; ++j) {
    result = result * (divisions + j) / j;
  }
  return result;
}

std::size_t for_each_simplex_point(std::size_t dimension, std::size_t divisions,
                                   const std::function<bool(std::span<const double>)>& visit) {
  if (dimension == 0 || divisions == 0) {
    throw Error(ErrorCode::invalid_argument, "simplex grid needs dimension and divisions >= 1");
  }
  std::vector<std::size_t> counts(dimension, 0);
  std::vector<double> point(dimension, 0.0);
  const auto scale = static_cast<double>(divisions);
  counts.back() = divisions;
  std::size_t visited = 0;

  while (true) {
    for (std::size_t p = 0; p < dimension; ++p) point[p] = static_cast<double>(counts[p]) / scale;
    ++visited;
    if (!visit(point)) return visited;

    // Next composition: bump the rightmost bumpable prefix coordinate and
    // give everything after it to the last slot.
    if (dimension == 1) return visited;
    std::size_t used = 0;
    for (std::size_t p = 0; p + 1 < dimension; ++p) used += counts[p];
    if (used == divisions && counts.front() == divisions) return visited;
    std::size_t pos = dimension - 2;
    while (true) {
      std::size_t prefix = 0;
      for (std::size_t p = 0; p <= pos; ++p) prefix += counts[p];
      if (prefix < divisions) break;
      counts[pos] = 0;
      --pos;
    }
    ++counts[pos];
    std::size_t prefix = 0;
    for (std::size_t p = 0; p + 1 < dimension; ++p) prefix += counts[p];
    counts.back() = divisions - prefix;
  }
}

}  // namespace retro
