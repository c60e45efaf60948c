#pragma once

// Test-only brute-force reference for the grid encoders. Instead of walking
// the sequence once, it scans the whole sequence for every cell and applies
// the formula at the largest matching position, so it shares no code path
// with the production encoders.

#include <cstddef>
#include <vector>

#include "trajcast/geo.hpp"
#include "trajcast/rng.hpp"

namespace trajcast::testing {

inline TrajectoryGrid brute_force_encode(const std::vector<CellIndex>& cells,
                                         std::size_t resolution,
                                         Encoder encoder) {
  TrajectoryGrid grid;
  grid.resolution = resolution;
  grid.values.assign(resolution * resolution, 0.0f);
  const double total = static_cast<double>(cells.size());
  for (std::size_t m = 0; m < resolution; ++m) {
    for (std::size_t n = 0; n < resolution; ++n) {
      std::size_t max_k = 0;
      for (std::size_t k = 1; k <= cells.size(); ++k) {
        if (cells[k - 1].m == static_cast<int>(m) &&
            cells[k - 1].n == static_cast<int>(n)) {
          max_k = k;
        }
      }
      if (max_k == 0) continue;
      float value = 1.0f;
      if (encoder != Encoder::kBinary) {
        const float ratio =
            static_cast<float>(static_cast<double>(max_k) / total);
        value = encoder == Encoder::kLinear ? ratio : ratio * ratio;
      }
      grid.at(static_cast<int>(m), static_cast<int>(n)) = value;
    }
  }
  return grid;
}

inline std::vector<CellIndex> random_cells(Rng& rng, std::size_t length,
                                           std::size_t resolution) {
  std::vector<CellIndex> cells(length);
  for (auto& c : cells) {
    c.m = static_cast<int>(rng.uniform_index(resolution));
    c.n = static_cast<int>(rng.uniform_index(resolution));
  }
  return cells;
}

}  // namespace trajcast::testing
