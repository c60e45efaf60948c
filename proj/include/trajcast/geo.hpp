#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace trajcast {

struct GpsPoint {
  double lon = 0.0;
  double lat = 0.0;
};

// Ordered GPS fixes of one trip. The destination is the final point.
struct Trajectory {
  std::vector<GpsPoint> points;
};

struct BoundingBox {
  double lon_min;
  double lon_max;
  double lat_min;
  double lat_max;

  bool contains(const GpsPoint& p) const {
    return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min &&
           p.lat <= lat_max;
  }
};

// Default study area: central Porto.
inline constexpr BoundingBox kPortoBBox{-8.7, -8.6, 41.1, 41.2};

// 0-based grid cell; row from latitude, column from longitude.
struct CellIndex {
  int m = 0;
  int n = 0;

  bool operator==(const CellIndex&) const = default;
};

// M x M rasterization of a trajectory, row-major, values in [0, 1].
struct TrajectoryGrid {
  std::size_t resolution = 0;
  std::vector<float> values;

  float at(int m, int n) const {
    return values[static_cast<std::size_t>(m) * resolution +
                  static_cast<std::size_t>(n)];
  }
  float& at(int m, int n) {
    return values[static_cast<std::size_t>(m) * resolution +
                  static_cast<std::size_t>(n)];
  }

  bool operator==(const TrajectoryGrid&) const = default;
};

// Model input/target pair: grid of all points but the last, destination
// cell of the last point as a real coordinate pair.
struct Sample {
  TrajectoryGrid grid;
  float target_m = 0.0f;
  float target_n = 0.0f;

  bool operator==(const Sample&) const = default;
};

enum class Encoder : std::uint8_t { kBinary = 0, kLinear = 1, kQuadratic = 2 };

const char* encoder_name(Encoder e);
Encoder encoder_from_name(const std::string& name);

// Min-max normalization of a point against fixed bbox bounds; throws
// DataError (naming the offending coordinate) when the point is outside.
std::pair<double, double> normalize_point(const GpsPoint& p,
                                          const BoundingBox& bbox);

// Unit coordinates to a 0-based cell; coordinates exactly 1.0 clamp into
// the last row/column.
CellIndex point_to_cell(double u, double v, std::size_t resolution);

std::vector<CellIndex> trajectory_to_cells(const Trajectory& t,
                                           const BoundingBox& bbox,
                                           std::size_t resolution);

// Visited cells get 1, everything else 0.
TrajectoryGrid encode_binary(const std::vector<CellIndex>& cells,
                             std::size_t resolution);

// Visited cells get k/N for the last (largest) 1-based position k that
// lands on them; the final cell is always exactly 1.
TrajectoryGrid encode_linear(const std::vector<CellIndex>& cells,
                             std::size_t resolution);

// Elementwise square of the linear encoding under the same collision rule.
TrajectoryGrid encode_quadratic(const std::vector<CellIndex>& cells,
                                std::size_t resolution);

TrajectoryGrid encode_cells(const std::vector<CellIndex>& cells,
                            std::size_t resolution, Encoder encoder);

// Encodes points 1..N-1 (with that prefix's own length as normalizer) and
// takes point N's cell as the target. Throws DataError when N < 2.
Sample make_sample(const Trajectory& t, const BoundingBox& bbox,
                   std::size_t resolution, Encoder encoder);

}  // namespace trajcast
