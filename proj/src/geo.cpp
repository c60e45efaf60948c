#include "trajcast/geo.hpp"

#include <cmath>
#include <sstream>

#include "trajcast/errors.hpp"

namespace trajcast {

const char* encoder_name(Encoder e) {
  switch (e) {
    case Encoder::kBinary:
      return "binary";
    case Encoder::kLinear:
      return "linear";
    case Encoder::kQuadratic:
      return "quadratic";
  }
  return "unknown";
}

Encoder encoder_from_name(const std::string& name) {
  if (name == "binary") return Encoder::kBinary;
  if (name == "linear") return Encoder::kLinear;
  if (name == "quadratic") return Encoder::kQuadratic;
  throw ConfigError("unknown encoder '" + name +
                    "' (expected binary, linear or quadratic)");
}

std::pair<double, double> normalize_point(const GpsPoint& p,
                                          const BoundingBox& bbox) {
  auto fail = [&](const char* which, double value, double lo, double hi) {
    std::ostringstream msg;
    msg << which << " " << value << " outside bbox range [" << lo << ", "
        << hi << "]";
    throw DataError(msg.str());
  };
  if (!(p.lon >= bbox.lon_min && p.lon <= bbox.lon_max)) {
    fail("longitude", p.lon, bbox.lon_min, bbox.lon_max);
  }
  if (!(p.lat >= bbox.lat_min && p.lat <= bbox.lat_max)) {
    fail("latitude", p.lat, bbox.lat_min, bbox.lat_max);
  }
  const double u = (p.lon - bbox.lon_min) / (bbox.lon_max - bbox.lon_min);
  const double v = (p.lat - bbox.lat_min) / (bbox.lat_max - bbox.lat_min);
  return {u, v};
}

CellIndex point_to_cell(double u, double v, std::size_t resolution) {
  if (!(u >= 0.0 && u <= 1.0) || !(v >= 0.0 && v <= 1.0)) {
    std::ostringstream msg;
    msg << "unit coordinates (" << u << ", " << v << ") outside [0,1]^2";
    throw DataError(msg.str());
  }
  const int last = static_cast<int>(resolution) - 1;
  const int m = std::min(static_cast<int>(std::floor(v * static_cast<double>(
                                                             resolution))),
                         last);
  const int n = std::min(static_cast<int>(std::floor(u * static_cast<double>(
                                                             resolution))),
                         last);
  return {m, n};
}

std::vector<CellIndex> trajectory_to_cells(const Trajectory& t,
                                           const BoundingBox& bbox,
                                           std::size_t resolution) {
  std::vector<CellIndex> cells;
  cells.reserve(t.points.size());
  for (const GpsPoint& p : t.points) {
    const auto [u, v] = normalize_point(p, bbox);
    cells.push_back(point_to_cell(u, v, resolution));
  }
  return cells;
}

namespace {

TrajectoryGrid encode_impl(const std::vector<CellIndex>& cells,
                           std::size_t resolution, Encoder encoder) {
  if (cells.empty()) {
    throw DataError("cannot encode an empty cell sequence");
  }
  TrajectoryGrid grid;
  grid.resolution = resolution;
  grid.values.assign(resolution * resolution, 0.0f);
  const double total = static_cast<double>(cells.size());
  // k is 1-based; iterating in order makes the largest k win on revisits.
  for (std::size_t k = 1; k <= cells.size(); ++k) {
    const CellIndex& c = cells[k - 1];
    if (c.m < 0 || c.n < 0 || static_cast<std::size_t>(c.m) >= resolution ||
        static_cast<std::size_t>(c.n) >= resolution) {
      std::ostringstream msg;
      msg << "cell (" << c.m << ", " << c.n << ") outside " << resolution
          << "x" << resolution << " grid";
      throw DataError(msg.str());
    }
    float value = 1.0f;
    if (encoder != Encoder::kBinary) {
      const float ratio = static_cast<float>(static_cast<double>(k) / total);
      // Squaring the float32 ratio keeps quadratic == linear^2 bit-exact.
      value = encoder == Encoder::kLinear ? ratio : ratio * ratio;
    }
    grid.at(c.m, c.n) = value;
  }
  return grid;
}

}  // namespace

TrajectoryGrid encode_binary(const std::vector<CellIndex>& cells,
                             std::size_t resolution) {
  return encode_impl(cells, resolution, Encoder::kBinary);
}

TrajectoryGrid encode_linear(const std::vector<CellIndex>& cells,
                             std::size_t resolution) {
  return encode_impl(cells, resolution, Encoder::kLinear);
}

TrajectoryGrid encode_quadratic(const std::vector<CellIndex>& cells,
                                std::size_t resolution) {
  return encode_impl(cells, resolution, Encoder::kQuadratic);
}

TrajectoryGrid encode_cells(const std::vector<CellIndex>& cells,
                            std::size_t resolution, Encoder encoder) {
  return encode_impl(cells, resolution, encoder);
}

Sample make_sample(const Trajectory& t, const BoundingBox& bbox,
                   std::size_t resolution, Encoder encoder) {
  if (t.points.size() < 2) {
    throw DataError("trajectory too short: need at least 2 points, got " +
                    std::to_string(t.points.size()));
  }
  const std::vector<CellIndex> cells =
      trajectory_to_cells(t, bbox, resolution);
  const std::vector<CellIndex> prefix(cells.begin(), cells.end() - 1);
  Sample s;
  s.grid = encode_cells(prefix, resolution, encoder);
  s.target_m = static_cast<float>(cells.back().m);
  s.target_n = static_cast<float>(cells.back().n);
  return s;
}

}  // namespace trajcast
