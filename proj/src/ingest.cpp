#include "trajcast/ingest.hpp"

#include <algorithm>
#include <numeric>

#include "trajcast/errors.hpp"
#include "trajcast/rng.hpp"

namespace trajcast {

void SyntheticConfig::validate() const {
  if (resolution == 0) throw ConfigError("synthetic: resolution must be positive");
  if (min_len < 2) throw ConfigError("synthetic: min_len must be >= 2");
  if (max_len < min_len) throw ConfigError("synthetic: max_len < min_len");
  if (!(step_sigma > 0.0)) throw ConfigError("synthetic: step_sigma must be positive");
  if (!(bbox.lon_min < bbox.lon_max) || !(bbox.lat_min < bbox.lat_max)) {
    throw ConfigError("synthetic: degenerate bbox");
  }
}

std::vector<RawTripRecord> filter_bbox(const std::vector<RawTripRecord>& records,
                                       const BoundingBox& bbox) {
  std::vector<RawTripRecord> kept;
  for (const RawTripRecord& rec : records) {
    if (rec.polyline.size() < 2) continue;
    const bool inside =
        std::all_of(rec.polyline.begin(), rec.polyline.end(),
                    [&](const GpsPoint& p) { return bbox.contains(p); });
    if (inside) kept.push_back(rec);
  }
  return kept;
}

std::vector<RawTripRecord> sample_trajectories(
    const std::vector<RawTripRecord>& records, std::size_t count,
    std::uint64_t seed, bool* saturated) {
  if (saturated) *saturated = false;
  if (count >= records.size()) {
    if (saturated && count > records.size()) *saturated = true;
    return records;
  }
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(idx);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::vector<RawTripRecord> out;
  out.reserve(count);
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

SplitIndices split_indices(std::size_t n, std::uint64_t seed) {
  if (n < 5) {
    throw DataError("need at least 5 samples to split 60/20/20, got " +
                    std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(perm);
  const std::size_t n_val = n / 5;
  const std::size_t n_test = n / 5;
  const std::size_t n_train = n - n_val - n_test;
  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.validation.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
  s.test.assign(perm.begin() + n_train + n_val, perm.end());
  return s;
}

DatasetSplit split_dataset(const std::vector<Sample>& samples,
                           std::uint64_t seed) {
  const SplitIndices idx = split_indices(samples.size(), seed);
  DatasetSplit split;
  for (std::size_t i : idx.train) split.train.push_back(samples[i]);
  for (std::size_t i : idx.validation) split.validation.push_back(samples[i]);
  for (std::size_t i : idx.test) split.test.push_back(samples[i]);
  return split;
}

std::vector<Trajectory> generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double lon_span = cfg.bbox.lon_max - cfg.bbox.lon_min;
  const double lat_span = cfg.bbox.lat_max - cfg.bbox.lat_min;
  std::vector<Trajectory> out;
  out.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const std::size_t len =
        cfg.min_len + rng.uniform_index(cfg.max_len - cfg.min_len + 1);
    double u = rng.uniform();
    double v = rng.uniform();
    Trajectory t;
    t.points.reserve(len);
    for (std::size_t k = 0; k < len; ++k) {
      if (k > 0) {
        u = std::clamp(u + cfg.step_sigma * rng.portable_normal(), 0.0, 1.0);
        v = std::clamp(v + cfg.step_sigma * rng.portable_normal(), 0.0, 1.0);
      }
      GpsPoint p{cfg.bbox.lon_min + u * lon_span,
                 cfg.bbox.lat_min + v * lat_span};
      p.lon = std::clamp(p.lon, cfg.bbox.lon_min, cfg.bbox.lon_max);
      p.lat = std::clamp(p.lat, cfg.bbox.lat_min, cfg.bbox.lat_max);
      t.points.push_back(p);
    }
    out.push_back(std::move(t));
  }
  return out;
}

EncodedDatasets encode_datasets(const std::vector<Trajectory>& trajectories,
                                const BoundingBox& bbox,
                                std::size_t resolution,
                                const std::vector<Encoder>& encoders,
                                std::uint64_t seed) {
  if (trajectories.empty()) throw DataError("no trajectories to encode");
  const SplitIndices idx = split_indices(trajectories.size(), seed);

  EncodedDatasets out;
  out.sequences.resolution = resolution;
  for (Encoder e : encoders) {
    GridDataset ds;
    ds.resolution = resolution;
    ds.encoder = e;
    out.grids.push_back(std::move(ds));
  }

  auto encode_subset = [&](const std::vector<std::size_t>& subset,
                           std::vector<Sample> DatasetSplit::* grid_member,
                           std::vector<SequenceSample> SequenceSplit::* seq_member) {
    for (std::size_t i : subset) {
      const Trajectory& t = trajectories[i];
      for (std::size_t e = 0; e < encoders.size(); ++e) {
        (out.grids[e].split.*grid_member)
            .push_back(make_sample(t, bbox, resolution, encoders[e]));
      }
      const auto cells = trajectory_to_cells(t, bbox, resolution);
      SequenceSample seq;
      seq.cells.assign(cells.begin(), cells.end() - 1);
      seq.target_m = static_cast<float>(cells.back().m);
      seq.target_n = static_cast<float>(cells.back().n);
      (out.sequences.split.*seq_member).push_back(std::move(seq));
    }
  };
  encode_subset(idx.train, &DatasetSplit::train, &SequenceSplit::train);
  encode_subset(idx.validation, &DatasetSplit::validation,
                &SequenceSplit::validation);
  encode_subset(idx.test, &DatasetSplit::test, &SequenceSplit::test);
  return out;
}

}  // namespace trajcast
