#pragma once

#include <cstdint>
#include <vector>

#include "trajcast/csv.hpp"
#include "trajcast/geo.hpp"

namespace trajcast {

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  std::vector<Sample> test;
};

struct GridDataset {
  std::size_t resolution = 0;
  Encoder encoder = Encoder::kBinary;
  DatasetSplit split;
};

// Raw coordinate form consumed by the LSTM: input-prefix cells + target.
struct SequenceSample {
  std::vector<CellIndex> cells;
  float target_m = 0.0f;
  float target_n = 0.0f;
};

struct SequenceSplit {
  std::vector<SequenceSample> train;
  std::vector<SequenceSample> validation;
  std::vector<SequenceSample> test;
};

struct SequenceDataset {
  std::size_t resolution = 0;
  SequenceSplit split;
};

struct SyntheticConfig {
  std::size_t count = 5000;
  std::size_t resolution = 40;
  std::size_t min_len = 8;
  std::size_t max_len = 60;
  double step_sigma = 0.03;
  BoundingBox bbox = kPortoBBox;
  std::uint64_t seed = 1;

  void validate() const;
};

// Keeps records with >= 2 points that lie entirely inside the bbox.
std::vector<RawTripRecord> filter_bbox(const std::vector<RawTripRecord>& records,
                                       const BoundingBox& bbox);

// Uniform sample without replacement preserving original relative order.
// When count >= available, returns everything and sets *saturated.
std::vector<RawTripRecord> sample_trajectories(
    const std::vector<RawTripRecord>& records, std::size_t count,
    std::uint64_t seed, bool* saturated = nullptr);

// Permutation of 0..n-1 cut 60/20/20 (train takes the rounding remainder).
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
};
SplitIndices split_indices(std::size_t n, std::uint64_t seed);

DatasetSplit split_dataset(const std::vector<Sample>& samples,
                           std::uint64_t seed);

// Bounded random walks in unit coordinates mapped into the bbox.
std::vector<Trajectory> generate_synthetic(const SyntheticConfig& cfg);

// Splits trajectories once (by seed) and encodes the same subsets with every
// requested encoder, plus the coordinate sequences, so all outputs describe
// identical trips.
struct EncodedDatasets {
  std::vector<GridDataset> grids;  // one per requested encoder
  SequenceDataset sequences;
};
EncodedDatasets encode_datasets(const std::vector<Trajectory>& trajectories,
                                const BoundingBox& bbox,
                                std::size_t resolution,
                                const std::vector<Encoder>& encoders,
                                std::uint64_t seed);

}  // namespace trajcast
