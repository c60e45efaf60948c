#pragma once

#include <string>

#include "trajcast/ingest.hpp"

namespace trajcast {

// Grid dataset file (little-endian): magic "TGRD" | version u32 = 1 |
// M u32 | encoder tag u8 | 3 sections (train/val/test), each: count u64,
// then count records of [M*M float32 row-major | target m f32 | target n f32].
void write_grid_dataset(const GridDataset& ds, const std::string& path);
GridDataset read_grid_dataset(const std::string& path);

// Coordinate-sequence file (little-endian): magic "TSEQ" | version u32 = 1 |
// M u32 | 3 sections, each: count u64, then count records of
// [len u32 | len * (m f32, n f32) | target m f32 | target n f32].
void write_sequence_dataset(const SequenceDataset& ds, const std::string& path);
SequenceDataset read_sequence_dataset(const std::string& path);

}  // namespace trajcast
