#pragma once

#include <string>

#include "trajcast/ingest.hpp"
#include "trajcast/train.hpp"

namespace trajcast {

// Everything a command needs, with documented defaults; populated from a
// JSON config file where unknown keys are hard errors.
struct CliConfig {
  BoundingBox bbox = kPortoBBox;
  std::size_t grid_size = 40;
  std::size_t sample_count = 5000;
  std::uint64_t seed = 1;
  SyntheticConfig synthetic;
  train::ExperimentConfig experiment;
  std::string dataset_dir = "out/datasets";
  std::string out_dir = "out";
};

CliConfig load_cli_config(const std::string& path);

// Parses the JSON text directly (exposed for tests).
CliConfig parse_cli_config(const std::string& json_text);

}  // namespace trajcast
