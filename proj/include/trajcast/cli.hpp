#pragma once

#include <string>

#include "trajcast/config.hpp"

namespace trajcast::cli {

// TRAJCAST_OUT_ROOT, when set, overrides the configured output root.
std::string resolve_out_dir(const CliConfig& cfg);

// Expected dataset file locations under a dataset directory.
train::DatasetPaths dataset_paths(const std::string& dataset_dir);

struct IngestSummary {
  std::size_t rows_read = 0;
  std::size_t malformed = 0;
  std::size_t in_bbox = 0;
  std::size_t sampled = 0;
  bool saturated = false;
  std::size_t train_count = 0;
  std::size_t validation_count = 0;
  std::size_t test_count = 0;
};

// Parses the taxi CSV, filters/samples/splits/encodes and writes one TGRD
// file per encoder plus the coordinate TSEQ file and a summary.txt.
IngestSummary cmd_ingest(const CliConfig& cfg, const std::string& csv_path,
                         const std::string& out_dir);

// Same outputs from the synthetic generator.
IngestSummary cmd_synth(const CliConfig& cfg, const std::string& out_dir);

// Trains one configured cell; writes report + checkpoint, returns the
// pixel^2 test MSE.
double cmd_train(const CliConfig& cfg);

// Evaluates a checkpoint against the test split of a dataset file (TGRD or
// TSEQ, detected by magic); returns the pixel^2 MSE.
double cmd_eval(const CliConfig& cfg, const std::string& checkpoint_path,
                const std::string& dataset_path);

train::MetricsTable cmd_matrix(const CliConfig& cfg);

std::vector<train::AblationPair> cmd_ablation(const CliConfig& cfg);

// Renders a matrix CSV as an aligned table (returned) and writes the
// plot-ready CSV beside it (or to plot_out when given).
std::string cmd_report(const std::string& matrix_csv,
                       const std::string& plot_out = "");

}  // namespace trajcast::cli
