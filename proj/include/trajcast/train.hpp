#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "trajcast/baselines.hpp"
#include "trajcast/ingest.hpp"
#include "trajcast/sst.hpp"

namespace trajcast::train {

enum class ModelKind { kMlp, kCnn, kSst, kSstShifted, kLstm };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelHyperparams {
  sst::SstConfig sst;
  models::MlpConfig mlp;
  models::CnnConfig cnn;
  models::LstmConfig lstm;
};

struct ExperimentConfig {
  ModelKind model = ModelKind::kSst;
  // nullopt only for the LSTM, which consumes raw coordinates.
  std::optional<Encoder> encoder = Encoder::kQuadratic;
  std::size_t epochs = 50;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  ModelHyperparams hp;

  void validate() const;
};

struct TrainReport {
  std::vector<double> train_loss;  // normalized units, one per epoch run
  std::vector<double> val_loss;
  std::size_t best_epoch = 0;  // 1-based
  double test_mse_px2 = 0.0;
  double wall_seconds = 0.0;  // console-only; never persisted
  ExperimentConfig cfg;
};

// Uniform float-mode training surface over the four model families.
class Regressor {
 public:
  virtual ~Regressor() = default;
  virtual nn::Tensor<float> forward(const nn::Tensor<float>& input) = 0;
  virtual void backward(const nn::Tensor<float>& dpred) = 0;
  virtual std::vector<nn::Parameter<float>*> params() = 0;
  virtual void set_training(bool) {}
};

// Resolution-dependent fields (grid side, input widths) are derived here so
// one hyperparameter block serves any dataset resolution.
std::unique_ptr<Regressor> make_regressor(const ExperimentConfig& cfg,
                                          std::size_t resolution);

// Flat per-split arrays: inputs [count, input_dim], targets [count, 2]
// normalized by the grid resolution.
struct SampleBlock {
  std::vector<float> inputs;
  std::vector<float> targets;
  std::size_t count = 0;
};

struct VectorizedData {
  std::size_t resolution = 0;
  std::size_t input_dim = 0;
  SampleBlock train;
  SampleBlock validation;
  SampleBlock test;
};

VectorizedData vectorize(const GridDataset& ds);
VectorizedData vectorize(const SequenceDataset& ds,
                         std::size_t seq_len = models::kLstmSeqLen);

// Normalized-unit MSE over a block, evaluation mode, fixed batch order.
double evaluate_mse_normalized(Regressor& model, const SampleBlock& block,
                               std::size_t input_dim, std::size_t batch_size);

// Pixel^2 units: normalized MSE scaled by resolution^2 (Table-1 convention).
double evaluate_mse_px2(Regressor& model, const SampleBlock& block,
                        std::size_t input_dim, std::size_t resolution,
                        std::size_t batch_size);

struct TrainResult {
  TrainReport report;
  std::unique_ptr<Regressor> model;
};

// Minibatch Adam with seeded shuffling, early stopping on validation MSE and
// best-epoch weight restoration before the test evaluation.
TrainResult train_model(const ExperimentConfig& cfg,
                        const VectorizedData& data);

struct MetricsCell {
  ModelKind model;
  std::optional<Encoder> encoder;
  double mse_px2 = 0.0;
};

struct MetricsTable {
  std::vector<MetricsCell> cells;
};

struct DatasetPaths {
  std::string binary;
  std::string linear;
  std::string quadratic;
  std::string sequences;
};

// Trains MLP/CNN/SST against each encoder plus one coordinate-input LSTM
// (10 cells) with a shared seed policy. When out_dir is non-empty, writes
// matrix.csv plus a report and checkpoint per cell.
MetricsTable run_matrix(const ExperimentConfig& base,
                        const DatasetPaths& paths, const std::string& out_dir);

struct AblationPair {
  Encoder encoder;
  double sst_mse = 0.0;
  double shifted_mse = 0.0;
};

// SST vs the shifted-window variant under identical seeds/hyperparameters,
// once per encoder. When out_dir is non-empty, writes ablation.csv and
// per-run artifacts.
std::vector<AblationPair> run_shift_ablation(const ExperimentConfig& base,
                                             const DatasetPaths& paths,
                                             const std::string& out_dir);

}  // namespace trajcast::train
