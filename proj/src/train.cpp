#include "trajcast/train.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "trajcast/checkpoint.hpp"
#include "trajcast/dataset_io.hpp"
#include "trajcast/report.hpp"
#include "trajcast/rng.hpp"

namespace trajcast::train {

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMlp:
      return "mlp";
    case ModelKind::kCnn:
      return "cnn";
    case ModelKind::kSst:
      return "sst";
    case ModelKind::kSstShifted:
      return "sst-shifted";
    case ModelKind::kLstm:
      return "lstm";
  }
  return "unknown";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "cnn") return ModelKind::kCnn;
  if (name == "sst") return ModelKind::kSst;
  if (name == "sst-shifted") return ModelKind::kSstShifted;
  if (name == "lstm") return ModelKind::kLstm;
  throw ConfigError("unknown model '" + name +
                    "' (expected mlp, cnn, sst, sst-shifted or lstm)");
}

void ExperimentConfig::validate() const {
  if (model == ModelKind::kLstm) {
    if (encoder.has_value()) {
      throw ConfigError("lstm consumes raw coordinates; encoder must be n/a");
    }
  } else if (!encoder.has_value()) {
    throw ConfigError(std::string(model_kind_name(model)) +
                      " requires an encoder");
  }
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
}

namespace {

template <typename M>
class ModelRegressor final : public Regressor {
 public:
  explicit ModelRegressor(M model) : model_(std::move(model)) {}

  nn::Tensor<float> forward(const nn::Tensor<float>& input) override {
    return model_.forward(input);
  }
  void backward(const nn::Tensor<float>& dpred) override {
    model_.backward(dpred);
  }
  std::vector<nn::Parameter<float>*> params() override {
    return model_.params();
  }
  void set_training(bool training) override {
    if constexpr (requires(M & m) { m.set_training(training); }) {
      model_.set_training(training);
    }
  }

 private:
  M model_;
};

template <typename M>
std::unique_ptr<Regressor> wrap(M model) {
  return std::make_unique<ModelRegressor<M>>(std::move(model));
}

}  // namespace

std::unique_ptr<Regressor> make_regressor(const ExperimentConfig& cfg,
                                          std::size_t resolution) {
  switch (cfg.model) {
    case ModelKind::kMlp: {
      models::MlpConfig mc = cfg.hp.mlp;
      mc.input_dim = resolution * resolution;
      return wrap(models::MlpModel<float>(mc, cfg.seed));
    }
    case ModelKind::kCnn: {
      models::CnnConfig cc = cfg.hp.cnn;
      cc.side = resolution;
      return wrap(models::CnnModel<float>(cc, cfg.seed));
    }
    case ModelKind::kSst:
    case ModelKind::kSstShifted: {
      sst::SstConfig sc = cfg.hp.sst;
      sc.grid_size = resolution;
      sc.use_shift = cfg.model == ModelKind::kSstShifted;
      return wrap(sst::SstModel<float>(sc, cfg.seed));
    }
    case ModelKind::kLstm:
      return wrap(models::LstmModel<float>(cfg.hp.lstm, cfg.seed));
  }
  throw ConfigError("unhandled model kind");
}

namespace {

void append_targets(SampleBlock& block, float m, float n, float inv_res) {
  block.targets.push_back(m * inv_res);
  block.targets.push_back(n * inv_res);
  ++block.count;
}

SampleBlock vectorize_grid_block(const std::vector<Sample>& samples,
                                 std::size_t resolution) {
  SampleBlock block;
  const std::size_t dim = resolution * resolution;
  block.inputs.reserve(samples.size() * dim);
  block.targets.reserve(samples.size() * 2);
  const float inv_res = 1.0f / static_cast<float>(resolution);
  for (const Sample& s : samples) {
    if (s.grid.values.size() != dim) {
      throw DataError("grid sample does not match dataset resolution");
    }
    block.inputs.insert(block.inputs.end(), s.grid.values.begin(),
                        s.grid.values.end());
    append_targets(block, s.target_m, s.target_n, inv_res);
  }
  return block;
}

SampleBlock vectorize_seq_block(const std::vector<SequenceSample>& samples,
                                std::size_t resolution, std::size_t seq_len) {
  SampleBlock block;
  block.inputs.reserve(samples.size() * seq_len * 3);
  block.targets.reserve(samples.size() * 2);
  const float inv_res = 1.0f / static_cast<float>(resolution);
  for (const SequenceSample& s : samples) {
    const nn::Tensor<float> rows =
        models::lstm_prepare_input<float>(s.cells, resolution, seq_len);
    block.inputs.insert(block.inputs.end(), rows.values().begin(),
                        rows.values().end());
    append_targets(block, s.target_m, s.target_n, inv_res);
  }
  return block;
}

}  // namespace

VectorizedData vectorize(const GridDataset& ds) {
  VectorizedData data;
  data.resolution = ds.resolution;
  data.input_dim = ds.resolution * ds.resolution;
  data.train = vectorize_grid_block(ds.split.train, ds.resolution);
  data.validation = vectorize_grid_block(ds.split.validation, ds.resolution);
  data.test = vectorize_grid_block(ds.split.test, ds.resolution);
  return data;
}

VectorizedData vectorize(const SequenceDataset& ds, std::size_t seq_len) {
  VectorizedData data;
  data.resolution = ds.resolution;
  data.input_dim = seq_len * 3;
  data.train = vectorize_seq_block(ds.split.train, ds.resolution, seq_len);
  data.validation =
      vectorize_seq_block(ds.split.validation, ds.resolution, seq_len);
  data.test = vectorize_seq_block(ds.split.test, ds.resolution, seq_len);
  return data;
}

namespace {

nn::Tensor<float> gather_rows(const std::vector<float>& flat,
                              std::size_t row_dim,
                              const std::size_t* idx, std::size_t count) {
  nn::Tensor<float> out({count, row_dim});
  for (std::size_t i = 0; i < count; ++i) {
    const float* src = flat.data() + idx[i] * row_dim;
    std::copy(src, src + row_dim, out.data() + i * row_dim);
  }
  return out;
}

nn::Tensor<float> slice_rows(const std::vector<float>& flat,
                             std::size_t row_dim, std::size_t start,
                             std::size_t count) {
  nn::Tensor<float> out({count, row_dim});
  std::copy(flat.data() + start * row_dim,
            flat.data() + (start + count) * row_dim, out.data());
  return out;
}

}  // namespace

double evaluate_mse_normalized(Regressor& model, const SampleBlock& block,
                               std::size_t input_dim, std::size_t batch_size) {
  if (block.count == 0) throw DataError("cannot evaluate on an empty sample set");
  model.set_training(false);
  double sq_sum = 0.0;
  for (std::size_t start = 0; start < block.count; start += batch_size) {
    const std::size_t n = std::min(batch_size, block.count - start);
    const nn::Tensor<float> in = slice_rows(block.inputs, input_dim, start, n);
    const nn::Tensor<float> pred = model.forward(in);
    for (std::size_t i = 0; i < n * 2; ++i) {
      const double d = static_cast<double>(pred[i]) -
                       static_cast<double>(block.targets[start * 2 + i]);
      sq_sum += d * d;
    }
  }
  return sq_sum / static_cast<double>(block.count * 2);
}

double evaluate_mse_px2(Regressor& model, const SampleBlock& block,
                        std::size_t input_dim, std::size_t resolution,
                        std::size_t batch_size) {
  const double normalized =
      evaluate_mse_normalized(model, block, input_dim, batch_size);
  return normalized * static_cast<double>(resolution * resolution);
}

TrainResult train_model(const ExperimentConfig& cfg,
                        const VectorizedData& data) {
  cfg.validate();
  if (data.train.count == 0 || data.validation.count == 0) {
    throw DataError("training requires non-empty train and validation splits");
  }

  const auto t0 = std::chrono::steady_clock::now();
  TrainResult result;
  result.report.cfg = cfg;
  result.model = make_regressor(cfg, data.resolution);
  Regressor& model = *result.model;

  nn::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.learning_rate;
  nn::Adam<float> optimizer(model.params(), adam_cfg);

  Rng shuffle_rng(cfg.seed);
  std::vector<std::size_t> order(data.train.count);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<nn::Tensor<float>> best_params;
  std::size_t epochs_since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    model.set_training(true);
    double train_sq_sum = 0.0;
    for (std::size_t start = 0; start < data.train.count;
         start += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, data.train.count - start);
      const nn::Tensor<float> in =
          gather_rows(data.train.inputs, data.input_dim, order.data() + start, n);
      const nn::Tensor<float> tgt =
          gather_rows(data.train.targets, 2, order.data() + start, n);
      const nn::Tensor<float> pred = model.forward(in);
      nn::Tensor<float> dpred;
      const float loss = nn::mse_loss(pred, tgt, &dpred);
      if (!std::isfinite(loss)) {
        throw DataError("non-finite training loss at epoch " +
                        std::to_string(epoch) + "; aborting");
      }
      train_sq_sum += static_cast<double>(loss) * static_cast<double>(n * 2);
      model.backward(dpred);
      optimizer.step();
    }
    result.report.train_loss.push_back(
        train_sq_sum / static_cast<double>(data.train.count * 2));

    const double val = evaluate_mse_normalized(model, data.validation,
                                               data.input_dim, cfg.batch_size);
    result.report.val_loss.push_back(val);

    if (val < best_val) {
      best_val = val;
      result.report.best_epoch = epoch;
      epochs_since_best = 0;
      best_params.clear();
      for (nn::Parameter<float>* p : model.params()) {
        best_params.push_back(p->value);
      }
    } else {
      ++epochs_since_best;
      if (epochs_since_best > cfg.patience) break;
    }
  }

  const std::vector<nn::Parameter<float>*> params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i]->value = best_params[i];
  }

  if (data.test.count > 0) {
    result.report.test_mse_px2 = evaluate_mse_px2(
        model, data.test, data.input_dim, data.resolution, cfg.batch_size);
  }
  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

namespace {

namespace fs = std::filesystem;

std::string cell_stem(ModelKind model, std::optional<Encoder> encoder) {
  std::string stem = model_kind_name(model);
  if (encoder) {
    stem += "_";
    stem += encoder_name(*encoder);
  }
  return stem;
}

void write_cell_artifacts(const std::string& out_dir, const std::string& stem,
                          TrainResult& result) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  report::write_text_file(report::train_report_text(result.report),
                          (fs::path(out_dir) / (stem + ".report.txt")).string());
  save_checkpoint(result.model->params(),
                  (fs::path(out_dir) / (stem + ".tckp")).string());
}

VectorizedData load_grid_vectorized(const std::string& path, Encoder expect) {
  GridDataset ds = read_grid_dataset(path);
  if (ds.encoder != expect) {
    throw DataError("'" + path + "' holds " +
                    std::string(encoder_name(ds.encoder)) +
                    " encoding, expected " + encoder_name(expect));
  }
  return vectorize(ds);
}

}  // namespace

MetricsTable run_matrix(const ExperimentConfig& base, const DatasetPaths& paths,
                        const std::string& out_dir) {
  const std::array<std::pair<Encoder, const std::string*>, 3> encoded = {
      {{Encoder::kBinary, &paths.binary},
       {Encoder::kLinear, &paths.linear},
       {Encoder::kQuadratic, &paths.quadratic}}};

  MetricsTable table;
  for (ModelKind kind : {ModelKind::kMlp, ModelKind::kCnn, ModelKind::kSst}) {
    for (const auto& [encoder, path] : encoded) {
      ExperimentConfig cfg = base;
      cfg.model = kind;
      cfg.encoder = encoder;
      const VectorizedData data = load_grid_vectorized(*path, encoder);
      TrainResult result = train_model(cfg, data);
      write_cell_artifacts(out_dir, cell_stem(kind, encoder), result);
      table.cells.push_back({kind, encoder, result.report.test_mse_px2});
    }
  }
  {
    ExperimentConfig cfg = base;
    cfg.model = ModelKind::kLstm;
    cfg.encoder.reset();
    const VectorizedData data =
        vectorize(read_sequence_dataset(paths.sequences), cfg.hp.lstm.seq_len);
    TrainResult result = train_model(cfg, data);
    write_cell_artifacts(out_dir, cell_stem(ModelKind::kLstm, std::nullopt),
                         result);
    table.cells.push_back(
        {ModelKind::kLstm, std::nullopt, result.report.test_mse_px2});
  }
  if (!out_dir.empty()) {
    report::write_matrix_csv(table,
                             (fs::path(out_dir) / "matrix.csv").string());
  }
  return table;
}

std::vector<AblationPair> run_shift_ablation(const ExperimentConfig& base,
                                             const DatasetPaths& paths,
                                             const std::string& out_dir) {
  const std::array<std::pair<Encoder, const std::string*>, 3> encoded = {
      {{Encoder::kBinary, &paths.binary},
       {Encoder::kLinear, &paths.linear},
       {Encoder::kQuadratic, &paths.quadratic}}};

  std::vector<AblationPair> pairs;
  for (const auto& [encoder, path] : encoded) {
    const VectorizedData data = load_grid_vectorized(*path, encoder);
    AblationPair pair;
    pair.encoder = encoder;
    for (ModelKind kind : {ModelKind::kSst, ModelKind::kSstShifted}) {
      ExperimentConfig cfg = base;
      cfg.model = kind;
      cfg.encoder = encoder;
      TrainResult result = train_model(cfg, data);
      write_cell_artifacts(out_dir, cell_stem(kind, encoder), result);
      (kind == ModelKind::kSst ? pair.sst_mse : pair.shifted_mse) =
          result.report.test_mse_px2;
    }
    pairs.push_back(pair);
  }
  if (!out_dir.empty()) {
    report::write_ablation_csv(
        pairs, (fs::path(out_dir) / "ablation.csv").string());
  }
  return pairs;
}

}  // namespace trajcast::train
