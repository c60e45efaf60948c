#include "trajcast/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trajcast/checkpoint.hpp"
#include "trajcast/dataset_io.hpp"
#include "trajcast/report.hpp"

namespace trajcast::cli {

namespace fs = std::filesystem;

std::string resolve_out_dir(const CliConfig& cfg) {
  if (const char* root = std::getenv("TRAJCAST_OUT_ROOT")) {
    if (*root != '\0') return root;
  }
  return cfg.out_dir;
}

train::DatasetPaths dataset_paths(const std::string& dataset_dir) {
  train::DatasetPaths paths;
  paths.binary = (fs::path(dataset_dir) / "binary.tgrd").string();
  paths.linear = (fs::path(dataset_dir) / "linear.tgrd").string();
  paths.quadratic = (fs::path(dataset_dir) / "quadratic.tgrd").string();
  paths.sequences = (fs::path(dataset_dir) / "sequences.tseq").string();
  return paths;
}

namespace {

const std::vector<Encoder> kAllEncoders{Encoder::kBinary, Encoder::kLinear,
                                        Encoder::kQuadratic};

IngestSummary write_datasets(const std::vector<Trajectory>& trajectories,
                             const CliConfig& cfg,
                             const std::string& out_dir,
                             IngestSummary summary) {
  const EncodedDatasets datasets = encode_datasets(
      trajectories, cfg.bbox, cfg.grid_size, kAllEncoders, cfg.seed);
  fs::create_directories(out_dir);
  const train::DatasetPaths paths = dataset_paths(out_dir);
  write_grid_dataset(datasets.grids[0], paths.binary);
  write_grid_dataset(datasets.grids[1], paths.linear);
  write_grid_dataset(datasets.grids[2], paths.quadratic);
  write_sequence_dataset(datasets.sequences, paths.sequences);

  summary.train_count = datasets.sequences.split.train.size();
  summary.validation_count = datasets.sequences.split.validation.size();
  summary.test_count = datasets.sequences.split.test.size();

  std::ostringstream text;
  text << "rows_read=" << summary.rows_read << "\n"
       << "malformed=" << summary.malformed << "\n"
       << "in_bbox=" << summary.in_bbox << "\n"
       << "sampled=" << summary.sampled << "\n"
       << "saturated=" << (summary.saturated ? 1 : 0) << "\n"
       << "train=" << summary.train_count << "\n"
       << "validation=" << summary.validation_count << "\n"
       << "test=" << summary.test_count << "\n";
  report::write_text_file(text.str(),
                          (fs::path(out_dir) / "summary.txt").string());
  return summary;
}

}  // namespace

IngestSummary cmd_ingest(const CliConfig& cfg, const std::string& csv_path,
                         const std::string& out_dir) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw IoError("cannot open CSV '" + csv_path + "'");
  PortoCsvReader reader(in);
  std::vector<RawTripRecord> records;
  while (auto rec = reader.next()) records.push_back(std::move(*rec));

  IngestSummary summary;
  summary.rows_read = reader.rows_read();
  summary.malformed = reader.malformed_count();

  const std::vector<RawTripRecord> kept = filter_bbox(records, cfg.bbox);
  summary.in_bbox = kept.size();
  if (kept.empty()) {
    throw DataError("no trajectories inside the bbox in '" + csv_path + "'");
  }
  const std::vector<RawTripRecord> sampled = sample_trajectories(
      kept, cfg.sample_count, cfg.seed, &summary.saturated);
  summary.sampled = sampled.size();

  std::vector<Trajectory> trajectories;
  trajectories.reserve(sampled.size());
  for (const RawTripRecord& rec : sampled) {
    trajectories.push_back(Trajectory{rec.polyline});
  }
  return write_datasets(trajectories, cfg, out_dir, summary);
}

IngestSummary cmd_synth(const CliConfig& cfg, const std::string& out_dir) {
  if (cfg.synthetic.count == 0) {
    throw DataError("synthetic.count is zero: nothing to generate");
  }
  const std::vector<Trajectory> trajectories = generate_synthetic(cfg.synthetic);
  IngestSummary summary;
  summary.rows_read = trajectories.size();
  summary.in_bbox = trajectories.size();
  summary.sampled = trajectories.size();
  return write_datasets(trajectories, cfg, out_dir, summary);
}

namespace {

train::VectorizedData load_dataset_for(const train::ExperimentConfig& exp,
                                       const std::string& dataset_dir) {
  const train::DatasetPaths paths = dataset_paths(dataset_dir);
  if (exp.model == train::ModelKind::kLstm) {
    return train::vectorize(read_sequence_dataset(paths.sequences),
                            exp.hp.lstm.seq_len);
  }
  const std::string* path = nullptr;
  switch (*exp.encoder) {
    case Encoder::kBinary:
      path = &paths.binary;
      break;
    case Encoder::kLinear:
      path = &paths.linear;
      break;
    case Encoder::kQuadratic:
      path = &paths.quadratic;
      break;
  }
  GridDataset ds = read_grid_dataset(*path);
  return train::vectorize(ds);
}

}  // namespace

double cmd_train(const CliConfig& cfg) {
  train::ExperimentConfig exp = cfg.experiment;
  exp.validate();
  const train::VectorizedData data = load_dataset_for(exp, cfg.dataset_dir);
  train::TrainResult result = train::train_model(exp, data);

  const fs::path out = fs::path(resolve_out_dir(cfg)) / "train";
  fs::create_directories(out);
  std::string stem = train::model_kind_name(exp.model);
  if (exp.encoder) stem += std::string("_") + encoder_name(*exp.encoder);
  report::write_text_file(report::train_report_text(result.report),
                          (out / (stem + ".report.txt")).string());
  save_checkpoint(result.model->params(), (out / (stem + ".tckp")).string());
  return result.report.test_mse_px2;
}

double cmd_eval(const CliConfig& cfg, const std::string& checkpoint_path,
                const std::string& dataset_path) {
  std::ifstream probe(dataset_path, std::ios::binary);
  if (!probe) throw IoError("cannot open dataset '" + dataset_path + "'");
  char magic[4] = {};
  if (!probe.read(magic, 4)) {
    throw FormatError("'" + dataset_path + "': truncated file");
  }
  probe.close();

  train::ExperimentConfig exp = cfg.experiment;
  train::VectorizedData data;
  if (std::string(magic, 4) == "TSEQ") {
    exp.model = train::ModelKind::kLstm;
    exp.encoder.reset();
    data = train::vectorize(read_sequence_dataset(dataset_path),
                            exp.hp.lstm.seq_len);
  } else {
    GridDataset ds = read_grid_dataset(dataset_path);
    exp.encoder = ds.encoder;
    if (exp.model == train::ModelKind::kLstm) {
      throw ConfigError("configured model lstm cannot consume a grid dataset");
    }
    data = train::vectorize(ds);
  }
  exp.validate();

  auto model = train::make_regressor(exp, data.resolution);
  load_checkpoint(model->params(), checkpoint_path);
  return train::evaluate_mse_px2(*model, data.test, data.input_dim,
                                 data.resolution, exp.batch_size);
}

train::MetricsTable cmd_matrix(const CliConfig& cfg) {
  const fs::path out = fs::path(resolve_out_dir(cfg)) / "matrix";
  return train::run_matrix(cfg.experiment, dataset_paths(cfg.dataset_dir),
                           out.string());
}

std::vector<train::AblationPair> cmd_ablation(const CliConfig& cfg) {
  const fs::path out = fs::path(resolve_out_dir(cfg)) / "ablation";
  return train::run_shift_ablation(cfg.experiment,
                                   dataset_paths(cfg.dataset_dir),
                                   out.string());
}

std::string cmd_report(const std::string& matrix_csv,
                       const std::string& plot_out) {
  const train::MetricsTable table = report::read_matrix_csv(matrix_csv);
  const std::string plot_path =
      plot_out.empty()
          ? (fs::path(matrix_csv).parent_path() / "plot.csv").string()
          : plot_out;
  report::write_plot_csv(table, plot_path);
  return report::render_matrix_table(table);
}

}  // namespace trajcast::cli
