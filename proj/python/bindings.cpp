#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trajcast/cli.hpp"
#include "trajcast/dataset_io.hpp"
#include "trajcast/geo.hpp"
#include "trajcast/ingest.hpp"
#include "trajcast/train.hpp"

namespace py = pybind11;
using namespace trajcast;

namespace {

py::array_t<float> grid_to_array(const TrajectoryGrid& grid) {
  const auto m = static_cast<py::ssize_t>(grid.resolution);
  py::array_t<float> out({m, m});
  std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
  return out;
}

std::vector<CellIndex> to_cells(const std::vector<std::pair<int, int>>& raw) {
  std::vector<CellIndex> cells;
  cells.reserve(raw.size());
  for (const auto& [m, n] : raw) cells.push_back({m, n});
  return cells;
}

Trajectory to_trajectory(const std::vector<std::pair<double, double>>& pts) {
  Trajectory t;
  t.points.reserve(pts.size());
  for (const auto& [lon, lat] : pts) t.points.push_back({lon, lat});
  return t;
}

BoundingBox to_bbox(const std::tuple<double, double, double, double>& b) {
  return {std::get<0>(b), std::get<1>(b), std::get<2>(b), std::get<3>(b)};
}

py::dict report_to_dict(const train::TrainReport& report) {
  py::dict d;
  d["train_loss"] = report.train_loss;
  d["val_loss"] = report.val_loss;
  d["best_epoch"] = report.best_epoch;
  d["test_mse_px2"] = report.test_mse_px2;
  d["wall_seconds"] = report.wall_seconds;
  return d;
}

constexpr auto kDefaultBBox =
    std::make_tuple(kPortoBBox.lon_min, kPortoBBox.lon_max, kPortoBBox.lat_min,
                    kPortoBBox.lat_max);

}  // namespace

PYBIND11_MODULE(_trajcast, m) {
  m.doc() =
      "Trajectory grid encoders, the windowed-attention destination "
      "predictor and its training pipeline";

  py::register_exception<ConfigError>(m, "TrajcastConfigError",
                                      PyExc_ValueError);
  py::register_exception<DataError>(m, "TrajcastDataError", PyExc_ValueError);
  py::register_exception<IoError>(m, "TrajcastIoError", PyExc_OSError);

  m.def(
      "encode",
      [](const std::vector<std::pair<int, int>>& cells, std::size_t resolution,
         const std::string& encoder) {
        return grid_to_array(
            encode_cells(to_cells(cells), resolution,
                         encoder_from_name(encoder)));
      },
      py::arg("cells"), py::arg("resolution"), py::arg("encoder"),
      "Encode an ordered (row, col) cell sequence into an MxM grid");

  m.def(
      "trajectory_to_cells",
      [](const std::vector<std::pair<double, double>>& points,
         const std::tuple<double, double, double, double>& bbox,
         std::size_t resolution) {
        std::vector<std::pair<int, int>> out;
        for (const CellIndex& c : trajectory_to_cells(
                 to_trajectory(points), to_bbox(bbox), resolution)) {
          out.emplace_back(c.m, c.n);
        }
        return out;
      },
      py::arg("points"), py::arg("bbox") = kDefaultBBox,
      py::arg("resolution") = 40,
      "Map (lon, lat) points into 0-based (row, col) grid cells");

  m.def(
      "make_sample",
      [](const std::vector<std::pair<double, double>>& points,
         const std::tuple<double, double, double, double>& bbox,
         std::size_t resolution, const std::string& encoder) {
        const Sample s = make_sample(to_trajectory(points), to_bbox(bbox),
                                     resolution, encoder_from_name(encoder));
        return py::make_tuple(grid_to_array(s.grid),
                              py::make_tuple(s.target_m, s.target_n));
      },
      py::arg("points"), py::arg("bbox") = kDefaultBBox,
      py::arg("resolution") = 40, py::arg("encoder") = "quadratic",
      "Build one (input grid, destination cell) training sample");

  m.def(
      "generate_synthetic",
      [](std::size_t count, std::size_t resolution, std::size_t min_len,
         std::size_t max_len, double step_sigma, std::uint64_t seed) {
        SyntheticConfig cfg;
        cfg.count = count;
        cfg.resolution = resolution;
        cfg.min_len = min_len;
        cfg.max_len = max_len;
        cfg.step_sigma = step_sigma;
        cfg.seed = seed;
        std::vector<std::vector<std::pair<double, double>>> out;
        for (const Trajectory& t : generate_synthetic(cfg)) {
          std::vector<std::pair<double, double>> pts;
          for (const GpsPoint& p : t.points) pts.emplace_back(p.lon, p.lat);
          out.push_back(std::move(pts));
        }
        return out;
      },
      py::arg("count"), py::arg("resolution") = 40, py::arg("min_len") = 8,
      py::arg("max_len") = 60, py::arg("step_sigma") = 0.03,
      py::arg("seed") = 1,
      "Seeded bounded random walks as (lon, lat) point lists");

  m.def(
      "synth_datasets",
      [](const std::string& out_dir, std::size_t count, std::size_t resolution,
         std::size_t min_len, std::size_t max_len, double step_sigma,
         std::uint64_t seed) {
        CliConfig cfg;
        cfg.grid_size = resolution;
        cfg.seed = seed;
        cfg.synthetic = {count,      resolution, min_len, max_len,
                         step_sigma, cfg.bbox,   seed};
        const cli::IngestSummary s = cli::cmd_synth(cfg, out_dir);
        py::dict d;
        d["generated"] = s.rows_read;
        d["train"] = s.train_count;
        d["validation"] = s.validation_count;
        d["test"] = s.test_count;
        return d;
      },
      py::arg("out_dir"), py::arg("count"), py::arg("resolution") = 40,
      py::arg("min_len") = 8, py::arg("max_len") = 60,
      py::arg("step_sigma") = 0.03, py::arg("seed") = 1,
      "Generate and write the encoded dataset files (3x TGRD + TSEQ)");

  m.def(
      "train",
      [](const std::string& dataset_dir, const std::string& model,
         const std::string& encoder, std::size_t epochs,
         std::size_t batch_size, double learning_rate, std::size_t patience,
         std::uint64_t seed, std::size_t embed_dim, std::size_t heads) {
        CliConfig cfg;
        cfg.experiment.model = train::model_kind_from_name(model);
        cfg.experiment.encoder =
            encoder == "n/a" ? std::nullopt
                             : std::optional<Encoder>(encoder_from_name(encoder));
        if (cfg.experiment.model == train::ModelKind::kLstm) {
          cfg.experiment.encoder.reset();
        }
        cfg.experiment.epochs = epochs;
        cfg.experiment.batch_size = batch_size;
        cfg.experiment.learning_rate = learning_rate;
        cfg.experiment.patience = patience;
        cfg.experiment.seed = seed;
        cfg.experiment.hp.sst.embed_dim = embed_dim;
        cfg.experiment.hp.sst.heads = heads;
        cfg.experiment.validate();
        cfg.dataset_dir = dataset_dir;

        const train::DatasetPaths paths = cli::dataset_paths(dataset_dir);
        train::VectorizedData data;
        if (cfg.experiment.model == train::ModelKind::kLstm) {
          data = train::vectorize(read_sequence_dataset(paths.sequences),
                                  cfg.experiment.hp.lstm.seq_len);
        } else {
          const std::string& path =
              *cfg.experiment.encoder == Encoder::kBinary    ? paths.binary
              : *cfg.experiment.encoder == Encoder::kLinear ? paths.linear
                                                            : paths.quadratic;
          data = train::vectorize(read_grid_dataset(path));
        }
        const train::TrainResult result =
            train::train_model(cfg.experiment, data);
        return report_to_dict(result.report);
      },
      py::arg("dataset_dir"), py::arg("model") = "sst",
      py::arg("encoder") = "quadratic", py::arg("epochs") = 10,
      py::arg("batch_size") = 64, py::arg("learning_rate") = 1e-3,
      py::arg("patience") = 5, py::arg("seed") = 1, py::arg("embed_dim") = 64,
      py::arg("heads") = 4,
      "Train one model/encoder cell on previously written dataset files");

  m.def(
      "report_table",
      [](const std::string& matrix_csv) { return cli::cmd_report(matrix_csv); },
      py::arg("matrix_csv"),
      "Render a matrix CSV as an aligned text table (writes plot.csv)");
}
