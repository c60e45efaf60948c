#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trajcast/cli.hpp"
#include "trajcast/errors.hpp"
#include "trajcast/report.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

struct CommonOpts {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<std::string> encoder;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> learning_rate;
  std::optional<std::size_t> patience;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid_size;
  std::optional<std::size_t> count;
  std::optional<std::string> dataset_dir;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file");
  cmd->add_option("--model", opts.model,
                  "model: mlp, cnn, sst, sst-shifted or lstm");
  cmd->add_option("--encoder", opts.encoder,
                  "encoder: binary, linear, quadratic (or n/a)");
  cmd->add_option("--epochs", opts.epochs, "max training epochs");
  cmd->add_option("--batch-size", opts.batch_size, "minibatch size");
  cmd->add_option("--lr", opts.learning_rate, "Adam learning rate");
  cmd->add_option("--patience", opts.patience, "early-stopping patience");
  cmd->add_option("--seed", opts.seed, "experiment seed");
  cmd->add_option("--grid-size", opts.grid_size, "grid resolution M");
  cmd->add_option("--count", opts.count,
                  "trajectory count (sampled or generated)");
  cmd->add_option("--dataset-dir", opts.dataset_dir,
                  "directory holding/receiving dataset files");
  cmd->add_option("--out", opts.out_dir, "output directory root");
}

trajcast::CliConfig build_config(const CommonOpts& opts) {
  trajcast::CliConfig cfg;
  if (!opts.config_path.empty()) {
    cfg = trajcast::load_cli_config(opts.config_path);
  }
  if (opts.model) {
    cfg.experiment.model = trajcast::train::model_kind_from_name(*opts.model);
    if (cfg.experiment.model == trajcast::train::ModelKind::kLstm) {
      cfg.experiment.encoder.reset();
    }
  }
  if (opts.encoder) {
    cfg.experiment.encoder =
        *opts.encoder == "n/a"
            ? std::nullopt
            : std::optional<trajcast::Encoder>(
                  trajcast::encoder_from_name(*opts.encoder));
  }
  if (opts.epochs) cfg.experiment.epochs = *opts.epochs;
  if (opts.batch_size) cfg.experiment.batch_size = *opts.batch_size;
  if (opts.learning_rate) cfg.experiment.learning_rate = *opts.learning_rate;
  if (opts.patience) cfg.experiment.patience = *opts.patience;
  if (opts.seed) {
    cfg.experiment.seed = *opts.seed;
    cfg.seed = *opts.seed;
    cfg.synthetic.seed = *opts.seed;
  }
  if (opts.grid_size) {
    cfg.grid_size = *opts.grid_size;
    cfg.synthetic.resolution = *opts.grid_size;
  }
  if (opts.count) {
    cfg.sample_count = *opts.count;
    cfg.synthetic.count = *opts.count;
  }
  if (opts.dataset_dir) cfg.dataset_dir = *opts.dataset_dir;
  if (opts.out_dir) cfg.out_dir = *opts.out_dir;
  return cfg;
}

void print_summary(const trajcast::cli::IngestSummary& s) {
  std::cout << "rows_read=" << s.rows_read << " malformed=" << s.malformed
            << " in_bbox=" << s.in_bbox << " sampled=" << s.sampled << "\n";
  if (s.saturated) {
    std::cout << "warning: requested more trajectories than available; "
                 "kept all\n";
  }
  std::cout << "splits: train=" << s.train_count
            << " validation=" << s.validation_count << " test=" << s.test_count
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Grid-encoded taxi trajectory destination prediction: dataset "
      "pipeline, windowed-attention transformer and baselines"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string csv_path, checkpoint_path, dataset_path, matrix_path, plot_out;

  CLI::App* ingest = app.add_subcommand(
      "ingest", "Convert a taxi CSV into encoded dataset files");
  ingest->add_option("--csv", csv_path, "ECML-PKDD style CSV file")
      ->required();
  add_common(ingest, opts);

  CLI::App* synth = app.add_subcommand(
      "synth", "Generate synthetic trajectories and encode them");
  add_common(synth, opts);

  CLI::App* train_cmd =
      app.add_subcommand("train", "Train one model/encoder cell");
  add_common(train_cmd, opts);

  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Evaluate a checkpoint on a dataset's test split");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "TCKP checkpoint")
      ->required();
  eval_cmd->add_option("--dataset", dataset_path, "TGRD or TSEQ dataset file")
      ->required();
  add_common(eval_cmd, opts);

  CLI::App* matrix = app.add_subcommand(
      "matrix", "Train the full model x encoder comparison matrix");
  add_common(matrix, opts);

  CLI::App* ablation = app.add_subcommand(
      "ablation", "Compare SST against the shifted-window variant");
  add_common(ablation, opts);

  CLI::App* report_cmd = app.add_subcommand(
      "report", "Render a matrix CSV as a table and emit plot data");
  report_cmd->add_option("--matrix", matrix_path, "matrix.csv to render")
      ->required();
  report_cmd->add_option("--plot-out", plot_out, "where to write plot.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const trajcast::CliConfig cfg = build_config(opts);
      const std::string out = trajcast::cli::resolve_out_dir(cfg);
      print_summary(trajcast::cli::cmd_ingest(cfg, csv_path, out));
      std::cout << "datasets written to " << out << "\n";
    } else if (*synth) {
      const trajcast::CliConfig cfg = build_config(opts);
      const std::string out = trajcast::cli::resolve_out_dir(cfg);
      print_summary(trajcast::cli::cmd_synth(cfg, out));
      std::cout << "datasets written to " << out << "\n";
    } else if (*train_cmd) {
      const trajcast::CliConfig cfg = build_config(opts);
      const double mse = trajcast::cli::cmd_train(cfg);
      std::cout << "test_mse_px2=" << mse << "\n";
    } else if (*eval_cmd) {
      const trajcast::CliConfig cfg = build_config(opts);
      const double mse =
          trajcast::cli::cmd_eval(cfg, checkpoint_path, dataset_path);
      std::cout << "test_mse_px2=" << mse << "\n";
    } else if (*matrix) {
      const trajcast::CliConfig cfg = build_config(opts);
      const auto table = trajcast::cli::cmd_matrix(cfg);
      std::cout << trajcast::report::render_matrix_table(table);
    } else if (*ablation) {
      const trajcast::CliConfig cfg = build_config(opts);
      const auto pairs = trajcast::cli::cmd_ablation(cfg);
      std::cout << trajcast::report::render_ablation_table(pairs);
    } else if (*report_cmd) {
      std::cout << trajcast::cli::cmd_report(matrix_path, plot_out);
    }
  } catch (const trajcast::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const trajcast::IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const trajcast::DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
