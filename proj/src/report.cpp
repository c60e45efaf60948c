#include "trajcast/report.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "io_util.hpp"

namespace trajcast::report {

std::string format_double(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Prefer the shortest representation that parses back exactly.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(probe, "%lf", &back);
    if (back == v) return probe;
  }
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

std::string encoder_field(const std::optional<Encoder>& e) {
  return e ? encoder_name(*e) : "n/a";
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_mse(const std::string& text, const std::string& path) {
  double value = 0.0;
  const auto* begin = text.data();
  const auto* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError("'" + path + "': bad mse value '" + text + "'");
  }
  return value;
}

}  // namespace

void write_matrix_csv(const train::MetricsTable& table,
                      const std::string& path) {
  std::string text = "model,encoder,mse\n";
  for (const train::MetricsCell& cell : table.cells) {
    text += train::model_kind_name(cell.model);
    text += ",";
    text += encoder_field(cell.encoder);
    text += ",";
    text += format_double(cell.mse_px2);
    text += "\n";
  }
  write_text_file(text, path);
}

train::MetricsTable read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(in, line) || split_fields(line) !=
                                     std::vector<std::string>{"model",
                                                              "encoder",
                                                              "mse"}) {
    throw FormatError("'" + path + "': expected header 'model,encoder,mse'");
  }
  train::MetricsTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw FormatError("'" + path + "': expected 3 fields, got line '" +
                        line + "'");
    }
    train::MetricsCell cell;
    cell.model = train::model_kind_from_name(fields[0]);
    cell.encoder = fields[1] == "n/a"
                       ? std::nullopt
                       : std::optional<Encoder>(encoder_from_name(fields[1]));
    cell.mse_px2 = parse_mse(fields[2], path);
    table.cells.push_back(cell);
  }
  if (table.cells.empty()) {
    throw FormatError("'" + path + "': no data rows");
  }
  return table;
}

std::string render_matrix_table(const train::MetricsTable& table) {
  const std::vector<Encoder> columns{Encoder::kBinary, Encoder::kLinear,
                                     Encoder::kQuadratic};
  std::map<train::ModelKind, std::map<int, double>> grid_rows;
  std::optional<double> lstm_value;
  for (const train::MetricsCell& cell : table.cells) {
    if (cell.encoder) {
      grid_rows[cell.model][static_cast<int>(*cell.encoder)] = cell.mse_px2;
    } else {
      lstm_value = cell.mse_px2;
    }
  }

  std::ostringstream out;
  out << std::left << std::setw(16) << "Model \\ Method";
  for (Encoder e : columns) {
    std::string title(encoder_name(e));
    title[0] = static_cast<char>(std::toupper(title[0]));
    out << std::right << std::setw(12) << title;
  }
  out << "\n";
  for (const auto& [model, row] : grid_rows) {
    out << std::left << std::setw(16) << train::model_kind_name(model);
    for (Encoder e : columns) {
      const auto it = row.find(static_cast<int>(e));
      out << std::right << std::setw(12);
      if (it == row.end()) {
        out << "-";
      } else {
        out << std::fixed << std::setprecision(4) << it->second
            << std::defaultfloat;
      }
    }
    out << "\n";
  }
  if (lstm_value) {
    out << std::left << std::setw(16) << "lstm" << std::right << std::setw(12)
        << "" << std::setw(12) << std::fixed << std::setprecision(4)
        << *lstm_value << std::defaultfloat << "\n";
  }
  return out.str();
}

void write_plot_csv(const train::MetricsTable& table,
                    const std::string& path) {
  std::string text = "encoder,model,mse\n";
  for (const train::MetricsCell& cell : table.cells) {
    text += encoder_field(cell.encoder);
    text += ",";
    text += train::model_kind_name(cell.model);
    text += ",";
    text += format_double(cell.mse_px2);
    text += "\n";
  }
  write_text_file(text, path);
}

void write_ablation_csv(const std::vector<train::AblationPair>& pairs,
                        const std::string& path) {
  std::string text = "encoder,sst_mse,shifted_mse\n";
  for (const train::AblationPair& p : pairs) {
    text += encoder_name(p.encoder);
    text += ",";
    text += format_double(p.sst_mse);
    text += ",";
    text += format_double(p.shifted_mse);
    text += "\n";
  }
  write_text_file(text, path);
}

std::string render_ablation_table(
    const std::vector<train::AblationPair>& pairs) {
  std::ostringstream out;
  out << std::left << std::setw(12) << "Encoder" << std::right << std::setw(12)
      << "SST" << std::setw(12) << "Shifted" << "\n";
  for (const train::AblationPair& p : pairs) {
    out << std::left << std::setw(12) << encoder_name(p.encoder) << std::right
        << std::setw(12) << std::fixed << std::setprecision(4) << p.sst_mse
        << std::setw(12) << p.shifted_mse << std::defaultfloat << "\n";
  }
  return out.str();
}

std::string train_report_text(const train::TrainReport& report) {
  std::ostringstream out;
  out << "model=" << train::model_kind_name(report.cfg.model) << "\n";
  out << "encoder=" << encoder_field(report.cfg.encoder) << "\n";
  out << "epochs_max=" << report.cfg.epochs << "\n";
  out << "batch_size=" << report.cfg.batch_size << "\n";
  out << "learning_rate=" << format_double(report.cfg.learning_rate) << "\n";
  out << "patience=" << report.cfg.patience << "\n";
  out << "seed=" << report.cfg.seed << "\n";
  out << "epochs_run=" << report.train_loss.size() << "\n";
  for (std::size_t i = 0; i < report.train_loss.size(); ++i) {
    out << "epoch." << (i + 1) << ".train=" << format_double(report.train_loss[i])
        << "\n";
    out << "epoch." << (i + 1) << ".val=" << format_double(report.val_loss[i])
        << "\n";
  }
  out << "best_epoch=" << report.best_epoch << "\n";
  out << "mse_units=pixel^2 (normalized mse * M^2, averaged over samples and "
         "both coordinates)\n";
  out << "test_mse_px2=" << format_double(report.test_mse_px2) << "\n";
  return out.str();
}

}  // namespace trajcast::report
