#pragma once

#include <string>
#include <vector>

#include "trajcast/train.hpp"

namespace trajcast::report {

// Shortest round-trippable decimal form; keeps emitted files byte-stable.
std::string format_double(double v);

// Long-form CSV, header "model,encoder,mse"; the LSTM row carries "n/a".
void write_matrix_csv(const train::MetricsTable& table,
                      const std::string& path);
train::MetricsTable read_matrix_csv(const std::string& path);

// Aligned model-by-method table in the style of the experiment summary.
std::string render_matrix_table(const train::MetricsTable& table);

// Plot-ready rows "encoder,model,mse" for downstream tooling.
void write_plot_csv(const train::MetricsTable& table, const std::string& path);

void write_ablation_csv(const std::vector<train::AblationPair>& pairs,
                        const std::string& path);
std::string render_ablation_table(const std::vector<train::AblationPair>& pairs);

// Line-oriented key=value form; volatile fields (wall time) are omitted so
// reruns with one seed are byte-identical.
std::string train_report_text(const train::TrainReport& report);

void write_text_file(const std::string& text, const std::string& path);

}  // namespace trajcast::report
