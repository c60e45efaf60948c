#include "trajcast/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "trajcast/errors.hpp"

namespace trajcast {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& scope, const std::string& key) {
  throw ConfigError("unknown config key '" +
                    (scope.empty() ? key : scope + "." + key) + "'");
}

void expect_keys(const json& obj, const std::string& scope,
                 std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) {
      if (key == k) {
        ok = true;
        break;
      }
    }
    if (!ok) bad_key(scope, key);
  }
}

template <typename T>
void read_number(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ConfigError(std::string("config key '") + key + "' must be a number");
  }
  out = v.get<T>();
}

void read_string(const json& obj, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_string()) {
    throw ConfigError(std::string("config key '") + key + "' must be a string");
  }
  out = obj.at(key).get<std::string>();
}

void read_bool(const json& obj, const char* key, bool& out) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_boolean()) {
    throw ConfigError(std::string("config key '") + key + "' must be a bool");
  }
  out = obj.at(key).get<bool>();
}

void read_size_list(const json& obj, const char* key,
                    std::vector<std::size_t>& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_array()) {
    throw ConfigError(std::string("config key '") + key +
                      "' must be an array of integers");
  }
  out.clear();
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) {
      throw ConfigError(std::string("config key '") + key +
                        "' must hold non-negative integers");
    }
    out.push_back(e.get<std::size_t>());
  }
}

void parse_bbox(const json& obj, BoundingBox& bbox) {
  expect_keys(obj, "bbox", {"lon_min", "lon_max", "lat_min", "lat_max"});
  read_number(obj, "lon_min", bbox.lon_min);
  read_number(obj, "lon_max", bbox.lon_max);
  read_number(obj, "lat_min", bbox.lat_min);
  read_number(obj, "lat_max", bbox.lat_max);
  if (!(bbox.lon_min < bbox.lon_max) || !(bbox.lat_min < bbox.lat_max)) {
    throw ConfigError("bbox must have lon_min < lon_max and lat_min < lat_max");
  }
}

void parse_synthetic(const json& obj, SyntheticConfig& synth) {
  expect_keys(obj, "synthetic",
              {"count", "min_len", "max_len", "step_sigma"});
  read_number(obj, "count", synth.count);
  read_number(obj, "min_len", synth.min_len);
  read_number(obj, "max_len", synth.max_len);
  read_number(obj, "step_sigma", synth.step_sigma);
}

void parse_train(const json& obj, train::ExperimentConfig& exp) {
  expect_keys(obj, "train",
              {"model", "encoder", "epochs", "batch_size", "learning_rate",
               "patience", "seed"});
  std::string model = train::model_kind_name(exp.model);
  read_string(obj, "model", model);
  exp.model = train::model_kind_from_name(model);
  if (obj.contains("encoder")) {
    const std::string name = obj.at("encoder").get<std::string>();
    exp.encoder = name == "n/a" ? std::nullopt
                                : std::optional<Encoder>(encoder_from_name(name));
  }
  if (exp.model == train::ModelKind::kLstm) exp.encoder.reset();
  read_number(obj, "epochs", exp.epochs);
  read_number(obj, "batch_size", exp.batch_size);
  read_number(obj, "learning_rate", exp.learning_rate);
  read_number(obj, "patience", exp.patience);
  read_number(obj, "seed", exp.seed);
}

void parse_sst(const json& obj, sst::SstConfig& sst_cfg) {
  expect_keys(obj, "sst",
              {"patch_size", "embed_dim", "heads", "depths", "windows",
               "mlp_ratio", "rel_pos_bias"});
  read_number(obj, "patch_size", sst_cfg.patch_size);
  read_number(obj, "embed_dim", sst_cfg.embed_dim);
  read_number(obj, "heads", sst_cfg.heads);
  read_size_list(obj, "depths", sst_cfg.depths);
  read_size_list(obj, "windows", sst_cfg.windows);
  read_number(obj, "mlp_ratio", sst_cfg.mlp_ratio);
  read_bool(obj, "rel_pos_bias", sst_cfg.rel_pos_bias);
}

void parse_mlp(const json& obj, models::MlpConfig& mlp) {
  expect_keys(obj, "mlp", {"hidden", "hidden_layers", "dropout"});
  read_number(obj, "hidden", mlp.hidden);
  read_number(obj, "hidden_layers", mlp.hidden_layers);
  read_number(obj, "dropout", mlp.dropout);
}

void parse_cnn(const json& obj, models::CnnConfig& cnn) {
  expect_keys(obj, "cnn", {"channels", "kernel", "stride", "pad", "fc_dim"});
  read_number(obj, "channels", cnn.channels);
  read_number(obj, "kernel", cnn.kernel);
  read_number(obj, "stride", cnn.stride);
  read_number(obj, "pad", cnn.pad);
  read_number(obj, "fc_dim", cnn.fc_dim);
}

void parse_lstm(const json& obj, models::LstmConfig& lstm) {
  expect_keys(obj, "lstm", {"hidden", "seq_len"});
  read_number(obj, "hidden", lstm.hidden);
  read_number(obj, "seq_len", lstm.seq_len);
}

}  // namespace

CliConfig parse_cli_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  expect_keys(root, "",
              {"bbox", "grid_size", "sample_count", "seed", "synthetic",
               "train", "sst", "mlp", "cnn", "lstm", "dataset_dir",
               "out_dir"});

  CliConfig cfg;
  if (root.contains("bbox")) parse_bbox(root.at("bbox"), cfg.bbox);
  read_number(root, "grid_size", cfg.grid_size);
  if (cfg.grid_size == 0) throw ConfigError("grid_size must be positive");
  read_number(root, "sample_count", cfg.sample_count);
  read_number(root, "seed", cfg.seed);
  if (root.contains("synthetic")) {
    parse_synthetic(root.at("synthetic"), cfg.synthetic);
  }
  if (root.contains("train")) parse_train(root.at("train"), cfg.experiment);
  if (root.contains("sst")) parse_sst(root.at("sst"), cfg.experiment.hp.sst);
  if (root.contains("mlp")) parse_mlp(root.at("mlp"), cfg.experiment.hp.mlp);
  if (root.contains("cnn")) parse_cnn(root.at("cnn"), cfg.experiment.hp.cnn);
  if (root.contains("lstm")) {
    parse_lstm(root.at("lstm"), cfg.experiment.hp.lstm);
  }
  read_string(root, "dataset_dir", cfg.dataset_dir);
  read_string(root, "out_dir", cfg.out_dir);

  // Mirror the shared geometry/seed into the dependent sections.
  cfg.synthetic.resolution = cfg.grid_size;
  cfg.synthetic.bbox = cfg.bbox;
  cfg.synthetic.seed = cfg.seed;
  return cfg;
}

CliConfig load_cli_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_cli_config(buf.str());
}

}  // namespace trajcast
