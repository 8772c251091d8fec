#include "mcvad/cli/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace mcvad::cli {

namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

StreamSet parse_streams(const std::string& csv) {
  StreamSet s{false, false, false};
  if (csv.empty() || csv == "none") return s;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "masked")
      s.masked = true;
    else if (tok == "whole")
      s.whole = true;
    else if (tok == "partial")
      s.partial = true;
    else if (!tok.empty())
      throw Error("unknown stream '" + tok + "' (expected masked, whole, partial or none)");
  }
  return s;
}

std::string streams_to_string(const StreamSet& s) {
  if (!s.any()) return "none";
  std::string out;
  if (s.masked) out += "masked";
  if (s.whole) out += out.empty() ? "whole" : ",whole";
  if (s.partial) out += out.empty() ? "partial" : ",partial";
  return out;
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"seed", seed},
      {"out", out},
      {"motion", motion},
      {"data",
       {{"root", data.root},
        {"train_scenes", data.train_scenes},
        {"test_scenes", data.test_scenes},
        {"frames_per_scene", data.frames_per_scene},
        {"sprites_per_scene", data.sprites_per_scene},
        {"anomaly_rate", data.anomaly_rate},
        {"canvas", data.canvas},
        {"flow_mode", data.flow_mode},
        {"speed_min", data.speed_min},
        {"speed_max", data.speed_max},
        {"size_min", data.size_min},
        {"size_max", data.size_max},
        {"fast_multiplier", data.fast_multiplier},
        {"anomaly_mix", data.anomaly_mix},
        {"ensure_test_anomaly", data.ensure_test_anomaly},
        {"force", data.force}}},
      {"model", model.to_json()},
      {"train",
       {{"lr", train.lr},
        {"weight_decay", train.weight_decay},
        {"eps", train.eps},
        {"beta1", train.beta1},
        {"beta2", train.beta2},
        {"min_lr", train.min_lr},
        {"batch_size", train.batch_size},
        {"epochs", train.epochs},
        {"t0_epochs", train.t0_epochs},
        {"t_mult", train.t_mult},
        {"clip_norm", train.clip_norm},
        {"motion_epochs", motion_epochs}}},
      {"eval",
       {{"lambda_a", eval.weights.lambda_a},
        {"lambda_o", eval.weights.lambda_o},
        {"mask_draws", eval.mask_draws},
        {"mask_seed", eval.mask_seed},
        {"aggregation", eval.aggregation},
        {"normalize_per_video", eval.normalize_per_video}}},
      {"ablate", {{"seeds", ablate.seeds}, {"epochs", ablate.epochs}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  read_if(j, "seed", c.seed);
  read_if(j, "out", c.out);
  read_if(j, "motion", c.motion);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    read_if(d, "root", c.data.root);
    read_if(d, "train_scenes", c.data.train_scenes);
    read_if(d, "test_scenes", c.data.test_scenes);
    read_if(d, "frames_per_scene", c.data.frames_per_scene);
    read_if(d, "sprites_per_scene", c.data.sprites_per_scene);
    read_if(d, "anomaly_rate", c.data.anomaly_rate);
    read_if(d, "canvas", c.data.canvas);
    read_if(d, "flow_mode", c.data.flow_mode);
    read_if(d, "speed_min", c.data.speed_min);
    read_if(d, "speed_max", c.data.speed_max);
    read_if(d, "size_min", c.data.size_min);
    read_if(d, "size_max", c.data.size_max);
    read_if(d, "fast_multiplier", c.data.fast_multiplier);
    read_if(d, "anomaly_mix", c.data.anomaly_mix);
    read_if(d, "ensure_test_anomaly", c.data.ensure_test_anomaly);
    read_if(d, "force", c.data.force);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    read_if(m, "token_dim", c.model.token_dim);
    read_if(m, "enc_depth", c.model.enc_depth);
    read_if(m, "dec_depth", c.model.dec_depth);
    read_if(m, "heads", c.model.heads);
    read_if(m, "ffn_mult", c.model.ffn_mult);
    read_if(m, "mask_ratio", c.model.mask_ratio);
    if (m.contains("streams")) {
      if (m.at("streams").is_array()) {
        std::string csv;
        for (const auto& s : m.at("streams"))
          csv += (csv.empty() ? "" : ",") + s.get<std::string>();
        c.model.streams = parse_streams(csv);
      } else {
        c.model.streams.masked = m.at("streams").at("masked").get<bool>();
        c.model.streams.whole = m.at("streams").at("whole").get<bool>();
        c.model.streams.partial = m.at("streams").at("partial").get<bool>();
      }
    }
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    read_if(t, "lr", c.train.lr);
    read_if(t, "weight_decay", c.train.weight_decay);
    read_if(t, "eps", c.train.eps);
    read_if(t, "beta1", c.train.beta1);
    read_if(t, "beta2", c.train.beta2);
    read_if(t, "min_lr", c.train.min_lr);
    read_if(t, "batch_size", c.train.batch_size);
    read_if(t, "epochs", c.train.epochs);
    read_if(t, "t0_epochs", c.train.t0_epochs);
    read_if(t, "t_mult", c.train.t_mult);
    read_if(t, "clip_norm", c.train.clip_norm);
    read_if(t, "motion_epochs", c.motion_epochs);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    read_if(e, "lambda_a", c.eval.weights.lambda_a);
    read_if(e, "lambda_o", c.eval.weights.lambda_o);
    read_if(e, "mask_draws", c.eval.mask_draws);
    read_if(e, "mask_seed", c.eval.mask_seed);
    read_if(e, "aggregation", c.eval.aggregation);
    read_if(e, "normalize_per_video", c.eval.normalize_per_video);
  }
  if (j.contains("ablate")) {
    const auto& a = j.at("ablate");
    read_if(a, "seeds", c.ablate.seeds);
    read_if(a, "epochs", c.ablate.epochs);
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
  return from_json(j);
}

void RunConfig::write_snapshot(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "config.json");
  require(out.good(), "cannot write config snapshot in " + dir);
  out << to_json().dump(2) << "\n";
}

}  // namespace mcvad::cli
