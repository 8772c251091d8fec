#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcvad/cli/run_config.hpp"

using namespace mcvad;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return MCVAD_CLI_PATH; }

int run(const std::string& args, std::string* err_out = nullptr) {
  fs::path errfile = fs::temp_directory_path() / "mcvad_cli_err.txt";
  std::string cmd = std::string(cli_path()) + " " + args + " 2>" + errfile.string() + " >/dev/null";
  int rc = std::system(cmd.c_str());
  if (err_out) {
    std::ifstream in(errfile);
    std::stringstream ss;
    ss << in.rdbuf();
    *err_out = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "mcvad_cli_work";
  return dir;
}

std::string tiny_config(const fs::path& dir) {
  nlohmann::json j = {
      {"seed", 5},
      {"out", (dir / "run").string()},
      {"data",
       {{"root", (dir / "data").string()},
        {"train_scenes", 2},
        {"test_scenes", 2},
        {"frames_per_scene", 16},
        {"sprites_per_scene", 2},
        {"anomaly_rate", 0.8}}},
      {"model",
       {{"token_dim", 32}, {"enc_depth", 2}, {"dec_depth", 1}, {"heads", 2}, {"ffn_mult", 2},
        {"mask_ratio", 0.5}, {"streams", {"masked", "whole", "partial"}}}},
      {"train", {{"batch_size", 32}, {"epochs", 2}, {"motion_epochs", 2}}},
      {"ablate", {{"seeds", {1}}, {"epochs", 1}}}};
  fs::path cfg = dir / "config.json";
  std::ofstream out(cfg);
  out << j.dump(2);
  return cfg.string();
}

}  // namespace

TEST_CASE("stream flag parsing covers the ablation rows") {
  CHECK(cli::parse_streams("masked,whole,partial") == StreamSet{true, true, true});
  CHECK(cli::parse_streams("masked") == StreamSet{true, false, false});
  CHECK(cli::parse_streams("none") == StreamSet{false, false, false});
  CHECK(cli::parse_streams("") == StreamSet{false, false, false});
  CHECK_THROWS_AS(cli::parse_streams("masked,bogus"), Error);
  CHECK(cli::streams_to_string({true, true, false}) == "masked,whole");
  CHECK(cli::streams_to_string({false, false, false}) == "none");
}

TEST_CASE("run config round-trips through json") {
  cli::RunConfig cfg;
  cfg.seed = 9;
  cfg.model.streams = {true, false, true};
  cfg.eval.weights = {0.05, 0.94};
  cli::RunConfig back = cli::RunConfig::from_json(cfg.to_json());
  CHECK(back.seed == 9);
  CHECK(back.model.streams == cfg.model.streams);
  CHECK(back.eval.weights.lambda_a == 0.05);
  CHECK(back.train.lr == 1.5e-4);
  CHECK(back.train.batch_size == 128);
}

TEST_CASE("cli pipeline: generate, train, eval, plot on a tiny config") {
  fs::path dir = work_dir();
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string cfg = tiny_config(dir);

  SUBCASE("full pipeline produces the documented artifacts") {
    REQUIRE(run("generate --config " + cfg) == 0);
    CHECK(fs::exists(dir / "data" / "train" / "manifest.json"));
    CHECK(fs::exists(dir / "data" / "test" / "manifest.json"));

    // train split carries only label 0
    nlohmann::json manifest;
    std::ifstream(dir / "data" / "train" / "manifest.json") >> manifest;
    for (const auto& e : manifest.at("entries")) CHECK(e.at("label").get<int>() == 0);

    // regenerating with the same seed reproduces the manifest byte-for-byte
    std::string before = read_file(dir / "data" / "train" / "manifest.json");
    REQUIRE(run("generate --config " + cfg + " --force") == 0);
    CHECK(read_file(dir / "data" / "train" / "manifest.json") == before);

    REQUIRE(run("train --config " + cfg) == 0);
    CHECK(fs::exists(dir / "run" / "appearance.ckpt"));
    CHECK(fs::exists(dir / "run" / "motion.ckpt"));
    CHECK(fs::exists(dir / "run" / "appearance_log.jsonl"));
    CHECK(fs::exists(dir / "run" / "config.json"));

    REQUIRE(run("eval --config " + cfg) == 0);
    CHECK(fs::exists(dir / "run" / "scores.csv"));
    CHECK(fs::exists(dir / "run" / "summary.json"));
    nlohmann::json summary;
    std::ifstream(dir / "run" / "summary.json") >> summary;
    double auc = summary.at("auroc").get<double>();
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
    CHECK(summary.contains("auroc_flow_only"));

    // rerunning eval reproduces the CSV byte-for-byte
    std::string csv1 = read_file(dir / "run" / "scores.csv");
    REQUIRE(run("eval --config " + cfg) == 0);
    CHECK(read_file(dir / "run" / "scores.csv") == csv1);

    REQUIRE(run("plot --config " + cfg) == 0);
    CHECK(fs::exists(dir / "run" / "plots"));
    int pngs = 0;
    for (auto& p : fs::directory_iterator(dir / "run" / "plots"))
      pngs += p.path().extension() == ".png" ? 1 : 0;
    CHECK(pngs > 0);
  }

  SUBCASE("generate without force refuses to overwrite") {
    REQUIRE(run("generate --config " + cfg) == 0);
    std::string err;
    CHECK(run("generate --config " + cfg, &err) != 0);
    CHECK(err.find("already exists") != std::string::npos);
    CHECK(err.find("error") != std::string::npos);  // machine-readable record
  }

  SUBCASE("motion off emits a single checkpoint") {
    REQUIRE(run("generate --config " + cfg) == 0);
    REQUIRE(run("train --config " + cfg + " --motion off --out " + (dir / "run2").string()) == 0);
    CHECK(fs::exists(dir / "run2" / "appearance.ckpt"));
    CHECK(!fs::exists(dir / "run2" / "motion.ckpt"));
  }

  SUBCASE("eval before train fails with a json error record") {
    REQUIRE(run("generate --config " + cfg) == 0);
    std::string err;
    CHECK(run("eval --config " + cfg + " --out " + (dir / "empty").string(), &err) != 0);
    CHECK(err.find("{\"error\"") != std::string::npos);
  }

  SUBCASE("unknown flags fail") { CHECK(run("eval --bogus-flag 3") != 0); }
}
