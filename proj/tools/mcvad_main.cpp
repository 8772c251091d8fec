#include <CLI11.hpp>

#include <iostream>

#include "mcvad/cli/commands.hpp"

using mcvad::cli::RunConfig;

namespace {

struct FlagOverrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> streams;
  std::optional<std::string> motion;
  std::optional<double> mask_ratio;
  std::optional<double> lambda_a, lambda_o;
  std::optional<int> mask_draws;
  std::optional<std::string> data_root;
  std::optional<int> epochs;
  bool force = false;
};

void add_common_flags(CLI::App* cmd, FlagOverrides& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
  cmd->add_option("--seed", f.seed, "run seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--data-root", f.data_root, "dataset root directory");
  cmd->add_option("--streams", f.streams,
                  "comma list of masked,whole,partial (or 'none' for the plain future baseline)");
  cmd->add_option("--motion", f.motion, "motion branch on|off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--mask-ratio", f.mask_ratio, "masking ratio in (0,1)");
  cmd->add_option("--lambda-a", f.lambda_a, "appearance score weight");
  cmd->add_option("--lambda-o", f.lambda_o, "flow score weight");
  cmd->add_option("--mask-draws", f.mask_draws, "mask draws averaged per object at inference");
  cmd->add_option("--epochs", f.epochs, "override training epochs");
}

RunConfig resolve(const FlagOverrides& f) {
  RunConfig cfg = f.config_path.empty() ? RunConfig{} : RunConfig::load(f.config_path);
  if (f.seed) {
    cfg.seed = *f.seed;
    cfg.train.seed = *f.seed;
  }
  if (f.out) cfg.out = *f.out;
  if (f.data_root) cfg.data.root = *f.data_root;
  if (f.streams) cfg.model.streams = mcvad::cli::parse_streams(*f.streams);
  if (f.motion) cfg.motion = (*f.motion == "on");
  if (f.mask_ratio) cfg.model.mask_ratio = *f.mask_ratio;
  if (f.lambda_a) cfg.eval.weights.lambda_a = *f.lambda_a;
  if (f.lambda_o) cfg.eval.weights.lambda_o = *f.lambda_o;
  if (f.mask_draws) cfg.eval.mask_draws = *f.mask_draws;
  if (f.epochs) cfg.train.epochs = *f.epochs;
  if (f.force) cfg.data.force = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-contextual video anomaly detection pipeline"};
  app.require_subcommand(1);

  FlagOverrides f;
  auto* generate = app.add_subcommand("generate", "synthesize train/test datasets");
  generate->add_flag("--force", f.force, "overwrite an existing manifest");
  auto* train = app.add_subcommand("train", "train the appearance and motion branches");
  auto* eval = app.add_subcommand("eval", "score a test split and report AUROC");
  auto* ablate = app.add_subcommand("ablate", "run the four-stream ablation over seeds");
  auto* plot = app.add_subcommand("plot", "export score curves and error maps");
  for (auto* cmd : {generate, train, eval, ablate, plot}) add_common_flags(cmd, f);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve(f);
    if (generate->parsed()) return mcvad::cli::cmd_generate(cfg);
    if (train->parsed()) return mcvad::cli::cmd_train(cfg);
    if (eval->parsed()) return mcvad::cli::cmd_eval(cfg);
    if (ablate->parsed()) return mcvad::cli::cmd_ablate(cfg);
    if (plot->parsed()) return mcvad::cli::cmd_plot(cfg);
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", {{"message", e.what()}}}};
    std::cerr << err.dump() << "\n";
    return 1;
  }
  return 2;
}
