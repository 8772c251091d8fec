#pragma once

#include "mcvad/cli/run_config.hpp"

namespace mcvad::cli {

int cmd_generate(const RunConfig& cfg);
int cmd_train(const RunConfig& cfg);
int cmd_eval(const RunConfig& cfg);
int cmd_ablate(const RunConfig& cfg);
int cmd_plot(const RunConfig& cfg);

}  // namespace mcvad::cli
