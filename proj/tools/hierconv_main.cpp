// tools/hierconv_main.cpp

// Copyright 2026  The hierconv Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hierconv/commands.hpp"
#include "hierconv/errors.hpp"

namespace {

hierconv::config::ExperimentConfig load(const std::string& config_path,
                                        const std::vector<std::string>& sets) {
  std::ifstream in(config_path);
  if (!in) throw hierconv::IoError("cannot open config file '" + config_path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return hierconv::config::parse(
      hierconv::config::apply_overrides(text, sets));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hierconv: hierarchical conversation models for end-to-end spoken "
      "language understanding on synthetic dialog corpora"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string checkpoint_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "experiment config (json)")
        ->required();
    cmd->add_option("--set", sets,
                    "override a scalar config field, e.g. --set training.max_epochs=5");
  };

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic corpus");
  add_common(gen);
  CLI::App* train = app.add_subcommand("train", "train a model");
  add_common(train);
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval_cmd);
  eval_cmd->add_option("--checkpoint", checkpoint_path,
                       "checkpoint path (default <output_dir>/checkpoint.bin)");
  CLI::App* gradcheck = app.add_subcommand(
      "gradcheck", "verify gradients against finite differences");
  add_common(gradcheck);
  CLI::App* ablate =
      app.add_subcommand("ablate", "run the ablation grid and DropFrame sweep");
  add_common(ablate);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load(config_path, sets);
    if (gen->parsed()) return hierconv::commands::cmd_gen_data(cfg, std::cout);
    if (train->parsed()) return hierconv::commands::cmd_train(cfg, std::cout);
    if (eval_cmd->parsed())
      return hierconv::commands::cmd_eval(cfg, checkpoint_path, std::cout);
    if (gradcheck->parsed())
      return hierconv::commands::cmd_gradcheck(cfg, std::cout);
    if (ablate->parsed()) return hierconv::commands::cmd_ablate(cfg, std::cout);
  } catch (const hierconv::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
    return hierconv::commands::exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
