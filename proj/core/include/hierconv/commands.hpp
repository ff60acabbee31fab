// hierconv/commands.hpp

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

#ifndef HIERCONV_COMMANDS_HPP_
#define HIERCONV_COMMANDS_HPP_

#include <iosfwd>
#include <string>

#include "hierconv/config.hpp"

namespace hierconv::commands {

// Each command writes its outputs under a configured directory with fixed
// filenames and returns 0 on success. Progress goes to `out`. All commands
// are deterministic given config + seed (wall-clock fields aside).

/// Writes train/dev/test .jsonl plus manifest.json and resolved_config.json
/// into data.corpus_dir.
int cmd_gen_data(const config::ExperimentConfig& cfg, std::ostream& out);

/// Trains per training.regime; writes checkpoint.bin, metrics.jsonl and
/// resolved_config.json into output_dir.
int cmd_train(const config::ExperimentConfig& cfg, std::ostream& out);

/// Evaluates a checkpoint on eval.split; writes eval_report.json and
/// eval_report.txt into output_dir. Empty checkpoint path means
/// "<output_dir>/checkpoint.bin".
int cmd_eval(const config::ExperimentConfig& cfg, std::string checkpoint_path,
             std::ostream& out);

/// Finite-difference verification at toy dimensions; writes
/// gradcheck_report.txt and gradcheck_report.json into output_dir. Returns
/// nonzero when any tensor fails.
int cmd_gradcheck(const config::ExperimentConfig& cfg, std::ostream& out);

/// Reproduces the ablation structure (utterance-only / HIER-S / HIER-ST /
/// +EUC / +CON / recurrent-g over ablate.seeds) plus the DropFrame sweep;
/// writes ablation.csv, ablation.json and dropframe_table.csv into
/// output_dir.
int cmd_ablate(const config::ExperimentConfig& cfg, std::ostream& out);

/// Exit code for a categorized error: config=2, data=3, numeric=4, io=5.
int exit_code_for(const std::string& category);

}  // namespace hierconv::commands

#endif  // HIERCONV_COMMANDS_HPP_
