// hierconv/commands.cpp

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

#include "hierconv/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "hierconv/errors.hpp"
#include "hierconv/eval.hpp"
#include "hierconv/gradcheck.hpp"
#include "hierconv/training.hpp"

namespace hierconv::commands {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void write_resolved_config(const config::ExperimentConfig& cfg,
                           const std::string& dir) {
  write_text(dir + "/resolved_config.json", cfg.to_json_string() + "\n");
}

data::Corpus load_split(const config::ExperimentConfig& cfg,
                        const std::string& split) {
  const std::string path = cfg.corpus_dir + "/" + split + ".jsonl";
  data::Corpus corpus = data::read_corpus_jsonl(path);
  data::validate_corpus(corpus, cfg.generator.num_labels,
                        cfg.generator.vocab_size, cfg.generator.base_dim);
  return corpus;
}

}  // namespace

int exit_code_for(const std::string& category) {
  if (category == "config") return 2;
  if (category == "data") return 3;
  if (category == "numeric") return 4;
  if (category == "io") return 5;
  return 1;
}

int cmd_gen_data(const config::ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.corpus_dir);
  data::GeneratedCorpus corpus = data::generate_corpus(cfg.generator, cfg.seed);
  data::write_corpus_jsonl(corpus.train, cfg.corpus_dir + "/train.jsonl");
  data::write_corpus_jsonl(corpus.dev, cfg.corpus_dir + "/dev.jsonl");
  data::write_corpus_jsonl(corpus.test, cfg.corpus_dir + "/test.jsonl");
  data::write_manifest(cfg.generator, cfg.seed, corpus,
                       cfg.corpus_dir + "/manifest.json");
  write_resolved_config(cfg, cfg.corpus_dir);
  out << "gen-data: wrote " << corpus.train.conversations.size() << "/"
      << corpus.dev.conversations.size() << "/"
      << corpus.test.conversations.size() << " train/dev/test conversations to "
      << cfg.corpus_dir << "\n";
  return 0;
}

int cmd_train(const config::ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.output_dir);
  write_resolved_config(cfg, cfg.output_dir);

  const data::Corpus train_split = load_split(cfg, "train");
  const data::Corpus dev_split = load_split(cfg, "dev");

  model::ModelParams params(cfg.model_config(), cfg.seed);
  const training::TrainingConfig tcfg = cfg.training_config();
  out << "train: regime " << model::regime_name(tcfg.regime) << ", "
      << train_split.conversations.size() << " train conversations\n";

  training::TrainResult result = training::train(params, train_split, dev_split, tcfg);

  std::ofstream metrics(cfg.output_dir + "/metrics.jsonl");
  if (!metrics) throw IoError("cannot open metrics.jsonl for writing");
  for (const auto& rec : result.history) {
    json j;
    j["epoch"] = rec.epoch;
    j["train_loss"] = {{"bce_speech", rec.bce_speech},
                       {"bce_text", rec.bce_text},
                       {"euclidean", rec.euclidean},
                       {"contrastive", rec.contrastive},
                       {"total", rec.total}};
    if (rec.train_macro_f1 >= 0.0) j["train_macro_f1"] = rec.train_macro_f1;
    j["dev_macro_f1"] = rec.dev_macro_f1;
    j["wall_time_s"] = rec.wall_time_s;
    metrics << j.dump() << "\n";
    out << "  epoch " << rec.epoch << "  loss " << rec.total << "  dev-F1 "
        << rec.dev_macro_f1 << "\n";
  }

  model::save_checkpoint(cfg.output_dir + "/checkpoint.bin", params,
                         cfg.to_json_string());
  out << "train: best epoch " << result.best_epoch << " (dev macro-F1 "
      << result.best_dev_f1 << "), checkpoint written\n";
  return 0;
}

int cmd_eval(const config::ExperimentConfig& cfg, std::string checkpoint_path,
             std::ostream& out) {
  ensure_dir(cfg.output_dir);
  write_resolved_config(cfg, cfg.output_dir);
  if (checkpoint_path.empty())
    checkpoint_path = cfg.output_dir + "/checkpoint.bin";

  const model::Checkpoint ckpt = model::load_checkpoint(checkpoint_path);
  const config::ExperimentConfig train_cfg = config::parse(ckpt.config_json);
  model::ModelParams params(train_cfg.model_config(), train_cfg.seed);
  model::apply_checkpoint(params, ckpt);

  const data::Corpus split = load_split(cfg, cfg.eval_split);

  eval::EvalSettings settings;
  settings.regime = train_cfg.regime;
  settings.n_max = train_cfg.n_max;
  settings.threshold = cfg.threshold;
  settings.delta_window = cfg.delta_window;
  settings.batch_contexts = cfg.batch_size;
  const eval::EvalReport report = eval::evaluate(params, split, settings);

  write_text(cfg.output_dir + "/eval_report.json", report.to_json() + "\n");
  write_text(cfg.output_dir + "/eval_report.txt", report.to_table());
  out << "eval: split " << cfg.eval_split << ", macro-F1 " << report.macro_f1
      << "\n";
  return 0;
}

int cmd_gradcheck(const config::ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.output_dir);
  write_resolved_config(cfg, cfg.output_dir);

  const ModelCheckReport report =
      check_model_gradients(cfg.seed, cfg.conversation_variant);

  json j;
  j["all_pass"] = report.all_pass;
  j["stop_gradient_exact"] = report.stop_gradient_exact;
  j["speech_grad_nonzero"] = report.speech_grad_nonzero;
  j["runtime_s"] = report.runtime_s;
  json rows = json::array();
  std::string table =
      "check                   tensor                        rel_error   result\n";
  char line[160];
  for (const auto& e : report.entries) {
    rows.push_back({{"check", e.check},
                    {"tensor", e.tensor},
                    {"rel_error", e.rel_error},
                    {"pass", e.pass}});
    std::snprintf(line, sizeof(line), "%-23s %-29s %-11.3e %s\n", e.check.c_str(),
                  e.tensor.c_str(), e.rel_error, e.pass ? "pass" : "FAIL");
    table += line;
  }
  j["entries"] = std::move(rows);
  std::snprintf(line, sizeof(line),
                "stop-gradient exact zero on text bucket: %s\n"
                "speech bucket gradient nonzero: %s\n"
                "overall: %s\n",
                report.stop_gradient_exact ? "yes" : "NO",
                report.speech_grad_nonzero ? "yes" : "NO",
                report.all_pass ? "pass" : "FAIL");
  table += line;

  write_text(cfg.output_dir + "/gradcheck_report.json", j.dump(2) + "\n");
  write_text(cfg.output_dir + "/gradcheck_report.txt", table);
  out << table;
  return report.all_pass ? 0 : 1;
}

int cmd_ablate(const config::ExperimentConfig& cfg, std::ostream& out) {
  ensure_dir(cfg.output_dir);
  write_resolved_config(cfg, cfg.output_dir);

  const data::Corpus train_split = load_split(cfg, "train");
  const data::Corpus dev_split = load_split(cfg, "dev");
  const data::Corpus test_split = load_split(cfg, "test");

  struct Row {
    std::string name;
    model::Regime regime;
    double lambda_euc, lambda_con;
    conversation::Variant variant;
    int n_max;
  };
  const std::vector<Row> rows = {
      {"utterance-only", model::Regime::kHierS, 0.0, 0.0,
       cfg.conversation_variant, 1},
      {"HIER-S", model::Regime::kHierS, 0.0, 0.0, cfg.conversation_variant,
       cfg.n_max},
      {"HIER-ST", model::Regime::kHierST, 0.0, 0.0, cfg.conversation_variant,
       cfg.n_max},
      {"HIER-ST+EUC", model::Regime::kHierST, cfg.weights.lambda_euc, 0.0,
       cfg.conversation_variant, cfg.n_max},
      {"HIER-ST+CON", model::Regime::kHierST, 0.0, cfg.weights.lambda_con,
       cfg.conversation_variant, cfg.n_max},
      {"HIER-ST+CON (recurrent g)", model::Regime::kHierST, 0.0,
       cfg.weights.lambda_con, conversation::Variant::kRecurrent, cfg.n_max},
  };

  json result_rows = json::array();
  std::string csv = "row,seed_count,mean_test_macro_f1,min,max\n";
  for (const auto& row : rows) {
    std::vector<double> scores;
    for (std::uint64_t seed : cfg.ablate_seeds) {
      config::ExperimentConfig run_cfg = cfg;
      run_cfg.seed = seed;
      run_cfg.regime = row.regime;
      run_cfg.weights.lambda_euc = row.lambda_euc;
      run_cfg.weights.lambda_con = row.lambda_con;
      run_cfg.conversation_variant = row.variant;
      run_cfg.n_max = row.n_max;
      run_cfg.log_train_f1 = false;

      model::ModelParams params(run_cfg.model_config(), seed);
      training::train(params, train_split, dev_split, run_cfg.training_config());

      eval::EvalSettings settings;
      settings.regime = row.regime;
      settings.n_max = row.n_max;
      settings.threshold = cfg.threshold;
      settings.delta_window = cfg.delta_window;
      settings.batch_contexts = cfg.batch_size;
      scores.push_back(eval::evaluate(params, test_split, settings).macro_f1);
      out << "ablate: " << row.name << " seed " << seed << " test macro-F1 "
          << scores.back() << "\n";
    }
    double mean = 0.0, lo = scores[0], hi = scores[0];
    for (double s : scores) {
      mean += s;
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    mean /= static_cast<double>(scores.size());
    result_rows.push_back({{"row", row.name},
                           {"seeds", cfg.ablate_seeds},
                           {"scores", scores},
                           {"mean_test_macro_f1", mean},
                           {"min", lo},
                           {"max", hi}});
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%zu,%.6f,%.6f,%.6f\n",
                  row.name.c_str(), scores.size(), mean, lo, hi);
    csv += line;
    out << "ablate: " << row.name << " mean " << mean << " [" << lo << ", "
        << hi << "]\n";
  }

  // DropFrame sweep: length vs measured train time per epoch vs dev F1.
  const auto bench = training::benchmark_dropframe(
      cfg.model_config(), cfg.training_config(), train_split, dev_split,
      cfg.dropframe_lengths, cfg.dropframe_epochs);
  std::string df_csv = "l,seconds_per_epoch,mean_seconds_per_epoch,dev_macro_f1\n";
  json df_rows = json::array();
  for (const auto& b : bench) {
    char line[160];
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", b.label.c_str(),
                  b.seconds_per_epoch, b.mean_seconds_per_epoch, b.dev_macro_f1);
    df_csv += line;
    df_rows.push_back({{"l", b.label},
                       {"enabled", b.enabled},
                       {"seconds_per_epoch", b.seconds_per_epoch},
                       {"mean_seconds_per_epoch", b.mean_seconds_per_epoch},
                       {"dev_macro_f1", b.dev_macro_f1}});
    out << "dropframe: l=" << b.label << " " << b.seconds_per_epoch
        << " s/epoch, dev macro-F1 " << b.dev_macro_f1 << "\n";
  }

  json j;
  j["rows"] = std::move(result_rows);
  j["dropframe"] = std::move(df_rows);
  write_text(cfg.output_dir + "/ablation.json", j.dump(2) + "\n");
  write_text(cfg.output_dir + "/ablation.csv", csv);
  write_text(cfg.output_dir + "/dropframe_table.csv", df_csv);
  return 0;
}

}  // namespace hierconv::commands
