// hierconv/config.cpp

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

#include "hierconv/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "hierconv/errors.hpp"

namespace hierconv::config {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void get_to(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void parse_data(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"corpus_dir", "train_conversations", "dev_conversations",
                  "test_conversations", "min_utterances", "max_utterances",
                  "labels", "vocab", "base_dim", "topics", "acts",
                  "mean_tokens", "mean_frames_per_token", "noise_sigma",
                  "p_hist", "include_transcripts"},
                 "data");
  get_to(j, "corpus_dir", c.corpus_dir);
  get_to(j, "train_conversations", c.generator.train_conversations);
  get_to(j, "dev_conversations", c.generator.dev_conversations);
  get_to(j, "test_conversations", c.generator.test_conversations);
  get_to(j, "min_utterances", c.generator.min_utterances);
  get_to(j, "max_utterances", c.generator.max_utterances);
  get_to(j, "labels", c.generator.num_labels);
  get_to(j, "vocab", c.generator.vocab_size);
  get_to(j, "base_dim", c.generator.base_dim);
  get_to(j, "topics", c.generator.num_topics);
  get_to(j, "acts", c.generator.num_acts);
  get_to(j, "mean_tokens", c.generator.mean_tokens);
  get_to(j, "mean_frames_per_token", c.generator.mean_frames_per_token);
  get_to(j, "noise_sigma", c.generator.noise_sigma);
  get_to(j, "p_hist", c.generator.p_hist);
  get_to(j, "include_transcripts", c.generator.include_transcripts);
}

void parse_features(const json& j, ExperimentConfig& c) {
  reject_unknown(j, {"delta_window", "dropframe"}, "features");
  get_to(j, "delta_window", c.delta_window);
  if (j.contains("dropframe")) {
    const json& d = j.at("dropframe");
    reject_unknown(d, {"enabled", "max_len"}, "features.dropframe");
    get_to(d, "enabled", c.dropframe.enabled);
    get_to(d, "max_len", c.dropframe.max_len);
  }
}

void parse_model(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"d_model", "speech_layers", "speech_hidden", "text_layers",
                  "text_heads", "text_max_tokens", "conversation_variant",
                  "conversation_layers", "conversation_heads",
                  "use_speaker_role"},
                 "model");
  get_to(j, "d_model", c.d_model);
  get_to(j, "speech_layers", c.speech_layers);
  get_to(j, "speech_hidden", c.speech_hidden);
  get_to(j, "text_layers", c.text_layers);
  get_to(j, "text_heads", c.text_heads);
  get_to(j, "text_max_tokens", c.text_max_tokens);
  if (j.contains("conversation_variant"))
    c.conversation_variant = conversation::variant_from_name(
        j.at("conversation_variant").get<std::string>());
  get_to(j, "conversation_layers", c.conversation_layers);
  get_to(j, "conversation_heads", c.conversation_heads);
  get_to(j, "use_speaker_role", c.use_speaker_role);
}

void parse_losses(const json& j, ExperimentConfig& c) {
  reject_unknown(j, {"lambda_euc", "lambda_con", "tau"}, "losses");
  get_to(j, "lambda_euc", c.weights.lambda_euc);
  get_to(j, "lambda_con", c.weights.lambda_con);
  get_to(j, "tau", c.weights.tau);
}

void parse_training(const json& j, ExperimentConfig& c) {
  reject_unknown(j,
                 {"regime", "learning_rate", "dropout", "batch_size",
                  "max_epochs", "patience", "n_max", "grad_clip",
                  "freeze_speech", "freeze_text", "log_train_f1",
                  "tie_all_utterances"},
                 "training");
  if (j.contains("regime"))
    c.regime = model::regime_from_name(j.at("regime").get<std::string>());
  get_to(j, "learning_rate", c.learning_rate);
  get_to(j, "dropout", c.dropout);
  get_to(j, "batch_size", c.batch_size);
  get_to(j, "max_epochs", c.max_epochs);
  get_to(j, "patience", c.patience);
  get_to(j, "n_max", c.n_max);
  get_to(j, "grad_clip", c.grad_clip);
  get_to(j, "freeze_speech", c.freeze_speech);
  get_to(j, "freeze_text", c.freeze_text);
  get_to(j, "log_train_f1", c.log_train_f1);
  get_to(j, "tie_all_utterances", c.tie_all_utterances);
}

void parse_eval(const json& j, ExperimentConfig& c) {
  reject_unknown(j, {"threshold", "split"}, "eval");
  get_to(j, "threshold", c.threshold);
  get_to(j, "split", c.eval_split);
  if (c.eval_split != "train" && c.eval_split != "dev" && c.eval_split != "test")
    throw ConfigError("eval.split must be train, dev or test");
}

void parse_ablate(const json& j, ExperimentConfig& c) {
  reject_unknown(j, {"seeds", "dropframe_lengths", "dropframe_epochs"},
                 "ablate");
  get_to(j, "seeds", c.ablate_seeds);
  get_to(j, "dropframe_lengths", c.dropframe_lengths);
  get_to(j, "dropframe_epochs", c.dropframe_epochs);
}

}  // namespace

model::ModelConfig ExperimentConfig::model_config() const {
  model::ModelConfig m;
  m.d_model = d_model;
  m.feature_dim = 6 * generator.base_dim;
  m.speech_layers = speech_layers;
  m.speech_hidden = speech_hidden;
  m.vocab = generator.vocab_size;
  m.text_layers = text_layers;
  m.text_heads = text_heads;
  m.text_max_tokens = text_max_tokens;
  m.conversation_variant = conversation_variant;
  m.conversation_layers = conversation_layers;
  m.conversation_heads = conversation_heads;
  m.n_max = n_max;
  m.num_labels = generator.num_labels;
  m.use_speaker_role = use_speaker_role;
  return m;
}

training::TrainingConfig ExperimentConfig::training_config() const {
  training::TrainingConfig t;
  t.regime = regime;
  t.learning_rate = learning_rate;
  t.dropout = dropout;
  t.batch_size = batch_size;
  t.max_epochs = max_epochs;
  t.patience = patience;
  t.n_max = n_max;
  t.dropframe = dropframe;
  t.weights = weights;
  t.seed = seed;
  t.freeze_speech = freeze_speech;
  t.freeze_text = freeze_text;
  t.grad_clip = grad_clip;
  t.log_train_f1 = log_train_f1;
  t.tie_all_utterances = tie_all_utterances;
  t.delta_window = delta_window;
  t.eval_threshold = threshold;
  return t;
}

void ExperimentConfig::validate() const {
  generator.validate();
  training_config().validate();
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (corpus_dir.empty()) throw ConfigError("data.corpus_dir must not be empty");
  if (ablate_seeds.empty()) throw ConfigError("ablate.seeds must not be empty");
  if (dropframe_epochs < 1)
    throw ConfigError("ablate.dropframe_epochs must be >= 1");
  if (d_model < 1 || speech_layers < 1 || speech_hidden < 1 || text_layers < 1 ||
      text_heads < 1 || text_max_tokens < 1 || conversation_layers < 1 ||
      conversation_heads < 1)
    throw ConfigError("model sizes must be >= 1");
  if (d_model % text_heads != 0 || d_model % conversation_heads != 0)
    throw ConfigError("heads must divide d_model");
}

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["seed"] = seed;
  j["output_dir"] = output_dir;
  j["data"] = {{"corpus_dir", corpus_dir},
               {"train_conversations", generator.train_conversations},
               {"dev_conversations", generator.dev_conversations},
               {"test_conversations", generator.test_conversations},
               {"min_utterances", generator.min_utterances},
               {"max_utterances", generator.max_utterances},
               {"labels", generator.num_labels},
               {"vocab", generator.vocab_size},
               {"base_dim", generator.base_dim},
               {"topics", generator.num_topics},
               {"acts", generator.num_acts},
               {"mean_tokens", generator.mean_tokens},
               {"mean_frames_per_token", generator.mean_frames_per_token},
               {"noise_sigma", generator.noise_sigma},
               {"p_hist", generator.p_hist},
               {"include_transcripts", generator.include_transcripts}};
  j["features"] = {{"delta_window", delta_window},
                   {"dropframe",
                    {{"enabled", dropframe.enabled},
                     {"max_len", dropframe.max_len}}}};
  j["model"] = {{"d_model", d_model},
                {"speech_layers", speech_layers},
                {"speech_hidden", speech_hidden},
                {"text_layers", text_layers},
                {"text_heads", text_heads},
                {"text_max_tokens", text_max_tokens},
                {"conversation_variant",
                 conversation::variant_name(conversation_variant)},
                {"conversation_layers", conversation_layers},
                {"conversation_heads", conversation_heads},
                {"use_speaker_role", use_speaker_role}};
  j["losses"] = {{"lambda_euc", weights.lambda_euc},
                 {"lambda_con", weights.lambda_con},
                 {"tau", weights.tau}};
  j["training"] = {{"regime", model::regime_name(regime)},
                   {"learning_rate", learning_rate},
                   {"dropout", dropout},
                   {"batch_size", batch_size},
                   {"max_epochs", max_epochs},
                   {"patience", patience},
                   {"n_max", n_max},
                   {"grad_clip", grad_clip},
                   {"freeze_speech", freeze_speech},
                   {"freeze_text", freeze_text},
                   {"log_train_f1", log_train_f1},
                   {"tie_all_utterances", tie_all_utterances}};
  j["eval"] = {{"threshold", threshold}, {"split", eval_split}};
  j["ablate"] = {{"seeds", ablate_seeds},
                 {"dropframe_lengths", dropframe_lengths},
                 {"dropframe_epochs", dropframe_epochs}};
  return j.dump(2);
}

ExperimentConfig parse(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown(j,
                 {"seed", "output_dir", "data", "features", "model", "losses",
                  "training", "eval", "ablate"},
                 "config root");
  ExperimentConfig c;
  get_to(j, "seed", c.seed);
  get_to(j, "output_dir", c.output_dir);
  if (j.contains("data")) parse_data(j.at("data"), c);
  if (j.contains("features")) parse_features(j.at("features"), c);
  if (j.contains("model")) parse_model(j.at("model"), c);
  if (j.contains("losses")) parse_losses(j.at("losses"), c);
  if (j.contains("training")) parse_training(j.at("training"), c);
  if (j.contains("eval")) parse_eval(j.at("eval"), c);
  if (j.contains("ablate")) parse_ablate(j.at("ablate"), c);
  c.validate();
  return c;
}

ExperimentConfig load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse(text);
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
  if (overrides.empty()) return json_text;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid json: ") + e.what());
  }
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like group.key=value: '" + ov + "'");
    const std::string path = ov.substr(0, eq);
    const std::string raw = ov.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // plain strings need no quoting
    }
    json* node = &j;
    std::size_t start = 0;
    while (true) {
      const auto dot = path.find('.', start);
      const std::string key = path.substr(start, dot - start);
      if (key.empty()) throw ConfigError("bad override path '" + path + "'");
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      start = dot + 1;
    }
  }
  return j.dump();
}

}  // namespace hierconv::config
