// hierconv/data_io.cpp

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
#include <string>

#include <json.hpp>

#include "hierconv/data.hpp"
#include "hierconv/errors.hpp"

namespace hierconv::data {

using nlohmann::json;

namespace {

json utterance_to_json(const Utterance& u) {
  json j;
  j["id"] = u.id;
  j["speaker"] = speaker_name(u.speaker);
  j["frame_period_ms"] = u.speech.frame_period_ms;
  json frames = json::array();
  for (Eigen::Index t = 0; t < u.speech.num_frames(); ++t) {
    json row = json::array();
    for (Eigen::Index d = 0; d < u.speech.dim(); ++d)
      row.push_back(u.speech.frames(t, d));
    frames.push_back(std::move(row));
  }
  j["frames"] = std::move(frames);
  if (u.transcript.has_value()) j["tokens"] = u.transcript->tokens;
  json labels = json::array();
  for (auto b : u.labels.bits) labels.push_back(static_cast<int>(b));
  j["labels"] = std::move(labels);
  return j;
}

Utterance utterance_from_json(const json& j) {
  Utterance u;
  u.id = j.at("id").get<std::string>();
  u.speaker = speaker_from_name(j.at("speaker").get<std::string>());
  u.speech.frame_period_ms = j.at("frame_period_ms").get<double>();
  const json& frames = j.at("frames");
  if (!frames.is_array() || frames.empty())
    throw DataError("utterance '" + u.id + "': frames must be a non-empty array");
  const auto T = static_cast<Eigen::Index>(frames.size());
  const auto D = static_cast<Eigen::Index>(frames[0].size());
  u.speech.frames.resize(T, D);
  for (Eigen::Index t = 0; t < T; ++t) {
    const json& row = frames[static_cast<std::size_t>(t)];
    if (static_cast<Eigen::Index>(row.size()) != D)
      throw DataError("utterance '" + u.id + "': ragged frame rows");
    for (Eigen::Index d = 0; d < D; ++d)
      u.speech.frames(t, d) = row[static_cast<std::size_t>(d)].get<double>();
  }
  if (j.contains("tokens")) {
    TokenSequence ts;
    ts.tokens = j.at("tokens").get<std::vector<int>>();
    u.transcript = std::move(ts);
  }
  for (const auto& b : j.at("labels")) {
    const int v = b.get<int>();
    if (v != 0 && v != 1)
      throw DataError("utterance '" + u.id + "': label entries must be 0 or 1");
    u.labels.bits.push_back(static_cast<std::uint8_t>(v));
  }
  return u;
}

}  // namespace

void write_corpus_jsonl(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& conv : corpus.conversations) {
    json j;
    j["id"] = conv.id;
    json utts = json::array();
    for (const auto& u : conv.utterances) utts.push_back(utterance_to_json(u));
    j["utterances"] = std::move(utts);
    out << j.dump() << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Corpus read_corpus_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    try {
      Conversation conv;
      conv.id = j.at("id").get<std::string>();
      for (const auto& uj : j.at("utterances"))
        conv.utterances.push_back(utterance_from_json(uj));
      if (conv.utterances.empty())
        throw DataError("conversation '" + conv.id + "' has no utterances");
      corpus.conversations.push_back(std::move(conv));
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return corpus;
}

void write_manifest(const GeneratorSettings& s, std::uint64_t seed,
                    const GeneratedCorpus& corpus, const std::string& path) {
  json j;
  j["seed"] = seed;
  json settings;
  settings["train_conversations"] = s.train_conversations;
  settings["dev_conversations"] = s.dev_conversations;
  settings["test_conversations"] = s.test_conversations;
  settings["min_utterances"] = s.min_utterances;
  settings["max_utterances"] = s.max_utterances;
  settings["num_labels"] = s.num_labels;
  settings["vocab_size"] = s.vocab_size;
  settings["base_dim"] = s.base_dim;
  settings["num_topics"] = s.num_topics;
  settings["num_acts"] = s.num_acts;
  settings["mean_tokens"] = s.mean_tokens;
  settings["mean_frames_per_token"] = s.mean_frames_per_token;
  settings["noise_sigma"] = s.noise_sigma;
  settings["p_hist"] = s.p_hist;
  settings["include_transcripts"] = s.include_transcripts;
  j["settings"] = std::move(settings);
  json splits;
  splits["train"] = {{"file", "train.jsonl"},
                     {"conversations", corpus.train.conversations.size()}};
  splits["dev"] = {{"file", "dev.jsonl"},
                   {"conversations", corpus.dev.conversations.size()}};
  splits["test"] = {{"file", "test.jsonl"},
                    {"conversations", corpus.test.conversations.size()}};
  j["splits"] = std::move(splits);

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

GeneratorSettings read_manifest(const std::string& path, std::uint64_t* seed_out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  GeneratorSettings s;
  try {
    if (seed_out) *seed_out = j.at("seed").get<std::uint64_t>();
    const json& settings = j.at("settings");
    s.train_conversations = settings.at("train_conversations").get<int>();
    s.dev_conversations = settings.at("dev_conversations").get<int>();
    s.test_conversations = settings.at("test_conversations").get<int>();
    s.min_utterances = settings.at("min_utterances").get<int>();
    s.max_utterances = settings.at("max_utterances").get<int>();
    s.num_labels = settings.at("num_labels").get<int>();
    s.vocab_size = settings.at("vocab_size").get<int>();
    s.base_dim = settings.at("base_dim").get<int>();
    s.num_topics = settings.at("num_topics").get<int>();
    s.num_acts = settings.at("num_acts").get<int>();
    s.mean_tokens = settings.at("mean_tokens").get<int>();
    s.mean_frames_per_token = settings.at("mean_frames_per_token").get<int>();
    s.noise_sigma = settings.at("noise_sigma").get<double>();
    s.p_hist = settings.at("p_hist").get<double>();
    s.include_transcripts = settings.at("include_transcripts").get<bool>();
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return s;
}

}  // namespace hierconv::data
