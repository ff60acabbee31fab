// hierconv/data.cpp

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

#include "hierconv/data.hpp"

#include <algorithm>
#include <fstream>

#include "hierconv/errors.hpp"

namespace hierconv::data {

std::string speaker_name(Speaker s) {
  return s == Speaker::kAgent ? "agent" : "caller";
}

Speaker speaker_from_name(const std::string& name) {
  if (name == "agent") return Speaker::kAgent;
  if (name == "caller") return Speaker::kCaller;
  throw DataError("unknown speaker '" + name + "'");
}

std::size_t Corpus::total_utterances() const {
  std::size_t n = 0;
  for (const auto& c : conversations) n += c.utterances.size();
  return n;
}

bool Corpus::has_transcripts() const {
  for (const auto& c : conversations)
    for (const auto& u : c.utterances)
      if (!u.transcript.has_value()) return false;
  return !conversations.empty();
}

std::vector<Context> contexts_of(const Conversation& conv, int n_max) {
  if (n_max < 1) throw DataError("contexts_of: n_max must be >= 1");
  if (conv.utterances.empty())
    throw DataError("contexts_of: conversation '" + conv.id + "' is empty");
  std::vector<Context> out;
  out.reserve(conv.utterances.size());
  const int n = static_cast<int>(conv.utterances.size());
  for (int i = 0; i < n; ++i) {
    Context ctx;
    const int first = std::max(0, i - n_max + 1);
    ctx.utterances.reserve(static_cast<std::size_t>(i - first + 1));
    for (int j = first; j <= i; ++j)
      ctx.utterances.push_back(&conv.utterances[static_cast<std::size_t>(j)]);
    out.push_back(std::move(ctx));
  }
  return out;
}

void validate_corpus(const Corpus& corpus, int num_labels, int vocab_size,
                     int base_dim) {
  for (const auto& conv : corpus.conversations) {
    if (conv.utterances.empty())
      throw DataError("conversation '" + conv.id + "' has no utterances");
    for (const auto& utt : conv.utterances) {
      if (utt.labels.count() != num_labels)
        throw DataError("utterance '" + utt.id + "': expected " +
                        std::to_string(num_labels) + " labels, got " +
                        std::to_string(utt.labels.count()));
      for (auto b : utt.labels.bits)
        if (b > 1) throw DataError("utterance '" + utt.id + "': label not in {0,1}");
      if (utt.speech.num_frames() < 1 || utt.speech.dim() != base_dim)
        throw DataError("utterance '" + utt.id + "': bad feature shape");
      if (!utt.speech.frames.allFinite())
        throw DataError("utterance '" + utt.id + "': non-finite features");
      if (utt.transcript.has_value()) {
        if (utt.transcript->tokens.empty())
          throw DataError("utterance '" + utt.id + "': empty transcript");
        for (int t : utt.transcript->tokens)
          if (t < 0 || t >= vocab_size)
            throw DataError("utterance '" + utt.id + "': token id " +
                            std::to_string(t) + " outside vocabulary");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Generator.
// ---------------------------------------------------------------------------

void GeneratorSettings::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("generator: " + msg); };
  if (train_conversations < 1 || dev_conversations < 1 || test_conversations < 1)
    fail("all split sizes must be >= 1");
  if (min_utterances < 1 || max_utterances < min_utterances)
    fail("need 1 <= min_utterances <= max_utterances");
  if (num_labels < 4) fail("num_labels must be >= 4");
  if (num_topics < 2) fail("num_topics must be >= 2");
  if (num_acts < 1) fail("num_acts must be >= 1");
  if (vocab_size < num_topics + num_acts + 1)
    fail("vocab_size must exceed num_topics + num_acts");
  if (base_dim < 1) fail("base_dim must be >= 1");
  if (mean_tokens < 1) fail("mean_tokens must be >= 1");
  if (mean_frames_per_token < 1) fail("mean_frames_per_token must be >= 1");
  if (noise_sigma < 0.0) fail("noise_sigma must be >= 0");
  if (p_hist < 0.0 || p_hist > 1.0) fail("p_hist must be in [0, 1]");
}

LabelVector generator_label_rule(const GeneratorSettings& s, int act, int topic,
                                 bool history_keyed) {
  const int L = s.num_labels;
  const int half = L / 2;
  LabelVector lv;
  lv.bits.assign(static_cast<std::size_t>(L), 0);
  lv.bits[0] = 1;  // every utterance has at least one positive label
  for (int j = 1; j < half; ++j)
    if ((act + j) % 3 == 0) lv.bits[static_cast<std::size_t>(j)] = 1;
  // The upper half is keyed on the conversation topic (or, for the
  // non-history fraction, on the act), so the full label vector depends
  // jointly on the current utterance and on context that only the first
  // utterance reveals.
  const int key = history_keyed ? topic : act % s.num_topics;
  for (int jj = 0; jj < L - half; ++jj)
    if (jj % s.num_topics == key) lv.bits[static_cast<std::size_t>(half + jj)] = 1;
  return lv;
}

namespace {

// Per-token Gaussian cluster centers, one row per vocabulary entry.
Mat make_cluster_means(const GeneratorSettings& s, Rng& rng) {
  Mat means(s.vocab_size, s.base_dim);
  for (int v = 0; v < s.vocab_size; ++v)
    for (int d = 0; d < s.base_dim; ++d) means(v, d) = rng.normal();
  return means;
}

Conversation make_conversation(const GeneratorSettings& s, const Mat& clusters,
                               const std::string& id, Rng& rng) {
  Conversation conv;
  conv.id = id;
  const int topic = rng.uniform_int(s.num_topics);
  const int n_utts = s.min_utterances +
                     rng.uniform_int(s.max_utterances - s.min_utterances + 1);

  const int tok_lo = std::max(1, s.mean_tokens / 2);
  const int tok_hi = std::max(tok_lo, (3 * s.mean_tokens) / 2);
  const int dur_lo = std::max(1, s.mean_frames_per_token - 1);
  const int dur_hi = s.mean_frames_per_token + 1;

  for (int i = 0; i < n_utts; ++i) {
    Utterance utt;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "u%03d", i);
    utt.id = id + "-" + buf;
    utt.speaker = (i % 2 == 0) ? Speaker::kAgent : Speaker::kCaller;

    const int act = rng.uniform_int(s.num_acts);
    const bool history_keyed = rng.u01() < s.p_hist;
    utt.labels = generator_label_rule(s, act, topic, history_keyed);

    // Token sequence: one act token, the topic reveal in utterance 0 only,
    // fillers elsewhere, positions shuffled.
    std::vector<int> tokens;
    tokens.push_back(s.num_topics + act);
    if (i == 0) tokens.push_back(topic);
    int n_tok = tok_lo + rng.uniform_int(tok_hi - tok_lo + 1);
    n_tok = std::max<int>(n_tok, static_cast<int>(tokens.size()));
    const int filler_span = s.vocab_size - s.num_topics - s.num_acts;
    while (static_cast<int>(tokens.size()) < n_tok)
      tokens.push_back(s.num_topics + s.num_acts + rng.uniform_int(filler_span));
    rng.shuffle(tokens);

    // Speech: per-token cluster draws with random durations.
    std::vector<int> frame_token;
    for (int tok : tokens) {
      const int dur = dur_lo + rng.uniform_int(dur_hi - dur_lo + 1);
      for (int f = 0; f < dur; ++f) frame_token.push_back(tok);
    }
    utt.speech.frame_period_ms = 10.0;
    utt.speech.frames.resize(static_cast<Eigen::Index>(frame_token.size()),
                             s.base_dim);
    for (std::size_t f = 0; f < frame_token.size(); ++f)
      for (int d = 0; d < s.base_dim; ++d)
        utt.speech.frames(static_cast<Eigen::Index>(f), d) =
            clusters(frame_token[f], d) + s.noise_sigma * rng.normal();

    if (s.include_transcripts) utt.transcript = TokenSequence{std::move(tokens)};
    conv.utterances.push_back(std::move(utt));
  }
  return conv;
}

Corpus make_split(const GeneratorSettings& s, const Mat& clusters,
                  const std::string& split, int count, Rng rng) {
  Corpus corpus;
  corpus.conversations.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "-%04d", i);
    corpus.conversations.push_back(
        make_conversation(s, clusters, split + buf, rng));
  }
  return corpus;
}

}  // namespace

GeneratedCorpus generate_corpus(const GeneratorSettings& settings,
                                std::uint64_t seed) {
  settings.validate();
  Rng master(seed);
  Rng cl = master.child("clusters");
  const Mat clusters = make_cluster_means(settings, cl);

  GeneratedCorpus out;
  out.train = make_split(settings, clusters, "train",
                         settings.train_conversations, master.child("train"));
  out.dev = make_split(settings, clusters, "dev", settings.dev_conversations,
                       master.child("dev"));
  out.test = make_split(settings, clusters, "test", settings.test_conversations,
                        master.child("test"));
  return out;
}

}  // namespace hierconv::data
