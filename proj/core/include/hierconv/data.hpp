// hierconv/data.hpp

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

#ifndef HIERCONV_DATA_HPP_
#define HIERCONV_DATA_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hierconv/features.hpp"
#include "hierconv/rng.hpp"

namespace hierconv::data {

enum class Speaker { kAgent, kCaller };

std::string speaker_name(Speaker s);
Speaker speaker_from_name(const std::string& name);

/// Integer token ids of one utterance transcript.
struct TokenSequence {
  std::vector<int> tokens;
};

/// Multilabel target: bits[j] in {0, 1}.
struct LabelVector {
  std::vector<std::uint8_t> bits;

  int count() const { return static_cast<int>(bits.size()); }
};

struct Utterance {
  std::string id;
  Speaker speaker = Speaker::kAgent;
  features::FeatureSequence speech;
  std::optional<TokenSequence> transcript;
  LabelVector labels;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;
};

struct Corpus {
  std::vector<Conversation> conversations;

  std::size_t total_utterances() const;
  bool has_transcripts() const;
};

/// A window of up to n_max consecutive utterances; the last one is the
/// target whose labels the window carries. Holds non-owning pointers into
/// the conversation it was built from.
struct Context {
  std::vector<const Utterance*> utterances;

  const Utterance& target() const { return *utterances.back(); }
  int length() const { return static_cast<int>(utterances.size()); }
};

/// One context per utterance: context i covers utterances
/// [max(0, i - n_max + 1) .. i].
std::vector<Context> contexts_of(const Conversation& conv, int n_max);

/// Structural validation used when a corpus is loaded for an experiment.
/// Throws DataError on violation.
void validate_corpus(const Corpus& corpus, int num_labels, int vocab_size,
                     int base_dim);

// ---------------------------------------------------------------------------
// Synthetic corpus generator.
//
// Token id layout: [0, topics) are topic-reveal tokens, emitted only in the
// first utterance of a conversation; [topics, topics+acts) are act content
// tokens, one per utterance; the rest of the vocabulary is filler.
//
// Labels: bit 0 is always on. Bits [1, L/2) depend only on the utterance's
// act. Bits [L/2, L) are keyed either on the conversation topic (with
// probability p_hist, recoverable only through history) or on the act.
// Speech frames are per-token Gaussian clusters with random durations.
// ---------------------------------------------------------------------------

struct GeneratorSettings {
  int train_conversations = 200;
  int dev_conversations = 30;
  int test_conversations = 40;
  int min_utterances = 8;
  int max_utterances = 16;
  int num_labels = 16;   // L
  int vocab_size = 64;   // V
  int base_dim = 8;
  int num_topics = 4;
  int num_acts = 8;
  int mean_tokens = 8;
  int mean_frames_per_token = 3;
  double noise_sigma = 0.15;
  double p_hist = 0.7;
  bool include_transcripts = true;

  void validate() const;  // throws ConfigError
};

struct GeneratedCorpus {
  Corpus train, dev, test;
};

GeneratedCorpus generate_corpus(const GeneratorSettings& settings,
                                std::uint64_t seed);

/// The deterministic label rule of the generator, exposed so tests can
/// compute the information-theoretic baselines in closed form.
LabelVector generator_label_rule(const GeneratorSettings& settings, int act,
                                 int topic, bool history_keyed);

// ---------------------------------------------------------------------------
// Serialization: one conversation object per line (JSONL), plus a sidecar
// manifest recording the generator settings and seed.
// ---------------------------------------------------------------------------

void write_corpus_jsonl(const Corpus& corpus, const std::string& path);
Corpus read_corpus_jsonl(const std::string& path);

void write_manifest(const GeneratorSettings& settings, std::uint64_t seed,
                    const GeneratedCorpus& corpus, const std::string& path);
GeneratorSettings read_manifest(const std::string& path,
                                std::uint64_t* seed_out = nullptr);

}  // namespace hierconv::data

#endif  // HIERCONV_DATA_HPP_
