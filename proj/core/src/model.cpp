// hierconv/model.cpp

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

#include "hierconv/model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "hierconv/errors.hpp"

namespace hierconv::model {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::kHierST: return "HIER-ST";
    case Regime::kHierS: return "HIER-S";
    case Regime::kHierT: return "HIER-T";
  }
  return "?";
}

Regime regime_from_name(const std::string& name) {
  if (name == "HIER-ST") return Regime::kHierST;
  if (name == "HIER-S") return Regime::kHierS;
  if (name == "HIER-T") return Regime::kHierT;
  throw ConfigError("unknown regime '" + name +
                    "' (expected HIER-ST, HIER-S or HIER-T)");
}

bool regime_uses_speech(Regime r) { return r != Regime::kHierT; }
bool regime_uses_text(Regime r) { return r != Regime::kHierS; }

namespace {

encoders::SpeechEncoderConfig speech_config(const ModelConfig& m) {
  encoders::SpeechEncoderConfig c;
  c.input_dim = m.feature_dim;
  c.layers = m.speech_layers;
  c.hidden = m.speech_hidden;
  c.d_model = m.d_model;
  return c;
}

encoders::TextEncoderConfig text_config(const ModelConfig& m) {
  encoders::TextEncoderConfig c;
  c.vocab = m.vocab;
  c.d_model = m.d_model;
  c.layers = m.text_layers;
  c.heads = m.text_heads;
  c.max_tokens = m.text_max_tokens;
  return c;
}

conversation::ConversationEncoderConfig conversation_config(const ModelConfig& m) {
  conversation::ConversationEncoderConfig c;
  c.variant = m.conversation_variant;
  c.d_model = m.d_model;
  c.layers = m.conversation_layers;
  c.heads = m.conversation_heads;
  c.n_max = m.n_max;
  c.use_speaker_role = m.use_speaker_role;
  return c;
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config, std::uint64_t seed)
    : cfg(config),
      speech(speech_config(config), Rng(seed).child("init.speech")),
      text(text_config(config), Rng(seed).child("init.text")),
      shared_conversation(conversation_config(config), Rng(seed).child("init.conv")),
      classifier(config.d_model, config.num_labels, Rng(seed).child("init.cls")) {}

TensorRefs ModelParams::all_tensors() {
  TensorRefs out = speech_tensors();
  for (Tensor* t : text_tensors()) out.push_back(t);
  for (Tensor* t : conversation_tensors()) out.push_back(t);
  for (Tensor* t : classifier_tensors()) out.push_back(t);
  return out;
}

ForwardOutputs build_forward(Graph& g, ModelParams& params,
                             const std::vector<BatchConversation>& batch,
                             const ForwardOptions& options) {
  if (batch.empty()) throw DataError("build_forward: empty batch");
  const bool use_speech = regime_uses_speech(options.regime);
  const bool use_text = regime_uses_text(options.regime);

  // Flatten utterances across the batch; remember each conversation's row
  // offset into the shared utterance-embedding matrices.
  std::vector<const Mat*> speech_inputs;
  std::vector<const std::vector<int>*> text_inputs;
  std::vector<int> conv_offset;
  int total_utts = 0;
  for (const auto& item : batch) {
    conv_offset.push_back(total_utts);
    const auto n = item.conv->utterances.size();
    if (item.features.size() != n)
      throw DataError("build_forward: features/utterance count mismatch in '" +
                      item.conv->id + "'");
    for (std::size_t i = 0; i < n; ++i) {
      if (use_speech) speech_inputs.push_back(&item.features[i]);
      if (use_text) {
        const auto& tr = item.conv->utterances[i].transcript;
        if (!tr.has_value())
          throw ConfigError("regime " + regime_name(options.regime) +
                            " requires transcripts, but utterance '" +
                            item.conv->utterances[i].id + "' has none");
        text_inputs.push_back(&tr->tokens);
      }
    }
    total_utts += static_cast<int>(n);
  }

  ForwardOutputs out;
  if (use_speech)
    out.speech_utts =
        encoders::encode_speech_batch(g, params.speech, speech_inputs, options.dropout);
  if (use_text)
    out.text_utts =
        encoders::encode_text_batch(g, params.text, text_inputs, options.dropout);

  // Context windows per conversation, in corpus order.
  struct Window {
    std::vector<int> rows;   // global utterance rows
    std::vector<int> roles;  // speaker ids, aligned with rows
    const data::Utterance* target;
  };
  std::vector<Window> windows;
  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    const auto& conv = *batch[bi].conv;
    const int offset = conv_offset[bi];
    const int n = static_cast<int>(conv.utterances.size());
    for (int i = 0; i < n; ++i) {
      Window w;
      const int first = std::max(0, i - options.n_max + 1);
      for (int j = first; j <= i; ++j) {
        w.rows.push_back(offset + j);
        w.roles.push_back(conv.utterances[static_cast<std::size_t>(j)].speaker ==
                                  data::Speaker::kAgent
                              ? 0
                              : 1);
      }
      w.target = &conv.utterances[static_cast<std::size_t>(i)];
      windows.push_back(std::move(w));
    }
  }
  const int C = static_cast<int>(windows.size());

  out.targets.resize(C, params.cfg.num_labels);
  std::vector<int> target_rows;
  target_rows.reserve(windows.size());
  for (int c = 0; c < C; ++c) {
    const auto& w = windows[static_cast<std::size_t>(c)];
    out.context_targets.push_back(w.target);
    target_rows.push_back(w.rows.back());
    for (int l = 0; l < params.cfg.num_labels; ++l)
      out.targets(c, l) = w.target->labels.bits[static_cast<std::size_t>(l)];
  }

  auto encode_contexts = [&](Graph::Id utt_mat) {
    std::vector<Graph::Id> ctx;
    ctx.reserve(windows.size());
    for (const auto& w : windows) {
      Graph::Id slice = g.rows(utt_mat, w.rows);
      ctx.push_back(conversation::encode_context_node(
          g, params.shared_conversation, slice,
          params.cfg.use_speaker_role ? w.roles : std::vector<int>{},
          options.dropout));
    }
    return ctx.size() == 1 ? ctx[0] : g.concat_rows(ctx);
  };

  if (use_speech) {
    out.speech_context = encode_contexts(out.speech_utts);
    Graph::Id cls_in = nn::apply_dropout(g, out.speech_context, options.dropout);
    out.speech_logits = losses::classify(g, params.classifier, cls_in);
  }
  if (use_text) {
    out.text_context = encode_contexts(out.text_utts);
    Graph::Id cls_in = nn::apply_dropout(g, out.text_context, options.dropout);
    out.text_logits = losses::classify(g, params.classifier, cls_in);
  }

  if (!options.training) return out;

  options.weights.validate();
  Graph::Id total = -1;
  auto accumulate = [&](Graph::Id term, double weight) {
    Graph::Id w = weight == 1.0 ? term : g.scale(term, weight);
    total = total < 0 ? w : g.add(total, w);
  };

  if (use_speech) {
    out.loss_bce_speech = losses::bce_multilabel_node(g, out.speech_logits, out.targets);
    accumulate(out.loss_bce_speech, 1.0);
  }
  if (use_text) {
    out.loss_bce_text = losses::bce_multilabel_node(g, out.text_logits, out.targets);
    accumulate(out.loss_bce_text, 1.0);
  }
  if (use_speech && use_text) {
    // Cross-modal losses pair the current utterance of every context; the
    // tie_all_utterances extension pairs every context position instead.
    std::vector<int> pair_rows;
    if (options.tie_all_utterances) {
      for (const auto& w : windows)
        pair_rows.insert(pair_rows.end(), w.rows.begin(), w.rows.end());
    } else {
      pair_rows = target_rows;
    }
    Graph::Id u_s = g.rows(out.speech_utts, pair_rows);
    Graph::Id u_t = g.rows(out.text_utts, pair_rows);
    if (options.weights.lambda_euc > 0.0) {
      out.loss_euclidean = losses::euclidean_loss_node(g, u_s, u_t);
      accumulate(out.loss_euclidean, options.weights.lambda_euc);
    }
    if (options.weights.lambda_con > 0.0) {
      out.loss_contrastive =
          losses::contrastive_loss_node(g, u_s, u_t, options.weights.tau);
      accumulate(out.loss_contrastive, options.weights.lambda_con);
    }
  }
  out.loss_total = total;
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint io.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'H', 'C', 'V', 'C', 'K', 'P', 'T', '1'};

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in, const std::string& path) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
    throw IoError("truncated checkpoint '" + path + "'");
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, ModelParams& params,
                     const std::string& config_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  write_u64(out, config_json.size());
  out.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));
  const TensorRefs tensors = params.all_tensors();
  write_u64(out, tensors.size());
  for (const Tensor* t : tensors) {
    write_u64(out, t->name.size());
    out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    write_u64(out, static_cast<std::uint64_t>(t->value.rows()));
    write_u64(out, static_cast<std::uint64_t>(t->value.cols()));
    out.write(reinterpret_cast<const char*>(t->value.data()),
              static_cast<std::streamsize>(sizeof(double) * t->value.size()));
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, 8) != 0)
    throw DataError("'" + path + "' is not a hierconv checkpoint");
  Checkpoint ckpt;
  const auto json_len = read_u64(in, path);
  ckpt.config_json.resize(json_len);
  if (!in.read(ckpt.config_json.data(), static_cast<std::streamsize>(json_len)))
    throw IoError("truncated checkpoint '" + path + "'");
  const auto count = read_u64(in, path);
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = read_u64(in, path);
    std::string name(name_len, '\0');
    if (!in.read(name.data(), static_cast<std::streamsize>(name_len)))
      throw IoError("truncated checkpoint '" + path + "'");
    const auto rows_n = read_u64(in, path);
    const auto cols_n = read_u64(in, path);
    Mat m(static_cast<Eigen::Index>(rows_n), static_cast<Eigen::Index>(cols_n));
    if (!in.read(reinterpret_cast<char*>(m.data()),
                 static_cast<std::streamsize>(sizeof(double) * m.size())))
      throw IoError("truncated checkpoint '" + path + "'");
    ckpt.tensors.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

void apply_checkpoint(ModelParams& params, const Checkpoint& ckpt) {
  TensorRefs tensors = params.all_tensors();
  for (Tensor* t : tensors) {
    auto it = std::find_if(ckpt.tensors.begin(), ckpt.tensors.end(),
                           [&](const auto& p) { return p.first == t->name; });
    if (it == ckpt.tensors.end())
      throw ConfigError("checkpoint is missing tensor '" + t->name + "'");
    if (it->second.rows() != t->value.rows() || it->second.cols() != t->value.cols())
      throw ConfigError("checkpoint tensor '" + t->name + "' has shape " +
                        std::to_string(it->second.rows()) + "x" +
                        std::to_string(it->second.cols()) + ", expected " +
                        std::to_string(t->value.rows()) + "x" +
                        std::to_string(t->value.cols()));
    t->value = it->second;
  }
  if (ckpt.tensors.size() != tensors.size())
    throw ConfigError("checkpoint holds " + std::to_string(ckpt.tensors.size()) +
                      " tensors, model expects " + std::to_string(tensors.size()));
}

}  // namespace hierconv::model
