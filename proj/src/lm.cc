// Copyright 2026 The wsd-lp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wsd/lm.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iostream>
#include <limits>
#include <map>

#include "jsonl.h"
#include "lm_json.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

using internal::Json;

// ---------------------------------------------------------------------------
// Vocab

namespace {

bool IsReservedSymbol(std::string_view word) {
  return word == kHoldoutSymbol || word == kUnkSymbol || word == kPadSymbol;
}

}  // namespace

Vocab Vocab::Build(const TokenStream& text, size_t max_size) {
  std::map<std::string, int64_t> counts;
  int64_t total = 0;
  for (const auto& sentence : text) {
    for (const auto& token : sentence) {
      ++total;
      if (!IsReservedSymbol(token)) ++counts[token];
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyStream, "no tokens in LM text");

  std::vector<std::pair<std::string, int64_t>> ranked(counts.begin(),
                                                      counts.end());
  // counts is already lexicographic, so a stable sort on frequency alone
  // leaves ties in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_size) ranked.resize(max_size);

  Vocab vocab;
  vocab.words_ = {std::string(kHoldoutSymbol), std::string(kUnkSymbol),
                  std::string(kPadSymbol)};
  vocab.counts_ = {0, 0, 0};
  int64_t kept = 0;
  for (auto& [word, count] : ranked) {
    vocab.ids_.emplace(word, static_cast<int>(vocab.words_.size()));
    vocab.words_.push_back(word);
    vocab.counts_.push_back(count);
    kept += count;
  }
  vocab.counts_[kUnkId] = total - kept;
  vocab.total_ = total;
  return vocab;
}

Vocab Vocab::FromWords(std::vector<std::string> words) {
  if (words.size() < static_cast<size_t>(kNumReservedIds) ||
      words[kHoldoutId] != kHoldoutSymbol || words[kUnkId] != kUnkSymbol ||
      words[kPadId] != kPadSymbol) {
    throw Error(ErrorCode::kParse,
                "vocabulary must start with the reserved symbols");
  }
  Vocab vocab;
  vocab.words_ = std::move(words);
  vocab.counts_.assign(vocab.words_.size(), 0);
  for (size_t i = kNumReservedIds; i < vocab.words_.size(); ++i) {
    if (!vocab.ids_.emplace(vocab.words_[i], static_cast<int>(i)).second) {
      throw Error(ErrorCode::kParse,
                  "duplicate vocabulary word \"" + vocab.words_[i] + "\"");
    }
  }
  return vocab;
}

int Vocab::Id(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

uint64_t Vocab::Hash() const {
  uint64_t hash = Fnv1a64("");
  for (const auto& word : words_) {
    hash = Fnv1a64(word, hash);
    hash = Fnv1a64("\n", hash);
  }
  return hash;
}

Vocab BuildVocab(const TokenStream& text, size_t max_size) {
  return Vocab::Build(text, max_size);
}

void LmConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfig, "lm config: " + what);
  };
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (embed_dim < 1 || hidden_dim < 1 || context_dim < 1) {
    fail("dimensions must be >= 1");
  }
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    fail("learning_rate must be finite and nonnegative");
  }
  if (!(downsample_threshold > 0.0 && downsample_threshold <= 1.0)) {
    fail("downsample_threshold must lie in (0, 1]");
  }
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (max_len < 1) fail("max_len must be >= 1");
}

// ---------------------------------------------------------------------------
// Parameters

LmParams LmParams::Zeros(int vocab_size, int embed_dim, int hidden_dim,
                         int context_dim) {
  LmParams p;
  p.embeddings = Matrix(vocab_size, embed_dim);
  for (int g = 0; g < 4; ++g) {
    p.gate_weights[g] = Matrix(embed_dim + hidden_dim, hidden_dim);
    p.gate_biases[g].assign(hidden_dim, 0.0);
  }
  p.projection = Matrix(hidden_dim, context_dim);
  p.output = Matrix(context_dim, vocab_size);
  p.output_bias.assign(vocab_size, 0.0);
  return p;
}

LmParams LmParams::Random(int vocab_size, int embed_dim, int hidden_dim,
                          int context_dim, uint64_t seed) {
  LmParams p = Zeros(vocab_size, embed_dim, hidden_dim, context_dim);
  Rng rng(seed);
  auto fill = [&](std::span<double> block) {
    for (double& x : block) x = rng.Uniform(-0.05, 0.05);
  };
  fill(p.embeddings.flat());
  for (auto& w : p.gate_weights) fill(w.flat());
  fill(p.projection.flat());
  fill(p.output.flat());
  return p;
}

void LmParams::Validate() const {
  const int v = vocab_size(), d = embed_dim(), h = hidden_dim(),
            c = context_dim();
  bool ok = v > 0 && d > 0 && h > 0 && c > 0 && output.rows() == c &&
            output.cols() == v && static_cast<int>(output_bias.size()) == v;
  for (int g = 0; g < 4; ++g) {
    ok = ok && gate_weights[g].rows() == d + h && gate_weights[g].cols() == h &&
         static_cast<int>(gate_biases[g].size()) == h;
  }
  if (!ok) throw Error(ErrorCode::kShapeMismatch, "inconsistent LM shapes");
  ForEachBlock([](const char* name, std::span<const double> block) {
    for (double x : block) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::kNonFinite,
                    std::string("non-finite entry in ") + name);
      }
    }
  });
}

size_t LmParams::ParameterCount() const {
  size_t n = 0;
  ForEachBlock([&](const char*, std::span<const double> block) {
    n += block.size();
  });
  return n;
}

// ---------------------------------------------------------------------------
// Forward and backward passes

namespace {

inline double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Activations of every step, kept for backpropagation. Row t of `cell` and
// `hidden` is the state *before* step t, so row 0 is the zero initial state.
struct Trace {
  int steps = 0;
  std::vector<double> input;                // steps x (d+h)
  std::array<std::vector<double>, 4> gate;  // steps x h, post-activation
  std::vector<double> cell;                 // (steps+1) x h
  std::vector<double> tanh_cell;            // steps x h
  std::vector<double> hidden;               // (steps+1) x h
};

void RunRecurrence(const LmParams& p, std::span<const int> ids, Trace* tr) {
  const int d = p.embed_dim(), h = p.hidden_dim(), n = d + h;
  const int steps = static_cast<int>(ids.size());
  tr->steps = steps;
  tr->input.assign(static_cast<size_t>(steps) * n, 0.0);
  for (auto& g : tr->gate) g.assign(static_cast<size_t>(steps) * h, 0.0);
  tr->cell.assign(static_cast<size_t>(steps + 1) * h, 0.0);
  tr->tanh_cell.assign(static_cast<size_t>(steps) * h, 0.0);
  tr->hidden.assign(static_cast<size_t>(steps + 1) * h, 0.0);

  for (int t = 0; t < steps; ++t) {
    double* z = &tr->input[static_cast<size_t>(t) * n];
    const auto emb = p.embeddings.row(ids[t]);
    std::copy(emb.begin(), emb.end(), z);
    std::copy_n(&tr->hidden[static_cast<size_t>(t) * h], h, z + d);

    for (int g = 0; g < 4; ++g) {
      double* a = &tr->gate[g][static_cast<size_t>(t) * h];
      std::copy(p.gate_biases[g].begin(), p.gate_biases[g].end(), a);
      const Matrix& w = p.gate_weights[g];
      for (int r = 0; r < n; ++r) {
        const double zr = z[r];
        const double* wr = w.row(r).data();
        for (int j = 0; j < h; ++j) a[j] += zr * wr[j];
      }
      if (g == kCandidate) {
        for (int j = 0; j < h; ++j) a[j] = std::tanh(a[j]);
      } else {
        for (int j = 0; j < h; ++j) a[j] = Sigmoid(a[j]);
      }
    }

    const double* gi = &tr->gate[kInputGate][static_cast<size_t>(t) * h];
    const double* gf = &tr->gate[kForgetGate][static_cast<size_t>(t) * h];
    const double* go = &tr->gate[kOutputGate][static_cast<size_t>(t) * h];
    const double* gc = &tr->gate[kCandidate][static_cast<size_t>(t) * h];
    const double* c_prev = &tr->cell[static_cast<size_t>(t) * h];
    double* c = &tr->cell[static_cast<size_t>(t + 1) * h];
    double* tc = &tr->tanh_cell[static_cast<size_t>(t) * h];
    double* hid = &tr->hidden[static_cast<size_t>(t + 1) * h];
    for (int j = 0; j < h; ++j) {
      c[j] = gf[j] * c_prev[j] + gi[j] * gc[j];
      tc[j] = std::tanh(c[j]);
      hid[j] = go[j] * tc[j];
    }
  }
}

std::vector<double> Project(const LmParams& p, std::span<const double> hidden) {
  const int h = p.hidden_dim(), c = p.context_dim();
  std::vector<double> context(c, 0.0);
  for (int j = 0; j < h; ++j) {
    const double hj = hidden[j];
    const double* pr = p.projection.row(j).data();
    for (int q = 0; q < c; ++q) context[q] += hj * pr[q];
  }
  return context;
}

std::vector<double> Logits(const LmParams& p, std::span<const double> context) {
  const int v = p.vocab_size(), c = p.context_dim();
  std::vector<double> logits(p.output_bias);
  for (int q = 0; q < c; ++q) {
    const double cq = context[q];
    const double* orow = p.output.row(q).data();
    for (int k = 0; k < v; ++k) logits[k] += cq * orow[k];
  }
  return logits;
}

void CheckIds(const LmParams& p, std::span<const int> ids) {
  if (ids.empty()) throw Error(ErrorCode::kShapeMismatch, "empty id sequence");
  for (int id : ids) {
    if (id < 0 || id >= p.vocab_size()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "token id " + std::to_string(id) + " outside vocabulary");
    }
  }
}

// [start, end) window of at most max_len tokens around focus.
std::pair<size_t, size_t> Window(size_t n, size_t focus, size_t max_len) {
  if (n <= max_len) return {0, n};
  const size_t half = (max_len - 1) / 2;
  size_t start = focus > half ? focus - half : 0;
  size_t end = std::min(n, start + max_len);
  start = end - max_len;
  return {start, end};
}

std::vector<int> HeldoutWindow(std::span<const int> ids, size_t focus,
                               int max_len) {
  auto [start, end] = Window(ids.size(), focus, static_cast<size_t>(max_len));
  std::vector<int> out(ids.begin() + start, ids.begin() + end);
  out[focus - start] = kHoldoutId;
  return out;
}

}  // namespace

std::vector<int> EncodeHeldout(const Vocab& vocab, const Sentence& sentence,
                               int max_len) {
  ValidateSentence(sentence);
  std::vector<int> ids;
  ids.reserve(sentence.tokens.size());
  for (const auto& token : sentence.tokens) ids.push_back(vocab.Id(token));
  return HeldoutWindow(ids, static_cast<size_t>(sentence.focus), max_len);
}

std::vector<double> ContextFromIds(const LmParams& params,
                                   std::span<const int> ids) {
  CheckIds(params, ids);
  Trace trace;
  RunRecurrence(params, ids, &trace);
  const int h = params.hidden_dim();
  return Project(params, std::span<const double>(
                             &trace.hidden[static_cast<size_t>(trace.steps) * h],
                             static_cast<size_t>(h)));
}

ContextVector EmbedContextLm(const LmParams& params, const Vocab& vocab,
                             const Sentence& sentence, int max_len) {
  if (params.vocab_size() != vocab.size()) {
    throw Error(ErrorCode::kShapeMismatch,
                "model has V=" + std::to_string(params.vocab_size()) +
                    " but vocabulary has " + std::to_string(vocab.size()));
  }
  const auto ids = EncodeHeldout(vocab, sentence, max_len);
  return ContextVector{ContextFromIds(params, ids), kLmBackendTag};
}

std::vector<double> PredictHeldout(const LmParams& params,
                                   std::span<const double> context) {
  if (static_cast<int>(context.size()) != params.context_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "context has dim " + std::to_string(context.size()) +
                    ", model expects " + std::to_string(params.context_dim()));
  }
  std::vector<double> probs = Logits(params, context);
  double max_logit = -std::numeric_limits<double>::infinity();
  for (double x : probs) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kNonFinite, "logit");
    max_logit = std::max(max_logit, x);
  }
  double sum = 0.0;
  for (double& x : probs) {
    x = std::exp(x - max_logit);
    sum += x;
  }
  for (double& x : probs) x /= sum;
  return probs;
}

std::vector<std::pair<int, double>> TopK(std::span<const double> probs,
                                         size_t k) {
  std::vector<std::pair<int, double>> ranked;
  ranked.reserve(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    ranked.emplace_back(static_cast<int>(i), probs[i]);
  }
  k = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.second != b.second ? a.second > b.second
                                                  : a.first < b.first;
                    });
  ranked.resize(k);
  return ranked;
}

double HeldoutLossAndGradient(const LmParams& p, std::span<const int> ids,
                              int target, LmParams* grad) {
  CheckIds(p, ids);
  if (target < 0 || target >= p.vocab_size()) {
    throw Error(ErrorCode::kShapeMismatch, "target outside vocabulary");
  }
  const int d = p.embed_dim(), h = p.hidden_dim(), n = d + h;
  const int c = p.context_dim(), v = p.vocab_size();

  Trace tr;
  RunRecurrence(p, ids, &tr);
  const double* h_last = &tr.hidden[static_cast<size_t>(tr.steps) * h];
  const auto context = Project(p, std::span<const double>(h_last, h));
  auto logits = Logits(p, context);

  double max_logit = -std::numeric_limits<double>::infinity();
  for (double x : logits) max_logit = std::max(max_logit, x);
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - max_logit);
  const double log_z = max_logit + std::log(sum);
  const double loss = log_z - logits[target];
  if (grad == nullptr) return loss;

  // d loss / d logits = softmax - onehot(target).
  std::vector<double>& dlogits = logits;
  for (double& x : dlogits) x = std::exp(x - log_z);
  dlogits[target] -= 1.0;

  std::vector<double> dcontext(c, 0.0);
  for (int k = 0; k < v; ++k) grad->output_bias[k] += dlogits[k];
  for (int q = 0; q < c; ++q) {
    const double* orow = p.output.row(q).data();
    double* grow = grad->output.row(q).data();
    double acc = 0.0;
    for (int k = 0; k < v; ++k) {
      grow[k] += context[q] * dlogits[k];
      acc += orow[k] * dlogits[k];
    }
    dcontext[q] = acc;
  }

  std::vector<double> dh(h, 0.0), dc(h, 0.0), dz(n, 0.0);
  for (int j = 0; j < h; ++j) {
    const double* prow = p.projection.row(j).data();
    double* gprow = grad->projection.row(j).data();
    double acc = 0.0;
    for (int q = 0; q < c; ++q) {
      gprow[q] += h_last[j] * dcontext[q];
      acc += prow[q] * dcontext[q];
    }
    dh[j] = acc;
  }

  std::array<std::vector<double>, 4> da;
  for (auto& x : da) x.assign(h, 0.0);
  for (int t = tr.steps - 1; t >= 0; --t) {
    const size_t off = static_cast<size_t>(t) * h;
    const double* gi = &tr.gate[kInputGate][off];
    const double* gf = &tr.gate[kForgetGate][off];
    const double* go = &tr.gate[kOutputGate][off];
    const double* gc = &tr.gate[kCandidate][off];
    const double* tc = &tr.tanh_cell[off];
    const double* c_prev = &tr.cell[off];
    for (int j = 0; j < h; ++j) {
      const double d_out = dh[j] * tc[j];
      const double d_cell = dc[j] + dh[j] * go[j] * (1.0 - tc[j] * tc[j]);
      da[kInputGate][j] = d_cell * gc[j] * gi[j] * (1.0 - gi[j]);
      da[kForgetGate][j] = d_cell * c_prev[j] * gf[j] * (1.0 - gf[j]);
      da[kOutputGate][j] = d_out * go[j] * (1.0 - go[j]);
      da[kCandidate][j] = d_cell * gi[j] * (1.0 - gc[j] * gc[j]);
      dc[j] = d_cell * gf[j];
    }

    const double* z = &tr.input[static_cast<size_t>(t) * n];
    std::fill(dz.begin(), dz.end(), 0.0);
    for (int g = 0; g < 4; ++g) {
      const double* a = da[g].data();
      for (int j = 0; j < h; ++j) grad->gate_biases[g][j] += a[j];
      const Matrix& w = p.gate_weights[g];
      Matrix& gw = grad->gate_weights[g];
      for (int r = 0; r < n; ++r) {
        const double* wr = w.row(r).data();
        double* gwr = gw.row(r).data();
        const double zr = z[r];
        double acc = 0.0;
        for (int j = 0; j < h; ++j) {
          gwr[j] += zr * a[j];
          acc += wr[j] * a[j];
        }
        dz[r] += acc;
      }
    }
    double* gemb = grad->embeddings.row(ids[t]).data();
    for (int r = 0; r < d; ++r) gemb[r] += dz[r];
    std::copy(dz.begin() + d, dz.end(), dh.begin());
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Position {
  uint32_t sentence;
  uint32_t index;
};

std::vector<std::span<double>> Blocks(LmParams& p) {
  std::vector<std::span<double>> blocks;
  p.ForEachBlock([&](const char*, std::span<double> b) { blocks.push_back(b); });
  return blocks;
}

}  // namespace

LmParams TrainLm(const TokenStream& text, const Vocab& vocab,
                 const LmConfig& config, TrainReport* report,
                 const EpochCallback& on_epoch) {
  config.Validate();
  std::vector<std::vector<int>> encoded;
  std::vector<Position> positions;
  for (const auto& sentence : text) {
    if (sentence.empty()) continue;
    std::vector<int> ids;
    for (const auto& token : sentence) ids.push_back(vocab.Id(token));
    const auto s = static_cast<uint32_t>(encoded.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] >= kNumReservedIds) {
        positions.push_back({s, static_cast<uint32_t>(i)});
      }
    }
    encoded.push_back(std::move(ids));
  }
  if (encoded.empty()) {
    throw Error(ErrorCode::kEmptyStream, "no sentences in LM text");
  }

  const int v = vocab.size();
  LmParams params = LmParams::Random(v, config.embed_dim, config.hidden_dim,
                                     config.context_dim, config.seed);
  auto loss_at = [&](const LmParams& p, const Position& pos,
                     LmParams* grad) {
    const auto& ids = encoded[pos.sentence];
    const auto seq = HeldoutWindow(ids, pos.index, config.max_len);
    return HeldoutLossAndGradient(p, seq, ids[pos.index], grad);
  };

  if (report != nullptr) {
    double total = 0.0;
    for (const auto& pos : positions) total += loss_at(params, pos, nullptr);
    report->initial_loss =
        positions.empty() ? 0.0 : total / static_cast<double>(positions.size());
    report->epoch_loss.clear();
  }

  // Adagrad accumulators start at 0.1.
  LmParams accum = LmParams::Zeros(v, config.embed_dim, config.hidden_dim,
                                   config.context_dim);
  for (auto block : Blocks(accum)) std::fill(block.begin(), block.end(), 0.1);
  LmParams grad = LmParams::Zeros(v, config.embed_dim, config.hidden_dim,
                                  config.context_dim);
  auto param_blocks = Blocks(params);
  auto accum_blocks = Blocks(accum);
  auto grad_blocks = Blocks(grad);
  const double lr = config.learning_rate;

  auto update = [&](std::span<double> w, std::span<double> acc,
                    std::span<double> g) {
    for (size_t k = 0; k < w.size(); ++k) {
      acc[k] += g[k] * g[k];
      w[k] -= lr * g[k] / std::sqrt(acc[k]);
      g[k] = 0.0;
    }
  };

  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Position> order = positions;
  std::vector<int> touched;
  const double total_count = static_cast<double>(vocab.total_count());
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng.Shuffle(order);
    double epoch_total = 0.0;
    size_t used = 0;
    for (const auto& pos : order) {
      const auto& ids = encoded[pos.sentence];
      const int target = ids[pos.index];
      if (config.downsample && total_count > 0.0) {
        const double freq =
            static_cast<double>(vocab.Frequency(target)) / total_count;
        const double keep =
            freq > 0.0 ? std::sqrt(config.downsample_threshold / freq) : 1.0;
        if (keep < 1.0 && rng.Uniform() >= keep) continue;
      }
      const auto seq = HeldoutWindow(ids, pos.index, config.max_len);
      const double loss = HeldoutLossAndGradient(params, seq, target, &grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::kNonFinite,
                    "training loss diverged in epoch " +
                        std::to_string(epoch + 1));
      }
      epoch_total += loss;
      ++used;

      // Embedding rows are updated sparsely; every other block densely.
      touched.assign(seq.begin(), seq.end());
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()),
                    touched.end());
      for (int id : touched) {
        update(params.embeddings.row(id), accum.embeddings.row(id),
               grad.embeddings.row(id));
      }
      for (size_t b = 1; b < param_blocks.size(); ++b) {
        update(param_blocks[b], accum_blocks[b], grad_blocks[b]);
      }
    }
    const double mean = used > 0 ? epoch_total / static_cast<double>(used) : 0.0;
    if (report != nullptr) report->epoch_loss.push_back(mean);
    if (on_epoch) on_epoch(epoch + 1, mean);
  }
  params.Validate();
  return params;
}

HeldoutEval EvaluateHeldout(const LmParams& params, const Vocab& vocab,
                            const TokenStream& text, int max_len) {
  HeldoutEval eval;
  double total = 0.0;
  size_t correct = 0;
  for (const auto& sentence : text) {
    std::vector<int> ids;
    for (const auto& token : sentence) ids.push_back(vocab.Id(token));
    for (size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < kNumReservedIds) continue;
      const auto seq = HeldoutWindow(ids, i, max_len);
      total += HeldoutLossAndGradient(params, seq, ids[i], nullptr);
      const auto probs = PredictHeldout(params, ContextFromIds(params, seq));
      if (TopK(probs, 1).front().first == ids[i]) ++correct;
      ++eval.positions;
    }
  }
  if (eval.positions > 0) {
    eval.mean_loss = total / static_cast<double>(eval.positions);
    eval.top1_accuracy =
        static_cast<double>(correct) / static_cast<double>(eval.positions);
  }
  return eval;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

std::filesystem::path WithSuffix(const std::filesystem::path& prefix,
                                 const char* suffix) {
  return std::filesystem::path(prefix.string() + suffix);
}

void AppendFloat32Le(std::string* out, double value) {
  const float f = static_cast<float>(value);
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  for (int k = 0; k < 4; ++k) out->push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
}

double ReadFloat32Le(const unsigned char* bytes) {
  uint32_t bits = 0;
  for (int k = 0; k < 4; ++k) bits |= static_cast<uint32_t>(bytes[k]) << (8 * k);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

}  // namespace

void SaveLmModel(const std::filesystem::path& prefix, const LmModel& model,
                 const std::string& fingerprint) {
  model.params.Validate();
  if (model.params.vocab_size() != model.vocab.size()) {
    throw Error(ErrorCode::kShapeMismatch, "params and vocab disagree on V");
  }
  const auto name = prefix.filename().string();

  std::string vocab_text;
  for (const auto& word : model.vocab.words()) vocab_text += word + "\n";

  std::string weights;
  weights.reserve(model.params.ParameterCount() * 4);
  Json blocks = Json::array();
  model.params.ForEachBlock([&](const char* block, std::span<const double> values) {
    blocks.push_back(Json{{"name", block}, {"size", values.size()}});
    for (double x : values) AppendFloat32Le(&weights, x);
  });

  Json manifest{
      {"format", "wsd-lm/1"},
      {"vocab_size", model.params.vocab_size()},
      {"embed_dim", model.params.embed_dim()},
      {"hidden_dim", model.params.hidden_dim()},
      {"context_dim", model.params.context_dim()},
      {"vocab_file", name + ".vocab.txt"},
      {"vocab_hash", HexDigest(model.vocab.Hash())},
      {"weights_file", name + ".weights.bin"},
      {"weights_dtype", "float32-le"},
      {"blocks", blocks},
      {"config", internal::ToJson(model.config)},
      {"fingerprint", fingerprint},
  };
  WriteFile(WithSuffix(prefix, ".vocab.txt"), vocab_text);
  WriteFile(WithSuffix(prefix, ".weights.bin"), weights);
  WriteFile(WithSuffix(prefix, ".manifest.json"), manifest.dump(2) + "\n");
}

LmModel LoadLmModel(const std::filesystem::path& prefix) {
  const auto manifest_path = WithSuffix(prefix, ".manifest.json");
  Json manifest;
  try {
    manifest = Json::parse(ReadFile(manifest_path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, manifest_path.string() + ": " + e.what());
  }
  const auto dir = manifest_path.parent_path();
  LmModel model;
  try {
    model.config = internal::LmConfigFromJson(manifest.at("config"));
    const int v = manifest.at("vocab_size").get<int>();
    const int d = manifest.at("embed_dim").get<int>();
    const int h = manifest.at("hidden_dim").get<int>();
    const int c = manifest.at("context_dim").get<int>();

    std::vector<std::string> words;
    for (auto& line :
         SplitWhitespace(ReadFile(dir / manifest.at("vocab_file").get<std::string>()))) {
      words.push_back(std::move(line));
    }
    model.vocab = Vocab::FromWords(std::move(words));
    if (model.vocab.size() != v ||
        HexDigest(model.vocab.Hash()) != manifest.at("vocab_hash").get<std::string>()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "vocabulary file does not match manifest");
    }

    model.params = LmParams::Zeros(v, d, h, c);
    const std::string weights =
        ReadFile(dir / manifest.at("weights_file").get<std::string>());
    if (weights.size() != model.params.ParameterCount() * 4) {
      throw Error(ErrorCode::kShapeMismatch,
                  "weights file has " + std::to_string(weights.size()) +
                      " bytes, expected " +
                      std::to_string(model.params.ParameterCount() * 4));
    }
    const auto* bytes = reinterpret_cast<const unsigned char*>(weights.data());
    size_t offset = 0;
    model.params.ForEachBlock([&](const char*, std::span<double> values) {
      for (double& x : values) {
        x = ReadFloat32Le(bytes + offset);
        offset += 4;
      }
    });
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, manifest_path.string() + ": " + e.what());
  }
  model.params.Validate();
  return model;
}

}  // namespace wsd
