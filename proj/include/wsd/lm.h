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

// Held-out-word language model.
//
// The focus word of a sentence is replaced by the reserved symbol "$" and the
// whole sentence is consumed left to right by a single-layer LSTM. The final
// hidden state h_T is projected to a context layer, and a full softmax over
// the vocabulary predicts the held-out word:
//
//   z_t = [x_t ; h_{t-1}]                       x_t = E[id_t]
//   i_t = sigmoid(z_t W_i + b_i)                f_t = sigmoid(z_t W_f + b_f)
//   o_t = sigmoid(z_t W_o + b_o)                g_t = tanh(z_t W_c + b_c)
//   c_t = f_t * c_{t-1} + i_t * g_t             h_t = o_t * tanh(c_t)
//   context = h_T P                             p(w) = softmax(context O + b)
//
// with h_0 = c_0 = 0. Vectors are rows; W_k is (d+h) x h, P is h x p and O is
// p x V. The context vector is read at the end of the sentence regardless of
// where the focus sits.

#ifndef WSD_LM_H_
#define WSD_LM_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsd/context_vector.h"
#include "wsd/corpus.h"

namespace wsd {

// Reserved vocabulary ids. Ordinary words start at kNumReservedIds.
inline constexpr int kHoldoutId = 0;
inline constexpr int kUnkId = 1;
inline constexpr int kPadId = 2;
inline constexpr int kNumReservedIds = 3;
inline constexpr std::string_view kHoldoutSymbol = "$";
inline constexpr std::string_view kUnkSymbol = "<unk>";
inline constexpr std::string_view kPadSymbol = "<pad>";

inline constexpr char kLmBackendTag[] = "lm";

class Vocab {
 public:
  // Keeps the max_size most frequent words, ties broken lexicographically.
  // Text tokens spelled like a reserved symbol are counted as UNK. Throws
  // kEmptyStream when the text has no tokens.
  static Vocab Build(const TokenStream& text, size_t max_size);

  // Rebuilds from a rank-ordered word list whose first entries are the
  // reserved symbols. Frequencies are not stored in that form and read as 0.
  static Vocab FromWords(std::vector<std::string> words);

  // Returns kUnkId for out-of-vocabulary words.
  int Id(std::string_view word) const;
  const std::string& Word(int id) const { return words_.at(id); }
  int64_t Frequency(int id) const { return counts_.at(id); }
  int64_t total_count() const { return total_; }
  int size() const { return static_cast<int>(words_.size()); }
  const std::vector<std::string>& words() const { return words_; }

  // Hash of the rank-ordered word list.
  uint64_t Hash() const;

 private:
  std::vector<std::string> words_;
  std::vector<int64_t> counts_;
  int64_t total_ = 0;
  std::unordered_map<std::string, int> ids_;
};

Vocab BuildVocab(const TokenStream& text, size_t max_size);

struct LmConfig {
  // Maximum number of ordinary words; the model vocabulary adds the
  // reserved ids on top.
  int vocab_size = 50000;
  int embed_dim = 32;
  int hidden_dim = 64;
  int context_dim = 32;
  double learning_rate = 0.1;
  // Focus targets are discarded with probability 1 - sqrt(t / f(w)).
  bool downsample = true;
  double downsample_threshold = 1e-5;
  int max_epochs = 10;
  // Longer sentences are cut to a window centred on the focus.
  int max_len = 64;
  uint64_t seed = 1;

  // Throws kConfig.
  void Validate() const;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int r, int c) { return data_[r * cols_ + c]; }
  double operator()(int r, int c) const { return data_[r * cols_ + c]; }
  std::span<double> row(int r) { return {data_.data() + r * cols_, static_cast<size_t>(cols_)}; }
  std::span<const double> row(int r) const { return {data_.data() + r * cols_, static_cast<size_t>(cols_)}; }
  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

enum Gate { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidate = 3 };

struct LmParams {
  Matrix embeddings;                         // V x d
  std::array<Matrix, 4> gate_weights;        // (d+h) x h, indexed by Gate
  std::array<std::vector<double>, 4> gate_biases;  // h
  Matrix projection;                         // h x p
  Matrix output;                             // p x V
  std::vector<double> output_bias;           // V

  static LmParams Zeros(int vocab_size, int embed_dim, int hidden_dim,
                        int context_dim);
  // Weights uniform in [-0.05, 0.05], biases zero.
  static LmParams Random(int vocab_size, int embed_dim, int hidden_dim,
                         int context_dim, uint64_t seed);

  int vocab_size() const { return embeddings.rows(); }
  int embed_dim() const { return embeddings.cols(); }
  int hidden_dim() const { return projection.rows(); }
  int context_dim() const { return projection.cols(); }

  // Throws kShapeMismatch or kNonFinite.
  void Validate() const;

  // Visits every block in persistence order: embeddings, gate weights
  // i/f/o/c, projection, output, gate biases i/f/o/c, output bias.
  template <typename Fn>
  void ForEachBlock(Fn&& fn) {
    fn("embeddings", embeddings.flat());
    for (int g = 0; g < 4; ++g) fn(kGateNames[g], gate_weights[g].flat());
    fn("projection", projection.flat());
    fn("output", output.flat());
    for (int g = 0; g < 4; ++g) fn(kBiasNames[g], std::span<double>(gate_biases[g]));
    fn("output_bias", std::span<double>(output_bias));
  }
  template <typename Fn>
  void ForEachBlock(Fn&& fn) const {
    fn("embeddings", embeddings.flat());
    for (int g = 0; g < 4; ++g) fn(kGateNames[g], gate_weights[g].flat());
    fn("projection", projection.flat());
    fn("output", output.flat());
    for (int g = 0; g < 4; ++g) fn(kBiasNames[g], std::span<const double>(gate_biases[g]));
    fn("output_bias", std::span<const double>(output_bias));
  }

  size_t ParameterCount() const;

  bool operator==(const LmParams&) const = default;

  static constexpr const char* kGateNames[4] = {"gate_i", "gate_f", "gate_o",
                                                "gate_c"};
  static constexpr const char* kBiasNames[4] = {"bias_i", "bias_f", "bias_o",
                                                "bias_c"};
};

// Maps tokens to ids (UNK for OOV), replaces the focus with kHoldoutId and
// cuts sentences longer than max_len to a window around the focus.
std::vector<int> EncodeHeldout(const Vocab& vocab, const Sentence& sentence,
                               int max_len);

// Runs the recurrence over already-encoded ids and projects h_T.
std::vector<double> ContextFromIds(const LmParams& params,
                                   std::span<const int> ids);

// Throws kShapeMismatch when params and vocab disagree on V.
ContextVector EmbedContextLm(const LmParams& params, const Vocab& vocab,
                             const Sentence& sentence, int max_len = 64);

// Softmax over the vocabulary. Throws kDimensionMismatch or kNonFinite.
std::vector<double> PredictHeldout(const LmParams& params,
                                   std::span<const double> context);

// Highest-probability ids, ties by lower id.
std::vector<std::pair<int, double>> TopK(std::span<const double> probs,
                                         size_t k);

// Cross-entropy of predicting `target` from `ids`. When grad is non-null the
// analytic gradient is added into it; grad must have the shapes of params.
double HeldoutLossAndGradient(const LmParams& params, std::span<const int> ids,
                              int target, LmParams* grad);

struct TrainReport {
  // Mean held-out loss over every eligible position before training.
  double initial_loss = 0.0;
  // Mean loss over the examples visited in each epoch.
  std::vector<double> epoch_loss;
};

using EpochCallback = std::function<void(int epoch, double mean_loss)>;

// Every in-vocabulary position of every sentence is a held-out target, subject
// to frequency downsampling. Updates are per example with Adagrad. Throws
// kNonFinite if the loss diverges.
LmParams TrainLm(const TokenStream& text, const Vocab& vocab,
                 const LmConfig& config, TrainReport* report = nullptr,
                 const EpochCallback& on_epoch = {});

// Mean loss and top-1 accuracy over all eligible positions, no downsampling.
struct HeldoutEval {
  double mean_loss = 0.0;
  double top1_accuracy = 0.0;
  size_t positions = 0;
};
HeldoutEval EvaluateHeldout(const LmParams& params, const Vocab& vocab,
                            const TokenStream& text, int max_len = 64);

struct LmModel {
  Vocab vocab;
  LmParams params;
  LmConfig config;
};

// Writes <prefix>.manifest.json, <prefix>.weights.bin and <prefix>.vocab.txt.
// Weights are little-endian float32 in ForEachBlock order.
void SaveLmModel(const std::filesystem::path& prefix, const LmModel& model,
                 const std::string& fingerprint = "");

// Throws kShapeMismatch if the files disagree with the manifest.
LmModel LoadLmModel(const std::filesystem::path& prefix);

}  // namespace wsd

#endif  // WSD_LM_H_
