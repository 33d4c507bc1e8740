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

// Context embedding backends behind one interface, plus a memoizing wrapper.

#ifndef WSD_EMBED_H_
#define WSD_EMBED_H_

#include <atomic>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wsd/context_vector.h"
#include "wsd/corpus.h"
#include "wsd/lm.h"

namespace wsd {

inline constexpr char kBowBackendTag[] = "bow";

// Below this norm a vector counts as zero and Cosine returns 0.
inline constexpr double kZeroNorm = 1e-12;

// u.v / (|u||v|), or 0 when either norm is below kZeroNorm. Throws
// kDimensionMismatch.
double Cosine(std::span<const double> u, std::span<const double> v);

class WordVectorTable {
 public:
  explicit WordVectorTable(int dim) : dim_(dim) {}

  // Throws kDimensionMismatch or kNonFinite. Re-adding a word replaces it.
  void Add(const std::string& word, std::vector<double> values);
  const std::vector<double>* Find(const std::string& word) const;

  int dim() const { return dim_; }
  size_t size() const { return words_.size(); }
  // Words in insertion order.
  const std::vector<std::string>& words() const { return words_; }

 private:
  int dim_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Text format, one "word v1 ... vD" per line; D comes from the first line. A
// leading word2vec-style "<count> <dim>" header line is skipped.
WordVectorTable LoadWordVectors(const std::filesystem::path& path);
void WriteWordVectors(const std::filesystem::path& path,
                      const WordVectorTable& table);

// Unweighted mean of the table vectors of the non-focus tokens; tokens
// missing from the table are skipped. window > 0 restricts the context to
// tokens within that distance of the focus. Throws kEmptyContext.
ContextVector EmbedContextBow(const WordVectorTable& table,
                              const Sentence& sentence, int window = 0);

class ContextBackend {
 public:
  virtual ~ContextBackend() = default;
  virtual std::string tag() const = 0;
  virtual int dim() const = 0;
  virtual ContextVector Embed(const Sentence& sentence) const = 0;
};

class BowBackend : public ContextBackend {
 public:
  explicit BowBackend(std::shared_ptr<const WordVectorTable> table,
                      int window = 0)
      : table_(std::move(table)), window_(window) {}

  std::string tag() const override { return kBowBackendTag; }
  int dim() const override { return table_->dim(); }
  ContextVector Embed(const Sentence& sentence) const override {
    return EmbedContextBow(*table_, sentence, window_);
  }

 private:
  std::shared_ptr<const WordVectorTable> table_;
  int window_;
};

class LmBackend : public ContextBackend {
 public:
  explicit LmBackend(std::shared_ptr<const LmModel> model)
      : model_(std::move(model)) {}

  std::string tag() const override { return kLmBackendTag; }
  int dim() const override { return model_->params.context_dim(); }
  ContextVector Embed(const Sentence& sentence) const override {
    return EmbedContextLm(model_->params, model_->vocab, sentence,
                          model_->config.max_len);
  }
  const LmModel& model() const { return *model_; }

 private:
  std::shared_ptr<const LmModel> model_;
};

// Dispatches to a backend and memoizes results by sentence identity (tokens
// plus focus). Safe for concurrent use; concurrent inserts of one key store
// identical values.
class ContextEmbedder {
 public:
  explicit ContextEmbedder(std::shared_ptr<const ContextBackend> backend)
      : backend_(std::move(backend)) {}

  // Backend errors (e.g. kEmptyContext) propagate and are not cached.
  ContextVector Embed(const Sentence& sentence) const;

  const ContextBackend& backend() const { return *backend_; }
  std::string tag() const { return backend_->tag(); }
  int dim() const { return backend_->dim(); }

  size_t cache_size() const;
  size_t cache_hits() const { return hits_.load(); }

  // JSONL {"key", "dim", "values"} sorted by key.
  void DumpCache(const std::filesystem::path& path) const;

  static std::string CacheKey(const Sentence& sentence);

 private:
  std::shared_ptr<const ContextBackend> backend_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, ContextVector> cache_;
  mutable std::atomic<size_t> hits_{0};
};

}  // namespace wsd

#endif  // WSD_EMBED_H_
