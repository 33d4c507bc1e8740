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

// Corpus ingestion: sense inventories, labeled examples, unlabeled sentence
// pools and raw language-model text. All record formats are JSONL, one
// record per line; blank lines are ignored. Tokens are taken verbatim: the
// loaders never re-tokenize, lowercase or lemmatize.

#ifndef WSD_CORPUS_H_
#define WSD_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace wsd {

struct Sentence {
  std::vector<std::string> tokens;
  int focus = 0;

  bool operator==(const Sentence&) const = default;
};

// Throws kFocusOutOfRange unless tokens is nonempty and focus indexes it.
void ValidateSentence(const Sentence& sentence);

struct LabeledExample {
  Sentence sentence;
  std::string lemma;
  std::string sense_id;

  bool operator==(const LabeledExample&) const = default;
};

// An instance to classify. Gold senses are optional; several are allowed
// when an annotation accepts more than one sense.
struct EvalInstance {
  std::string id;
  Sentence sentence;
  std::string lemma;
  std::vector<std::string> gold_senses;
};

// Per-lemma ordered sense lists. The listed order is significant: it is the
// tie-breaking order for every classifier.
class SenseInventory {
 public:
  // Throws kEmptySenseList, kDuplicateSense, or kParse for a repeated lemma
  // or a counts list whose length differs from the sense list.
  void AddLemma(const std::string& lemma, std::vector<std::string> senses,
                std::optional<std::string> pos = std::nullopt,
                std::optional<std::vector<int64_t>> counts = std::nullopt);

  bool Contains(const std::string& lemma) const;
  // Throws kUnknownLemma.
  const std::vector<std::string>& Senses(const std::string& lemma) const;
  std::optional<size_t> SenseIndex(const std::string& lemma,
                                   const std::string& sense) const;
  std::optional<std::string> Pos(const std::string& lemma) const;
  // Per-sense prior counts in sense order, if the inventory carries them.
  const std::vector<int64_t>* PriorCounts(const std::string& lemma) const;

  // Lemmas in insertion (file) order.
  const std::vector<std::string>& lemmas() const { return order_; }
  size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }

 private:
  struct Entry {
    std::vector<std::string> senses;
    std::optional<std::string> pos;
    std::optional<std::vector<int64_t>> counts;
  };
  const Entry& Lookup(const std::string& lemma) const;

  std::unordered_map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

using LabeledByLemma = std::map<std::string, std::vector<LabeledExample>>;
using UnlabeledByLemma = std::map<std::string, std::vector<Sentence>>;
using TokenStream = std::vector<std::vector<std::string>>;

inline constexpr size_t kDefaultUnlabeledCap = 1000;

struct CorpusIndex {
  LabeledByLemma labeled;
  UnlabeledByLemma unlabeled;
  TokenStream lm_text;
};

SenseInventory LoadInventory(const std::filesystem::path& path);

// Validates every record against the inventory; groups by lemma keeping file
// order within each group.
LabeledByLemma LoadLabeled(const std::filesystem::path& path,
                           const SenseInventory& inventory);

// Keeps the first `cap` sentences per lemma in file order. The focus token is
// not compared against the lemma, since surface forms are inflected.
UnlabeledByLemma LoadUnlabeled(const std::filesystem::path& path,
                               size_t cap = kDefaultUnlabeledCap);

// Records with an optional "id" (defaults to the zero-based record index) and
// an optional "sense" string or "senses" list. With require_gold, a record
// without gold senses is a kMissingField error. Lemmas are not checked
// against the inventory here, so unknown lemmas can abstain downstream.
std::vector<EvalInstance> LoadEvalInstances(const std::filesystem::path& path,
                                            bool require_gold);

// One whitespace-tokenized sentence per line; empty lines are skipped.
TokenStream LoadLmText(const std::filesystem::path& path);

void WriteInventory(const std::filesystem::path& path,
                    const SenseInventory& inventory);
void WriteLabeled(const std::filesystem::path& path,
                  const std::vector<LabeledExample>& examples);
// Unlabeled records need their lemma, so they are written from the grouped
// form; lemma groups are emitted in map order.
void WriteUnlabeled(const std::filesystem::path& path,
                    const UnlabeledByLemma& pool);
void WriteEvalInstances(const std::filesystem::path& path,
                        const std::vector<EvalInstance>& instances);
void WriteLmText(const std::filesystem::path& path, const TokenStream& text);

// Flattens grouped examples back to one list, lemma groups in map order.
std::vector<LabeledExample> Flatten(const LabeledByLemma& grouped);

}  // namespace wsd

#endif  // WSD_CORPUS_H_
