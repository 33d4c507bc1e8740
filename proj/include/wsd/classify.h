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

// Supervised classifiers: nearest sense vector by cosine, and the
// most-frequent-sense baseline.

#ifndef WSD_CLASSIFY_H_
#define WSD_CLASSIFY_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsd/context_vector.h"
#include "wsd/corpus.h"
#include "wsd/embed.h"

namespace wsd {

enum class Method { kNn, kLp, kMfs };

std::string_view MethodName(Method method);
// Throws kConfig for anything but "nn", "lp" or "mfs".
Method ParseMethod(std::string_view name);

struct Prediction {
  std::string sense_id;  // empty when abstained
  double score = 0.0;
  Method method = Method::kNn;
  bool abstained = false;

  static Prediction Abstain(Method method) {
    return Prediction{"", 0.0, method, true};
  }

  bool operator==(const Prediction&) const = default;
};

struct SenseVector {
  std::string sense_id;
  std::vector<double> values;
  int count = 0;
};

// Sense centroids for one lemma, stored in inventory order.
struct SenseVectors {
  std::string lemma;
  std::string backend_tag;
  int dim = 0;
  std::vector<SenseVector> senses;

  bool empty() const { return senses.empty(); }
  const SenseVector* Find(const std::string& sense_id) const;
};

// Averages context vectors per sense, L2-normalizing each first when
// `normalize` is set. Senses with no vectors are left out. Throws
// kInvalidArgument for mixed lemmas or backends and kUnknownSense for a
// sense missing from the inventory.
SenseVectors AverageSenseVectors(
    const std::string& lemma,
    std::span<const std::pair<std::string, ContextVector>> labeled_contexts,
    const SenseInventory& inventory, bool normalize = true);

// Embeds every example and averages per sense. Examples whose context is
// empty are skipped; a sense that loses all of its examples is omitted and
// reported through `warnings`.
SenseVectors BuildSenseVectors(std::span<const LabeledExample> examples,
                               const ContextEmbedder& embedder,
                               const SenseInventory& inventory,
                               bool normalize = true,
                               std::vector<std::string>* warnings = nullptr);

// Argmax cosine over sense vectors, ties to the inventory-earlier sense.
// Abstains when `senses` is empty. Throws kInvalidArgument when the context
// comes from a different backend.
Prediction ClassifyNn(const ContextVector& context, const SenseVectors& senses,
                      const SenseInventory& inventory);

// Per-lemma sense counts in inventory order.
class SenseFrequencies {
 public:
  static SenseFrequencies FromInventory(const SenseInventory& inventory);
  static SenseFrequencies FromExamples(std::span<const LabeledExample> examples,
                                       const SenseInventory& inventory);

  void Set(const std::string& lemma, std::vector<int64_t> counts);
  // nullptr when nothing is known for the lemma.
  const std::vector<int64_t>* Counts(const std::string& lemma) const;

 private:
  std::map<std::string, std::vector<int64_t>> counts_;
};

// Sense with the largest count; without counts (or with all-zero counts) the
// first-listed sense. Score is the winning sense's relative frequency.
// Throws kUnknownLemma.
Prediction ClassifyMfs(const std::string& lemma,
                       const SenseInventory& inventory,
                       const SenseFrequencies& frequencies);

// Store layout: <prefix>.jsonl with {"lemma","sense","count","values"} and
// <prefix>.manifest.json with the backend tag, dim and fingerprint.
void WriteSenseVectors(const std::filesystem::path& prefix,
                       const std::vector<SenseVectors>& all,
                       const std::string& fingerprint = "");
std::map<std::string, SenseVectors> LoadSenseVectors(
    const std::filesystem::path& prefix);

}  // namespace wsd

#endif  // WSD_CLASSIFY_H_
