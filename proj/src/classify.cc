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

#include "wsd/classify.h"

#include <cmath>

#include "jsonl.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

using internal::Json;

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kNn: return "nn";
    case Method::kLp: return "lp";
    case Method::kMfs: return "mfs";
  }
  return "?";
}

Method ParseMethod(std::string_view name) {
  if (name == "nn") return Method::kNn;
  if (name == "lp") return Method::kLp;
  if (name == "mfs") return Method::kMfs;
  throw Error(ErrorCode::kConfig, "unknown method \"" + std::string(name) + "\"");
}

const SenseVector* SenseVectors::Find(const std::string& sense_id) const {
  for (const auto& sv : senses) {
    if (sv.sense_id == sense_id) return &sv;
  }
  return nullptr;
}

SenseVectors AverageSenseVectors(
    const std::string& lemma,
    std::span<const std::pair<std::string, ContextVector>> labeled_contexts,
    const SenseInventory& inventory, bool normalize) {
  const auto& sense_ids = inventory.Senses(lemma);
  SenseVectors out;
  out.lemma = lemma;
  if (labeled_contexts.empty()) return out;
  out.backend_tag = labeled_contexts.front().second.backend_tag;
  out.dim = labeled_contexts.front().second.dim();

  std::vector<std::vector<double>> sums(sense_ids.size(),
                                        std::vector<double>(out.dim, 0.0));
  std::vector<int> counts(sense_ids.size(), 0);
  for (const auto& [sense, context] : labeled_contexts) {
    if (context.backend_tag != out.backend_tag) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mixed backends in sense vector build");
    }
    if (context.dim() != out.dim) {
      throw Error(ErrorCode::kDimensionMismatch, "context dims differ");
    }
    auto index = inventory.SenseIndex(lemma, sense);
    if (!index) {
      throw Error(ErrorCode::kUnknownSense,
                  "\"" + sense + "\" for lemma \"" + lemma + "\"");
    }
    double scale = 1.0;
    if (normalize) {
      double norm = 0.0;
      for (double x : context.values) norm += x * x;
      norm = std::sqrt(norm);
      if (norm >= kZeroNorm) scale = 1.0 / norm;
    }
    auto& sum = sums[*index];
    for (int k = 0; k < out.dim; ++k) sum[k] += scale * context.values[k];
    ++counts[*index];
  }
  for (size_t s = 0; s < sense_ids.size(); ++s) {
    if (counts[s] == 0) continue;
    SenseVector sv{sense_ids[s], std::move(sums[s]), counts[s]};
    for (double& x : sv.values) x /= counts[s];
    out.senses.push_back(std::move(sv));
  }
  return out;
}

SenseVectors BuildSenseVectors(std::span<const LabeledExample> examples,
                               const ContextEmbedder& embedder,
                               const SenseInventory& inventory, bool normalize,
                               std::vector<std::string>* warnings) {
  if (examples.empty()) {
    SenseVectors out;
    out.backend_tag = embedder.tag();
    out.dim = embedder.dim();
    return out;
  }
  const std::string& lemma = examples.front().lemma;
  std::vector<std::pair<std::string, ContextVector>> contexts;
  std::map<std::string, int> attempted;
  for (const auto& example : examples) {
    if (example.lemma != lemma) {
      throw Error(ErrorCode::kInvalidArgument,
                  "examples span lemmas \"" + lemma + "\" and \"" +
                      example.lemma + "\"");
    }
    ++attempted[example.sense_id];
    try {
      contexts.emplace_back(example.sense_id, embedder.Embed(example.sentence));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyContext) throw;
    }
  }
  SenseVectors out = AverageSenseVectors(lemma, contexts, inventory, normalize);
  out.backend_tag = embedder.tag();
  out.dim = embedder.dim();
  if (warnings != nullptr) {
    for (const auto& [sense, n] : attempted) {
      if (out.Find(sense) == nullptr) {
        warnings->push_back("sense \"" + sense + "\" of \"" + lemma +
                            "\" dropped: all " + std::to_string(n) +
                            " examples had empty contexts");
      }
    }
  }
  return out;
}

Prediction ClassifyNn(const ContextVector& context, const SenseVectors& senses,
                      const SenseInventory& inventory) {
  if (senses.empty()) return Prediction::Abstain(Method::kNn);
  if (context.backend_tag != senses.backend_tag) {
    throw Error(ErrorCode::kInvalidArgument,
                "context from backend \"" + context.backend_tag +
                    "\" but sense vectors from \"" + senses.backend_tag + "\"");
  }
  // Ties go to the lower inventory index, whatever order the store holds.
  const SenseVector* best = nullptr;
  double best_score = 0.0;
  size_t best_rank = 0;
  for (const auto& sv : senses.senses) {
    const auto rank = inventory.SenseIndex(senses.lemma, sv.sense_id);
    if (!rank) {
      throw Error(ErrorCode::kUnknownSense,
                  "\"" + sv.sense_id + "\" for lemma \"" + senses.lemma + "\"");
    }
    const double score = Cosine(context.values, sv.values);
    if (best == nullptr || score > best_score ||
        (score == best_score && *rank < best_rank)) {
      best = &sv;
      best_score = score;
      best_rank = *rank;
    }
  }
  return Prediction{best->sense_id, best_score, Method::kNn, false};
}

SenseFrequencies SenseFrequencies::FromInventory(
    const SenseInventory& inventory) {
  SenseFrequencies freq;
  for (const auto& lemma : inventory.lemmas()) {
    if (const auto* counts = inventory.PriorCounts(lemma)) {
      freq.Set(lemma, *counts);
    }
  }
  return freq;
}

SenseFrequencies SenseFrequencies::FromExamples(
    std::span<const LabeledExample> examples, const SenseInventory& inventory) {
  SenseFrequencies freq;
  for (const auto& example : examples) {
    auto index = inventory.SenseIndex(example.lemma, example.sense_id);
    if (!index) {
      throw Error(ErrorCode::kUnknownSense, "\"" + example.sense_id + "\"");
    }
    auto& counts = freq.counts_[example.lemma];
    counts.resize(inventory.Senses(example.lemma).size(), 0);
    ++counts[*index];
  }
  return freq;
}

void SenseFrequencies::Set(const std::string& lemma,
                           std::vector<int64_t> counts) {
  counts_[lemma] = std::move(counts);
}

const std::vector<int64_t>* SenseFrequencies::Counts(
    const std::string& lemma) const {
  auto it = counts_.find(lemma);
  return it == counts_.end() ? nullptr : &it->second;
}

Prediction ClassifyMfs(const std::string& lemma,
                       const SenseInventory& inventory,
                       const SenseFrequencies& frequencies) {
  const auto& senses = inventory.Senses(lemma);
  size_t best = 0;
  double score = 0.0;
  const auto* counts = frequencies.Counts(lemma);
  if (counts != nullptr && counts->size() == senses.size()) {
    int64_t total = 0;
    for (size_t s = 0; s < senses.size(); ++s) {
      total += (*counts)[s];
      if ((*counts)[s] > (*counts)[best]) best = s;
    }
    if (total > 0) {
      score = static_cast<double>((*counts)[best]) / static_cast<double>(total);
    }
  }
  return Prediction{senses[best], score, Method::kMfs, false};
}

void WriteSenseVectors(const std::filesystem::path& prefix,
                       const std::vector<SenseVectors>& all,
                       const std::string& fingerprint) {
  std::string records;
  std::string tag;
  int dim = 0;
  for (const auto& lemma_vectors : all) {
    if (lemma_vectors.empty()) continue;
    if (tag.empty()) {
      tag = lemma_vectors.backend_tag;
      dim = lemma_vectors.dim;
    } else if (tag != lemma_vectors.backend_tag || dim != lemma_vectors.dim) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sense vector store mixes backends or dimensions");
    }
    for (const auto& sv : lemma_vectors.senses) {
      records += internal::Line(Json{{"lemma", lemma_vectors.lemma},
                                     {"sense", sv.sense_id},
                                     {"count", sv.count},
                                     {"values", sv.values}});
    }
  }
  Json manifest{{"format", "wsd-senses/1"},
                {"backend_tag", tag},
                {"dim", dim},
                {"fingerprint", fingerprint}};
  WriteFile(prefix.string() + ".jsonl", records);
  WriteFile(prefix.string() + ".manifest.json", manifest.dump(2) + "\n");
}

std::map<std::string, SenseVectors> LoadSenseVectors(
    const std::filesystem::path& prefix) {
  const std::filesystem::path manifest_path = prefix.string() + ".manifest.json";
  Json manifest;
  try {
    manifest = Json::parse(ReadFile(manifest_path));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, manifest_path.string() + ": " + e.what());
  }
  const std::string tag = manifest.value("backend_tag", "");
  const int dim = manifest.value("dim", 0);
  std::map<std::string, SenseVectors> out;
  const std::filesystem::path records_path = prefix.string() + ".jsonl";
  internal::ForEachJsonLine(records_path, [&](const Json& record, size_t line) {
    const auto where = internal::Where(records_path, line);
    auto lemma = internal::Field<std::string>(record, "lemma", where);
    SenseVector sv;
    sv.sense_id = internal::Field<std::string>(record, "sense", where);
    sv.count = internal::Field<int>(record, "count", where);
    sv.values = internal::Field<std::vector<double>>(record, "values", where);
    if (static_cast<int>(sv.values.size()) != dim) {
      throw Error(ErrorCode::kDimensionMismatch, where);
    }
    auto& entry = out[lemma];
    entry.lemma = lemma;
    entry.backend_tag = tag;
    entry.dim = dim;
    entry.senses.push_back(std::move(sv));
  });
  return out;
}

}  // namespace wsd
