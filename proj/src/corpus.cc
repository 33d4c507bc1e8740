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

#include "wsd/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "jsonl.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

using internal::Field;
using internal::Json;
using internal::Where;

void ValidateSentence(const Sentence& sentence) {
  if (sentence.tokens.empty()) {
    throw Error(ErrorCode::kFocusOutOfRange, "sentence has no tokens");
  }
  if (sentence.focus < 0 ||
      static_cast<size_t>(sentence.focus) >= sentence.tokens.size()) {
    throw Error(ErrorCode::kFocusOutOfRange,
                "focus " + std::to_string(sentence.focus) +
                    " outside sentence of length " +
                    std::to_string(sentence.tokens.size()));
  }
}

void SenseInventory::AddLemma(const std::string& lemma,
                              std::vector<std::string> senses,
                              std::optional<std::string> pos,
                              std::optional<std::vector<int64_t>> counts) {
  if (senses.empty()) {
    throw Error(ErrorCode::kEmptySenseList, "lemma \"" + lemma + "\"");
  }
  std::unordered_set<std::string> seen;
  for (const auto& sense : senses) {
    if (!seen.insert(sense).second) {
      throw Error(ErrorCode::kDuplicateSense,
                  "sense \"" + sense + "\" repeated for lemma \"" + lemma +
                      "\"");
    }
  }
  if (counts) {
    if (counts->size() != senses.size()) {
      throw Error(ErrorCode::kParse, "lemma \"" + lemma + "\" has " +
                                         std::to_string(senses.size()) +
                                         " senses but " +
                                         std::to_string(counts->size()) +
                                         " counts");
    }
    for (int64_t c : *counts) {
      if (c < 0) {
        throw Error(ErrorCode::kParse,
                    "negative prior count for lemma \"" + lemma + "\"");
      }
    }
  }
  if (entries_.contains(lemma)) {
    throw Error(ErrorCode::kParse, "lemma \"" + lemma + "\" listed twice");
  }
  entries_.emplace(lemma, Entry{std::move(senses), std::move(pos),
                                std::move(counts)});
  order_.push_back(lemma);
}

bool SenseInventory::Contains(const std::string& lemma) const {
  return entries_.contains(lemma);
}

const SenseInventory::Entry& SenseInventory::Lookup(
    const std::string& lemma) const {
  auto it = entries_.find(lemma);
  if (it == entries_.end()) {
    throw Error(ErrorCode::kUnknownLemma, "\"" + lemma + "\"");
  }
  return it->second;
}

const std::vector<std::string>& SenseInventory::Senses(
    const std::string& lemma) const {
  return Lookup(lemma).senses;
}

std::optional<size_t> SenseInventory::SenseIndex(
    const std::string& lemma, const std::string& sense) const {
  const auto& senses = Lookup(lemma).senses;
  for (size_t i = 0; i < senses.size(); ++i) {
    if (senses[i] == sense) return i;
  }
  return std::nullopt;
}

std::optional<std::string> SenseInventory::Pos(const std::string& lemma) const {
  return Lookup(lemma).pos;
}

const std::vector<int64_t>* SenseInventory::PriorCounts(
    const std::string& lemma) const {
  const auto& entry = Lookup(lemma);
  return entry.counts ? &*entry.counts : nullptr;
}

SenseInventory LoadInventory(const std::filesystem::path& path) {
  SenseInventory inventory;
  internal::ForEachJsonLine(path, [&](const Json& record, size_t line) {
    const std::string where = Where(path, line);
    auto lemma = Field<std::string>(record, "lemma", where);
    auto senses = Field<std::vector<std::string>>(record, "senses", where);
    std::optional<std::string> pos;
    if (record.contains("pos") && !record["pos"].is_null()) {
      pos = Field<std::string>(record, "pos", where);
    }
    std::optional<std::vector<int64_t>> counts;
    if (record.contains("counts") && !record["counts"].is_null()) {
      counts = Field<std::vector<int64_t>>(record, "counts", where);
    }
    try {
      inventory.AddLemma(lemma, std::move(senses), std::move(pos),
                         std::move(counts));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  });
  return inventory;
}

namespace {

Sentence ParseSentence(const Json& record, const std::string& where) {
  Sentence sentence;
  sentence.tokens = Field<std::vector<std::string>>(record, "tokens", where);
  sentence.focus = Field<int>(record, "focus", where);
  try {
    ValidateSentence(sentence);
  } catch (const Error& e) {
    throw Error(e.code(), where + ": " + e.what());
  }
  return sentence;
}

Json SentenceJson(const Sentence& sentence) {
  return Json{{"tokens", sentence.tokens}, {"focus", sentence.focus}};
}

}  // namespace

LabeledByLemma LoadLabeled(const std::filesystem::path& path,
                           const SenseInventory& inventory) {
  LabeledByLemma grouped;
  internal::ForEachJsonLine(path, [&](const Json& record, size_t line) {
    const std::string where = Where(path, line);
    LabeledExample example;
    example.sentence = ParseSentence(record, where);
    example.lemma = Field<std::string>(record, "lemma", where);
    example.sense_id = Field<std::string>(record, "sense", where);
    if (!inventory.Contains(example.lemma)) {
      throw Error(ErrorCode::kUnknownLemma,
                  where + ": lemma \"" + example.lemma + "\"");
    }
    if (!inventory.SenseIndex(example.lemma, example.sense_id)) {
      throw Error(ErrorCode::kUnknownSense,
                  where + ": sense \"" + example.sense_id +
                      "\" not listed for lemma \"" + example.lemma + "\"");
    }
    grouped[example.lemma].push_back(std::move(example));
  });
  return grouped;
}

UnlabeledByLemma LoadUnlabeled(const std::filesystem::path& path, size_t cap) {
  UnlabeledByLemma grouped;
  internal::ForEachJsonLine(path, [&](const Json& record, size_t line) {
    const std::string where = Where(path, line);
    Sentence sentence = ParseSentence(record, where);
    auto lemma = Field<std::string>(record, "lemma", where);
    auto& pool = grouped[lemma];
    if (pool.size() < cap) pool.push_back(std::move(sentence));
  });
  return grouped;
}

std::vector<EvalInstance> LoadEvalInstances(const std::filesystem::path& path,
                                            bool require_gold) {
  std::vector<EvalInstance> instances;
  std::unordered_set<std::string> ids;
  internal::ForEachJsonLine(path, [&](const Json& record, size_t line) {
    const std::string where = Where(path, line);
    EvalInstance instance;
    if (record.contains("id")) {
      const Json& id = record["id"];
      instance.id = id.is_string() ? id.get<std::string>() : id.dump();
    } else {
      instance.id = std::to_string(instances.size());
    }
    if (!ids.insert(instance.id).second) {
      throw Error(ErrorCode::kIdMismatch,
                  where + ": duplicate id \"" + instance.id + "\"");
    }
    instance.sentence = ParseSentence(record, where);
    instance.lemma = Field<std::string>(record, "lemma", where);
    if (record.contains("senses")) {
      instance.gold_senses =
          Field<std::vector<std::string>>(record, "senses", where);
    } else if (record.contains("sense")) {
      instance.gold_senses.push_back(Field<std::string>(record, "sense", where));
    }
    if (require_gold && instance.gold_senses.empty()) {
      throw Error(ErrorCode::kMissingField, where + ": no gold sense");
    }
    instances.push_back(std::move(instance));
  });
  return instances;
}

TokenStream LoadLmText(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  TokenStream text;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = SplitWhitespace(line);
    if (!tokens.empty()) text.push_back(std::move(tokens));
  }
  return text;
}

void WriteInventory(const std::filesystem::path& path,
                    const SenseInventory& inventory) {
  std::string out;
  for (const auto& lemma : inventory.lemmas()) {
    Json record{{"lemma", lemma}, {"senses", inventory.Senses(lemma)}};
    if (auto pos = inventory.Pos(lemma)) record["pos"] = *pos;
    if (const auto* counts = inventory.PriorCounts(lemma)) {
      record["counts"] = *counts;
    }
    out += internal::Line(record);
  }
  WriteFile(path, out);
}

void WriteLabeled(const std::filesystem::path& path,
                  const std::vector<LabeledExample>& examples) {
  std::string out;
  for (const auto& example : examples) {
    Json record = SentenceJson(example.sentence);
    record["lemma"] = example.lemma;
    record["sense"] = example.sense_id;
    out += internal::Line(record);
  }
  WriteFile(path, out);
}

void WriteUnlabeled(const std::filesystem::path& path,
                    const UnlabeledByLemma& pool) {
  std::string out;
  for (const auto& [lemma, sentences] : pool) {
    for (const auto& sentence : sentences) {
      Json record = SentenceJson(sentence);
      record["lemma"] = lemma;
      out += internal::Line(record);
    }
  }
  WriteFile(path, out);
}

void WriteEvalInstances(const std::filesystem::path& path,
                        const std::vector<EvalInstance>& instances) {
  std::string out;
  for (const auto& instance : instances) {
    Json record = SentenceJson(instance.sentence);
    record["id"] = instance.id;
    record["lemma"] = instance.lemma;
    if (instance.gold_senses.size() == 1) {
      record["sense"] = instance.gold_senses.front();
    } else if (!instance.gold_senses.empty()) {
      record["senses"] = instance.gold_senses;
    }
    out += internal::Line(record);
  }
  WriteFile(path, out);
}

void WriteLmText(const std::filesystem::path& path, const TokenStream& text) {
  std::string out;
  for (const auto& sentence : text) {
    for (size_t i = 0; i < sentence.size(); ++i) {
      if (i > 0) out += ' ';
      out += sentence[i];
    }
    out += '\n';
  }
  WriteFile(path, out);
}

std::vector<LabeledExample> Flatten(const LabeledByLemma& grouped) {
  std::vector<LabeledExample> flat;
  for (const auto& [lemma, examples] : grouped) {
    flat.insert(flat.end(), examples.begin(), examples.end());
  }
  return flat;
}

}  // namespace wsd
