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

#include "wsd/embed.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>

#include "jsonl.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

double Cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine of dims " + std::to_string(u.size()) + " and " +
                    std::to_string(v.size()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  const double nu = std::sqrt(uu), nv = std::sqrt(vv);
  if (nu < kZeroNorm || nv < kZeroNorm) return 0.0;
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

void WordVectorTable::Add(const std::string& word, std::vector<double> values) {
  if (static_cast<int>(values.size()) != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vector for \"" + word + "\" has dim " +
                    std::to_string(values.size()) + ", table has " +
                    std::to_string(dim_));
  }
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kNonFinite, "vector for \"" + word + "\"");
    }
  }
  auto [it, inserted] = vectors_.insert_or_assign(word, std::move(values));
  if (inserted) words_.push_back(word);
}

const std::vector<double>* WordVectorTable::Find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

namespace {

bool ParseDouble(const std::string& text, double* out) {
  char* end = nullptr;
  *out = std::strtod(text.c_str(), &end);
  return end != text.c_str() && *end == '\0';
}

bool IsInteger(const std::string& text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

WordVectorTable LoadWordVectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::optional<WordVectorTable> table;
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    const std::string where = internal::Where(path, line_number);
    if (!table && fields.size() == 2 && IsInteger(fields[0]) &&
        IsInteger(fields[1])) {
      continue;  // word2vec header
    }
    if (fields.size() < 2) {
      throw Error(ErrorCode::kParse, where + ": expected a word and values");
    }
    std::vector<double> values(fields.size() - 1);
    for (size_t i = 1; i < fields.size(); ++i) {
      if (!ParseDouble(fields[i], &values[i - 1])) {
        throw Error(ErrorCode::kParse, where + ": bad number \"" + fields[i] + "\"");
      }
    }
    if (!table) table.emplace(static_cast<int>(values.size()));
    try {
      table->Add(fields[0], std::move(values));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  if (!table) throw Error(ErrorCode::kEmptyStream, path.string() + ": no vectors");
  return std::move(*table);
}

void WriteWordVectors(const std::filesystem::path& path,
                      const WordVectorTable& table) {
  std::string out;
  char buffer[32];
  for (const auto& word : table.words()) {
    out += word;
    for (double x : *table.Find(word)) {
      auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, x);
      out += ' ';
      out.append(buffer, end);
    }
    out += '\n';
  }
  WriteFile(path, out);
}

ContextVector EmbedContextBow(const WordVectorTable& table,
                              const Sentence& sentence, int window) {
  ValidateSentence(sentence);
  std::vector<double> sum(table.dim(), 0.0);
  int used = 0;
  const int n = static_cast<int>(sentence.tokens.size());
  for (int i = 0; i < n; ++i) {
    if (i == sentence.focus) continue;
    if (window > 0 && std::abs(i - sentence.focus) > window) continue;
    const auto* vec = table.Find(sentence.tokens[i]);
    if (vec == nullptr) continue;
    for (int k = 0; k < table.dim(); ++k) sum[k] += (*vec)[k];
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorCode::kEmptyContext,
                "no context token of the sentence has a word vector");
  }
  for (double& x : sum) x /= used;
  return ContextVector{std::move(sum), kBowBackendTag};
}

std::string ContextEmbedder::CacheKey(const Sentence& sentence) {
  std::string key = std::to_string(sentence.focus);
  for (const auto& token : sentence.tokens) {
    key += '\x1f';
    key += token;
  }
  return key;
}

ContextVector ContextEmbedder::Embed(const Sentence& sentence) const {
  const std::string key = CacheKey(sentence);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  ContextVector vec = backend_->Embed(sentence);
  std::unique_lock lock(mutex_);
  cache_.insert_or_assign(key, vec);
  return vec;
}

size_t ContextEmbedder::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

void ContextEmbedder::DumpCache(const std::filesystem::path& path) const {
  std::vector<std::pair<std::string, ContextVector>> entries;
  {
    std::shared_lock lock(mutex_);
    entries.assign(cache_.begin(), cache_.end());
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [key, vec] : entries) {
    out += internal::Line(internal::Json{
        {"key", key}, {"dim", vec.dim()}, {"values", vec.values}});
  }
  WriteFile(path, out);
}

}  // namespace wsd
