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

// Pseudoword task generator.
//
// Pseudoword k ("pw<k>") has two senses. Both are written with one word from
// class P_k ("p<k>_<j>"), one from class Q_k ("q<k>_<j>") and random fillers:
//
//   sense 1:  f  p  q  pw<k>  f
//   sense 2:  f  q  p  pw<k>  f
//
// The senses differ only in the order of the two class words, so any
// order-blind context model sees identical distributions for both. The
// language-model text uses the same templates with a real word in place of
// the pseudoword ("w<k>a" for sense 1, "w<k>b" for sense 2), which makes the
// held-out word predictable from word order alone.

#ifndef WSD_SYNTHETIC_H_
#define WSD_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wsd/corpus.h"
#include "wsd/embed.h"

namespace wsd {

struct SyntheticConfig {
  int num_words = 4;
  int class_size = 3;
  int num_fillers = 8;
  int lm_sentences_per_sense = 150;
  int labeled_per_sense = 10;
  int unlabeled_per_word = 200;
  int eval_per_word = 100;
  // Share of sense 1 among unlabeled and eval sentences.
  double majority_share = 0.5;
  int vector_dim = 16;
  uint64_t seed = 1;

  // Throws kConfig.
  void Validate() const;
};

struct SyntheticTask {
  SenseInventory inventory;
  std::vector<LabeledExample> labeled;
  UnlabeledByLemma unlabeled;
  std::vector<EvalInstance> eval;
  TokenStream lm_text;
  // Gaussian random vectors for every word, for the bag-of-vectors backend.
  WordVectorTable vectors{1};
};

// Deterministic in the config. The LM text and word vectors depend only on
// num_words, class_size, num_fillers, lm_sentences_per_sense, vector_dim and
// seed, so tasks that differ in the labeled or skew settings share them.
SyntheticTask GenerateSynthetic(const SyntheticConfig& config);

// Writes inventory.jsonl, labeled.jsonl, unlabeled.jsonl, eval.jsonl,
// lm.txt and vectors.txt into `dir`.
void WriteSyntheticTask(const std::filesystem::path& dir,
                        const SyntheticTask& task);

}  // namespace wsd

#endif  // WSD_SYNTHETIC_H_
