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

#include "wsd/synthetic.h"

#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

void SyntheticConfig::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfig, "synthetic: " + what);
  };
  if (num_words < 1 || class_size < 1 || num_fillers < 1) {
    fail("num_words, class_size and num_fillers must be >= 1");
  }
  if (lm_sentences_per_sense < 0 || labeled_per_sense < 0 ||
      unlabeled_per_word < 0 || eval_per_word < 0) {
    fail("sentence counts must be >= 0");
  }
  if (!(majority_share >= 0.0 && majority_share <= 1.0)) {
    fail("majority_share must lie in [0, 1]");
  }
  if (vector_dim < 1) fail("vector_dim must be >= 1");
}

namespace {

std::string PseudoWord(int k) { return "pw" + std::to_string(k); }

// Independent stream per purpose so changing one count leaves the others.
Rng Stream(uint64_t seed, std::string_view purpose) {
  return Rng(Fnv1a64(purpose, seed ^ 0xcbf29ce484222325ULL));
}

class Templates {
 public:
  Templates(const SyntheticConfig& config) : config_(config) {}

  // sense 0 or 1; `focus_word` fills the focus slot.
  Sentence Make(int k, int sense, const std::string& focus_word, Rng& rng) const {
    const std::string p = "p" + std::to_string(k) + "_" +
                          std::to_string(rng.Below(config_.class_size));
    const std::string q = "q" + std::to_string(k) + "_" +
                          std::to_string(rng.Below(config_.class_size));
    Sentence s;
    s.tokens.push_back(Filler(rng));
    if (sense == 0) {
      s.tokens.push_back(p);
      s.tokens.push_back(q);
    } else {
      s.tokens.push_back(q);
      s.tokens.push_back(p);
    }
    s.focus = static_cast<int>(s.tokens.size());
    s.tokens.push_back(focus_word);
    s.tokens.push_back(Filler(rng));
    return s;
  }

 private:
  std::string Filler(Rng& rng) const {
    return "f" + std::to_string(rng.Below(config_.num_fillers));
  }

  const SyntheticConfig& config_;
};

}  // namespace

SyntheticTask GenerateSynthetic(const SyntheticConfig& config) {
  config.Validate();
  const Templates templates(config);
  SyntheticTask task;

  for (int k = 0; k < config.num_words; ++k) {
    const std::string lemma = PseudoWord(k);
    task.inventory.AddLemma(lemma, {lemma + "%1", lemma + "%2"},
                            k % 2 == 0 ? "noun" : "verb");
  }

  Rng lm_rng = Stream(config.seed, "lm");
  for (int k = 0; k < config.num_words; ++k) {
    const std::string real[2] = {"w" + std::to_string(k) + "a",
                                 "w" + std::to_string(k) + "b"};
    for (int i = 0; i < config.lm_sentences_per_sense; ++i) {
      for (int sense = 0; sense < 2; ++sense) {
        task.lm_text.push_back(
            templates.Make(k, sense, real[sense], lm_rng).tokens);
      }
    }
  }
  lm_rng.Shuffle(task.lm_text);

  Rng labeled_rng = Stream(config.seed, "labeled");
  for (int k = 0; k < config.num_words; ++k) {
    const std::string lemma = PseudoWord(k);
    for (int sense = 0; sense < 2; ++sense) {
      for (int i = 0; i < config.labeled_per_sense; ++i) {
        task.labeled.push_back(
            {templates.Make(k, sense, lemma, labeled_rng), lemma,
             lemma + "%" + std::to_string(sense + 1)});
      }
    }
  }

  auto draw_sense = [&](Rng& rng) {
    return rng.Uniform() < config.majority_share ? 0 : 1;
  };
  Rng unlabeled_rng = Stream(config.seed, "unlabeled");
  for (int k = 0; k < config.num_words; ++k) {
    const std::string lemma = PseudoWord(k);
    auto& pool = task.unlabeled[lemma];
    for (int i = 0; i < config.unlabeled_per_word; ++i) {
      pool.push_back(templates.Make(k, draw_sense(unlabeled_rng), lemma,
                                    unlabeled_rng));
    }
  }

  Rng eval_rng = Stream(config.seed, "eval");
  for (int k = 0; k < config.num_words; ++k) {
    const std::string lemma = PseudoWord(k);
    for (int i = 0; i < config.eval_per_word; ++i) {
      const int sense = draw_sense(eval_rng);
      EvalInstance instance;
      instance.id = lemma + "." + std::to_string(i);
      instance.sentence = templates.Make(k, sense, lemma, eval_rng);
      instance.lemma = lemma;
      instance.gold_senses = {lemma + "%" + std::to_string(sense + 1)};
      task.eval.push_back(std::move(instance));
    }
  }

  // Every word that can appear in any sentence, in a fixed order.
  std::vector<std::string> words;
  for (int j = 0; j < config.num_fillers; ++j) words.push_back("f" + std::to_string(j));
  for (int k = 0; k < config.num_words; ++k) {
    for (int j = 0; j < config.class_size; ++j) {
      words.push_back("p" + std::to_string(k) + "_" + std::to_string(j));
      words.push_back("q" + std::to_string(k) + "_" + std::to_string(j));
    }
    words.push_back("w" + std::to_string(k) + "a");
    words.push_back("w" + std::to_string(k) + "b");
    words.push_back(PseudoWord(k));
  }
  Rng vector_rng = Stream(config.seed, "vectors");
  task.vectors = WordVectorTable(config.vector_dim);
  for (const auto& word : words) {
    std::vector<double> v(config.vector_dim);
    for (double& x : v) x = vector_rng.Gaussian();
    task.vectors.Add(word, std::move(v));
  }
  return task;
}

void WriteSyntheticTask(const std::filesystem::path& dir,
                        const SyntheticTask& task) {
  std::filesystem::create_directories(dir);
  WriteInventory(dir / "inventory.jsonl", task.inventory);
  WriteLabeled(dir / "labeled.jsonl", task.labeled);
  WriteUnlabeled(dir / "unlabeled.jsonl", task.unlabeled);
  WriteEvalInstances(dir / "eval.jsonl", task.eval);
  WriteLmText(dir / "lm.txt", task.lm_text);
  WriteWordVectors(dir / "vectors.txt", task.vectors);
}

}  // namespace wsd
