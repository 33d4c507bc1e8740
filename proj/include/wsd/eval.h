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

// Scoring and the experiment drivers built on it.

#ifndef WSD_EVAL_H_
#define WSD_EVAL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wsd/classify.h"
#include "wsd/corpus.h"
#include "wsd/embed.h"
#include "wsd/propagate.h"

namespace wsd {

struct ScoreCounts {
  int64_t attempted = 0;
  int64_t correct = 0;
  int64_t total = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Fills precision, recall and f1 from the counts.
  void Finish();
};

struct ScoreReport {
  ScoreCounts overall;
  std::map<std::string, ScoreCounts> by_pos;    // lemmas without a tag: "none"
  std::map<std::string, ScoreCounts> by_lemma;
  double macro_f1 = 0.0;
  std::string fingerprint;
};

struct InstancePrediction {
  std::string id;
  std::string lemma;
  Prediction prediction;

  bool operator==(const InstancePrediction&) const = default;
};

struct ScoreOptions {
  // Drops instances of single-sense lemmas. Otherwise they count as correct.
  bool polysemous_only = false;
};

// Micro P/R/F1 with abstentions counted against recall only, per-POS and
// per-lemma breakdowns, and macro F1 over lemmas with gold instances. A
// prediction is correct when its sense is in the gold set. Throws kIdMismatch
// unless predictions and gold cover exactly the same ids.
ScoreReport Score(const std::vector<InstancePrediction>& predictions,
                  const std::vector<EvalInstance>& gold,
                  const SenseInventory& inventory,
                  const ScoreOptions& options = {});

// A classifier plus the context backend it runs on ("" for mfs).
struct MethodSpec {
  Method method = Method::kNn;
  std::string backend;

  // "mfs", "nn-bow", "lp-lm", ...
  std::string Name() const;
};

// Accepts "mfs", "nn-<backend>", "lp-<backend>", or bare "nn"/"lp", which take
// `default_backend`. Throws kConfig.
MethodSpec ParseMethodSpec(const std::string& name,
                           const std::string& default_backend);

struct Task {
  SenseInventory inventory;
  std::vector<LabeledExample> train;
  UnlabeledByLemma unlabeled;
  std::vector<EvalInstance> eval;
};

struct PipelineOptions {
  LpParams lp;
  bool normalize_sense_vectors = true;
  // Worker threads for per-lemma work; results do not depend on it.
  int threads = 1;
  // When set, lp writes graph-<lemma>.jsonl and trace-<lemma>.csv here.
  std::filesystem::path dump_dir;
};

// Context embedders by backend tag.
using EmbedderMap = std::map<std::string, std::shared_ptr<ContextEmbedder>>;

struct MethodRun {
  MethodSpec spec;
  std::vector<InstancePrediction> predictions;  // eval order
  std::vector<std::string> warnings;
  // Set for lp: every query of a lemma joins that lemma's single graph.
  bool batch_graphs = false;
};

// Classifies every eval instance with `spec`, trained on `train`. Lemmas with
// no training examples abstain under every method. MFS counts come from
// `train`. When `sense_vectors` is given, nn uses it instead of building
// centroids from `train`.
MethodRun RunMethod(const Task& task, const std::vector<LabeledExample>& train,
                    const MethodSpec& spec, const EmbedderMap& embedders,
                    const PipelineOptions& options,
                    const std::map<std::string, SenseVectors>* sense_vectors =
                        nullptr);

struct SweepRow {
  double percentile = 0.0;
  ScoreReport report;
};

// One lp evaluation per percentile over identical vertex sets.
std::vector<SweepRow> RunDensitySweep(const Task& task, const MethodSpec& spec,
                                      const EmbedderMap& embedders,
                                      const PipelineOptions& options,
                                      const std::vector<double>& percentiles,
                                      const ScoreOptions& score_options = {});

struct NamedSubset {
  std::string name;
  std::vector<LabeledExample> examples;
};

struct AblationRow {
  std::string subset;
  std::string method;
  ScoreReport report;
};

// One evaluation per subset and method, subsets outermost.
std::vector<AblationRow> RunAblation(const Task& task,
                                     const std::vector<NamedSubset>& subsets,
                                     const std::vector<MethodSpec>& methods,
                                     const EmbedderMap& embedders,
                                     const PipelineOptions& options,
                                     const ScoreOptions& score_options = {});

// JSONL {"id","lemma","sense","score","method","abstained","fingerprint"}.
std::string PredictionsToJsonl(const std::vector<InstancePrediction>& predictions,
                               const std::string& fingerprint);
std::vector<InstancePrediction> LoadPredictions(
    const std::filesystem::path& path);

std::string ReportToJson(const ScoreReport& report);
// Rows: "all", then "pos:<tag>", then "lemma:<lemma>".
std::string ReportToCsv(const ScoreReport& report);
// One row per percentile; F1 per POS tag as extra columns.
std::string SweepToCsv(const std::vector<SweepRow>& rows);
std::string AblationToCsv(const std::vector<AblationRow>& rows);

}  // namespace wsd

#endif  // WSD_EVAL_H_
