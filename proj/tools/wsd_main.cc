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

// wsd: command-line driver.
//
// Exit status: 0 ok, 2 configuration or validation error, 3 data mismatch,
// 4 numeric failure.

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wsd/classify.h"
#include "wsd/config.h"
#include "wsd/corpus.h"
#include "wsd/embed.h"
#include "wsd/error.h"
#include "wsd/eval.h"
#include "wsd/lm.h"
#include "wsd/synthetic.h"
#include "wsd/util.h"

namespace {

using namespace wsd;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite:
      return kExitNumeric;
    case ErrorCode::kIdMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kEmptyContext:
    case ErrorCode::kNoSeeds:
    case ErrorCode::kTooFewVertices:
      return kExitData;
    default:
      return kExitConfig;
  }
}

// Flags shared by the config-driven subcommands. Flags win over the file.
struct Common {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::string output_dir;
  std::string backend;
  std::optional<int> threads;

  void Register(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON run configuration")
        ->required();
    app->add_option("--seed", seed, "override the seed");
    app->add_option("--output-dir", output_dir, "override paths.output_dir");
    app->add_option("--backend", backend, "override the backend (bow|lm)");
    app->add_option("--threads", threads, "worker threads for per-lemma work");
  }

  RunConfig Load() const {
    RunConfig config = LoadRunConfig(config_path);
    if (seed) config.seed = config.lm.seed = *seed;
    if (!output_dir.empty()) config.paths.output_dir = output_dir;
    if (!backend.empty()) config.backend = backend;
    if (threads) config.threads = *threads;
    config.Validate();
    return config;
  }
};

fs::path OutputDir(const RunConfig& config) {
  if (config.paths.output_dir.empty()) {
    throw Error(ErrorCode::kConfig, "no output directory configured");
  }
  fs::create_directories(config.paths.output_dir);
  return config.paths.output_dir;
}

void PrintWarnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::shared_ptr<ContextEmbedder> MakeEmbedder(const RunConfig& config,
                                              const std::string& backend) {
  if (backend == kBowBackendTag) {
    RequireFile(config.paths.word_vectors, "word vectors");
    auto table = std::make_shared<const WordVectorTable>(
        LoadWordVectors(config.paths.word_vectors));
    return std::make_shared<ContextEmbedder>(
        std::make_shared<BowBackend>(table, config.bow_window));
  }
  RequireFile(fs::path(config.paths.model.string() + ".manifest.json"),
              "language model");
  auto model =
      std::make_shared<const LmModel>(LoadLmModel(config.paths.model));
  return std::make_shared<ContextEmbedder>(std::make_shared<LmBackend>(model));
}

EmbedderMap MakeEmbedders(const RunConfig& config,
                          const std::vector<MethodSpec>& specs) {
  EmbedderMap out;
  for (const auto& spec : specs) {
    if (spec.method != Method::kMfs && !out.contains(spec.backend)) {
      out[spec.backend] = MakeEmbedder(config, spec.backend);
    }
  }
  return out;
}

PipelineOptions Pipeline(const RunConfig& config) {
  PipelineOptions options;
  options.lp = config.lp;
  options.normalize_sense_vectors = config.normalize_sense_vectors;
  options.threads = config.threads;
  return options;
}

// Loads inventory, training examples and, when `need_unlabeled`, the pool.
Task LoadTask(const RunConfig& config, bool need_unlabeled,
              const fs::path& eval_path, bool require_gold) {
  Task task;
  RequireFile(config.paths.inventory, "inventory");
  task.inventory = LoadInventory(config.paths.inventory);
  RequireFile(config.paths.labeled, "labeled examples");
  task.train = Flatten(LoadLabeled(config.paths.labeled, task.inventory));
  if (need_unlabeled) {
    RequireFile(config.paths.unlabeled, "unlabeled pool");
    task.unlabeled = LoadUnlabeled(config.paths.unlabeled, config.unlabeled_cap);
  }
  RequireFile(eval_path, "evaluation instances");
  task.eval = LoadEvalInstances(eval_path, require_gold);
  return task;
}

std::vector<double> ParsePercentiles(const std::vector<double>& values) {
  if (values.empty()) {
    throw Error(ErrorCode::kConfig, "percentile list is empty");
  }
  return values;
}

int TrainLmCommand(const Common& common, const std::string& lm_text,
                   const std::string& model, std::optional<int> epochs) {
  RunConfig config = common.Load();
  if (!lm_text.empty()) config.paths.lm_text = lm_text;
  if (!model.empty()) config.paths.model = model;
  if (epochs) config.lm.max_epochs = *epochs;
  config.lm.Validate();
  RequireFile(config.paths.lm_text, "LM text");
  if (config.paths.model.empty()) {
    throw Error(ErrorCode::kConfig, "no model prefix configured");
  }
  const TokenStream text = LoadLmText(config.paths.lm_text);
  LmModel out;
  out.config = config.lm;
  out.vocab = Vocab::Build(text, static_cast<size_t>(config.lm.vocab_size));
  TrainReport report;
  out.params = TrainLm(text, out.vocab, config.lm, &report,
                       [](int epoch, double loss) {
                         std::printf("epoch %d loss %.6f\n", epoch, loss);
                         std::fflush(stdout);
                       });
  SaveLmModel(config.paths.model, out, Fingerprint(config));
  std::printf("initial loss %.6f; model written to %s\n", report.initial_loss,
              config.paths.model.string().c_str());
  return kExitOk;
}

int BuildSensesCommand(const Common& common, const std::string& senses) {
  RunConfig config = common.Load();
  if (!senses.empty()) config.paths.senses = senses;
  if (config.paths.senses.empty()) {
    throw Error(ErrorCode::kConfig, "no sense store prefix configured");
  }
  RequireFile(config.paths.inventory, "inventory");
  RequireFile(config.paths.labeled, "labeled examples");
  const SenseInventory inventory = LoadInventory(config.paths.inventory);
  const LabeledByLemma labeled = LoadLabeled(config.paths.labeled, inventory);
  const auto embedder = MakeEmbedder(config, config.backend);
  std::vector<SenseVectors> all;
  std::vector<std::string> warnings;
  for (const auto& lemma : inventory.lemmas()) {
    auto it = labeled.find(lemma);
    if (it == labeled.end()) continue;
    all.push_back(BuildSenseVectors(it->second, *embedder, inventory,
                                    config.normalize_sense_vectors, &warnings));
  }
  PrintWarnings(warnings);
  WriteSenseVectors(config.paths.senses, all, Fingerprint(config));
  std::printf("sense vectors for %zu lemmas written to %s\n", all.size(),
              config.paths.senses.string().c_str());
  return kExitOk;
}

int ClassifyCommand(const Common& common, const std::string& input,
                    const std::string& output, const std::string& method,
                    const std::string& dump_dir) {
  RunConfig config = common.Load();
  const MethodSpec spec =
      ParseMethodSpec(method.empty() ? config.method : method, config.backend);
  config.method = std::string(MethodName(spec.method));
  if (spec.method != Method::kMfs) config.backend = spec.backend;
  const fs::path input_path = input.empty() ? config.paths.eval : fs::path(input);
  const Task task = LoadTask(config, spec.method == Method::kLp, input_path,
                             /*require_gold=*/false);

  std::optional<std::map<std::string, SenseVectors>> store;
  if (spec.method == Method::kNn && !config.paths.senses.empty() &&
      fs::exists(config.paths.senses.string() + ".manifest.json")) {
    store = LoadSenseVectors(config.paths.senses);
  }
  PipelineOptions options = Pipeline(config);
  if (!dump_dir.empty()) {
    options.dump_dir = dump_dir;
    fs::create_directories(options.dump_dir);
  }
  const MethodRun run = RunMethod(task, task.train, spec,
                                  MakeEmbedders(config, {spec}), options,
                                  store ? &*store : nullptr);
  PrintWarnings(run.warnings);
  const fs::path out_path =
      output.empty() ? OutputDir(config) / "predictions.jsonl" : fs::path(output);
  WriteFile(out_path, PredictionsToJsonl(run.predictions, Fingerprint(config)));
  std::printf("%zu predictions written to %s\n", run.predictions.size(),
              out_path.string().c_str());
  return kExitOk;
}

void WriteReport(const fs::path& dir, const std::string& stem,
                 const ScoreReport& report) {
  WriteFile(dir / (stem + ".json"), ReportToJson(report));
  WriteFile(dir / (stem + ".csv"), ReportToCsv(report));
  std::printf("%s: P=%.4f R=%.4f F1=%.4f macroF1=%.4f (%s)\n", stem.c_str(),
              report.overall.precision, report.overall.recall,
              report.overall.f1, report.macro_f1, report.fingerprint.c_str());
}

int EvaluateCommand(const Common& common, std::vector<std::string> methods,
                    const std::string& predictions,
                    const std::vector<double>& sweep,
                    const std::vector<std::string>& ablation,
                    bool polysemous_only) {
  RunConfig config = common.Load();
  if (polysemous_only) config.polysemous_only = true;
  const std::string base = Fingerprint(config);
  const fs::path dir = OutputDir(config);
  ScoreOptions score_options;
  score_options.polysemous_only = config.polysemous_only;

  if (!predictions.empty()) {
    RequireFile(config.paths.inventory, "inventory");
    RequireFile(config.paths.eval, "evaluation instances");
    const SenseInventory inventory = LoadInventory(config.paths.inventory);
    const auto gold = LoadEvalInstances(config.paths.eval, true);
    ScoreReport report =
        Score(LoadPredictions(predictions), gold, inventory, score_options);
    report.fingerprint = base;
    WriteReport(dir, "report", report);
    return kExitOk;
  }

  if (methods.empty()) methods.push_back(config.method);
  std::vector<MethodSpec> specs;
  bool need_unlabeled = !sweep.empty();
  for (const auto& m : methods) {
    specs.push_back(ParseMethodSpec(m, config.backend));
    need_unlabeled = need_unlabeled || specs.back().method == Method::kLp;
  }
  MethodSpec sweep_spec{Method::kLp, config.backend};
  std::vector<MethodSpec> all_specs = specs;
  if (!sweep.empty()) all_specs.push_back(sweep_spec);
  const Task task = LoadTask(config, need_unlabeled, config.paths.eval, true);
  const EmbedderMap embedders = MakeEmbedders(config, all_specs);
  const PipelineOptions options = Pipeline(config);

  for (const auto& spec : specs) {
    const MethodRun run = RunMethod(task, task.train, spec, embedders, options);
    PrintWarnings(run.warnings);
    const std::string fingerprint = base + "-" + spec.Name();
    WriteFile(dir / ("predictions-" + spec.Name() + ".jsonl"),
              PredictionsToJsonl(run.predictions, fingerprint));
    ScoreReport report =
        Score(run.predictions, task.eval, task.inventory, score_options);
    report.fingerprint = fingerprint;
    WriteReport(dir, "report-" + spec.Name(), report);
  }

  if (!sweep.empty()) {
    auto rows = RunDensitySweep(task, sweep_spec, embedders, options,
                                ParsePercentiles(sweep), score_options);
    for (auto& row : rows) row.report.fingerprint = base + "-" + sweep_spec.Name();
    WriteFile(dir / "sweep.csv", SweepToCsv(rows));
    std::printf("density sweep: %zu rows written to %s\n", rows.size(),
                (dir / "sweep.csv").string().c_str());
  }

  if (!ablation.empty()) {
    std::vector<NamedSubset> subsets;
    for (const auto& item : ablation) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::kConfig,
                    "ablation subsets are name=path, got \"" + item + "\"");
      }
      const fs::path path = item.substr(eq + 1);
      RequireFile(path, "ablation subset");
      subsets.push_back(
          {item.substr(0, eq), Flatten(LoadLabeled(path, task.inventory))});
    }
    const std::vector<MethodSpec> grid = {{Method::kMfs, ""},
                                          {Method::kNn, kBowBackendTag},
                                          {Method::kNn, kLmBackendTag},
                                          {Method::kLp, kLmBackendTag}};
    EmbedderMap grid_embedders = embedders;
    for (const auto& [tag, e] : MakeEmbedders(config, grid)) {
      if (!grid_embedders.contains(tag)) grid_embedders[tag] = e;
    }
    Task ablation_task = task;
    if (ablation_task.unlabeled.empty() && !config.paths.unlabeled.empty() &&
        fs::exists(config.paths.unlabeled)) {
      ablation_task.unlabeled =
          LoadUnlabeled(config.paths.unlabeled, config.unlabeled_cap);
    }
    auto rows = RunAblation(ablation_task, subsets, grid, grid_embedders,
                            options, score_options);
    for (auto& row : rows) row.report.fingerprint = base + "-" + row.method;
    WriteFile(dir / "ablation.csv", AblationToCsv(rows));
    std::printf("ablation: %zu rows written to %s\n", rows.size(),
                (dir / "ablation.csv").string().c_str());
  }
  return kExitOk;
}

int SweepCommand(const Common& common, const std::vector<double>& percentiles) {
  RunConfig config = common.Load();
  const fs::path dir = OutputDir(config);
  const MethodSpec spec{Method::kLp, config.backend};
  const Task task = LoadTask(config, true, config.paths.eval, true);
  ScoreOptions score_options;
  score_options.polysemous_only = config.polysemous_only;
  auto rows = RunDensitySweep(task, spec, MakeEmbedders(config, {spec}),
                              Pipeline(config), ParsePercentiles(percentiles),
                              score_options);
  const std::string fingerprint = Fingerprint(config) + "-" + spec.Name();
  for (auto& row : rows) row.report.fingerprint = fingerprint;
  WriteFile(dir / "sweep.csv", SweepToCsv(rows));
  for (const auto& row : rows) {
    std::printf("q=%g F1=%.4f\n", row.percentile, row.report.overall.f1);
  }
  return kExitOk;
}

int GenSyntheticCommand(const std::string& out, const SyntheticConfig& sc) {
  if (out.empty()) throw Error(ErrorCode::kConfig, "--out is required");
  const SyntheticTask task = GenerateSynthetic(sc);
  const fs::path dir = out;
  WriteSyntheticTask(dir, task);
  const nlohmann::json config = {
      {"paths",
       {{"inventory", "inventory.jsonl"},
        {"labeled", "labeled.jsonl"},
        {"unlabeled", "unlabeled.jsonl"},
        {"eval", "eval.jsonl"},
        {"lm_text", "lm.txt"},
        {"word_vectors", "vectors.txt"},
        {"model", "model/lm"},
        {"senses", "model/senses"},
        {"output_dir", "out"}}},
      {"backend", "lm"},
      {"method", "nn"},
      {"seed", sc.seed},
      {"lm",
       {{"embed_dim", 16},
        {"hidden_dim", 32},
        {"context_dim", 16},
        {"max_epochs", 6},
        {"downsample", false}}},
      {"lp", {{"prior", "empirical"}}},
      {"synthetic",
       {{"num_words", sc.num_words},
        {"class_size", sc.class_size},
        {"num_fillers", sc.num_fillers},
        {"lm_sentences_per_sense", sc.lm_sentences_per_sense},
        {"labeled_per_sense", sc.labeled_per_sense},
        {"unlabeled_per_word", sc.unlabeled_per_word},
        {"eval_per_word", sc.eval_per_word},
        {"majority_share", sc.majority_share},
        {"vector_dim", sc.vector_dim}}},
  };
  WriteFile(dir / "config.json", config.dump(2) + "\n");
  std::printf("synthetic task with %zu labeled, %zu eval instances written to %s\n",
              task.labeled.size(), task.eval.size(), dir.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word sense disambiguation with context embeddings and label "
               "propagation"};
  app.require_subcommand(1);

  Common common;
  int status = kExitOk;

  auto* train = app.add_subcommand("train-lm", "train the held-out-word LM");
  common.Register(train);
  std::string lm_text, model;
  std::optional<int> epochs;
  train->add_option("--lm-text", lm_text, "override paths.lm_text");
  train->add_option("--model", model, "override paths.model");
  train->add_option("--epochs", epochs, "override lm.max_epochs");

  auto* senses = app.add_subcommand("build-senses", "write sense vectors");
  std::string senses_prefix;
  senses->add_option("--senses", senses_prefix, "override paths.senses");

  auto* classify = app.add_subcommand("classify", "predict senses");
  std::string input, output, method, dump_dir;
  classify->add_option("--input", input, "instances to classify (JSONL)");
  classify->add_option("--output", output, "predictions file");
  classify->add_option("--method", method, "mfs|nn|lp, optionally -bow/-lm");
  classify->add_option("--dump-graphs", dump_dir,
                       "write lp graphs and solver traces here");

  auto* evaluate = app.add_subcommand("evaluate", "score against gold");
  std::vector<std::string> methods, ablation;
  std::vector<double> eval_sweep;
  std::string predictions;
  bool polysemous_only = false;
  evaluate->add_option("--methods", methods, "methods to run")->delimiter(',');
  evaluate->add_option("--predictions", predictions,
                       "score this predictions file instead of running");
  evaluate->add_option("--sweep-density", eval_sweep, "lp percentiles")
      ->delimiter(',');
  evaluate->add_option("--ablation", ablation,
                       "training subsets as name=labeled.jsonl")
      ->delimiter(',');
  evaluate->add_flag("--polysemous-only", polysemous_only,
                     "skip single-sense lemmas");

  auto* sweep = app.add_subcommand("sweep-density", "lp over percentiles");
  std::vector<double> percentiles;
  sweep->add_option("--percentiles", percentiles, "e.g. 98,95,90")
      ->delimiter(',')
      ->required();

  for (auto* sub : {senses, classify, evaluate, sweep}) common.Register(sub);

  auto* gen = app.add_subcommand("gen-synthetic", "write a pseudoword task");
  std::string out_dir;
  SyntheticConfig sc;
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--seed", sc.seed, "generator seed");
  gen->add_option("--words", sc.num_words, "number of pseudowords");
  gen->add_option("--class-size", sc.class_size, "words per order class");
  gen->add_option("--fillers", sc.num_fillers, "filler vocabulary size");
  gen->add_option("--lm-sentences", sc.lm_sentences_per_sense,
                  "LM sentences per sense");
  gen->add_option("--labeled-per-sense", sc.labeled_per_sense,
                  "labeled examples per sense");
  gen->add_option("--unlabeled", sc.unlabeled_per_word,
                  "unlabeled sentences per pseudoword");
  gen->add_option("--eval", sc.eval_per_word, "eval sentences per pseudoword");
  gen->add_option("--majority-share", sc.majority_share,
                  "share of sense 1 in unlabeled and eval sentences");
  gen->add_option("--dim", sc.vector_dim, "word vector dimension");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) {
      status = TrainLmCommand(common, lm_text, model, epochs);
    } else if (*senses) {
      status = BuildSensesCommand(common, senses_prefix);
    } else if (*classify) {
      status = ClassifyCommand(common, input, output, method, dump_dir);
    } else if (*evaluate) {
      status = EvaluateCommand(common, methods, predictions, eval_sweep,
                               ablation, polysemous_only);
    } else if (*sweep) {
      status = SweepCommand(common, percentiles);
    } else if (*gen) {
      status = GenSyntheticCommand(out_dir, sc);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return status;
}
