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

#include "wsd/eval.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "jsonl.h"
#include "wsd/error.h"

namespace wsd {

using internal::Json;

namespace {

std::string Num(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", x);
  return buffer;
}

void Tally(ScoreCounts& counts, bool attempted, bool correct) {
  ++counts.total;
  if (attempted) ++counts.attempted;
  if (correct) ++counts.correct;
}

Json CountsToJson(const ScoreCounts& c) {
  return Json{{"attempted", c.attempted}, {"correct", c.correct},
              {"total", c.total},         {"precision", c.precision},
              {"recall", c.recall},       {"f1", c.f1}};
}

std::string CountsCsv(const ScoreCounts& c) {
  return std::to_string(c.attempted) + "," + std::to_string(c.correct) + "," +
         std::to_string(c.total) + "," + Num(c.precision) + "," +
         Num(c.recall) + "," + Num(c.f1);
}

}  // namespace

void ScoreCounts::Finish() {
  precision = attempted > 0 ? static_cast<double>(correct) / attempted : 0.0;
  recall = total > 0 ? static_cast<double>(correct) / total : 0.0;
  f1 = precision + recall > 0.0
           ? 2.0 * precision * recall / (precision + recall)
           : 0.0;
}

ScoreReport Score(const std::vector<InstancePrediction>& predictions,
                  const std::vector<EvalInstance>& gold,
                  const SenseInventory& inventory,
                  const ScoreOptions& options) {
  std::unordered_map<std::string, const InstancePrediction*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw Error(ErrorCode::kIdMismatch, "duplicate prediction id " + p.id);
    }
  }
  if (by_id.size() != gold.size()) {
    throw Error(ErrorCode::kIdMismatch,
                std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold instances");
  }

  ScoreReport report;
  for (const auto& instance : gold) {
    auto it = by_id.find(instance.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kIdMismatch, "no prediction for id " + instance.id);
    }
    const Prediction& p = it->second->prediction;
    const bool known = inventory.Contains(instance.lemma);
    const bool monosemous =
        known && inventory.Senses(instance.lemma).size() == 1;
    if (options.polysemous_only && monosemous) continue;

    bool attempted = !p.abstained;
    bool correct =
        attempted && std::find(instance.gold_senses.begin(),
                               instance.gold_senses.end(),
                               p.sense_id) != instance.gold_senses.end();
    if (monosemous) attempted = correct = true;

    const std::string pos =
        known ? inventory.Pos(instance.lemma).value_or("none") : "none";
    Tally(report.overall, attempted, correct);
    Tally(report.by_pos[pos], attempted, correct);
    Tally(report.by_lemma[instance.lemma], attempted, correct);
  }

  report.overall.Finish();
  for (auto& [pos, counts] : report.by_pos) counts.Finish();
  double macro = 0.0;
  for (auto& [lemma, counts] : report.by_lemma) {
    counts.Finish();
    macro += counts.f1;
  }
  if (!report.by_lemma.empty()) {
    report.macro_f1 = macro / static_cast<double>(report.by_lemma.size());
  }
  return report;
}

std::string MethodSpec::Name() const {
  if (method == Method::kMfs) return "mfs";
  return std::string(MethodName(method)) + "-" + backend;
}

MethodSpec ParseMethodSpec(const std::string& name,
                           const std::string& default_backend) {
  const auto dash = name.find('-');
  const std::string head = name.substr(0, dash);
  MethodSpec spec;
  spec.method = ParseMethod(head);
  if (spec.method == Method::kMfs) {
    if (dash != std::string::npos) {
      throw Error(ErrorCode::kConfig, "mfs takes no backend: \"" + name + "\"");
    }
    return spec;
  }
  spec.backend = dash == std::string::npos ? default_backend
                                           : name.substr(dash + 1);
  if (spec.backend != kBowBackendTag && spec.backend != kLmBackendTag) {
    throw Error(ErrorCode::kConfig, "unknown backend in method \"" + name + "\"");
  }
  return spec;
}

namespace {

struct LemmaJob {
  std::string lemma;
  std::vector<size_t> instances;  // indices into task.eval
  std::vector<Prediction> predictions;
  std::vector<std::string> warnings;
};

const ContextEmbedder& EmbedderFor(const EmbedderMap& embedders,
                                   const std::string& backend) {
  auto it = embedders.find(backend);
  if (it == embedders.end() || it->second == nullptr) {
    throw Error(ErrorCode::kConfig, "no embedder for backend \"" + backend + "\"");
  }
  return *it->second;
}

void RunLemma(const Task& task, const std::vector<LabeledExample>& seeds,
              const MethodSpec& spec, const EmbedderMap& embedders,
              const PipelineOptions& options,
              const SenseFrequencies& frequencies,
              const std::map<std::string, SenseVectors>* sense_vectors,
              LemmaJob& job) {
  const size_t n = job.instances.size();
  const Prediction abstain = Prediction::Abstain(spec.method);
  job.predictions.assign(n, abstain);
  if (!task.inventory.Contains(job.lemma)) {
    job.warnings.push_back("lemma \"" + job.lemma + "\" not in inventory");
    return;
  }
  if (seeds.empty()) return;

  if (spec.method == Method::kMfs) {
    const Prediction p = ClassifyMfs(job.lemma, task.inventory, frequencies);
    std::fill(job.predictions.begin(), job.predictions.end(), p);
    return;
  }

  const ContextEmbedder& embedder = EmbedderFor(embedders, spec.backend);
  if (spec.method == Method::kNn) {
    SenseVectors built;
    const SenseVectors* sv = nullptr;
    if (sense_vectors != nullptr) {
      auto it = sense_vectors->find(job.lemma);
      if (it != sense_vectors->end()) sv = &it->second;
    } else {
      built = BuildSenseVectors(seeds, embedder, task.inventory,
                                options.normalize_sense_vectors, &job.warnings);
      sv = &built;
    }
    if (sv == nullptr) return;
    for (size_t i = 0; i < n; ++i) {
      try {
        const ContextVector context =
            embedder.Embed(task.eval[job.instances[i]].sentence);
        job.predictions[i] = ClassifyNn(context, *sv, task.inventory);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyContext) throw;
      }
    }
    return;
  }

  std::vector<Sentence> queries;
  queries.reserve(n);
  for (size_t index : job.instances) queries.push_back(task.eval[index].sentence);
  static const std::vector<Sentence> kNoSentences;
  auto pool = task.unlabeled.find(job.lemma);
  const auto& unlabeled =
      pool == task.unlabeled.end() ? kNoSentences : pool->second;
  LpGraph graph;
  try {
    graph = BuildGraph(job.lemma, seeds, unlabeled, queries, embedder,
                       task.inventory, options.lp);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoSeeds &&
        e.code() != ErrorCode::kTooFewVertices) {
      throw;
    }
    job.warnings.push_back("lemma \"" + job.lemma + "\": " + e.what());
    return;
  }
  std::vector<SolverTraceRow> trace;
  const bool dump = !options.dump_dir.empty();
  const LabelDistribution dist =
      Propagate(graph, options.lp, dump ? &trace : nullptr);
  if (dump) {
    WriteGraphDump(options.dump_dir / ("graph-" + job.lemma + ".jsonl"), graph);
    WriteSolverTrace(options.dump_dir / ("trace-" + job.lemma + ".csv"), trace);
  }
  if (!dist.converged) {
    job.warnings.push_back("lemma \"" + job.lemma + "\": propagation stopped at " +
                           std::to_string(dist.iterations) +
                           " iterations without converging");
  }
  for (size_t i = 0; i < n; ++i) {
    const int vertex = graph.query_vertex[i];
    if (vertex < 0) continue;
    job.predictions[i] = ClassifyLp(dist, vertex, graph, task.inventory,
                                    frequencies, options.lp.tol);
  }
}

}  // namespace

MethodRun RunMethod(const Task& task, const std::vector<LabeledExample>& train,
                    const MethodSpec& spec, const EmbedderMap& embedders,
                    const PipelineOptions& options,
                    const std::map<std::string, SenseVectors>* sense_vectors) {
  if (spec.method == Method::kLp) options.lp.Validate();
  if (spec.method != Method::kMfs) EmbedderFor(embedders, spec.backend);

  std::map<std::string, std::vector<LabeledExample>> seeds;
  for (const auto& example : train) seeds[example.lemma].push_back(example);
  const SenseFrequencies frequencies =
      SenseFrequencies::FromExamples(train, task.inventory);

  std::vector<LemmaJob> jobs;
  std::unordered_map<std::string, size_t> job_of;
  for (size_t i = 0; i < task.eval.size(); ++i) {
    const std::string& lemma = task.eval[i].lemma;
    auto [it, inserted] = job_of.emplace(lemma, jobs.size());
    if (inserted) jobs.push_back(LemmaJob{lemma, {}, {}, {}});
    jobs[it->second].instances.push_back(i);
  }

  static const std::vector<LabeledExample> kNoSeeds;
  auto run = [&](LemmaJob& job) {
    auto it = seeds.find(job.lemma);
    RunLemma(task, it == seeds.end() ? kNoSeeds : it->second, spec, embedders,
             options, frequencies, sense_vectors, job);
  };
  const int threads =
      std::clamp(options.threads, 1, static_cast<int>(std::max<size_t>(jobs.size(), 1)));
  if (threads == 1) {
    for (auto& job : jobs) run(job);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (size_t j = next++; j < jobs.size(); j = next++) {
          try {
            run(jobs[j]);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  MethodRun result;
  result.spec = spec;
  result.batch_graphs = spec.method == Method::kLp;
  result.predictions.resize(task.eval.size());
  for (auto& job : jobs) {
    for (size_t i = 0; i < job.instances.size(); ++i) {
      const EvalInstance& instance = task.eval[job.instances[i]];
      result.predictions[job.instances[i]] =
          InstancePrediction{instance.id, instance.lemma, job.predictions[i]};
    }
    for (auto& w : job.warnings) result.warnings.push_back(std::move(w));
  }
  return result;
}

std::vector<SweepRow> RunDensitySweep(const Task& task, const MethodSpec& spec,
                                      const EmbedderMap& embedders,
                                      const PipelineOptions& options,
                                      const std::vector<double>& percentiles,
                                      const ScoreOptions& score_options) {
  if (percentiles.empty()) {
    throw Error(ErrorCode::kConfig, "density sweep needs at least one percentile");
  }
  if (spec.method != Method::kLp) {
    throw Error(ErrorCode::kConfig, "density sweep needs an lp method, got " +
                                        spec.Name());
  }
  std::vector<SweepRow> rows;
  for (double q : percentiles) {
    PipelineOptions run_options = options;
    run_options.lp.percentile = q;
    const MethodRun run =
        RunMethod(task, task.train, spec, embedders, run_options);
    rows.push_back({q, Score(run.predictions, task.eval, task.inventory,
                             score_options)});
  }
  return rows;
}

std::vector<AblationRow> RunAblation(const Task& task,
                                     const std::vector<NamedSubset>& subsets,
                                     const std::vector<MethodSpec>& methods,
                                     const EmbedderMap& embedders,
                                     const PipelineOptions& options,
                                     const ScoreOptions& score_options) {
  std::vector<AblationRow> rows;
  for (const auto& subset : subsets) {
    for (const auto& spec : methods) {
      const MethodRun run =
          RunMethod(task, subset.examples, spec, embedders, options);
      rows.push_back({subset.name, spec.Name(),
                      Score(run.predictions, task.eval, task.inventory,
                            score_options)});
    }
  }
  return rows;
}

std::string PredictionsToJsonl(const std::vector<InstancePrediction>& predictions,
                               const std::string& fingerprint) {
  std::string out;
  for (const auto& p : predictions) {
    out += internal::Line(Json{{"id", p.id},
                               {"lemma", p.lemma},
                               {"sense", p.prediction.sense_id},
                               {"score", p.prediction.score},
                               {"method", MethodName(p.prediction.method)},
                               {"abstained", p.prediction.abstained},
                               {"fingerprint", fingerprint}});
  }
  return out;
}

std::vector<InstancePrediction> LoadPredictions(
    const std::filesystem::path& path) {
  std::vector<InstancePrediction> out;
  internal::ForEachJsonLine(path, [&](const Json& record, size_t line) {
    const auto where = internal::Where(path, line);
    InstancePrediction p;
    p.id = internal::Field<std::string>(record, "id", where);
    p.lemma = internal::Field<std::string>(record, "lemma", where);
    p.prediction.abstained = record.value("abstained", false);
    p.prediction.sense_id = record.value("sense", "");
    p.prediction.score = record.value("score", 0.0);
    p.prediction.method = ParseMethod(record.value("method", "nn"));
    if (!p.prediction.abstained && p.prediction.sense_id.empty()) {
      throw Error(ErrorCode::kMissingField, where + ": missing field \"sense\"");
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::string ReportToJson(const ScoreReport& report) {
  Json j = CountsToJson(report.overall);
  j["macro_f1"] = report.macro_f1;
  j["fingerprint"] = report.fingerprint;
  j["by_pos"] = Json::object();
  for (const auto& [pos, c] : report.by_pos) j["by_pos"][pos] = CountsToJson(c);
  j["by_lemma"] = Json::object();
  for (const auto& [lemma, c] : report.by_lemma) {
    j["by_lemma"][lemma] = CountsToJson(c);
  }
  return j.dump(2) + "\n";
}

std::string ReportToCsv(const ScoreReport& report) {
  std::string out =
      "scope,attempted,correct,total,precision,recall,f1,fingerprint\n";
  auto row = [&](const std::string& scope, const ScoreCounts& c) {
    out += scope + "," + CountsCsv(c) + "," + report.fingerprint + "\n";
  };
  row("all", report.overall);
  for (const auto& [pos, c] : report.by_pos) row("pos:" + pos, c);
  for (const auto& [lemma, c] : report.by_lemma) row("lemma:" + lemma, c);
  return out;
}

std::string SweepToCsv(const std::vector<SweepRow>& rows) {
  std::set<std::string> tags;
  for (const auto& r : rows) {
    for (const auto& [pos, c] : r.report.by_pos) tags.insert(pos);
  }
  std::string out =
      "percentile,attempted,correct,total,precision,recall,f1,macro_f1";
  for (const auto& tag : tags) out += ",f1_" + tag;
  out += ",fingerprint\n";
  for (const auto& r : rows) {
    char q[32];
    std::snprintf(q, sizeof q, "%g", r.percentile);
    out += std::string(q) + "," + CountsCsv(r.report.overall) + "," +
           Num(r.report.macro_f1);
    for (const auto& tag : tags) {
      auto it = r.report.by_pos.find(tag);
      out += "," + (it == r.report.by_pos.end() ? std::string() : Num(it->second.f1));
    }
    out += "," + r.report.fingerprint + "\n";
  }
  return out;
}

std::string AblationToCsv(const std::vector<AblationRow>& rows) {
  std::string out =
      "subset,method,attempted,correct,total,precision,recall,f1,macro_f1,"
      "fingerprint\n";
  for (const auto& r : rows) {
    out += r.subset + "," + r.method + "," + CountsCsv(r.report.overall) + "," +
           Num(r.report.macro_f1) + "," + r.report.fingerprint + "\n";
  }
  return out;
}

}  // namespace wsd
