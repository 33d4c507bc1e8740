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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "wsd/eval.h"
#include "wsd/lm.h"
#include "wsd/propagate.h"
#include "wsd/synthetic.h"
#include "wsd/util.h"

namespace wsd {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---- 1. LP solver against the dense linear solve --------------------------

Outcome LpOracle() {
  Rng rng(101);
  double worst = 0.0;
  int monotone_violations = 0;
  int unconverged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(19));
    const int k = 2 + static_cast<int>(rng.Below(3));
    LpGraph g;
    g.lemma = "x";
    for (int s = 0; s < k; ++s) g.senses.push_back("s" + std::to_string(s));
    const int seeds = 1 + static_cast<int>(rng.Below(n));
    for (int v = 0; v < n; ++v) {
      LpVertex vert;
      if (v < seeds) {
        vert.kind = VertexKind::kSeed;
        vert.seed_sense = static_cast<int>(rng.Below(k));
      } else {
        vert.kind = VertexKind::kUnlabeled;
      }
      g.vertices.push_back(vert);
    }
    const double density = rng.Uniform(0.1, 1.0);
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.Uniform() < density) g.edges.push_back({u, v, rng.Uniform()});
      }
    }
    LpParams p;
    p.mu_edge = rng.Uniform(0.01, 1.0);
    p.prior_kind = trial % 2 ? PriorKind::kEmpirical : PriorKind::kUniform;
    p.tol = 1e-12;
    p.max_iter = 1000000;
    std::vector<SolverTraceRow> trace;
    const auto d = Propagate(g, p, &trace);
    if (!d.converged) ++unconverged;
    const auto exact = oracle::DenseLpSolve(g, p, d.prior);
    for (int v = 0; v < n; ++v) {
      const double sum = std::accumulate(exact[v].begin(), exact[v].end(), 0.0);
      for (int s = 0; s < k; ++s) {
        worst = std::max(worst, std::abs(d.rows[v][s] - exact[v][s] / sum));
      }
    }
    for (size_t i = 1; i < trace.size(); ++i) {
      // Round-off slack only.
      if (trace[i].objective > trace[i - 1].objective * (1 + 1e-12) + 1e-15) {
        ++monotone_violations;
      }
    }
  }
  std::ostringstream out;
  out << "max |jacobi - dense| = " << worst << " (tol 1e-5), objective increases = "
      << monotone_violations << ", unconverged = " << unconverged;
  return {worst <= 1e-5 && monotone_violations == 0 && unconverged == 0, out.str()};
}

// ---- 2. LM gradient check -------------------------------------------------

Outcome GradientCheck() {
  Rng rng(202);
  double worst = 0.0;
  std::string worst_block;
  for (int trial = 0; trial < 20; ++trial) {
    const int v = 4 + static_cast<int>(rng.Below(17));
    const int d = 1 + static_cast<int>(rng.Below(8));
    const int h = 1 + static_cast<int>(rng.Below(8));
    const int c = 1 + static_cast<int>(rng.Below(8));
    LmParams params = LmParams::Zeros(v, d, h, c);
    params.ForEachBlock([&](const char*, std::span<double> block) {
      for (double& x : block) x = rng.Uniform(-0.5, 0.5);
    });
    const int len = 1 + static_cast<int>(rng.Below(6));
    std::vector<int> ids;
    for (int t = 0; t < len; ++t) ids.push_back(static_cast<int>(rng.Below(v)));
    ids[rng.Below(len)] = kHoldoutId;
    const int target = kNumReservedIds + static_cast<int>(rng.Below(v - kNumReservedIds));
    const auto r = oracle::CheckGradient(params, ids, target, 1e-5);
    if (r.max_rel_error > worst) {
      worst = r.max_rel_error;
      worst_block = r.worst_block;
    }
  }
  std::ostringstream out;
  out << "max relative error = " << worst << " in " << worst_block << " (tol 1e-4)";
  return {worst <= 1e-4, out.str()};
}

// ---- 3. Toy language ------------------------------------------------------

Outcome ToyConvergence() {
  // Disjoint vocabularies per sentence: every held-out slot has exactly one
  // valid completion. Each sentence appears 20 times.
  const TokenStream base = {{"a", "b", "c", "d"},
                            {"e", "f", "g", "h"},
                            {"i", "j", "k", "l"},
                            {"m", "n", "o"}};
  TokenStream text;
  for (int copy = 0; copy < 20; ++copy) {
    text.insert(text.end(), base.begin(), base.end());
  }
  const Vocab vocab = BuildVocab(text, 100);
  LmConfig config;
  config.embed_dim = 8;
  config.hidden_dim = 16;
  config.context_dim = 8;
  config.downsample = false;
  config.max_epochs = 50;
  config.seed = 3;
  TrainReport report;
  const LmParams params = TrainLm(text, vocab, config, &report);
  const double best =
      *std::min_element(report.epoch_loss.begin(), report.epoch_loss.end());
  int epoch = 0;
  const double bound = std::log(2.0) + 0.05;
  for (size_t e = 0; e < report.epoch_loss.size(); ++e) {
    if (report.epoch_loss[e] < bound) {
      epoch = static_cast<int>(e) + 1;
      break;
    }
  }
  const HeldoutEval eval = EvaluateHeldout(params, vocab, text);
  std::ostringstream out;
  out << "loss " << report.initial_loss << " -> " << report.epoch_loss.back()
      << " (below ln2+0.05 at epoch " << epoch << "), top-1 "
      << eval.top1_accuracy << " over " << eval.positions << " positions";
  return {best < bound && eval.top1_accuracy >= 0.95, out.str()};
}

// ---- 4-6. Pseudoword tasks ------------------------------------------------

struct Shared {
  std::shared_ptr<ContextEmbedder> lm;
  double train_seconds = 0;
};

Shared& SharedLm() {
  static Shared shared = [] {
    const auto start = std::chrono::steady_clock::now();
    const SyntheticTask task = GenerateSynthetic(SyntheticConfig{});
    auto model = std::make_shared<LmModel>();
    model->config.embed_dim = 16;
    model->config.hidden_dim = 32;
    model->config.context_dim = 16;
    model->config.downsample = false;
    model->config.max_epochs = 10;
    model->vocab = BuildVocab(task.lm_text, 1000);
    model->params = TrainLm(task.lm_text, model->vocab, model->config);
    Shared s;
    s.lm = std::make_shared<ContextEmbedder>(std::make_shared<LmBackend>(model));
    s.train_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return s;
  }();
  return shared;
}

Task ToTask(const SyntheticTask& s) {
  return Task{s.inventory, s.labeled, s.unlabeled, s.eval};
}

double F1(const Task& task, const MethodSpec& spec, const EmbedderMap& embedders,
          const PipelineOptions& options) {
  const auto run = RunMethod(task, task.train, spec, embedders, options);
  return Score(run.predictions, task.eval, task.inventory).overall.f1;
}

Outcome OrderSensitivity() {
  const SyntheticTask synthetic = GenerateSynthetic(SyntheticConfig{});
  const Task task = ToTask(synthetic);
  EmbedderMap embedders;
  embedders["lm"] = SharedLm().lm;
  embedders["bow"] = std::make_shared<ContextEmbedder>(std::make_shared<BowBackend>(
      std::make_shared<const WordVectorTable>(synthetic.vectors)));
  const PipelineOptions options;
  const double lm = F1(task, {Method::kNn, "lm"}, embedders, options);
  const double bow = F1(task, {Method::kNn, "bow"}, embedders, options);
  std::ostringstream out;
  out << "nn-lm F1 " << lm << " (>= 0.9), nn-bow F1 " << bow << " (<= 0.6), LM trained in "
      << SharedLm().train_seconds << " s";
  return {lm >= 0.9 && bow <= 0.6, out.str()};
}

SyntheticConfig SkewedConfig() {
  SyntheticConfig c;
  c.labeled_per_sense = 2;
  c.majority_share = 0.8;
  c.unlabeled_per_word = 200;
  return c;
}

PipelineOptions EmpiricalLp() {
  PipelineOptions options;
  options.lp.prior_kind = PriorKind::kEmpirical;
  return options;
}

Outcome SemiSupervision() {
  const Task task = ToTask(GenerateSynthetic(SkewedConfig()));
  EmbedderMap embedders;
  embedders["lm"] = SharedLm().lm;
  const double lp = F1(task, {Method::kLp, "lm"}, embedders, EmpiricalLp());
  const double nn = F1(task, {Method::kNn, "lm"}, embedders, EmpiricalLp());
  const double mfs = F1(task, {Method::kMfs, ""}, embedders, EmpiricalLp());
  std::ostringstream out;
  out << "lp-lm F1 " << lp << " >= nn-lm F1 " << nn << " (mfs " << mfs << ")";
  return {lp >= nn, out.str()};
}

Outcome DensityStability() {
  const Task task = ToTask(GenerateSynthetic(SkewedConfig()));
  EmbedderMap embedders;
  embedders["lm"] = SharedLm().lm;
  const auto rows = RunDensitySweep(task, {Method::kLp, "lm"}, embedders,
                                    EmpiricalLp(), {95, 98, 90, 85});
  const double base = rows[0].report.overall.f1;
  double worst = 0.0;
  std::ostringstream out;
  out << "F1(95) " << base;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double f1 = rows[i].report.overall.f1;
    worst = std::max(worst, std::abs(f1 - base));
    out << ", F1(" << rows[i].percentile << ") " << f1;
  }
  out << "; max gap " << worst << " (tol 0.03)";
  return {worst <= 0.03, out.str()};
}

// ---- 7. Graph construction against brute force ----------------------------

Outcome GraphOracle() {
  Rng rng(707);
  int mismatches = 0;
  size_t edges = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(60));
    const int dim = 1 + static_cast<int>(rng.Below(6));
    std::vector<std::vector<double>> vectors(n, std::vector<double>(dim));
    std::vector<LpVertex> vertices;
    for (int i = 0; i < n; ++i) {
      for (double& x : vectors[i]) x = rng.Gaussian();
      LpVertex v;
      v.context = vectors[i];
      v.kind = i == 0 ? VertexKind::kSeed : VertexKind::kUnlabeled;
      v.seed_sense = i == 0 ? 0 : -1;
      vertices.push_back(std::move(v));
    }
    const int q = 50 + static_cast<int>(rng.Below(50));
    LpParams p;
    p.percentile = q;
    p.min_degree = static_cast<int>(rng.Below(15));
    const auto g = BuildGraphFromVertices("x", {"s0", "s1"}, vertices, p);
    const auto want = oracle::BruteForceEdges(vectors, q, p.min_degree);
    bool same = g.edges.size() == want.size();
    for (size_t e = 0; same && e < want.size(); ++e) {
      same = g.edges[e].u == std::get<0>(want[e]) &&
             g.edges[e].v == std::get<1>(want[e]) &&
             g.edges[e].weight == std::get<2>(want[e]);
    }
    if (!same) ++mismatches;
    edges += g.edges.size();
  }
  std::ostringstream out;
  out << mismatches << " of 50 vertex sets differ (" << edges << " edges compared)";
  return {mismatches == 0, out.str()};
}

// ---- 8. Determinism -------------------------------------------------------

std::string EndToEnd(int threads) {
  SyntheticConfig sc = SkewedConfig();
  sc.num_words = 2;
  sc.lm_sentences_per_sense = 60;
  sc.unlabeled_per_word = 60;
  sc.eval_per_word = 40;
  const SyntheticTask synthetic = GenerateSynthetic(sc);
  LmConfig config;
  config.embed_dim = 8;
  config.hidden_dim = 16;
  config.context_dim = 8;
  config.max_epochs = 3;
  config.seed = 11;
  auto model = std::make_shared<LmModel>();
  model->config = config;
  model->vocab = BuildVocab(synthetic.lm_text, 1000);
  model->params = TrainLm(synthetic.lm_text, model->vocab, config);
  EmbedderMap embedders;
  embedders["lm"] = std::make_shared<ContextEmbedder>(std::make_shared<LmBackend>(model));
  PipelineOptions options = EmpiricalLp();
  options.threads = threads;
  const Task task = ToTask(synthetic);
  std::string out;
  for (const MethodSpec& spec : {MethodSpec{Method::kNn, "lm"},
                                 MethodSpec{Method::kLp, "lm"},
                                 MethodSpec{Method::kMfs, ""}}) {
    out += PredictionsToJsonl(RunMethod(task, task.train, spec, embedders, options)
                                  .predictions,
                              spec.Name());
  }
  return out;
}

Outcome Determinism() {
  const std::string a = EndToEnd(1);
  const std::string b = EndToEnd(1);
  const std::string c = EndToEnd(3);
  std::ostringstream out;
  out << a.size() << " bytes of predictions; repeat identical: "
      << (a == b ? "yes" : "no") << ", threaded identical: " << (a == c ? "yes" : "no");
  return {a == b && a == c, out.str()};
}

// ---- 9. Scoring arithmetic ------------------------------------------------

void AddInstances(const std::string& lemma, int n, int attempted, int correct,
                  std::vector<EvalInstance>* gold,
                  std::vector<InstancePrediction>* preds) {
  for (int i = 0; i < n; ++i) {
    const std::string id = lemma + std::to_string(i);
    gold->push_back({id, Sentence{{lemma}, 0}, lemma, {lemma + "1"}});
    Prediction p = Prediction::Abstain(Method::kNn);
    if (i < attempted) p = {lemma + (i < correct ? "1" : "2"), 1.0, Method::kNn, false};
    preds->push_back({id, lemma, p});
  }
}

Outcome ScoringArithmetic() {
  SenseInventory inv;
  inv.AddLemma("a", {"a1", "a2"});
  inv.AddLemma("b", {"b1", "b2"});
  std::vector<std::string> failures;

  {
    std::vector<EvalInstance> gold;
    std::vector<InstancePrediction> preds;
    AddInstances("a", 10, 10, 8, &gold, &preds);
    const auto r = Score(preds, gold, inv).overall;
    if (!(r.precision == 0.8 && r.recall == 0.8 && r.f1 == 2 * 0.8 * 0.8 / 1.6)) {
      failures.push_back("10/10/8");
    }
  }
  {
    std::vector<EvalInstance> gold;
    std::vector<InstancePrediction> preds;
    AddInstances("a", 10, 5, 5, &gold, &preds);
    const auto r = Score(preds, gold, inv).overall;
    if (!(r.precision == 1.0 && r.recall == 0.5 && r.f1 == 2.0 * 0.5 / 1.5)) {
      failures.push_back("10/5/5");
    }
  }
  {
    std::vector<EvalInstance> gold;
    std::vector<InstancePrediction> preds;
    AddInstances("a", 4, 4, 1, &gold, &preds);  // F1 0.25
    AddInstances("b", 6, 3, 3, &gold, &preds);  // P 1, R 0.5, F1 2/3
    const auto r = Score(preds, gold, inv);
    const double fa = 2 * 0.25 * 0.25 / 0.5;
    const double fb = 2 * 1.0 * 0.5 / 1.5;
    if (!(r.by_lemma.at("a").f1 == fa && r.by_lemma.at("b").f1 == fb &&
          r.macro_f1 == (fa + fb) / 2)) {
      failures.push_back("macro");
    }
  }
  std::string detail = "three cases exact";
  if (!failures.empty()) {
    detail = "mismatch in:";
    for (const auto& f : failures) detail += " " + f;
  }
  return {failures.empty(), detail};
}

}  // namespace
}  // namespace wsd

int main() {
  using wsd::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 lp-oracle", wsd::LpOracle},
      {"2 lm-gradient", wsd::GradientCheck},
      {"3 toy-convergence", wsd::ToyConvergence},
      {"4 order-sensitivity", wsd::OrderSensitivity},
      {"5 semi-supervision", wsd::SemiSupervision},
      {"6 density-stability", wsd::DensityStability},
      {"7 graph-oracle", wsd::GraphOracle},
      {"8 determinism", wsd::Determinism},
      {"9 scoring", wsd::ScoringArithmetic},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %s: %s [%.2f s]\n", outcome.pass ? "PASS" : "FAIL",
                name, outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
