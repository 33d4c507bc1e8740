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

#include "wsd/propagate.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "jsonl.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

using internal::Json;

std::string_view VertexKindName(VertexKind kind) {
  switch (kind) {
    case VertexKind::kSeed: return "seed";
    case VertexKind::kUnlabeled: return "unlabeled";
    case VertexKind::kQuery: return "query";
  }
  return "?";
}

void LpParams::Validate() const {
  auto fail = [](const std::string& what) {
    throw Error(ErrorCode::kConfig, "lp params: " + what);
  };
  if (!(mu_seed > 0.0) || !(mu_prior > 0.0)) {
    fail("mu_seed and mu_prior must be positive");
  }
  if (!(mu_edge >= 0.0)) fail("mu_edge must be nonnegative");
  if (!(percentile > 0.0 && percentile < 100.0)) {
    fail("percentile must lie in (0, 100)");
  }
  if (!(tol > 0.0)) fail("tol must be positive");
  if (max_iter < 1) fail("max_iter must be >= 1");
  if (min_degree < 0) fail("min_degree must be >= 0");
  if (!prior.empty()) {
    double sum = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0)) fail("prior entries must be nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("prior must sum to 1");
  }
}

std::vector<std::vector<std::pair<int, double>>> LpGraph::Adjacency() const {
  std::vector<std::vector<std::pair<int, double>>> adj(vertices.size());
  for (const auto& e : edges) {
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
  }
  return adj;
}

std::vector<int> LpGraph::Degrees() const {
  std::vector<int> degree(vertices.size(), 0);
  for (const auto& e : edges) {
    ++degree[e.u];
    ++degree[e.v];
  }
  return degree;
}

size_t NearestRankIndex(double percentile, size_t n) {
  if (n == 0) return 0;
  // The epsilon keeps exact products such as 90% of 10 from rounding up.
  const long double rank = std::ceil(static_cast<long double>(percentile) *
                                         static_cast<long double>(n) / 100.0L -
                                     1e-9L);
  const auto r = static_cast<size_t>(std::max<long double>(rank, 1.0L));
  return std::min(r, n) - 1;
}

LpGraph BuildGraphFromVertices(std::string lemma,
                               std::vector<std::string> senses,
                               std::vector<LpVertex> vertices,
                               const LpParams& params) {
  params.Validate();
  const int n = static_cast<int>(vertices.size());
  const bool has_seed =
      std::any_of(vertices.begin(), vertices.end(),
                  [](const LpVertex& v) { return v.kind == VertexKind::kSeed; });
  if (!has_seed) throw Error(ErrorCode::kNoSeeds, "lemma \"" + lemma + "\"");
  if (n < 2) {
    throw Error(ErrorCode::kTooFewVertices,
                "lemma \"" + lemma + "\" has " + std::to_string(n) + " vertex");
  }
  for (const auto& v : vertices) {
    if (v.kind == VertexKind::kSeed &&
        (v.seed_sense < 0 || v.seed_sense >= static_cast<int>(senses.size()))) {
      throw Error(ErrorCode::kUnknownSense, "seed label out of range");
    }
  }

  std::vector<double> sim(static_cast<size_t>(n) * n, 0.0);
  std::vector<double> pair_sims;
  pair_sims.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = Cosine(vertices[i].context, vertices[j].context);
      sim[static_cast<size_t>(i) * n + j] = s;
      sim[static_cast<size_t>(j) * n + i] = s;
      pair_sims.push_back(s);
    }
  }
  std::vector<double> sorted = pair_sims;
  std::sort(sorted.begin(), sorted.end());
  const double threshold =
      sorted[NearestRankIndex(params.percentile, sorted.size())];

  // Weight < 0 marks a missing edge.
  std::vector<double> weight(static_cast<size_t>(n) * n, -1.0);
  std::vector<int> degree(n, 0);
  auto connect = [&](int a, int b, double w) {
    weight[static_cast<size_t>(a) * n + b] = w;
    weight[static_cast<size_t>(b) * n + a] = w;
    ++degree[a];
    ++degree[b];
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double s = sim[static_cast<size_t>(i) * n + j];
      if (s >= threshold && s > 0.0) connect(i, j, s);
    }
  }

  const int target = std::min(params.min_degree, n - 1);
  std::vector<int> candidates;
  for (int v = 0; v < n; ++v) {
    if (degree[v] >= target) continue;
    candidates.clear();
    for (int u = 0; u < n; ++u) {
      if (u != v && weight[static_cast<size_t>(v) * n + u] < 0.0) {
        candidates.push_back(u);
      }
    }
    const double* row = &sim[static_cast<size_t>(v) * n];
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return row[a] != row[b] ? row[a] > row[b] : a < b;
    });
    for (int u : candidates) {
      if (degree[v] >= target) break;
      connect(v, u, std::max(row[u], kMinDegreeEdgeWeight));
    }
  }

  LpGraph graph;
  graph.lemma = std::move(lemma);
  graph.senses = std::move(senses);
  graph.vertices = std::move(vertices);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double w = weight[static_cast<size_t>(i) * n + j];
      if (w >= 0.0) graph.edges.push_back({i, j, std::clamp(w, 0.0, 1.0)});
    }
  }
  return graph;
}

LpGraph BuildGraph(const std::string& lemma,
                   std::span<const LabeledExample> seeds,
                   std::span<const Sentence> unlabeled,
                   std::span<const Sentence> queries,
                   const ContextEmbedder& embedder,
                   const SenseInventory& inventory, const LpParams& params) {
  const auto& senses = inventory.Senses(lemma);
  std::vector<LpVertex> vertices;
  auto try_embed = [&](const Sentence& s, std::vector<double>* out) {
    try {
      *out = embedder.Embed(s).values;
      return true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kEmptyContext) throw;
      return false;
    }
  };
  for (const auto& seed : seeds) {
    if (seed.lemma != lemma) {
      throw Error(ErrorCode::kInvalidArgument,
                  "seed for lemma \"" + seed.lemma + "\" in graph for \"" +
                      lemma + "\"");
    }
    auto index = inventory.SenseIndex(lemma, seed.sense_id);
    if (!index) throw Error(ErrorCode::kUnknownSense, "\"" + seed.sense_id + "\"");
    LpVertex v{VertexKind::kSeed, {}, static_cast<int>(*index)};
    if (try_embed(seed.sentence, &v.context)) vertices.push_back(std::move(v));
  }
  for (const auto& s : unlabeled) {
    LpVertex v{VertexKind::kUnlabeled, {}, -1};
    if (try_embed(s, &v.context)) vertices.push_back(std::move(v));
  }
  std::vector<int> query_vertex;
  for (const auto& s : queries) {
    LpVertex v{VertexKind::kQuery, {}, -1};
    if (try_embed(s, &v.context)) {
      query_vertex.push_back(static_cast<int>(vertices.size()));
      vertices.push_back(std::move(v));
    } else {
      query_vertex.push_back(-1);
    }
  }
  LpGraph graph =
      BuildGraphFromVertices(lemma, senses, std::move(vertices), params);
  graph.query_vertex = std::move(query_vertex);
  return graph;
}

std::vector<double> ResolvePrior(const LpGraph& graph, const LpParams& params) {
  const size_t k = graph.senses.size();
  if (!params.prior.empty()) {
    if (params.prior.size() != k) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "prior has " + std::to_string(params.prior.size()) +
                      " entries for " + std::to_string(k) + " senses");
    }
    return params.prior;
  }
  std::vector<double> prior(k, 1.0 / static_cast<double>(k));
  if (params.prior_kind == PriorKind::kEmpirical) {
    std::vector<double> counts(k, 0.0);
    double total = 0.0;
    for (const auto& v : graph.vertices) {
      if (v.kind == VertexKind::kSeed) {
        counts[v.seed_sense] += 1.0;
        total += 1.0;
      }
    }
    if (total > 0.0) {
      for (size_t s = 0; s < k; ++s) prior[s] = counts[s] / total;
    }
  }
  return prior;
}

double LpObjective(const LpGraph& graph, const LpParams& params,
                   std::span<const double> prior,
                   const std::vector<std::vector<double>>& rows) {
  const size_t k = graph.senses.size();
  double seed_term = 0.0, edge_term = 0.0, prior_term = 0.0;
  for (size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& y = rows[v];
    const auto& vert = graph.vertices[v];
    for (size_t s = 0; s < k; ++s) {
      if (vert.kind == VertexKind::kSeed) {
        const double target = static_cast<int>(s) == vert.seed_sense ? 1.0 : 0.0;
        seed_term += (y[s] - target) * (y[s] - target);
      }
      prior_term += (y[s] - prior[s]) * (y[s] - prior[s]);
    }
  }
  for (const auto& e : graph.edges) {
    double sq = 0.0;
    for (size_t s = 0; s < k; ++s) {
      const double diff = rows[e.u][s] - rows[e.v][s];
      sq += diff * diff;
    }
    edge_term += e.weight * sq;
  }
  return params.mu_seed * seed_term + params.mu_edge * edge_term +
         params.mu_prior * prior_term;
}

LabelDistribution Propagate(const LpGraph& graph, const LpParams& params,
                            std::vector<SolverTraceRow>* trace) {
  params.Validate();
  const size_t n = graph.vertices.size();
  const size_t k = graph.senses.size();
  LabelDistribution dist;
  dist.prior = ResolvePrior(graph, params);
  const auto adj = graph.Adjacency();

  std::vector<double> denom(n);
  for (size_t v = 0; v < n; ++v) {
    double wsum = 0.0;
    for (const auto& [u, w] : adj[v]) wsum += w;
    const bool seed = graph.vertices[v].kind == VertexKind::kSeed;
    denom[v] = (seed ? params.mu_seed : 0.0) + params.mu_edge * wsum +
               params.mu_prior;
  }

  std::vector<std::vector<double>> current(n, dist.prior);
  std::vector<std::vector<double>> next(n, std::vector<double>(k, 0.0));
  if (trace != nullptr) {
    trace->clear();
    trace->push_back({0, LpObjective(graph, params, dist.prior, current), 0.0});
  }

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    double max_delta = 0.0;
    // Every update reads only `current`, so vertices are independent within
    // a sweep.
    for (size_t v = 0; v < n; ++v) {
      auto& out = next[v];
      for (size_t s = 0; s < k; ++s) out[s] = params.mu_prior * dist.prior[s];
      const auto& vert = graph.vertices[v];
      if (vert.kind == VertexKind::kSeed) out[vert.seed_sense] += params.mu_seed;
      for (const auto& [u, w] : adj[v]) {
        const double scale = params.mu_edge * w;
        const auto& yu = current[u];
        for (size_t s = 0; s < k; ++s) out[s] += scale * yu[s];
      }
      for (size_t s = 0; s < k; ++s) {
        out[s] /= denom[v];
        max_delta = std::max(max_delta, std::abs(out[s] - current[v][s]));
      }
    }
    current.swap(next);
    dist.iterations = iter;
    if (trace != nullptr) {
      trace->push_back(
          {iter, LpObjective(graph, params, dist.prior, current), max_delta});
    }
    if (max_delta < params.tol) {
      dist.converged = true;
      break;
    }
  }

  for (auto& row : current) {
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum > 0.0) {
      for (double& x : row) x /= sum;
    }
  }
  dist.rows = std::move(current);
  return dist;
}

Prediction ClassifyLp(const LabelDistribution& distribution, int vertex,
                      const LpGraph& graph, const SenseInventory& inventory,
                      const SenseFrequencies& fallback, double tol) {
  if (vertex < 0 || static_cast<size_t>(vertex) >= distribution.rows.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "vertex " + std::to_string(vertex) + " not in graph");
  }
  const auto& row = distribution.rows[vertex];
  double gap = 0.0;
  for (size_t s = 0; s < row.size(); ++s) {
    gap = std::max(gap, std::abs(row[s] - distribution.prior[s]));
  }
  if (gap <= tol) return ClassifyMfs(graph.lemma, inventory, fallback);

  size_t best = 0;
  for (size_t s = 1; s < row.size(); ++s) {
    if (row[s] > row[best]) best = s;
  }
  return Prediction{graph.senses[best], row[best], Method::kLp, false};
}

void WriteGraphDump(const std::filesystem::path& path, const LpGraph& graph) {
  std::string out;
  for (size_t v = 0; v < graph.vertices.size(); ++v) {
    const auto& vert = graph.vertices[v];
    Json record{{"type", "vertex"},
                {"id", v},
                {"kind", VertexKindName(vert.kind)},
                {"lemma", graph.lemma}};
    if (vert.kind == VertexKind::kSeed) {
      record["sense"] = graph.senses[vert.seed_sense];
    }
    out += internal::Line(record);
  }
  for (const auto& e : graph.edges) {
    out += internal::Line(
        Json{{"type", "edge"}, {"u", e.u}, {"v", e.v}, {"weight", e.weight}});
  }
  WriteFile(path, out);
}

void WriteSolverTrace(const std::filesystem::path& path,
                      std::span<const SolverTraceRow> trace) {
  std::string out = "iteration,objective,max_delta\n";
  char buffer[128];
  for (const auto& row : trace) {
    std::snprintf(buffer, sizeof buffer, "%d,%.17g,%.17g\n", row.iteration,
                  row.objective, row.max_delta);
    out += buffer;
  }
  WriteFile(path, out);
}

}  // namespace wsd
