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

// Graph-based semi-supervised sense classification.
//
// One graph is built per lemma over labeled seed sentences, unlabeled
// sentences and the sentences to classify. Sense distributions Y_v are found
// by minimizing
//
//   L(Y) = mu_seed  * sum_{v seed} |Y_v - S_v|^2
//        + mu_edge  * sum_{{u,v} in E} w_uv |Y_u - Y_v|^2
//        + mu_prior * sum_v |Y_v - U|^2
//
// where S_v is the one-hot seed label, U the sense prior, and each undirected
// edge is counted once. The minimizer is reached by Jacobi sweeps
//
//   Y_v <- (mu_seed [v seed] S_v + mu_edge sum_u w_uv Y_u + mu_prior U)
//          / (mu_seed [v seed] + mu_edge sum_u w_uv + mu_prior)
//
// starting from Y = U. With nonnegative weights and mu_prior > 0 each sweep
// does not increase L: the sweep is a gradient step preconditioned by the
// Hessian diagonal D, and 2D - H = diag(mu terms) + mu_edge (degree + W) is
// positive definite.

#ifndef WSD_PROPAGATE_H_
#define WSD_PROPAGATE_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsd/classify.h"
#include "wsd/corpus.h"
#include "wsd/embed.h"

namespace wsd {

enum class VertexKind { kSeed, kUnlabeled, kQuery };
std::string_view VertexKindName(VertexKind kind);

enum class PriorKind { kUniform, kEmpirical };

struct LpParams {
  double mu_seed = 1.0;
  double mu_edge = 0.1;
  double mu_prior = 0.01;
  // kEmpirical uses the seed label frequencies of the graph.
  PriorKind prior_kind = PriorKind::kUniform;
  // When nonempty, overrides prior_kind. Must sum to 1 over the senses.
  std::vector<double> prior;
  double tol = 1e-6;
  int max_iter = 1000;
  double percentile = 95.0;
  int min_degree = 10;

  // Throws kConfig.
  void Validate() const;
};

// Floor weight given to edges added only to satisfy the minimum degree.
inline constexpr double kMinDegreeEdgeWeight = 1e-3;

struct LpVertex {
  VertexKind kind = VertexKind::kUnlabeled;
  std::vector<double> context;
  int seed_sense = -1;  // index into LpGraph::senses for seeds
};

struct LpEdge {
  int u = 0;  // u < v
  int v = 0;
  double weight = 0.0;

  bool operator==(const LpEdge&) const = default;
};

struct LpGraph {
  std::string lemma;
  std::vector<std::string> senses;  // inventory order
  std::vector<LpVertex> vertices;   // seeds, then unlabeled, then queries
  // Each undirected edge once, sorted by (u, v).
  std::vector<LpEdge> edges;
  // Vertex id of every query passed to BuildGraph, or -1 when its context
  // could not be embedded.
  std::vector<int> query_vertex;

  // Symmetric adjacency: both (u -> v) and (v -> u) for every edge.
  std::vector<std::vector<std::pair<int, double>>> Adjacency() const;
  std::vector<int> Degrees() const;
};

// Edge rules, applied to the vertices in order:
//   1. threshold = nearest-rank `percentile` of all pairwise cosines;
//      connect every pair with cosine >= threshold and cosine > 0.
//   2. each vertex still below min(min_degree, n-1) neighbours is joined to
//      its most similar non-neighbours (ties to the lower id) with weight
//      max(cosine, kMinDegreeEdgeWeight) until it reaches that degree.
//   3. weights are clamped to [0, 1].
// Throws kNoSeeds or kTooFewVertices.
LpGraph BuildGraphFromVertices(std::string lemma,
                               std::vector<std::string> senses,
                               std::vector<LpVertex> vertices,
                               const LpParams& params);

// Embeds seeds, unlabeled sentences and queries and builds the graph.
// Sentences with an empty context are left out of the graph.
LpGraph BuildGraph(const std::string& lemma,
                   std::span<const LabeledExample> seeds,
                   std::span<const Sentence> unlabeled,
                   std::span<const Sentence> queries,
                   const ContextEmbedder& embedder,
                   const SenseInventory& inventory, const LpParams& params);

// Index of the nearest-rank q-th percentile in an ascending list of n values.
size_t NearestRankIndex(double percentile, size_t n);

struct SolverTraceRow {
  int iteration = 0;
  double objective = 0.0;
  double max_delta = 0.0;
};

struct LabelDistribution {
  std::vector<std::vector<double>> rows;  // vertex x sense, rows sum to 1
  std::vector<double> prior;
  int iterations = 0;
  bool converged = false;
};

std::vector<double> ResolvePrior(const LpGraph& graph, const LpParams& params);

double LpObjective(const LpGraph& graph, const LpParams& params,
                   std::span<const double> prior,
                   const std::vector<std::vector<double>>& rows);

// Jacobi sweeps until the largest per-entry change falls below params.tol or
// params.max_iter sweeps have run; `converged` reports which. When `trace` is
// given it receives the objective after every sweep (row 0 is the start).
LabelDistribution Propagate(const LpGraph& graph, const LpParams& params,
                            std::vector<SolverTraceRow>* trace = nullptr);

// Argmax of the vertex's distribution, ties to the inventory-earlier sense.
// When the distribution is within `tol` of the prior everywhere, no seed
// signal reached the vertex and the fallback (most frequent sense, else the
// first-listed sense) is returned with method kMfs.
Prediction ClassifyLp(const LabelDistribution& distribution, int vertex,
                      const LpGraph& graph, const SenseInventory& inventory,
                      const SenseFrequencies& fallback, double tol = 1e-6);

// Vertices then edges, one JSON object per line.
void WriteGraphDump(const std::filesystem::path& path, const LpGraph& graph);
// CSV with header iteration,objective,max_delta.
void WriteSolverTrace(const std::filesystem::path& path,
                      std::span<const SolverTraceRow> trace);

}  // namespace wsd

#endif  // WSD_PROPAGATE_H_
