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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.h"
#include "test_util.h"
#include "wsd/util.h"

namespace wsd {
namespace {

using testing::CodeOf;
using testing::TempDir;

LpVertex Seed(int sense, std::vector<double> context = {1}) {
  return LpVertex{VertexKind::kSeed, std::move(context), sense};
}
LpVertex Free(VertexKind kind = VertexKind::kQuery,
              std::vector<double> context = {1}) {
  return LpVertex{kind, std::move(context), -1};
}

LpGraph HandGraph(std::vector<LpVertex> vertices, std::vector<LpEdge> edges,
                  int senses = 2) {
  LpGraph g;
  g.lemma = "bank";
  for (int s = 0; s < senses; ++s) g.senses.push_back("s" + std::to_string(s + 1));
  g.vertices = std::move(vertices);
  g.edges = std::move(edges);
  return g;
}

SenseInventory Inventory(int senses = 2) {
  SenseInventory inv;
  std::vector<std::string> ids;
  for (int s = 0; s < senses; ++s) ids.push_back("s" + std::to_string(s + 1));
  inv.AddLemma("bank", ids);
  return inv;
}

LpParams Tight() {
  LpParams p;
  p.tol = 1e-13;
  p.max_iter = 200000;
  return p;
}

LpGraph RandomGraph(Rng& rng, int n, int k, double density) {
  std::vector<LpVertex> vertices;
  const int seeds = 1 + static_cast<int>(rng.Below(std::max(1, n / 2)));
  for (int v = 0; v < n; ++v) {
    if (v < seeds) {
      vertices.push_back(Seed(static_cast<int>(rng.Below(k))));
    } else {
      vertices.push_back(Free(rng.Uniform() < 0.5 ? VertexKind::kUnlabeled
                                                  : VertexKind::kQuery));
    }
  }
  std::vector<LpEdge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (rng.Uniform() < density) edges.push_back({u, v, rng.Uniform()});
    }
  }
  return HandGraph(std::move(vertices), std::move(edges), k);
}

TEST(LpParamsTest, Validation) {
  auto code = [](auto mutate) {
    LpParams p;
    mutate(p);
    return CodeOf([&] { p.Validate(); });
  };
  EXPECT_EQ(code([](LpParams& p) { p.mu_seed = 0; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.mu_prior = 0; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.mu_edge = -1; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.percentile = 100; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.percentile = 0; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.tol = 0; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.max_iter = 0; }), ErrorCode::kConfig);
  EXPECT_EQ(code([](LpParams& p) { p.prior = {0.5, 0.6}; }), ErrorCode::kConfig);
  EXPECT_NO_THROW(LpParams{}.Validate());
}

TEST(NearestRankTest, Values) {
  EXPECT_EQ(NearestRankIndex(95, 3), 2u);
  EXPECT_EQ(NearestRankIndex(90, 10), 8u);
  EXPECT_EQ(NearestRankIndex(50, 4), 1u);
  EXPECT_EQ(NearestRankIndex(1, 4), 0u);
  EXPECT_EQ(NearestRankIndex(99.9, 1), 0u);
}

TEST(PropagateTest, IsolatedSeedPinsToLabel) {
  LpParams p = Tight();
  p.mu_prior = 1e-9;
  const auto g = HandGraph({Seed(0), Free()}, {});
  const auto d = Propagate(g, p);
  EXPECT_TRUE(d.converged);
  EXPECT_NEAR(d.rows[0][0], 1.0, 1e-8);
  EXPECT_NEAR(d.rows[0][1], 0.0, 1e-8);
}

TEST(PropagateTest, QueryBetweenTwoSeeds) {
  LpParams p = Tight();
  p.mu_seed = 1000;
  p.mu_edge = 1;
  p.mu_prior = 1e-6;
  const auto g = HandGraph({Seed(0), Seed(1), Free()},
                           {{0, 2, 0.8}, {1, 2, 0.2}});
  const auto d = Propagate(g, p);
  EXPECT_NEAR(d.rows[2][0], 0.8, 1e-3);
  EXPECT_NEAR(d.rows[2][1], 0.2, 1e-3);
  const auto exact = oracle::DenseLpSolve(g, p, d.prior);
  const double sum = exact[2][0] + exact[2][1];
  EXPECT_NEAR(d.rows[2][0], exact[2][0] / sum, 1e-9);

  const auto pred = ClassifyLp(d, 2, g, Inventory(), SenseFrequencies{});
  EXPECT_EQ(pred.sense_id, "s1");
  EXPECT_EQ(pred.method, Method::kLp);
  EXPECT_NEAR(pred.score, 0.8, 1e-3);
}

TEST(PropagateTest, MatchesDenseSolveOnRandomGraphs) {
  Rng rng(2026);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(19));
    const int k = 2 + static_cast<int>(rng.Below(3));
    const auto g = RandomGraph(rng, n, k, rng.Uniform(0.1, 0.9));
    LpParams p = Tight();
    p.mu_edge = rng.Uniform(0.05, 2.0);
    p.prior_kind = trial % 2 ? PriorKind::kEmpirical : PriorKind::kUniform;
    std::vector<SolverTraceRow> trace;
    const auto d = Propagate(g, p, &trace);
    ASSERT_TRUE(d.converged) << "trial " << trial;
    const auto exact = oracle::DenseLpSolve(g, p, d.prior);
    for (int v = 0; v < n; ++v) {
      const double sum = std::accumulate(exact[v].begin(), exact[v].end(), 0.0);
      double row_sum = 0;
      for (int s = 0; s < k; ++s) {
        EXPECT_NEAR(d.rows[v][s], exact[v][s] / sum, 1e-5);
        EXPECT_GE(d.rows[v][s], 0.0);
        row_sum += d.rows[v][s];
      }
      EXPECT_NEAR(row_sum, 1.0, 1e-9);
    }
    for (size_t i = 1; i < trace.size(); ++i) {
      EXPECT_LE(trace[i].objective, trace[i - 1].objective * (1 + 1e-12) + 1e-15)
          << "trial " << trial << " sweep " << i;
    }
  }
}

TEST(PropagateTest, PermutationEquivariance) {
  Rng rng(5);
  const auto g = RandomGraph(rng, 9, 3, 0.5);
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(perm);  // new id of old vertex v is perm[v]
  LpGraph h = g;
  for (int v = 0; v < 9; ++v) h.vertices[perm[v]] = g.vertices[v];
  h.edges.clear();
  for (const auto& e : g.edges) {
    const int a = perm[e.u], b = perm[e.v];
    h.edges.push_back({std::min(a, b), std::max(a, b), e.weight});
  }
  const auto p = Tight();
  const auto dg = Propagate(g, p);
  const auto dh = Propagate(h, p);
  for (int v = 0; v < 9; ++v) {
    for (int s = 0; s < 3; ++s) EXPECT_NEAR(dh.rows[perm[v]][s], dg.rows[v][s], 1e-10);
  }
}

TEST(PropagateTest, EdgeScalingCompensatedByMuEdge) {
  Rng rng(6);
  const auto g = RandomGraph(rng, 10, 2, 0.4);
  LpGraph half = g;
  for (auto& e : half.edges) e.weight *= 0.5;
  LpParams p = Tight();
  LpParams q = p;
  q.mu_edge = 2 * p.mu_edge;
  const auto a = Propagate(g, p);
  const auto b = Propagate(half, q);
  for (int v = 0; v < 10; ++v) {
    for (int s = 0; s < 2; ++s) EXPECT_NEAR(a.rows[v][s], b.rows[v][s], 1e-10);
  }
}

TEST(PropagateTest, NoEdgeTermGivesClosedForm) {
  Rng rng(7);
  const auto g = RandomGraph(rng, 8, 3, 0.6);
  LpParams p = Tight();
  p.mu_edge = 0;
  p.prior = {0.5, 0.3, 0.2};
  const auto d = Propagate(g, p);
  for (size_t v = 0; v < g.vertices.size(); ++v) {
    const auto& vert = g.vertices[v];
    for (int s = 0; s < 3; ++s) {
      double want = p.prior[s];
      if (vert.kind == VertexKind::kSeed) {
        want = (p.mu_seed * (vert.seed_sense == s ? 1.0 : 0.0) +
                p.mu_prior * p.prior[s]) /
               (p.mu_seed + p.mu_prior);
      }
      EXPECT_NEAR(d.rows[v][s], want, 1e-12);
    }
  }
}

TEST(PropagateTest, NonConvergenceIsFlagged) {
  Rng rng(8);
  const auto g = RandomGraph(rng, 10, 2, 0.8);
  LpParams p;
  p.max_iter = 1;
  p.tol = 1e-12;
  const auto d = Propagate(g, p);
  EXPECT_FALSE(d.converged);
  EXPECT_EQ(d.iterations, 1);
}

TEST(PropagateTest, PriorSizeMismatch) {
  const auto g = HandGraph({Seed(0), Free()}, {{0, 1, 1}});
  LpParams p;
  p.prior = {0.2, 0.3, 0.5};
  EXPECT_EQ(CodeOf([&] { Propagate(g, p); }), ErrorCode::kDimensionMismatch);
}

TEST(PropagateTest, EmpiricalPriorFromSeeds) {
  const auto g = HandGraph({Seed(0), Seed(0), Seed(0), Seed(1), Free()}, {});
  LpParams p;
  p.prior_kind = PriorKind::kEmpirical;
  EXPECT_EQ(ResolvePrior(g, p), (std::vector<double>{0.75, 0.25}));
  p.prior_kind = PriorKind::kUniform;
  EXPECT_EQ(ResolvePrior(g, p), (std::vector<double>{0.5, 0.5}));
}

TEST(PropagateTest, Deterministic) {
  Rng rng(9);
  const auto g = RandomGraph(rng, 15, 4, 0.3);
  const auto a = Propagate(g, LpParams{});
  const auto b = Propagate(g, LpParams{});
  EXPECT_EQ(a.rows, b.rows);
}

TEST(ClassifyLpTest, ArgmaxAndFallback) {
  const auto g = HandGraph({Seed(0), Free()}, {});
  LabelDistribution d;
  d.prior = {0.5, 0.5};
  d.rows = {{0.7, 0.3}, {0.5, 0.5}};
  const auto p = ClassifyLp(d, 0, g, Inventory(), SenseFrequencies{});
  EXPECT_EQ(p.sense_id, "s1");
  EXPECT_DOUBLE_EQ(p.score, 0.7);
  EXPECT_EQ(p.method, Method::kLp);

  SenseFrequencies freq;
  freq.Set("bank", {1, 6});
  const auto fb = ClassifyLp(d, 1, g, Inventory(), freq);
  EXPECT_EQ(fb.sense_id, "s2");
  EXPECT_EQ(fb.method, Method::kMfs);
  EXPECT_EQ(ClassifyLp(d, 1, g, Inventory(), SenseFrequencies{}).sense_id, "s1");

  d.rows[0] = {0.2, 0.8};
  d.rows[1] = {0.4, 0.6};
  EXPECT_EQ(ClassifyLp(d, 0, g, Inventory(), SenseFrequencies{}).sense_id, "s2");
  EXPECT_EQ(CodeOf([&] { ClassifyLp(d, 2, g, Inventory(), SenseFrequencies{}); }),
            ErrorCode::kInvalidArgument);
}

TEST(ClassifyLpTest, TieGoesToInventoryOrder) {
  const auto g = HandGraph({Seed(0), Free()}, {}, 3);
  LabelDistribution d;
  d.prior = {0.2, 0.3, 0.5};
  d.rows = {{0.1, 0.45, 0.45}, {0.2, 0.3, 0.5}};
  EXPECT_EQ(ClassifyLp(d, 0, g, Inventory(3), SenseFrequencies{}).sense_id, "s2");
}

TEST(BuildGraphTest, ThreeVerticesFullyConnected) {
  std::vector<LpVertex> v = {Seed(0, {1, 0}), Free(VertexKind::kUnlabeled, {1, 1}),
                             Free(VertexKind::kQuery, {0, 1})};
  const auto g = BuildGraphFromVertices("bank", {"s1", "s2"}, v, LpParams{});
  ASSERT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.edges[0], (LpEdge{0, 1, Cosine(v[0].context, v[1].context)}));
  EXPECT_EQ(g.edges[1], (LpEdge{0, 2, kMinDegreeEdgeWeight}));
  for (int d : g.Degrees()) EXPECT_EQ(d, 2);
}

TEST(BuildGraphTest, PercentileThresholdKeepsTopPair) {
  std::vector<LpVertex> v = {Seed(0, {1, 0}), Free(VertexKind::kUnlabeled, {1, 0.1}),
                             Free(VertexKind::kQuery, {0, 1})};
  LpParams p;
  p.min_degree = 0;
  const auto g = BuildGraphFromVertices("bank", {"s1", "s2"}, v, p);
  ASSERT_EQ(g.edges.size(), 1u);
  EXPECT_EQ(g.edges[0].u, 0);
  EXPECT_EQ(g.edges[0].v, 1);
}

TEST(BuildGraphTest, NegativeSimilaritiesUseFloorWeight) {
  std::vector<LpVertex> v = {Seed(0, {1, 0}), Free(VertexKind::kQuery, {-1, 0.1}),
                             Free(VertexKind::kQuery, {-1, -0.1})};
  LpParams p;
  p.min_degree = 1;
  // Pair (1,2) is positive and the top pair; vertex 0 is connected only by a
  // floor-weight edge.
  const auto g = BuildGraphFromVertices("bank", {"s1", "s2"}, v, p);
  ASSERT_EQ(g.edges.size(), 2u);
  EXPECT_EQ(g.edges[0].u, 0);
  EXPECT_EQ(g.edges[0].weight, kMinDegreeEdgeWeight);

  std::vector<LpVertex> opposite = {Seed(0, {1}), Free(VertexKind::kQuery, {-1})};
  const auto h = BuildGraphFromVertices("bank", {"s1", "s2"}, opposite, LpParams{});
  ASSERT_EQ(h.edges.size(), 1u);
  EXPECT_EQ(h.edges[0].weight, kMinDegreeEdgeWeight);
}

TEST(BuildGraphTest, MatchesBruteForce) {
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<double>> vectors(50, std::vector<double>(5));
    std::vector<LpVertex> vertices;
    for (int i = 0; i < 50; ++i) {
      for (auto& x : vectors[i]) x = rng.Gaussian();
      vertices.push_back(i == 0 ? Seed(0, vectors[i])
                                : Free(VertexKind::kUnlabeled, vectors[i]));
    }
    LpParams p;
    p.percentile = 90;
    p.min_degree = 1 + static_cast<int>(rng.Below(12));
    const auto g = BuildGraphFromVertices("bank", {"s1", "s2"}, vertices, p);
    const auto want = oracle::BruteForceEdges(vectors, 90, p.min_degree);
    ASSERT_EQ(g.edges.size(), want.size());
    for (size_t e = 0; e < want.size(); ++e) {
      EXPECT_EQ(g.edges[e].u, std::get<0>(want[e]));
      EXPECT_EQ(g.edges[e].v, std::get<1>(want[e]));
      EXPECT_EQ(g.edges[e].weight, std::get<2>(want[e]));
    }
  }
}

TEST(BuildGraphTest, StructuralInvariants) {
  Rng rng(51);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(rng.Below(30));
    std::vector<LpVertex> vertices;
    for (int i = 0; i < n; ++i) {
      std::vector<double> c(3);
      for (auto& x : c) x = rng.Gaussian();
      vertices.push_back(i == 0 ? Seed(1, c) : Free(VertexKind::kQuery, c));
    }
    LpParams p;
    p.percentile = rng.Uniform(1, 99);
    p.min_degree = static_cast<int>(rng.Below(15));
    const auto g = BuildGraphFromVertices("bank", {"s1", "s2"}, vertices, p);
    for (size_t e = 0; e < g.edges.size(); ++e) {
      EXPECT_LT(g.edges[e].u, g.edges[e].v);
      EXPECT_GE(g.edges[e].weight, 0.0);
      EXPECT_LE(g.edges[e].weight, 1.0);
      if (e > 0) {
        EXPECT_LT(std::make_pair(g.edges[e - 1].u, g.edges[e - 1].v),
                  std::make_pair(g.edges[e].u, g.edges[e].v));
      }
    }
    for (int d : g.Degrees()) EXPECT_GE(d, std::min(p.min_degree, n - 1));
    const auto adj = g.Adjacency();
    for (int v = 0; v < n; ++v) {
      for (const auto& [u, w] : adj[v]) {
        EXPECT_TRUE(std::any_of(adj[u].begin(), adj[u].end(),
                                [&](const auto& x) { return x.first == v && x.second == w; }));
      }
    }
  }
}

TEST(BuildGraphTest, Errors) {
  EXPECT_EQ(CodeOf([] {
              BuildGraphFromVertices("bank", {"s1"}, {Free(), Free()}, LpParams{});
            }),
            ErrorCode::kNoSeeds);
  EXPECT_EQ(CodeOf([] {
              BuildGraphFromVertices("bank", {"s1"}, {Seed(0)}, LpParams{});
            }),
            ErrorCode::kTooFewVertices);
  EXPECT_EQ(CodeOf([] {
              BuildGraphFromVertices("bank", {"s1"}, {Seed(3), Free()}, LpParams{});
            }),
            ErrorCode::kUnknownSense);
}

TEST(BuildGraphTest, FromSentencesOrdersVerticesAndSkipsEmptyContexts) {
  WordVectorTable table(2);
  table.Add("a", {1, 0});
  table.Add("b", {0, 1});
  table.Add("c", {1, 1});
  ContextEmbedder embedder(std::make_shared<BowBackend>(
      std::make_shared<const WordVectorTable>(std::move(table))));
  const std::vector<LabeledExample> seeds = {
      {Sentence{{"a", "bank"}, 1}, "bank", "s2"}};
  const std::vector<Sentence> unlabeled = {Sentence{{"b", "bank"}, 1}};
  const std::vector<Sentence> queries = {Sentence{{"bank"}, 0},
                                         Sentence{{"bank", "c"}, 0}};
  const auto g = BuildGraph("bank", seeds, unlabeled, queries, embedder,
                            Inventory(), LpParams{});
  ASSERT_EQ(g.vertices.size(), 3u);
  EXPECT_EQ(g.vertices[0].kind, VertexKind::kSeed);
  EXPECT_EQ(g.vertices[0].seed_sense, 1);
  EXPECT_EQ(g.vertices[1].kind, VertexKind::kUnlabeled);
  EXPECT_EQ(g.vertices[2].kind, VertexKind::kQuery);
  EXPECT_EQ(g.query_vertex, (std::vector<int>{-1, 2}));
}

TEST(DumpTest, GraphAndTrace) {
  TempDir dir;
  const auto g = HandGraph({Seed(1), Free()}, {{0, 1, 0.25}});
  WriteGraphDump(dir / "g.jsonl", g);
  const std::string text = ReadFile(dir / "g.jsonl");
  EXPECT_NE(text.find("\"kind\":\"seed\""), std::string::npos);
  EXPECT_NE(text.find("\"sense\":\"s2\""), std::string::npos);
  EXPECT_NE(text.find("\"weight\":0.25"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);

  std::vector<SolverTraceRow> trace;
  Propagate(g, LpParams{}, &trace);
  WriteSolverTrace(dir / "t.csv", trace);
  const std::string csv = ReadFile(dir / "t.csv");
  EXPECT_EQ(csv.rfind("iteration,objective,max_delta\n0,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'),
            static_cast<long>(trace.size()) + 1);
}

}  // namespace
}  // namespace wsd
