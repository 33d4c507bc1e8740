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

#include "wsd/config.h"

#include "jsonl.h"
#include "lm_json.h"
#include "wsd/embed.h"
#include "wsd/error.h"
#include "wsd/util.h"

namespace wsd {

using internal::Json;

void RunConfig::Validate() const {
  if (backend != kBowBackendTag && backend != kLmBackendTag) {
    throw Error(ErrorCode::kConfig, "backend must be \"bow\" or \"lm\", got \"" +
                                        backend + "\"");
  }
  ParseMethod(method);
  lm.Validate();
  lp.Validate();
  if (bow_window < 0) throw Error(ErrorCode::kConfig, "bow_window must be >= 0");
  if (threads < 1) throw Error(ErrorCode::kConfig, "threads must be >= 1");
}

namespace {

std::filesystem::path ResolvePath(const Json& paths, const char* key,
                                  const std::filesystem::path& base_dir) {
  auto it = paths.find(key);
  if (it == paths.end() || it->is_null()) return {};
  std::filesystem::path p(it->get<std::string>());
  if (p.empty() || p.is_absolute()) return p;
  return (base_dir / p).lexically_normal();
}

Json LpToJson(const LpParams& lp) {
  Json prior;
  if (!lp.prior.empty()) {
    prior = lp.prior;
  } else {
    prior = lp.prior_kind == PriorKind::kEmpirical ? "empirical" : "uniform";
  }
  return Json{{"mu_seed", lp.mu_seed},       {"mu_edge", lp.mu_edge},
              {"mu_prior", lp.mu_prior},     {"prior", prior},
              {"tol", lp.tol},               {"max_iter", lp.max_iter},
              {"percentile", lp.percentile}, {"min_degree", lp.min_degree}};
}

LpParams LpFromJson(const Json& j) {
  LpParams lp;
  lp.mu_seed = j.value("mu_seed", lp.mu_seed);
  lp.mu_edge = j.value("mu_edge", lp.mu_edge);
  lp.mu_prior = j.value("mu_prior", lp.mu_prior);
  lp.tol = j.value("tol", lp.tol);
  lp.max_iter = j.value("max_iter", lp.max_iter);
  lp.percentile = j.value("percentile", lp.percentile);
  lp.min_degree = j.value("min_degree", lp.min_degree);
  if (auto it = j.find("prior"); it != j.end()) {
    if (it->is_array()) {
      lp.prior = it->get<std::vector<double>>();
    } else if (*it == "empirical") {
      lp.prior_kind = PriorKind::kEmpirical;
    } else if (*it != "uniform") {
      throw Error(ErrorCode::kConfig, "lp.prior must be \"uniform\", "
                                      "\"empirical\" or a list");
    }
  }
  return lp;
}

}  // namespace

RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir) {
  RunConfig config;
  try {
    const Json j = Json::parse(json_text);
    if (!j.is_object()) throw Error(ErrorCode::kConfig, "config is not an object");
    const Json paths = j.value("paths", Json::object());
    config.paths.inventory = ResolvePath(paths, "inventory", base_dir);
    config.paths.labeled = ResolvePath(paths, "labeled", base_dir);
    config.paths.unlabeled = ResolvePath(paths, "unlabeled", base_dir);
    config.paths.eval = ResolvePath(paths, "eval", base_dir);
    config.paths.lm_text = ResolvePath(paths, "lm_text", base_dir);
    config.paths.word_vectors = ResolvePath(paths, "word_vectors", base_dir);
    config.paths.model = ResolvePath(paths, "model", base_dir);
    config.paths.senses = ResolvePath(paths, "senses", base_dir);
    config.paths.output_dir = ResolvePath(paths, "output_dir", base_dir);

    config.backend = j.value("backend", config.backend);
    config.method = j.value("method", config.method);
    config.seed = j.value("seed", config.seed);

    const Json lm = j.value("lm", Json::object());
    config.lm = internal::LmConfigFromJson(lm);
    if (!lm.contains("seed")) config.lm.seed = config.seed;
    config.lp = LpFromJson(j.value("lp", Json::object()));

    const Json eval = j.value("eval", Json::object());
    config.polysemous_only = eval.value("polysemous_only", config.polysemous_only);
    config.normalize_sense_vectors =
        eval.value("normalize_sense_vectors", config.normalize_sense_vectors);
    config.unlabeled_cap = eval.value("unlabeled_cap", config.unlabeled_cap);
    config.bow_window = eval.value("bow_window", config.bow_window);
    config.threads = eval.value("threads", config.threads);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad config: ") + e.what());
  }
  config.Validate();
  return config;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string text;
  try {
    text = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return ParseRunConfig(text, path.parent_path());
}

std::string CanonicalConfigJson(const RunConfig& c) {
  const Json j{
      {"paths",
       {{"inventory", c.paths.inventory.string()},
        {"labeled", c.paths.labeled.string()},
        {"unlabeled", c.paths.unlabeled.string()},
        {"eval", c.paths.eval.string()},
        {"lm_text", c.paths.lm_text.string()},
        {"word_vectors", c.paths.word_vectors.string()},
        {"model", c.paths.model.string()},
        {"senses", c.paths.senses.string()}}},
      {"backend", c.backend},
      {"method", c.method},
      {"seed", c.seed},
      {"lm", internal::ToJson(c.lm)},
      {"lp", LpToJson(c.lp)},
      {"eval",
       {{"polysemous_only", c.polysemous_only},
        {"normalize_sense_vectors", c.normalize_sense_vectors},
        {"unlabeled_cap", c.unlabeled_cap},
        {"bow_window", c.bow_window}}},
  };
  return j.dump();
}

std::string Fingerprint(const RunConfig& config) {
  return HexDigest(Fnv1a64(CanonicalConfigJson(config)));
}

void RequireFile(const std::filesystem::path& path, std::string_view what) {
  if (path.empty()) {
    throw Error(ErrorCode::kConfig, "no path configured for " + std::string(what));
  }
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, std::string(what) + " not found: " +
                                        path.string());
  }
}

}  // namespace wsd
