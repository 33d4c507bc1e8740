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

// Run configuration shared by the command-line tools.
//
//   {
//     "paths": {"inventory": ..., "labeled": ..., "unlabeled": ..., "eval": ...,
//               "lm_text": ..., "word_vectors": ..., "model": ...,
//               "senses": ..., "output_dir": ...},
//     "backend": "lm" | "bow",
//     "method": "nn" | "lp" | "mfs",
//     "seed": 1,
//     "lm": {LmConfig fields},
//     "lp": {"mu_seed", "mu_edge", "mu_prior", "prior": "uniform" |
//            "empirical" | [p, ...], "tol", "max_iter", "percentile",
//            "min_degree"},
//     "eval": {"polysemous_only", "normalize_sense_vectors", "unlabeled_cap",
//              "bow_window", "threads"}
//   }
//
// Relative paths are resolved against the directory holding the file.

#ifndef WSD_CONFIG_H_
#define WSD_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "wsd/corpus.h"
#include "wsd/lm.h"
#include "wsd/propagate.h"

namespace wsd {

struct RunPaths {
  std::filesystem::path inventory;
  std::filesystem::path labeled;
  std::filesystem::path unlabeled;
  std::filesystem::path eval;
  std::filesystem::path lm_text;
  std::filesystem::path word_vectors;
  std::filesystem::path model;   // prefix
  std::filesystem::path senses;  // prefix
  std::filesystem::path output_dir;
};

struct RunConfig {
  RunPaths paths;
  std::string backend = "lm";
  std::string method = "nn";
  uint64_t seed = 1;
  LmConfig lm;
  LpParams lp;
  bool polysemous_only = false;
  bool normalize_sense_vectors = true;
  size_t unlabeled_cap = kDefaultUnlabeledCap;
  int bow_window = 0;
  int threads = 1;

  // Checks enumerations and numeric ranges. Throws kConfig.
  void Validate() const;
};

// Throws kConfig for malformed JSON or unknown values. When the "lm" block
// has no seed, the top-level seed is used.
RunConfig ParseRunConfig(std::string_view json_text,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Canonical JSON (sorted keys) of every knob. The output directory is left
// out so that identical runs into different directories agree.
std::string CanonicalConfigJson(const RunConfig& config);
// Hex FNV-1a of the canonical JSON.
std::string Fingerprint(const RunConfig& config);

// Throws kConfig naming `what` when the path is empty or does not exist.
void RequireFile(const std::filesystem::path& path, std::string_view what);

}  // namespace wsd

#endif  // WSD_CONFIG_H_
