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

#ifndef WSD_SRC_LM_JSON_H_
#define WSD_SRC_LM_JSON_H_

#include "json.hpp"
#include "wsd/lm.h"

namespace wsd::internal {

inline nlohmann::json ToJson(const LmConfig& c) {
  return nlohmann::json{
      {"vocab_size", c.vocab_size},
      {"embed_dim", c.embed_dim},
      {"hidden_dim", c.hidden_dim},
      {"context_dim", c.context_dim},
      {"learning_rate", c.learning_rate},
      {"downsample", c.downsample},
      {"downsample_threshold", c.downsample_threshold},
      {"max_epochs", c.max_epochs},
      {"max_len", c.max_len},
      {"seed", c.seed},
  };
}

// Missing keys keep their defaults (or the values already in `base`).
inline LmConfig LmConfigFromJson(const nlohmann::json& j, LmConfig base = {}) {
  base.vocab_size = j.value("vocab_size", base.vocab_size);
  base.embed_dim = j.value("embed_dim", base.embed_dim);
  base.hidden_dim = j.value("hidden_dim", base.hidden_dim);
  base.context_dim = j.value("context_dim", base.context_dim);
  base.learning_rate = j.value("learning_rate", base.learning_rate);
  base.downsample = j.value("downsample", base.downsample);
  base.downsample_threshold =
      j.value("downsample_threshold", base.downsample_threshold);
  base.max_epochs = j.value("max_epochs", base.max_epochs);
  base.max_len = j.value("max_len", base.max_len);
  base.seed = j.value("seed", base.seed);
  return base;
}

}  // namespace wsd::internal

#endif  // WSD_SRC_LM_JSON_H_
