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

#ifndef WSD_CONTEXT_VECTOR_H_
#define WSD_CONTEXT_VECTOR_H_

#include <string>
#include <vector>

namespace wsd {

// Dense representation of one sentence context around its focus word. The
// tag names the backend that produced it; vectors from different backends
// are never compared.
struct ContextVector {
  std::vector<double> values;
  std::string backend_tag;

  int dim() const { return static_cast<int>(values.size()); }

  bool operator==(const ContextVector&) const = default;
};

}  // namespace wsd

#endif  // WSD_CONTEXT_VECTOR_H_
