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

// Internal JSONL helpers shared by the loaders and writers.

#ifndef WSD_SRC_JSONL_H_
#define WSD_SRC_JSONL_H_

#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"
#include "wsd/error.h"

namespace wsd::internal {

using Json = nlohmann::json;

// Calls fn(record, line_number) for every nonblank line. Parse failures are
// reported with the 1-based line number.
template <typename Fn>
void ForEachJsonLine(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kParse, path.string() + ":" +
                                         std::to_string(line_number) + ": " +
                                         e.what());
    }
    if (!record.is_object()) {
      throw Error(ErrorCode::kParse, path.string() + ":" +
                                         std::to_string(line_number) +
                                         ": record is not an object");
    }
    fn(record, line_number);
  }
}

inline std::string Where(const std::filesystem::path& path, size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Fetches a required field, mapping absence and type errors to kMissingField
// and kParse.
template <typename T>
T Field(const Json& record, const char* key, const std::string& where) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw Error(ErrorCode::kMissingField,
                where + ": missing field \"" + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse,
                where + ": bad field \"" + key + "\": " + e.what());
  }
}

// Compact dump with a trailing newline, as one JSONL record.
inline std::string Line(const Json& record) { return record.dump() + "\n"; }

}  // namespace wsd::internal

#endif  // WSD_SRC_JSONL_H_
