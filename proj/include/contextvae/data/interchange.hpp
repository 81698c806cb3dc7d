// Copyright 2026 The ContextVAE Authors.
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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "contextvae/data/synthetic.hpp"

// Scene interchange: newline-delimited JSON, one scene per line.

namespace contextvae::data {

nlohmann::json scene_to_json(const LabeledScene& scene);
// `line` is only used in error messages.
LabeledScene scene_from_json(const nlohmann::json& j, std::size_t line = 0);

void write_scenes(std::ostream& out, const std::vector<LabeledScene>& scenes);
void write_scenes(const std::string& path, const std::vector<LabeledScene>& scenes);
std::vector<LabeledScene> read_scenes(std::istream& in);
std::vector<LabeledScene> read_scenes(const std::string& path);

// Adapter seam for external exports; only "ndjson" is built in.
std::vector<SceneRecord> ingest_external(const std::string& path, const std::string& format_tag);

}  // namespace contextvae::data
