// Copyright 2026 The kgdelta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgdelta/question.hpp"
#include "kgdelta/templates.hpp"
#include "kgdelta/triple_store.hpp"

namespace kgdelta {

/// Rendered text, or the reason the instance cannot be rendered.
struct RenderResult {
  std::optional<std::string> text;
  std::optional<std::string> reject_reason;
  /// Entity whose label was missing, when that is the reason.
  std::optional<EntityId> missing;
};

/// Renders one instance with labels from `g1`. Missing labels yield a
/// rejection; a missing template throws ConfigError.
RenderResult render_question(const QuestionInstance& inst, const TemplateSet& templates,
                             const TripleStore& g1);

struct RenderReport {
  std::size_t input_count = 0;
  std::size_t rendered_count = 0;
  std::map<std::string, std::size_t> rejected;
  nlohmann::ordered_json to_json() const;
};

struct RenderOutput {
  std::vector<QuestionInstance> instances;
  RenderReport report;
};

/// Renders every instance, keeping input order; instances whose gold answer
/// lacks a label are rejected too.
RenderOutput render_all(const std::vector<QuestionInstance>& instances,
                        const TemplateSet& templates, const TripleStore& g1);

}  // namespace kgdelta
