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

#include <string>
#include <vector>

#include "kgdelta/eval_harness.hpp"
#include "kgdelta/question.hpp"

namespace kgdelta::testing {

// Twenty questions with hand-placed correct samples.
//
// No-search: the first correct sample sits at position 0 for q00-q04, 1 for
// q05-q07, 2 for q08-q09 and 3 for q10; q11-q19 never answer correctly.
// Search: q00-q02 and q11-q16 are correct.
//
//   pass@1 = 5/20, pass@2 = 8/20, pass@3 = 10/20, pass@4 = 11/20
//   search pass@1 = 9/20
//   delta: k=1 -1/5, k=2 -1/20, k=3 1/20, k=4 1/10
struct PassAtKFixture {
  std::vector<QuestionInstance> benchmark;
  std::vector<eval::PredictionRecord> no_search;
  std::vector<eval::PredictionRecord> search;
};

inline PassAtKFixture pass_at_k_fixture() {
  PassAtKFixture f;
  const int first_hit[20] = {0, 0, 0, 0, 0, 1, 1, 1, 2, 2, 3, -1, -1, -1, -1, -1, -1, -1, -1, -1};
  const bool search_hit[20] = {true, true, true, false, false, false, false, false, false, false,
                               false, true, true, true, true, true, true, false, false, false};
  for (int i = 0; i < 20; ++i) {
    const std::string id = (i < 10 ? "q0" : "q") + std::to_string(i);
    const std::string gold = "Answer " + std::to_string(i);
    QuestionInstance inst;
    inst.id = id;
    inst.level = static_cast<Level>(1 + i % 3);
    inst.gold_label = gold;
    inst.gold_aliases = {"alias " + std::to_string(i)};
    f.benchmark.push_back(inst);

    eval::PredictionRecord ns{id, eval::Mode::kNoSearch, {"wrong", "wrong", "wrong", "wrong"}};
    if (first_hit[i] >= 0) ns.samples[first_hit[i]] = "the answer " + std::to_string(i) + ".";
    if (first_hit[i] >= 0 && first_hit[i] < 3) ns.samples[3] = gold;  // later hits do not matter
    f.no_search.push_back(ns);
    f.search.push_back({id, eval::Mode::kSearch, {search_hit[i] ? gold : "nope"}});
  }
  return f;
}

}  // namespace kgdelta::testing
