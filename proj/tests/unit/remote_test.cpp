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


#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>

#include "fixtures.hpp"
#include "kgdelta/evaluator.hpp"
#include "kgdelta/remote.hpp"
#include "random_graph.hpp"
#include "stub_endpoint.hpp"

namespace kgdelta {
namespace {

using testing::P;
using testing::Q;
using testing::StubEndpoint;

RemoteConfig config_for(const StubEndpoint& stub) {
  RemoteConfig c;
  c.endpoint = stub.url();
  c.retry.timeout = std::chrono::milliseconds(5000);
  return c;
}

TEST(RemoteTest, ResultsDocumentRoundTrip) {
  const std::vector<ObjectValue> values{Q(155), Q(8682), Literal{"Brazil", LiteralType::kString},
                                        Literal{"+42", LiteralType::kQuantity}};
  EXPECT_EQ(parse_sparql_results(format_sparql_results(values, "x"), "x"), values);
  EXPECT_THROW(parse_sparql_results("{}", "x"), FormatError);
  EXPECT_THROW(parse_sparql_results("not json", "x"), FormatError);
  EXPECT_TRUE(parse_sparql_results(R"({"results":{"bindings":[{"y":{"type":"uri","value":"x"}}]}})", "x")
                  .empty());
}

TEST(RemoteTest, BackoffIsExponentialAndCapped) {
  RetryPolicy p;
  EXPECT_EQ(p.backoff_before(1).count(), 0);
  EXPECT_EQ(p.backoff_before(2).count(), 500);
  EXPECT_EQ(p.backoff_before(3).count(), 1000);
  EXPECT_EQ(p.backoff_before(4).count(), 2000);
  EXPECT_EQ(p.backoff_before(10).count(), 8000);
}

TEST(RemoteTest, RetriesTransientFailuresThenSucceeds) {
  const auto store = testing::football::store(1);
  StubEndpoint stub(&store);
  stub.script({500, 503});
  RemoteClient client(config_for(stub));
  std::vector<long> sleeps;
  client.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d.count()); });
  const auto r = client.select("SELECT ?x WHERE { wd:Q125000000 wdt:P17 ?x . }", "x");
  EXPECT_EQ(r.attempts, 3);
  EXPECT_EQ(r.bindings, std::vector<ObjectValue>{testing::football::kBrazil});
  EXPECT_EQ(sleeps, (std::vector<long>{500, 1000}));
  EXPECT_EQ(stub.requests(), 3);
}

TEST(RemoteTest, GivesUpAfterMaxAttempts) {
  const auto store = testing::football::store(1);
  StubEndpoint stub(&store);
  stub.script({429, 429, 429, 429, 429});
  auto c = config_for(stub);
  c.retry.max_attempts = 3;
  RemoteClient client(c);
  client.set_sleeper([](std::chrono::milliseconds) {});
  try {
    client.select("SELECT ?x WHERE { ?x wdt:P17 wd:Q155 . }", "x");
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_TRUE(e.transient());
    EXPECT_EQ(e.status(), 429);
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(stub.requests(), 3);
}

TEST(RemoteTest, ClientErrorsAreNotRetried) {
  const auto store = testing::football::store(1);
  StubEndpoint stub(&store);
  RemoteClient client(config_for(stub));
  client.set_sleeper([](std::chrono::milliseconds) {});
  try {
    client.select("SELECT ?x WHERE { ?x wdt:P17 }", "x");
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_FALSE(e.transient());
    EXPECT_EQ(e.status(), 400);
    EXPECT_EQ(e.attempts(), 1);
  }
}

TEST(RemoteTest, UnreachableEndpointIsTransient) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteConfig c;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/sparql";
  c.retry.max_attempts = 2;
  c.retry.timeout = std::chrono::milliseconds(1000);
  RemoteClient client(c);
  client.set_sleeper([](std::chrono::milliseconds) {});
  try {
    client.select("SELECT ?x WHERE { ?x wdt:P17 wd:Q155 . }", "x");
    FAIL() << "expected RemoteError";
  } catch (const RemoteError& e) {
    EXPECT_TRUE(e.transient());
    EXPECT_EQ(e.status(), 0);
    EXPECT_EQ(e.attempts(), 2);
  }
}

TEST(RemoteTest, LongQueriesArePosted) {
  const auto store = testing::football::store(1);
  StubEndpoint stub(&store);
  auto c = config_for(stub);
  c.post_threshold = 10;
  RemoteClient client(c);
  EXPECT_EQ(client.select("SELECT ?x WHERE { wd:Q125000000 wdt:P17 ?x . }", "x").bindings.size(), 1u);
  EXPECT_EQ(stub.posts(), 1);
}

TEST(RemoteTest, AgreesWithLocalEvaluatorOnRandomQueries) {
  testing::Rng rng(404);
  testing::GraphShape shape;
  shape.entities = 80;
  shape.triples = 300;
  const auto triples = testing::random_graph(rng, shape);
  const auto store = testing::build_store(triples);
  StubEndpoint stub(&store);
  RemoteClient client(config_for(stub));
  int compared = 0;
  while (compared < 50) {
    auto spec = testing::random_spec(rng, triples);
    spec.limit.reset();
    std::size_t local = 0;
    try {
      local = count_answers(spec, store);
    } catch (const EvaluationError&) {
      continue;
    }
    EXPECT_EQ(client.count(spec), local) << sparql::build_sparql(spec);
    ++compared;
  }
}

TEST(RemoteTest, EnvironmentOverrides) {
  ::setenv("KGB_SPARQL_ENDPOINT", "http://localhost:9/q", 1);
  ::setenv("KGB_SPARQL_TIMEOUT_MS", "1234", 1);
  ::setenv("KGB_SPARQL_MAX_ATTEMPTS", "7", 1);
  const auto c = RemoteConfig{}.with_env_overrides();
  EXPECT_EQ(c.endpoint, "http://localhost:9/q");
  EXPECT_EQ(c.retry.timeout.count(), 1234);
  EXPECT_EQ(c.retry.max_attempts, 7);
  ::setenv("KGB_SPARQL_MAX_ATTEMPTS", "lots", 1);
  EXPECT_THROW(RemoteConfig{}.with_env_overrides(), ConfigError);
  ::unsetenv("KGB_SPARQL_ENDPOINT");
  ::unsetenv("KGB_SPARQL_TIMEOUT_MS");
  ::unsetenv("KGB_SPARQL_MAX_ATTEMPTS");
  EXPECT_EQ(RemoteConfig{}.with_env_overrides().endpoint, kDefaultSparqlEndpoint);
}

TEST(RemoteTest, RejectsNonHttpEndpoints) {
  RemoteConfig c;
  c.endpoint = "ftp://example.org/sparql";
  EXPECT_THROW(RemoteClient{c}, ConfigError);
  c.endpoint = "http://example.org/sparql";
  c.retry.max_attempts = 0;
  EXPECT_THROW(RemoteClient{c}, ConfigError);
}

}  // namespace
}  // namespace kgdelta
