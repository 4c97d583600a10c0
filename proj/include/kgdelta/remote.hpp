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

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "kgdelta/entity.hpp"
#include "kgdelta/errors.hpp"
#include "kgdelta/sparql.hpp"

namespace kgdelta {

inline constexpr const char* kDefaultSparqlEndpoint = "https://query.wikidata.org/sparql";

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};
  /// Per-request connect and read timeout.
  std::chrono::milliseconds timeout{30000};

  /// Delay before attempt `attempt` (2-based; attempt 1 has no delay).
  std::chrono::milliseconds backoff_before(int attempt) const;
};

struct RemoteConfig {
  std::string endpoint = kDefaultSparqlEndpoint;
  RetryPolicy retry;
  /// Upper bound on concurrent requests from one client.
  std::size_t max_in_flight = 2;
  std::string user_agent = "kgdelta/0.1 (benchmark construction)";
  /// Queries longer than this are sent as POST bodies.
  std::size_t post_threshold = 1500;

  /// Applies KGB_SPARQL_ENDPOINT, KGB_SPARQL_TIMEOUT_MS and
  /// KGB_SPARQL_MAX_ATTEMPTS when set. Throws ConfigError on bad values.
  RemoteConfig with_env_overrides() const;
};

class RemoteError : public Error {
 public:
  RemoteError(const std::string& message, bool transient, int status, int attempts)
      : Error(message), transient_(transient), status_(status), attempts_(attempts) {}
  /// Network failures, timeouts, 5xx and 429 are transient; everything else
  /// is permanent.
  bool transient() const { return transient_; }
  /// HTTP status, or 0 when no response arrived.
  int status() const { return status_; }
  int attempts() const { return attempts_; }

 private:
  bool transient_;
  int status_;
  int attempts_;
};

struct RemoteResult {
  std::vector<ObjectValue> bindings;
  int attempts = 0;
};

/// Parses a SPARQL JSON results document, returning the values bound to
/// `var` in document order. Throws FormatError.
std::vector<ObjectValue> parse_sparql_results(const std::string& body, const std::string& var);

/// Formats values as a SPARQL JSON results document for `var`.
std::string format_sparql_results(const std::vector<ObjectValue>& values, const std::string& var);

/// Blocking SPARQL-over-HTTP client with retries. Thread-safe.
class RemoteClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteClient(RemoteConfig config);

  /// Replaces the sleep used between attempts (tests).
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

  const RemoteConfig& config() const { return config_; }

  /// Runs a SELECT and returns the values bound to `var`. Throws
  /// RemoteError once the retry budget is spent or on a permanent failure.
  RemoteResult select(const std::string& query, const std::string& var);

  /// Answer count as seen by the endpoint, saturated at 2 like
  /// count_answers.
  std::size_t count(const sparql::QuerySpec& spec);

 private:
  RemoteResult attempt_once(const std::string& query, const std::string& var, int attempt);

  RemoteConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  Sleeper sleeper_;
  std::mutex mutex_;
  std::condition_variable slot_free_;
  std::size_t in_flight_ = 0;
};

}  // namespace kgdelta
