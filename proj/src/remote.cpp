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

#include "kgdelta/remote.hpp"

#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "kgdelta/canonical_io.hpp"

namespace kgdelta {
namespace {

constexpr std::string_view kEntityIri = "http://www.wikidata.org/entity/";

struct DatatypeIri {
  LiteralType type;
  std::string_view iri;
};

constexpr DatatypeIri kDatatypes[] = {
    {LiteralType::kQuantity, "http://www.w3.org/2001/XMLSchema#decimal"},
    {LiteralType::kTime, "http://www.w3.org/2001/XMLSchema#dateTime"},
    {LiteralType::kCoordinate, "http://www.opengis.net/ont/geosparql#wktLiteral"},
    {LiteralType::kMonolingual, "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"},
    {LiteralType::kOpaque, "http://www.w3.org/1999/02/22-rdf-syntax-ns#JSON"},
};

long env_number(const char* name) {
  const char* raw = std::getenv(name);
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*raw == '\0' || *end != '\0' || v <= 0) {
    throw ConfigError(std::string(name) + " must be a positive integer, got '" + raw + "'");
  }
  return v;
}

// Holds one in-flight slot for the lifetime of a request.
class SlotGuard {
 public:
  SlotGuard(std::mutex& m, std::condition_variable& cv, std::size_t& in_flight, std::size_t cap)
      : m_(m), cv_(cv), in_flight_(in_flight) {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return in_flight_ < cap; });
    ++in_flight_;
  }
  ~SlotGuard() {
    {
      std::lock_guard lock(m_);
      --in_flight_;
    }
    cv_.notify_one();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::mutex& m_;
  std::condition_variable& cv_;
  std::size_t& in_flight_;
};

}  // namespace

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds{0};
  double delay = static_cast<double>(initial_backoff.count());
  for (int i = 2; i < attempt; ++i) delay *= multiplier;
  delay = std::min(delay, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds{static_cast<long long>(delay)};
}

RemoteConfig RemoteConfig::with_env_overrides() const {
  RemoteConfig out = *this;
  if (const char* ep = std::getenv("KGB_SPARQL_ENDPOINT"); ep && *ep) out.endpoint = ep;
  if (std::getenv("KGB_SPARQL_TIMEOUT_MS")) {
    out.retry.timeout = std::chrono::milliseconds{env_number("KGB_SPARQL_TIMEOUT_MS")};
  }
  if (std::getenv("KGB_SPARQL_MAX_ATTEMPTS")) {
    out.retry.max_attempts = static_cast<int>(env_number("KGB_SPARQL_MAX_ATTEMPTS"));
  }
  return out;
}

std::vector<ObjectValue> parse_sparql_results(const std::string& body, const std::string& var) {
  Json doc;
  try {
    doc = Json::parse(body);
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed SPARQL results: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("results") || !doc["results"].contains("bindings") ||
      !doc["results"]["bindings"].is_array()) {
    throw FormatError("SPARQL results lack results.bindings");
  }
  std::vector<ObjectValue> out;
  for (const auto& row : doc["results"]["bindings"]) {
    if (!row.is_object() || !row.contains(var)) continue;  // unbound in this row
    const auto& cell = row[var];
    const std::string type = cell.value("type", "");
    const std::string value = cell.value("value", "");
    if (type == "uri") {
      if (value.rfind(kEntityIri, 0) != 0) throw FormatError("unexpected IRI " + value);
      auto id = EntityId::try_parse(std::string_view(value).substr(kEntityIri.size()));
      if (!id) throw FormatError("unexpected IRI " + value);
      out.emplace_back(*id);
    } else if (type == "literal" || type == "typed-literal") {
      Literal lit{value, LiteralType::kString};
      if (cell.contains("xml:lang")) lit.type = LiteralType::kMonolingual;
      const std::string dt = cell.value("datatype", "");
      for (const auto& d : kDatatypes) {
        if (d.iri == dt) lit.type = d.type;
      }
      out.emplace_back(std::move(lit));
    } else {
      throw FormatError("unsupported binding type '" + type + "'");
    }
  }
  return out;
}

std::string format_sparql_results(const std::vector<ObjectValue>& values, const std::string& var) {
  OrderedJson doc;
  doc["head"]["vars"] = OrderedJson::array({var});
  doc["results"]["bindings"] = OrderedJson::array();
  for (const auto& v : values) {
    OrderedJson cell;
    if (const EntityId* e = v.entity_if()) {
      cell["type"] = "uri";
      cell["value"] = std::string(kEntityIri) + e->str();
    } else {
      const Literal& lit = v.literal();
      cell["type"] = "literal";
      cell["value"] = lit.value;
      for (const auto& d : kDatatypes) {
        if (d.type == lit.type) cell["datatype"] = std::string(d.iri);
      }
    }
    OrderedJson row;
    row[var] = std::move(cell);
    doc["results"]["bindings"].push_back(std::move(row));
  }
  return doc.dump();
}

RemoteClient::RemoteClient(RemoteConfig config)
    : config_(std::move(config)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  const std::string& ep = config_.endpoint;
  const auto scheme_end = ep.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an http(s) URL: " + ep);
  const std::string scheme = ep.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("endpoint must be an http(s) URL: " + ep);
  }
  const auto path_start = ep.find('/', scheme_end + 3);
  scheme_host_port_ = ep.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : ep.substr(path_start);
  if (config_.retry.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
}

RemoteResult RemoteClient::attempt_once(const std::string& query, const std::string& var,
                                        int attempt) {
  SlotGuard slot(mutex_, slot_free_, in_flight_, config_.max_in_flight);
  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.retry.timeout);
  client.set_read_timeout(config_.retry.timeout);
  client.set_write_timeout(config_.retry.timeout);
  const httplib::Headers headers{{"Accept", "application/sparql-results+json"},
                                 {"User-Agent", config_.user_agent}};
  httplib::Result res;
  if (query.size() > config_.post_threshold) {
    res = client.Post(path_, headers, httplib::Params{{"query", query}});
  } else {
    res = client.Get(path_, httplib::Params{{"query", query}}, headers);
  }
  if (!res) {
    throw RemoteError("request failed: " + httplib::to_string(res.error()), true, 0, attempt);
  }
  const int status = res->status;
  if (status == 429 || status >= 500) {
    throw RemoteError("endpoint returned HTTP " + std::to_string(status), true, status, attempt);
  }
  if (status != 200) {
    throw RemoteError("endpoint returned HTTP " + std::to_string(status), false, status, attempt);
  }
  try {
    return RemoteResult{parse_sparql_results(res->body, var), attempt};
  } catch (const FormatError& e) {
    throw RemoteError(e.what(), false, status, attempt);
  }
}

RemoteResult RemoteClient::select(const std::string& query, const std::string& var) {
  for (int attempt = 1;; ++attempt) {
    if (attempt > 1) sleeper_(config_.retry.backoff_before(attempt));
    try {
      return attempt_once(query, var, attempt);
    } catch (const RemoteError& e) {
      if (!e.transient() || attempt >= config_.retry.max_attempts) throw;
    }
  }
}

std::size_t RemoteClient::count(const sparql::QuerySpec& spec) {
  auto result = select(sparql::build_sparql(spec), spec.select_var);
  std::sort(result.bindings.begin(), result.bindings.end());
  result.bindings.erase(std::unique(result.bindings.begin(), result.bindings.end()),
                        result.bindings.end());
  return std::min<std::size_t>(result.bindings.size(), 2);
}

}  // namespace kgdelta
