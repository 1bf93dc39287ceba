#include <chrono>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "parmine/embedding.hpp"
#include "parmine/error.hpp"

namespace parmine {
namespace {

using json = nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing '/'
};

Endpoint split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos || url.compare(0, scheme, "http") != 0) {
    throw ConfigError("provider.location must be an http:// URL, got \"" + url + "\"");
  }
  const std::size_t path = url.find('/', scheme + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path);
  if (path != std::string::npos) ep.prefix = url.substr(path);
  while (!ep.prefix.empty() && ep.prefix.back() == '/') ep.prefix.pop_back();
  return ep;
}

EmbeddingMatrix parse_response(const std::string& body, std::size_t expected_rows) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ProviderError(std::string("provider sent malformed JSON: ") + e.what(), false);
  }
  if (!doc.is_object() || !doc.contains("vectors") || !doc["vectors"].is_array() ||
      !doc.contains("dim") || !doc["dim"].is_number_integer()) {
    throw ProviderError("provider response lacks \"vectors\"/\"dim\"", false);
  }
  const auto dim = doc["dim"].get<long long>();
  const auto& rows = doc["vectors"];
  if (dim <= 0) throw ProviderError("provider reported dim <= 0", false);
  if (rows.size() != expected_rows) {
    throw ProviderError("provider returned " + std::to_string(rows.size()) + " vectors for " +
                            std::to_string(expected_rows) + " texts",
                        false);
  }
  EmbeddingMatrix m(rows.size(), static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.is_array() || r.size() != static_cast<std::size_t>(dim)) {
      throw DataError("provider row " + std::to_string(i) + " does not have dim " +
                      std::to_string(dim));
    }
    auto out = m.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (!r[j].is_number()) throw ProviderError("provider row holds a non-number", false);
      out[j] = r[j].get<float>();
    }
  }
  return m;
}

}  // namespace

RemoteProvider::RemoteProvider(ProviderConfig config) : config_(std::move(config)) {
  split_url(config_.location);
}

EmbeddingMatrix RemoteProvider::embed_batch(std::span<const std::string> texts) const {
  const Endpoint ep = split_url(config_.location);
  json request;
  request["texts"] = json::array();
  for (const auto& t : texts) request["texts"].push_back(t);
  request["normalize"] = config_.normalize;
  const std::string body = request.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
    httplib::Client client(ep.origin);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(ep.prefix + "/v1/embed", body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return parse_response(res->body, texts.size());
    if (res->status == 503 || res->status == 502 || res->status == 504 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    throw ProviderError("provider rejected request: HTTP " + std::to_string(res->status) + " " +
                            res->body.substr(0, 200),
                        false);
  }
  throw ProviderError("provider unreachable at " + config_.location + " after " +
                          std::to_string(config_.max_retries + 1) + " attempts (" + last_error + ")",
                      true);
}

}  // namespace parmine
