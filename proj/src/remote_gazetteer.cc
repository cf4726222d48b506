#include <iostream>
#include <thread>

#include "geotag/gazetteer.h"
#include "httplib.h"
#include "json.hpp"

namespace geotag {
namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw std::invalid_argument("remote URL needs a scheme: " + url);
  }
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
      out.path_prefix.pop_back();
    }
  }
  return out;
}

double number_field(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t used = 0;
    double d = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return d;
  }
  throw std::invalid_argument(key);
}

}  // namespace

struct RemoteGazetteer::Impl {
  RemoteConfig config;
  ParsedUrl url;
  QueryCache cache;
  RateLimiter* limiter;
  mutable std::mutex log_mu;
  std::vector<RateLimiter::Clock::time_point> sends;

  explicit Impl(RemoteConfig c)
      : config(std::move(c)),
        url(parse_base_url(config.base_url)),
        cache(config.cache_path),
        limiter(config.limiter ? config.limiter : &RateLimiter::global()) {}

  std::string fetch(std::string_view phrase, std::size_t limit) {
    httplib::Params params{{"q", std::string(phrase)},
                           {"format", "json"},
                           {"limit", std::to_string(limit)}};
    const std::string path =
        httplib::append_query_params(url.path_prefix + "/search", params);
    httplib::Headers headers{{"User-Agent", config.user_agent}};

    std::string last_error;
    auto backoff = config.initial_backoff;
    for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
      }
      auto sent_at = limiter->acquire();
      {
        std::lock_guard lock(log_mu);
        sends.push_back(sent_at);
      }
      httplib::Client client(url.origin);
      client.set_connection_timeout(config.timeout);
      client.set_read_timeout(config.timeout);
      auto res = client.Get(path, headers);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return res->body;
      last_error = "HTTP " + std::to_string(res->status);
      if (res->status != 429 && res->status < 500) break;
    }
    throw BackendUnavailableError("search for '" + std::string(phrase) + "' failed: " +
                                  last_error);
  }
};

RemoteGazetteer::RemoteGazetteer(RemoteConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {
  if (impl_->config.cache_path.empty()) {
    throw std::invalid_argument("remote gazetteer requires a cache path");
  }
}

RemoteGazetteer::~RemoteGazetteer() = default;

std::vector<LocationResult> RemoteGazetteer::parse_response(std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw MalformedResponseError(std::string("response is not JSON: ") + e.what());
  }
  if (!j.is_array()) throw MalformedResponseError("response is not a JSON array");
  std::vector<LocationResult> out;
  for (const json& item : j) {
    try {
      LocationResult r;
      if (item.contains("osm_type") && item.contains("osm_id")) {
        r.source_id = item["osm_type"].get<std::string>() + ":" +
                      (item["osm_id"].is_string() ? item["osm_id"].get<std::string>()
                                                  : item["osm_id"].dump());
      } else if (item.contains("place_id")) {
        r.source_id = item["place_id"].is_string() ? item["place_id"].get<std::string>()
                                                   : item["place_id"].dump();
      } else {
        throw std::invalid_argument("no identifier");
      }
      r.display_name = item.value("display_name", std::string());
      r.latitude = number_field(item, "lat");
      r.longitude = number_field(item, "lon");
      if (item.contains("importance") && !item["importance"].is_null()) {
        r.importance = number_field(item, "importance");
      }
      if (item.contains("class") && item["class"].is_string()) {
        r.location_class = item["class"].get<std::string>();
      }
      if (!valid_coordinates(r.latitude, r.longitude) || r.importance < 0.0) {
        throw std::invalid_argument("value out of range");
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw MalformedResponseError(std::string("bad result entry: ") + e.what());
    }
  }
  return out;
}

QueryOutcome RemoteGazetteer::query(std::string_view phrase, std::size_t limit) const {
  if (normalize_query(phrase).empty()) throw std::invalid_argument("empty query phrase");
  if (auto cached = impl_->cache.find(phrase, limit)) return *cached;

  QueryOutcome outcome{std::string(phrase),
                       parse_response(impl_->fetch(phrase, limit))};
  sort_by_importance(outcome.results);
  if (outcome.results.size() > limit) {
    std::cerr << "warning: backend returned " << outcome.results.size()
              << " results for '" << phrase << "' with limit " << limit
              << "; keeping the " << limit << " most important\n";
    outcome.results.resize(limit);
  }
  impl_->cache.store(phrase, limit, outcome);
  return outcome;
}

std::vector<RateLimiter::Clock::time_point> RemoteGazetteer::send_log() const {
  std::lock_guard lock(impl_->log_mu);
  return impl_->sends;
}

std::size_t RemoteGazetteer::network_sends() const {
  std::lock_guard lock(impl_->log_mu);
  return impl_->sends.size();
}

}  // namespace geotag
