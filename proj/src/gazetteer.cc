#include "geotag/gazetteer.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace geotag {
namespace {

using nlohmann::json;

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t next = s.find(sep, pos);
    out.emplace_back(s.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json entry_to_json(const GazetteerEntry& e) {
  json j{{"source_id", e.location.source_id},
         {"name", e.name},
         {"alternative_names", e.alternative_names},
         {"lat", e.location.latitude},
         {"lon", e.location.longitude},
         {"importance", e.location.importance},
         {"display_name", e.location.display_name}};
  if (e.location.location_class) j["class"] = *e.location.location_class;
  return j;
}

GazetteerEntry entry_from_json(const json& j, std::size_t line) {
  try {
    GazetteerEntry e;
    e.location.source_id = j.at("source_id").get<std::string>();
    e.name = j.at("name").get<std::string>();
    e.alternative_names = j.value("alternative_names", std::vector<std::string>{});
    e.location.latitude = j.at("lat").get<double>();
    e.location.longitude = j.at("lon").get<double>();
    e.location.importance = j.value("importance", kDefaultImportance);
    e.location.display_name = j.value("display_name", e.name);
    if (j.contains("class")) e.location.location_class = j["class"].get<std::string>();
    return e;
  } catch (const json::exception& ex) {
    throw IndexParseError(line, ex.what());
  }
}

}  // namespace

void sort_by_importance(std::vector<LocationResult>& results) {
  std::stable_sort(results.begin(), results.end(),
                   [](const LocationResult& a, const LocationResult& b) {
                     if (a.importance != b.importance) return a.importance > b.importance;
                     return a.source_id < b.source_id;
                   });
}

std::string normalize_query(std::string_view phrase) {
  std::string out;
  out.reserve(phrase.size());
  bool pending_space = false;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

LocalIndex::LocalIndex(std::vector<GazetteerEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const GazetteerEntry& e = entries_[i];
    if (!ids.insert(e.location.source_id).second) {
      throw IndexParseError(i + 1, "duplicate source_id " + e.location.source_id);
    }
    std::set<std::string> keys;
    keys.insert(normalize_query(e.name));
    for (const std::string& alt : e.alternative_names) keys.insert(normalize_query(alt));
    keys.erase(std::string());
    for (const std::string& k : keys) by_name_[k].push_back(i);
  }
}

LocalIndex LocalIndex::parse_tsv(std::istream& in) {
  std::vector<GazetteerEntry> entries;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 5 || cols.size() > 8) {
      throw IndexParseError(line_no, "expected 5 to 8 tab-separated columns, got " +
                                         std::to_string(cols.size()));
    }
    cols.resize(8);
    GazetteerEntry e;
    e.location.source_id = trim(cols[0]);
    e.name = trim(cols[1]);
    if (e.location.source_id.empty()) throw IndexParseError(line_no, "empty source_id");
    if (e.name.empty()) throw IndexParseError(line_no, "empty name");
    if (!ids.insert(e.location.source_id).second) {
      throw IndexParseError(line_no, "duplicate source_id " + e.location.source_id);
    }
    for (const std::string& alt : split(cols[2], ';')) {
      if (auto a = trim(alt); !a.empty()) e.alternative_names.push_back(std::move(a));
    }
    auto lat = parse_double(trim(cols[3]));
    auto lon = parse_double(trim(cols[4]));
    if (!lat || !lon) throw IndexParseError(line_no, "latitude/longitude not numeric");
    if (!valid_coordinates(*lat, *lon)) {
      throw IndexParseError(line_no, "coordinates out of range");
    }
    e.location.latitude = *lat;
    e.location.longitude = *lon;
    if (auto imp = trim(cols[5]); !imp.empty()) {
      auto v = parse_double(imp);
      if (!v || *v < 0.0) throw IndexParseError(line_no, "importance must be a nonnegative number");
      e.location.importance = *v;
    }
    if (auto cls = trim(cols[6]); !cls.empty()) e.location.location_class = cls;
    e.location.display_name = trim(cols[7]);
    if (e.location.display_name.empty()) e.location.display_name = e.name;
    entries.push_back(std::move(e));
  }
  return LocalIndex(std::move(entries));
}

LocalIndex LocalIndex::build(const std::filesystem::path& entries_file) {
  std::ifstream in(entries_file);
  if (!in) throw std::runtime_error("cannot open " + entries_file.string());
  return parse_tsv(in);
}

LocalIndex LocalIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char first = 0;
  in >> std::ws;
  first = static_cast<char>(in.peek());
  if (first != '{') {
    in.clear();
    in.seekg(0);
    return parse_tsv(in);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IndexParseError(1, e.what());
  }
  if (!j.contains("entries") || !j["entries"].is_array()) {
    throw IndexParseError(1, "index file without entries array");
  }
  std::vector<GazetteerEntry> entries;
  std::size_t n = 0;
  for (const json& item : j["entries"]) {
    GazetteerEntry e = entry_from_json(item, ++n);
    if (!valid_coordinates(e.location.latitude, e.location.longitude)) {
      throw IndexParseError(n, "coordinates out of range");
    }
    entries.push_back(std::move(e));
  }
  return LocalIndex(std::move(entries));
}

void LocalIndex::save_json(const std::filesystem::path& path) const {
  json arr = json::array();
  for (const GazetteerEntry& e : entries_) arr.push_back(entry_to_json(e));
  json j{{"format", "geotag-index/1"}, {"entries", std::move(arr)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(1) << '\n';
}

QueryOutcome LocalIndex::query(std::string_view phrase, std::size_t limit) const {
  std::string key = normalize_query(phrase);
  if (key.empty()) throw std::invalid_argument("empty query phrase");
  QueryOutcome outcome{std::string(phrase), {}};
  if (auto it = by_name_.find(key); it != by_name_.end()) {
    for (std::size_t i : it->second) outcome.results.push_back(entries_[i].location);
  }
  sort_by_importance(outcome.results);
  if (outcome.results.size() > limit) outcome.results.resize(limit);
  return outcome;
}

RateLimiter::RateLimiter(std::chrono::milliseconds min_interval)
    : min_interval_(min_interval) {}

RateLimiter::Clock::time_point RateLimiter::acquire() {
  std::lock_guard lock(mu_);
  auto now = Clock::now();
  if (last_) {
    auto ready = *last_ + min_interval_;
    while (now < ready) {
      std::this_thread::sleep_until(ready);
      now = Clock::now();
    }
  }
  last_ = now;
  return now;
}

RateLimiter& RateLimiter::global() {
  static RateLimiter limiter(std::chrono::milliseconds(1000));
  return limiter;
}

namespace {

json outcome_to_json(const QueryOutcome& o) {
  json results = json::array();
  for (const LocationResult& r : o.results) {
    json jr{{"source_id", r.source_id},
            {"display_name", r.display_name},
            {"lat", r.latitude},
            {"lon", r.longitude},
            {"importance", r.importance}};
    if (r.location_class) jr["class"] = *r.location_class;
    results.push_back(std::move(jr));
  }
  return json{{"phrase", o.phrase}, {"results", std::move(results)}};
}

QueryOutcome outcome_from_json(const json& j) {
  QueryOutcome o;
  o.phrase = j.at("phrase").get<std::string>();
  for (const json& jr : j.at("results")) {
    LocationResult r;
    r.source_id = jr.at("source_id").get<std::string>();
    r.display_name = jr.at("display_name").get<std::string>();
    r.latitude = jr.at("lat").get<double>();
    r.longitude = jr.at("lon").get<double>();
    r.importance = jr.at("importance").get<double>();
    if (jr.contains("class")) r.location_class = jr["class"].get<std::string>();
    o.results.push_back(std::move(r));
  }
  return o;
}

}  // namespace

QueryCache::QueryCache(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;  // created on first store
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      entries_[j.at("key").get<std::string>()] = outcome_from_json(j.at("outcome"));
    } catch (const json::exception&) {
      // A torn final line from an interrupted append is ignored.
    }
  }
}

std::string QueryCache::key(std::string_view phrase, std::size_t limit) {
  return normalize_query(phrase) + '\t' + std::to_string(limit);
}

std::optional<QueryOutcome> QueryCache::find(std::string_view phrase,
                                             std::size_t limit) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key(phrase, limit));
  if (it == entries_.end()) return std::nullopt;
  QueryOutcome o = it->second;
  o.phrase = std::string(phrase);
  return o;
}

void QueryCache::store(std::string_view phrase, std::size_t limit,
                       const QueryOutcome& outcome) {
  std::lock_guard lock(mu_);
  const std::string k = key(phrase, limit);
  entries_[k] = outcome;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to cache " + path_.string());
  out << json{{"key", k}, {"outcome", outcome_to_json(outcome)}}.dump() << '\n';
}

std::size_t QueryCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

}  // namespace geotag
