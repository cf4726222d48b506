#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geotag/geo.h"

namespace geotag {

inline constexpr std::size_t kDefaultResultLimit = 10;
inline constexpr double kDefaultImportance = 0.5;

struct LocationResult {
  std::string source_id;
  std::string display_name;
  double latitude = 0.0;
  double longitude = 0.0;
  double importance = kDefaultImportance;
  std::optional<std::string> location_class;

  Coordinates coordinates() const { return {latitude, longitude}; }

  friend bool operator==(const LocationResult&, const LocationResult&) = default;
};

struct QueryOutcome {
  std::string phrase;
  std::vector<LocationResult> results;  // importance descending, then source_id

  friend bool operator==(const QueryOutcome&, const QueryOutcome&) = default;
};

// Importance descending, ties by source_id ascending.
void sort_by_importance(std::vector<LocationResult>& results);

// Lowercased with runs of whitespace collapsed to one space and trimmed.
std::string normalize_query(std::string_view phrase);

// The remote backend failed after all retries.
class BackendUnavailableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedResponseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IndexParseError : public std::runtime_error {
 public:
  IndexParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class Gazetteer {
 public:
  virtual ~Gazetteer() = default;
  // Up to `limit` results, most important first. An empty list is a valid
  // answer. Throws std::invalid_argument for an empty phrase.
  virtual QueryOutcome query(std::string_view phrase,
                             std::size_t limit = kDefaultResultLimit) const = 0;
};

struct GazetteerEntry {
  LocationResult location;
  std::string name;
  std::vector<std::string> alternative_names;
};

// Exact, case-insensitive, whitespace-normalized matching over the primary
// name and every alternative name. Immutable after construction.
class LocalIndex final : public Gazetteer {
 public:
  LocalIndex() = default;
  explicit LocalIndex(std::vector<GazetteerEntry> entries);

  // Tab-separated entry file:
  //   source_id, name, alt names (';'-separated), lat, lon, importance, class,
  //   display_name
  // Throws IndexParseError (with line number) or std::runtime_error when the
  // file cannot be opened.
  static LocalIndex build(const std::filesystem::path& entries_file);
  static LocalIndex parse_tsv(std::istream& in);

  // Reads either an entry file or a saved JSON index.
  static LocalIndex load(const std::filesystem::path& path);
  void save_json(const std::filesystem::path& path) const;

  QueryOutcome query(std::string_view phrase,
                     std::size_t limit = kDefaultResultLimit) const override;

  std::size_t size() const { return entries_.size(); }
  const std::vector<GazetteerEntry>& entries() const { return entries_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
};

// Enforces a minimum spacing between consecutive acquisitions, across threads.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(std::chrono::milliseconds min_interval);

  // Blocks until the next slot and returns the time it was granted.
  Clock::time_point acquire();

  std::chrono::milliseconds min_interval() const { return min_interval_; }

  // Shared by every remote client in the process; one request per second.
  static RateLimiter& global();

 private:
  std::mutex mu_;
  std::chrono::milliseconds min_interval_;
  std::optional<Clock::time_point> last_;
};

// Persistent (normalized phrase, limit) -> outcome map backed by an
// append-only JSON-lines file. Later lines win on reload.
class QueryCache {
 public:
  explicit QueryCache(std::filesystem::path path);

  std::optional<QueryOutcome> find(std::string_view phrase, std::size_t limit) const;
  void store(std::string_view phrase, std::size_t limit, const QueryOutcome& outcome);

  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

  static std::string key(std::string_view phrase, std::size_t limit);

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, QueryOutcome> entries_;
};

struct RemoteConfig {
  std::string base_url;  // e.g. https://nominatim.openstreetmap.org
  std::filesystem::path cache_path;
  std::size_t max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{30};
  std::string user_agent = "geotag/1.0";
  // Null means RateLimiter::global().
  RateLimiter* limiter = nullptr;
};

// Nominatim-compatible HTTP search client:
//   GET <base>/search?q=<phrase>&format=json&limit=<n>
// Every network send goes through the rate limiter; the cache is consulted
// first and updated after each successful request.
class RemoteGazetteer final : public Gazetteer {
 public:
  explicit RemoteGazetteer(RemoteConfig config);
  ~RemoteGazetteer() override;

  QueryOutcome query(std::string_view phrase,
                     std::size_t limit = kDefaultResultLimit) const override;

  // Steady-clock time of every network send, in order.
  std::vector<RateLimiter::Clock::time_point> send_log() const;
  std::size_t network_sends() const;

  // Parses a Nominatim JSON array. Throws MalformedResponseError.
  static std::vector<LocationResult> parse_response(std::string_view body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace geotag
