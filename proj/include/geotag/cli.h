#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "geotag/disambiguation.h"
#include "geotag/gazetteer.h"

namespace geotag {

enum ExitStatus : int {
  kExitOk = 0,
  kExitPartial = 1,  // some documents were rejected or failed
  kExitConfig = 2,   // bad flags, unreadable files, backend failure
};

// Invalid or contradictory run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Variant variant;
  std::optional<std::filesystem::path> gazetteer;  // local index or entry file
  std::optional<std::string> remote_url;
  std::optional<std::filesystem::path> cache;
  std::size_t limit = kDefaultResultLimit;
  double budget_secs = 100.0;
  std::size_t top_k = 5;
  std::vector<double> percentiles{10, 25, 50};
  bool all_variants = false;
  std::size_t jobs = 1;
  std::size_t max_words = 5;
  bool group_by_user = false;
  std::string input = "-";  // "-" is standard input
  std::string output;
};

// Fills the remote URL and cache from GEOTAG_REMOTE_URL / GEOTAG_CACHE when
// no gazetteer flag was given, then checks that exactly one gazetteer mode is
// set. Throws ConfigError.
void resolve_gazetteer_mode(RunConfig& config);

// Throws ConfigError when the index cannot be loaded or the remote settings
// are incomplete.
std::unique_ptr<Gazetteer> open_gazetteer(const RunConfig& config);

// Subcommands: build-index, geolocate, evaluate, scan-mentions. `args`
// excludes the program name. Returns an ExitStatus.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace geotag
