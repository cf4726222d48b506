#include "geotag/cli.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "geotag/document.h"
#include "geotag/evaluation.h"
#include "json.hpp"

namespace geotag {
namespace {

namespace fs = std::filesystem;

// Runs fn(i) for i in [0, n) on `jobs` threads. The first exception, in index
// order, is rethrown after every worker has stopped.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < n && !failed; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

DocumentBatch read_input(const RunConfig& config, std::ostream& err) {
  DocumentBatch batch;
  if (config.input == "-") {
    batch = read_documents(std::cin);
  } else {
    std::ifstream in(config.input);
    if (!in) throw ConfigError("cannot open input " + config.input);
    batch = read_documents(in);
  }
  for (const auto& [line, message] : batch.errors) {
    err << "input line " << line << ": " << message << '\n';
  }
  if (batch.rejected_inconsistent > 0) {
    err << batch.rejected_inconsistent << " document(s) rejected for inconsistent tokens\n";
  }
  if (config.group_by_user) batch.documents = group_by_user(std::move(batch.documents));
  return batch;
}

// Writes to the --output file, or to `out` when none was given.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write " + path);
    stream_ = &file_;
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::ofstream open_in_dir(const fs::path& dir, const std::string& name) {
  std::ofstream f(dir / name);
  if (!f) throw ConfigError("cannot write " + (dir / name).string());
  return f;
}

fs::path prepare_dir(const std::string& output) {
  if (output.empty()) throw ConfigError("--output directory is required");
  std::error_code ec;
  fs::create_directories(output, ec);
  if (ec || !fs::is_directory(output)) throw ConfigError("cannot create directory " + output);
  return output;
}

GeolocateOptions options_for(const RunConfig& config, Variant variant) {
  GeolocateOptions o;
  o.variant = variant;
  o.budget = Budget(config.budget_secs);
  o.limit = config.limit;
  return o;
}

int cmd_build_index(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.input == "-" || config.output.empty()) {
    err << "build-index needs --input <entries.tsv> and --output <index.json>\n";
    return kExitConfig;
  }
  if (!fs::exists(config.input)) {
    err << "entry file not found: " << config.input << '\n';
    return kExitConfig;
  }
  LocalIndex index;
  try {
    index = LocalIndex::build(config.input);
  } catch (const IndexParseError& e) {
    err << config.input << ": " << e.what() << '\n';
    return kExitConfig;
  }
  index.save_json(config.output);
  out << "wrote " << index.size() << " entries to " << config.output << '\n';
  return kExitOk;
}

int cmd_geolocate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto gazetteer = open_gazetteer(config);
  DocumentBatch batch = read_input(config, err);
  Sink sink(config.output, out);
  const auto& docs = batch.documents;
  std::vector<std::string> lines(docs.size());
  const GeolocateOptions options = options_for(config, config.variant);
  std::vector<std::string> failures(docs.size());
  parallel_for(docs.size(), config.jobs, [&](std::size_t i) {
    try {
      lines[i] = outcome_to_json(docs[i].id, geolocate(docs[i].tokens, *gazetteer, options));
    } catch (const BackendUnavailableError&) {
      throw;
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });
  std::size_t failed = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!failures[i].empty()) {
      err << "document " << docs[i].id << ": " << failures[i] << '\n';
      ++failed;
      continue;
    }
    *sink << lines[i] << '\n';
  }
  return (batch.errors.empty() && failed == 0) ? kExitOk : kExitPartial;
}

int cmd_evaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto gazetteer = open_gazetteer(config);
  DocumentBatch batch = read_input(config, err);
  const fs::path dir = prepare_dir(config.output);

  std::vector<TaggedDocument> docs;
  std::size_t unlabeled = 0;
  for (auto& d : batch.documents) {
    if (d.truth) {
      docs.push_back(std::move(d));
    } else {
      ++unlabeled;
    }
  }
  if (unlabeled > 0) err << unlabeled << " document(s) rejected without true coordinates\n";

  const std::vector<Variant> variants =
      config.all_variants ? all_variants() : std::vector<Variant>{config.variant};
  const std::size_t n = docs.size() * variants.size();
  std::vector<EvalRecord> records(n);
  std::vector<std::string> lines(n);
  parallel_for(n, config.jobs, [&](std::size_t task) {
    const Variant v = variants[task / std::max<std::size_t>(docs.size(), 1)];
    const TaggedDocument& doc = docs[task % docs.size()];
    const GeolocateOutcome outcome = geolocate(doc.tokens, *gazetteer, options_for(config, v));
    records[task] = make_record(doc, outcome, v, config.top_k);
    lines[task] = outcome_to_json(doc.id, outcome, &records[task]);
  });

  const std::string k = std::to_string(config.top_k);
  {
    auto f = open_in_dir(dir, "records.jsonl");
    for (const std::string& line : lines) f << line << '\n';
  }
  if (!records.empty()) {
    for (auto [column, suffix] : {std::pair{ErrorColumn::kTop1, std::string("top1")},
                                  std::pair{ErrorColumn::kTopK, "top" + k}}) {
      auto p = open_in_dir(dir, "percentiles_" + suffix + ".csv");
      write_percentile_csv(p, percentile_report(records, config.percentiles, column));
      auto t = open_in_dir(dir, "by_type_" + suffix + ".csv");
      write_percentile_csv(t, percentile_report(records, config.percentiles, column, true));
      auto c = open_in_dir(dir, "curve_" + suffix + ".csv");
      write_curve_csv(c, cumulative_curve(records, column));
    }
    const PercentileTable summary = percentile_report(records, std::vector<double>{50});
    for (const PercentileRow& row : summary.rows) {
      out << row.variant << ": " << row.located << "/" << row.documents
          << " located, median top-1 error " << format_km(row.values[0]) << " km\n";
    }
  }
  out << docs.size() << " document(s) evaluated under " << variants.size()
      << " variant(s); reports in " << dir.string() << '\n';
  return (batch.errors.empty() && unlabeled == 0) ? kExitOk : kExitPartial;
}

int cmd_scan_mentions(const RunConfig& config, std::ostream& out, std::ostream& err) {
  auto gazetteer = open_gazetteer(config);
  DocumentBatch batch = read_input(config, err);
  std::vector<const TaggedDocument*> docs;
  for (const auto& d : batch.documents) {
    if (d.truth) docs.push_back(&d);
  }
  const std::size_t unlabeled = batch.documents.size() - docs.size();
  if (unlabeled > 0) err << unlabeled << " document(s) rejected without true coordinates\n";

  std::vector<std::optional<double>> nearest(docs.size());
  parallel_for(docs.size(), config.jobs, [&](std::size_t i) {
    nearest[i] = scan_mentions(docs[i]->tokens, *gazetteer, *docs[i]->truth, config.max_words);
  });

  if (!config.output.empty()) {
    const fs::path dir = prepare_dir(config.output);
    auto f = open_in_dir(dir, "mentions.jsonl");
    for (std::size_t i = 0; i < docs.size(); ++i) {
      nlohmann::json j{{"doc_id", docs[i]->id},
                       {"nearest_km", nearest[i] ? nlohmann::json(*nearest[i])
                                                 : nlohmann::json(nullptr)}};
      f << j.dump() << '\n';
    }
    std::vector<EvalRecord> records;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      EvalRecord r;
      r.doc_id = docs[i]->id;
      r.top1_error_km = nearest[i];
      records.push_back(std::move(r));
    }
    std::vector<CurvePoint> curve = cumulative_curve(records);
    for (CurvePoint& p : curve) p.variant = "scan-mentions";
    auto c = open_in_dir(dir, "mentions_curve.csv");
    write_curve_csv(c, curve);
  }

  const double total = static_cast<double>(docs.size());
  auto line = [&](const std::string& label, std::size_t count) {
    char pct[32];
    std::snprintf(pct, sizeof pct, "%.1f", total > 0 ? 100.0 * count / total : 0.0);
    out << label << ": " << count << "/" << docs.size() << " (" << pct << "%)\n";
  };
  for (double km : {10.0, 100.0, 161.0}) {
    line("within " + std::to_string(static_cast<int>(km)) + " km",
         static_cast<std::size_t>(std::count_if(nearest.begin(), nearest.end(), [&](auto& d) {
           return d && *d <= km;
         })));
  }
  line("any match", static_cast<std::size_t>(std::count_if(
                        nearest.begin(), nearest.end(), [](auto& d) { return d.has_value(); })));
  return (batch.errors.empty() && unlabeled == 0) ? kExitOk : kExitPartial;
}

}  // namespace

void resolve_gazetteer_mode(RunConfig& config) {
  if (!config.gazetteer && !config.remote_url) {
    if (const char* url = std::getenv("GEOTAG_REMOTE_URL"); url && *url) config.remote_url = url;
  }
  if (config.remote_url && !config.cache) {
    if (const char* cache = std::getenv("GEOTAG_CACHE"); cache && *cache) config.cache = cache;
  }
  if (config.gazetteer && config.remote_url) {
    throw ConfigError("give either --gazetteer or --remote-url, not both");
  }
  if (!config.gazetteer && !config.remote_url) {
    throw ConfigError("no gazetteer: pass --gazetteer <index> or --remote-url <url>");
  }
  if (config.remote_url && !config.cache) {
    throw ConfigError("remote mode needs a cache path (--cache or GEOTAG_CACHE)");
  }
}

std::unique_ptr<Gazetteer> open_gazetteer(const RunConfig& config) {
  if (config.gazetteer) {
    try {
      return std::make_unique<LocalIndex>(LocalIndex::load(*config.gazetteer));
    } catch (const std::exception& e) {
      throw ConfigError("cannot load gazetteer " + config.gazetteer->string() + ": " + e.what());
    }
  }
  if (!config.remote_url || !config.cache) throw ConfigError("incomplete remote settings");
  RemoteConfig rc;
  rc.base_url = *config.remote_url;
  rc.cache_path = *config.cache;
  try {
    return std::make_unique<RemoteGazetteer>(std::move(rc));
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toponym extraction and disambiguation"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults");

  RunConfig config;
  std::string function_name(to_string(config.variant.function));
  std::string phase_name(to_string(config.variant.phase));
  std::string gazetteer_path;
  std::string remote_url;
  std::string cache_path;

  app.add_option("--variant", function_name, "Scoring function")->capture_default_str();
  app.add_option("--phase", phase_name, "1phase or 2phase")->capture_default_str();
  app.add_option("--gazetteer", gazetteer_path, "Local index (JSON) or entry file (TSV)");
  app.add_option("--remote-url", remote_url, "Nominatim-compatible base URL");
  app.add_option("--cache", cache_path, "Query cache file for remote mode");
  app.add_option("--limit", config.limit, "Results per gazetteer query")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--budget-secs", config.budget_secs, "Disambiguation budget per document")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--top-k", config.top_k, "k for the top-k error")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--percentiles", config.percentiles, "Comma-separated percentiles")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 100.0));
  app.add_flag("--all-variants", config.all_variants, "Evaluate all 16 variants");
  app.add_option("--jobs", config.jobs, "Parallel document workers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-words", config.max_words, "Longest word run for scan-mentions")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_flag("--group-by-user", config.group_by_user, "Merge records sharing a user key");
  app.add_option("--input", config.input, "Input file, - for stdin");
  app.add_option("--output", config.output, "Output file or directory");

  auto* build = app.add_subcommand("build-index", "Build a JSON index from an entry file");
  auto* geo = app.add_subcommand("geolocate", "Write ranked location tags per document");
  auto* eval = app.add_subcommand("evaluate", "Percentile and curve reports on labeled documents");
  auto* scan = app.add_subcommand("scan-mentions", "Nearest gazetteer mention per document");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (build->parsed()) return cmd_build_index(config, out, err);

    auto fn = parse_scoring_function(function_name);
    if (!fn) throw ConfigError("unknown scoring function: " + function_name);
    auto phase = parse_phase(phase_name);
    if (!phase) throw ConfigError("unknown phase: " + phase_name);
    config.variant = {*fn, *phase};
    for (double p : config.percentiles) {
      if (!(p > 0.0)) throw ConfigError("percentiles must be in (0, 100]");
    }
    if (!gazetteer_path.empty()) config.gazetteer = gazetteer_path;
    if (!remote_url.empty()) config.remote_url = remote_url;
    if (!cache_path.empty()) config.cache = cache_path;
    resolve_gazetteer_mode(config);

    if (geo->parsed()) return cmd_geolocate(config, out, err);
    if (eval->parsed()) return cmd_evaluate(config, out, err);
    if (scan->parsed()) return cmd_scan_mentions(config, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BackendUnavailableError& e) {
    err << "gazetteer backend failed: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace geotag
