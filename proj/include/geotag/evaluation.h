#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geotag/disambiguation.h"
#include "geotag/document.h"
#include "geotag/extraction.h"
#include "geotag/gazetteer.h"
#include "geotag/geo.h"

namespace geotag {

struct GeolocateOptions {
  Variant variant;
  Budget budget = kDefaultBudget;
  std::size_t limit = kDefaultResultLimit;
  std::size_t max_group_terms = kMaxGroupTerms;
};

struct GeolocateOutcome {
  std::vector<GeoTag> tags;  // ranked
  ExtractionMode mode = ExtractionMode::kEmpty;
  std::size_t phrases_queried = 0;
  std::size_t phrases_matched = 0;  // phrases with at least one result
  bool flagged_budget = false;
};

// Extraction, filtering, postal codes, one gazetteer query per phrase
// (phrases without results are dropped), disambiguation, ranking.
// Gazetteer errors propagate.
GeolocateOutcome geolocate(std::span<const TaggedToken> tokens, const Gazetteer& gazetteer,
                           const GeolocateOptions& options = {});

std::vector<GeoTag> geolocate(const TaggedDocument& doc, const Gazetteer& gazetteer,
                              Variant variant, Budget budget = kDefaultBudget);

// Smallest distance from `truth` to the first min(k, |tags|) tags; empty when
// there are no tags.
std::optional<double> top_k_error(std::span<const GeoTag> tags, const Coordinates& truth,
                                  std::size_t k);

struct EvalRecord {
  std::string doc_id;
  Coordinates truth;
  std::optional<std::string> article_type;
  ExtractionMode mode = ExtractionMode::kEmpty;
  std::optional<double> top1_error_km;
  std::optional<double> top5_error_km;
  bool flagged_budget = false;
  Variant variant;
};

// Throws std::invalid_argument when the document has no true coordinates.
EvalRecord make_record(const TaggedDocument& doc, const GeolocateOutcome& outcome,
                       Variant variant, std::size_t top_k = 5);

// Nearest rank: the smallest value with at least p percent of the sample at
// or below it. `sorted` must be ascending and nonempty; 0 < p <= 100.
double nearest_rank(std::span<const double> sorted, double p);

enum class ErrorColumn { kTop1, kTopK };

struct PercentileRow {
  std::string variant;
  std::optional<std::string> article_type;
  std::size_t documents = 0;
  std::size_t located = 0;  // documents with at least one tag
  std::vector<double> values;  // one per requested percentile; inf when untagged
};

struct PercentileTable {
  std::vector<double> percentiles;
  std::vector<PercentileRow> rows;
};

// One row per variant (in first-seen order), optionally split further by
// article type. Documents without tags count as an infinite error.
PercentileTable percentile_report(std::span<const EvalRecord> records,
                                  std::span<const double> percentiles,
                                  ErrorColumn column = ErrorColumn::kTop1,
                                  bool by_article_type = false);

struct CurvePoint {
  std::string variant;
  double fraction = 0.0;
  double error_km = 0.0;
};

// Empirical cumulative distribution of the errors per variant. Untagged
// documents stay in the denominator, so a curve may end below 1.
std::vector<CurvePoint> cumulative_curve(std::span<const EvalRecord> records,
                                         ErrorColumn column = ErrorColumn::kTop1);

void write_percentile_csv(std::ostream& out, const PercentileTable& table);
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

// One JSON object: doc_id, mode, flags, tags with coordinates, score and rank,
// and the errors when a record is given.
std::string outcome_to_json(const std::string& doc_id, const GeolocateOutcome& outcome,
                            const EvalRecord* record = nullptr);
std::string record_to_json(const EvalRecord& record);

// Queries every run of at most `max_words` tokens and returns the distance
// from `truth` to the nearest match. Runs never cross kRecordSeparator.
std::optional<double> scan_mentions(std::span<const TaggedToken> tokens,
                                    const Gazetteer& gazetteer, const Coordinates& truth,
                                    std::size_t max_words = 5, std::size_t limit = 50);

// Formats a distance for CSV output: fixed 6 decimals, "inf" for infinity.
std::string format_km(double km);

}  // namespace geotag
