#include "geotag/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace geotag {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double error_of(const EvalRecord& r, ErrorColumn column) {
  const auto& e = column == ErrorColumn::kTop1 ? r.top1_error_km : r.top5_error_km;
  return e ? *e : kInf;
}

json optional_km(const std::optional<double>& km) {
  return km ? json(*km) : json(nullptr);
}

}  // namespace

GeolocateOutcome geolocate(std::span<const TaggedToken> tokens, const Gazetteer& gazetteer,
                           const GeolocateOptions& options) {
  GeolocateOutcome out;
  ExtractionOutcome extracted = extract_terms(tokens);
  out.mode = extracted.mode;

  CandidateSpace space;
  for (const std::string& phrase : extracted.phrases) {
    ++out.phrases_queried;
    QueryOutcome q = gazetteer.query(phrase, options.limit);
    if (q.results.empty()) continue;
    ++out.phrases_matched;
    space.results.emplace(phrase, std::move(q.results));
  }
  std::vector<Term> kept;
  for (Term& t : extracted.terms) {
    if (space.results.contains(t.phrase)) kept.push_back(std::move(t));
  }
  space.terms = cap_group_sizes(std::move(kept), options.max_group_terms);
  if (space.terms.empty()) return out;
  // Capping can remove every term of a phrase.
  std::erase_if(space.results, [&](const auto& entry) {
    return std::none_of(space.terms.begin(), space.terms.end(),
                        [&](const Term& t) { return t.phrase == entry.first; });
  });

  Assignment a = disambiguate(space, options.variant, options.budget);
  out.tags = std::move(a.ranked);
  out.flagged_budget = a.flagged_budget;
  return out;
}

std::vector<GeoTag> geolocate(const TaggedDocument& doc, const Gazetteer& gazetteer,
                              Variant variant, Budget budget) {
  GeolocateOptions options;
  options.variant = variant;
  options.budget = budget;
  return geolocate(doc.tokens, gazetteer, options).tags;
}

std::optional<double> top_k_error(std::span<const GeoTag> tags, const Coordinates& truth,
                                  std::size_t k) {
  if (tags.empty() || k == 0) return std::nullopt;
  double best = kInf;
  for (std::size_t i = 0; i < std::min(k, tags.size()); ++i) {
    best = std::min(best, great_circle_distance(tags[i].result.coordinates(), truth));
  }
  return best;
}

EvalRecord make_record(const TaggedDocument& doc, const GeolocateOutcome& outcome,
                       Variant variant, std::size_t top_k) {
  if (!doc.truth) throw std::invalid_argument("document " + doc.id + " has no true coordinates");
  EvalRecord r;
  r.doc_id = doc.id;
  r.truth = *doc.truth;
  r.article_type = doc.article_type;
  r.mode = outcome.mode;
  r.top1_error_km = top_k_error(outcome.tags, *doc.truth, 1);
  r.top5_error_km = top_k_error(outcome.tags, *doc.truth, top_k);
  r.flagged_budget = outcome.flagged_budget;
  r.variant = variant;
  return r;
}

double nearest_rank(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("nearest_rank: empty sample");
  if (!(p > 0.0 && p <= 100.0)) throw std::invalid_argument("nearest_rank: p outside (0, 100]");
  const double n = static_cast<double>(sorted.size());
  // Subtracting a hair keeps p * n / 100 from rounding up past an exact integer.
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

PercentileTable percentile_report(std::span<const EvalRecord> records,
                                  std::span<const double> percentiles, ErrorColumn column,
                                  bool by_article_type) {
  PercentileTable table;
  table.percentiles.assign(percentiles.begin(), percentiles.end());

  std::vector<std::string> variant_order;
  std::map<std::string, std::map<std::optional<std::string>, std::vector<double>>> buckets;
  for (const EvalRecord& r : records) {
    const std::string name = r.variant.name();
    if (!buckets.contains(name)) variant_order.push_back(name);
    const std::optional<std::string> type =
        by_article_type ? std::optional<std::string>(r.article_type.value_or(""))
                        : std::nullopt;
    buckets[name][type].push_back(error_of(r, column));
  }
  for (const std::string& name : variant_order) {
    for (auto& [type, errors] : buckets[name]) {
      std::sort(errors.begin(), errors.end());
      PercentileRow row;
      row.variant = name;
      row.article_type = type;
      row.documents = errors.size();
      row.located = static_cast<std::size_t>(
          std::count_if(errors.begin(), errors.end(), [](double e) { return e < kInf; }));
      for (double p : percentiles) row.values.push_back(nearest_rank(errors, p));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::vector<CurvePoint> cumulative_curve(std::span<const EvalRecord> records,
                                         ErrorColumn column) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> errors;
  for (const EvalRecord& r : records) {
    const std::string name = r.variant.name();
    if (!errors.contains(name)) order.push_back(name);
    errors[name].push_back(error_of(r, column));
  }
  std::vector<CurvePoint> curve;
  for (const std::string& name : order) {
    auto& e = errors[name];
    std::sort(e.begin(), e.end());
    const double n = static_cast<double>(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == kInf) break;
      curve.push_back({name, static_cast<double>(i + 1) / n, e[i]});
    }
  }
  return curve;
}

std::string format_km(double km) {
  if (std::isinf(km)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", km);
  return buf;
}

void write_percentile_csv(std::ostream& out, const PercentileTable& table) {
  const bool typed = std::any_of(table.rows.begin(), table.rows.end(),
                                 [](const PercentileRow& r) { return r.article_type.has_value(); });
  out << "variant";
  if (typed) out << ",article_type";
  out << ",documents,located";
  for (double p : table.percentiles) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ",p%g", p);
    out << buf;
  }
  out << '\n';
  for (const PercentileRow& row : table.rows) {
    out << row.variant;
    if (typed) out << ',' << row.article_type.value_or("");
    out << ',' << row.documents << ',' << row.located;
    for (double v : row.values) out << ',' << format_km(v);
    out << '\n';
  }
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "variant,fraction,error_km\n";
  char buf[32];
  for (const CurvePoint& p : curve) {
    std::snprintf(buf, sizeof buf, "%.6f", p.fraction);
    out << p.variant << ',' << buf << ',' << format_km(p.error_km) << '\n';
  }
}

std::string outcome_to_json(const std::string& doc_id, const GeolocateOutcome& outcome,
                            const EvalRecord* record) {
  json j;
  j["doc_id"] = doc_id;
  j["mode"] = std::string(to_string(outcome.mode));
  j["flagged_budget"] = outcome.flagged_budget;
  json tags = json::array();
  for (const GeoTag& t : outcome.tags) {
    tags.push_back({{"rank", t.rank},
                    {"phrase", t.phrase},
                    {"start", t.start},
                    {"end", t.end},
                    {"occurrences", t.occurrences},
                    {"source_id", t.result.source_id},
                    {"display_name", t.result.display_name},
                    {"lat", t.result.latitude},
                    {"lon", t.result.longitude},
                    {"importance", t.result.importance},
                    {"score", t.score}});
  }
  j["tags"] = std::move(tags);
  if (record) {
    j["variant"] = record->variant.name();
    j["top1_error_km"] = optional_km(record->top1_error_km);
    j["top5_error_km"] = optional_km(record->top5_error_km);
  }
  return j.dump();
}

std::string record_to_json(const EvalRecord& record) {
  json j{{"doc_id", record.doc_id},
         {"variant", record.variant.name()},
         {"true_lat", record.truth.latitude},
         {"true_lon", record.truth.longitude},
         {"article_type", record.article_type ? json(*record.article_type) : json(nullptr)},
         {"mode", std::string(to_string(record.mode))},
         {"top1_error_km", optional_km(record.top1_error_km)},
         {"top5_error_km", optional_km(record.top5_error_km)},
         {"flagged_budget", record.flagged_budget}};
  return j.dump();
}

std::optional<double> scan_mentions(std::span<const TaggedToken> tokens,
                                    const Gazetteer& gazetteer, const Coordinates& truth,
                                    std::size_t max_words, std::size_t limit) {
  std::optional<double> best;
  std::set<std::string> seen;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    for (std::size_t end = start; end < tokens.size() && end - start < max_words; ++end) {
      if (tokens[end].text == kRecordSeparator) break;
      const std::string phrase = join_phrase(tokens, start, end);
      if (normalize_query(phrase).empty() || !seen.insert(normalize_query(phrase)).second) {
        continue;
      }
      for (const LocationResult& r : gazetteer.query(phrase, limit).results) {
        const double d = great_circle_distance(r.coordinates(), truth);
        if (!best || d < *best) best = d;
      }
    }
  }
  return best;
}

}  // namespace geotag
