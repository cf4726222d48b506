#pragma once

// Shared test fixtures: hand-tagged sentences, the small worked-example
// gazetteers and distance tables, and a seeded random document generator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "geotag/document.h"
#include "geotag/gazetteer.h"
#include "geotag/scoring.h"
#include "geotag/text_model.h"

namespace fixtures {

using geotag::CandidateSpace;
using geotag::LocationResult;
using geotag::TaggedToken;
using geotag::Term;

// (text, penn tag, ner tag)
using Tagged = std::tuple<const char*, const char*, const char*>;

inline std::vector<TaggedToken> tokens(std::initializer_list<Tagged> words) {
  std::vector<TaggedToken> out;
  for (const auto& [text, pos, ner] : words) {
    out.push_back(TaggedToken{out.size(), text, geotag::pos_group_from_tag(pos),
                              geotag::ner_tag_from_string(ner)});
  }
  return out;
}

// The classified-ad sentence with a misspelling and odd capitalization.
inline std::vector<TaggedToken> rvh_sentence() {
  return tokens({{"A", "DT", "O"},
                 {"beautifull", "NN", "O"},
                 {"clean", "JJ", "O"},
                 {"house", "NN", "O"},
                 {"for", "IN", "O"},
                 {"rent", "NN", "O"},
                 {",", ",", "O"},
                 {"Walking", "VBG", "O"},
                 {"distance", "NN", "O"},
                 {"to", "TO", "O"},
                 {"RVH", "NN", "O"},
                 {"and", "CC", "O"},
                 {"Georgian", "JJ", "O"},
                 {"college", "NN", "O"}});
}

inline LocationResult place(std::string id, std::string name, double lat, double lon,
                            double importance = geotag::kDefaultImportance) {
  LocationResult r;
  r.source_id = std::move(id);
  r.display_name = std::move(name);
  r.latitude = lat;
  r.longitude = lon;
  r.importance = importance;
  return r;
}

inline geotag::GazetteerEntry entry(LocationResult r, std::string name,
                                    std::vector<std::string> alts = {}) {
  return geotag::GazetteerEntry{std::move(r), std::move(name), std::move(alts)};
}

// Three-results-per-query index for the classified-ad sentence.
inline geotag::LocalIndex rvh_index() {
  return geotag::LocalIndex({
      entry(place("rvh", "Royal Victoria Regional Health Centre, Barrie", 44.41, -79.66, 0.4),
            "RVH"),
      entry(place("gc-barrie", "Georgian College, Barrie", 44.41, -79.67, 0.5),
            "Georgian college"),
      entry(place("gc-collingwood", "Georgian College, Collingwood", 44.48, -80.19, 0.45),
            "Georgian college"),
      entry(place("college-toronto", "College, Toronto", 43.66, -79.38, 0.6), "college"),
      entry(place("college-alaska", "College, Alaska", 64.86, -147.80, 0.55), "college"),
      entry(place("college-laguna", "College, Los Banos", 14.16, 121.24, 0.5), "college"),
  });
}

// Distance oracle over an explicit table keyed by unordered source-id pairs.
// Unknown pairs throw, so a test fails if scoring asks for a distance the
// table leaves blank.
class TableOracle {
 public:
  TableOracle(std::initializer_list<std::tuple<const char*, const char*, double>> rows) {
    for (const auto& [a, b, d] : rows) table_[key(a, b)] = d;
  }
  double operator()(const LocationResult& a, const LocationResult& b) const {
    auto it = table_.find(key(a.source_id, b.source_id));
    if (it == table_.end()) {
      throw std::logic_error("no distance for " + a.source_id + " / " + b.source_id);
    }
    return it->second;
  }

 private:
  static std::pair<std::string, std::string> key(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    return {a, b};
  }
  std::map<std::pair<std::string, std::string>, double> table_;
};

// "Waterloo lies between London and Guelph": two results per phrase and the
// integer distances of the worked example.
inline CandidateSpace three_cities() {
  CandidateSpace s;
  s.terms = {Term{0, 0, "Waterloo"}, Term{3, 3, "London"}, Term{5, 5, "Guelph"}};
  s.results["Waterloo"] = {place("waterloo-on", "Waterloo, Ontario", 43.4643, -80.5204, 0.7),
                           place("waterloo-be", "Waterloo, Belgium", 50.7147, 4.3991, 0.6)};
  s.results["London"] = {place("london-uk", "London, United Kingdom", 51.5074, -0.1278, 0.9),
                         place("london-on", "London, Ontario", 42.9849, -81.2453, 0.6)};
  s.results["Guelph"] = {place("guelph-on", "Guelph, Ontario", 43.5448, -80.2482, 0.6),
                         place("guelph-nd", "Guelph, North Dakota", 46.0236, -98.0451, 0.3)};
  s.distance = TableOracle{
      {"waterloo-on", "london-uk", 5797}, {"waterloo-on", "london-on", 79},
      {"waterloo-on", "guelph-on", 24},   {"waterloo-on", "guelph-nd", 1424},
      {"waterloo-be", "london-uk", 328},  {"waterloo-be", "london-on", 6198},
      {"waterloo-be", "guelph-on", 6096}, {"waterloo-be", "guelph-nd", 6956},
      {"london-uk", "guelph-on", 5774},   {"london-uk", "guelph-nd", 6655},
      {"london-on", "guelph-on", 102},    {"london-on", "guelph-nd", 1386},
  };
  return s;
}

inline std::vector<TaggedToken> three_cities_sentence() {
  return tokens({{"Waterloo", "NNP", "LOCATION"},
                 {"lies", "VBZ", "O"},
                 {"between", "IN", "O"},
                 {"London", "NNP", "LOCATION"},
                 {"and", "CC", "O"},
                 {"Guelph", "NNP", "LOCATION"}});
}

// "Conestoga Mall in Waterloo": one overlapping word pair and the pairwise
// distances of the second worked example.
inline CandidateSpace mall_in_waterloo() {
  CandidateSpace s;
  s.terms = {Term{0, 0, "Conestoga"}, Term{0, 1, "Conestoga Mall"}, Term{1, 1, "Mall"},
             Term{3, 3, "Waterloo"}};
  s.results["Waterloo"] = {place("waterloo-on", "Waterloo, Ontario", 43.4643, -80.5204, 0.7),
                           place("waterloo-be", "Waterloo, Belgium", 50.7147, 4.3991, 0.6)};
  s.results["Conestoga Mall"] = {
      place("cm-waterloo", "Conestoga Mall, Waterloo", 43.4977, -80.5275, 0.4),
      place("cm-nebraska", "Conestoga Mall, Grand Island", 40.9264, -98.3420, 0.3)};
  s.results["Conestoga"] = {place("conestoga-pa", "Conestoga, Pennsylvania", 39.9415, -76.3467, 0.5),
                            place("conestoga-ca", "Conestoga, California", 37.9, -122.3, 0.4)};
  s.results["Mall"] = {place("mall-dc", "National Mall, Washington", 38.8896, -77.0230, 0.7),
                       place("mall-uk", "The Mall, London", 51.5045, -0.1340, 0.6)};
  s.distance = TableOracle{
      {"waterloo-on", "cm-waterloo", 4},     {"waterloo-on", "cm-nebraska", 1495},
      {"waterloo-on", "conestoga-pa", 523},  {"waterloo-on", "conestoga-ca", 3264},
      {"waterloo-on", "mall-dc", 587},       {"waterloo-on", "mall-uk", 5797},
      {"waterloo-be", "cm-waterloo", 6117},  {"waterloo-be", "cm-nebraska", 7376},
      {"waterloo-be", "conestoga-pa", 6105}, {"waterloo-be", "conestoga-ca", 8974},
      {"waterloo-be", "mall-dc", 6225},      {"waterloo-be", "mall-uk", 328},
      {"conestoga-pa", "mall-dc", 130},      {"conestoga-pa", "mall-uk", 5778},
      {"conestoga-ca", "mall-dc", 3541},     {"conestoga-ca", "mall-uk", 8681},
  };
  return s;
}

// Index of a term by span within a space.
inline std::size_t term_index(const CandidateSpace& s, std::size_t start, std::size_t end) {
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    if (s.terms[i].start == start && s.terms[i].end == end) return i;
  }
  throw std::out_of_range("no such term");
}

// Random spans over a short word sequence with pairwise distinct spans.
inline std::vector<Term> random_terms(std::mt19937_64& rng, std::size_t words,
                                      std::size_t count, std::size_t max_len = 3) {
  std::uniform_int_distribution<std::size_t> pos(0, words - 1);
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::set<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t tries = 0; spans.size() < count && tries < count * 20; ++tries) {
    const std::size_t s = pos(rng);
    const std::size_t e = std::min(words - 1, s + len(rng) - 1);
    spans.emplace(s, e);
  }
  std::vector<Term> out;
  for (const auto& [s, e] : spans) {
    out.push_back(Term{s, e, "w" + std::to_string(s) + "_" + std::to_string(e)});
  }
  return out;
}

// A random candidate space: up to 10 phrases with up to 10 results each,
// terms scattered over a short text so that some of them overlap.
inline CandidateSpace random_space(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> phrase_count(1, 10);
  std::uniform_int_distribution<std::size_t> result_count(1, 10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);

  const std::size_t n_phrases = phrase_count(rng);
  const std::size_t words = std::uniform_int_distribution<std::size_t>(1, 14)(rng);
  std::vector<Term> terms = random_terms(rng, words, std::min<std::size_t>(words * 2, 14));

  CandidateSpace s;
  std::uniform_int_distribution<std::size_t> pick(0, n_phrases - 1);
  for (Term& t : terms) t.phrase = "p" + std::to_string(pick(rng));
  for (const Term& t : terms) {
    if (s.results.contains(t.phrase)) continue;
    std::vector<LocationResult> list;
    const std::size_t n = result_count(rng);
    // Cluster some results so that distances are not all huge.
    const double base_lat = std::asin(2 * unit(rng) - 1) * 180.0 / 3.141592653589793;
    const double base_lon = lon(rng);
    for (std::size_t r = 0; r < n; ++r) {
      const bool near = unit(rng) < 0.3;
      const double lat = near ? std::clamp(base_lat + unit(rng), -90.0, 90.0)
                              : std::asin(2 * unit(rng) - 1) * 180.0 / 3.141592653589793;
      const double lo = near ? base_lon : lon(rng);
      list.push_back(place(t.phrase + "#" + std::to_string(r), t.phrase, lat, lo,
                           std::round(unit(rng) * 4) / 4));
    }
    geotag::sort_by_importance(list);
    s.results[t.phrase] = std::move(list);
  }
  s.terms = std::move(terms);
  return s;
}

}  // namespace fixtures
