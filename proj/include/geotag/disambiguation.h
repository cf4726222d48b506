#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geotag/gazetteer.h"
#include "geotag/scoring.h"
#include "geotag/text_model.h"

namespace geotag {

enum class Phase { kOne, kTwo };

std::string_view to_string(Phase phase);  // "1phase" / "2phase"
std::optional<Phase> parse_phase(std::string_view name);

struct Variant {
  ScoringFunction function = ScoringFunction::kWeightedInverseFrequency;
  Phase phase = Phase::kOne;

  std::string name() const;  // e.g. "weighted-inverse-frequency/1phase"
  friend bool operator==(const Variant&, const Variant&) = default;
};

// The eight scoring functions under both loops, 1-phase first.
std::vector<Variant> all_variants();

using Budget = std::chrono::duration<double>;
inline constexpr Budget kDefaultBudget{100.0};

// One location tag in the final ranking. A phrase that occurs several times
// yields one tag; `start`/`end` give its first occurrence.
struct GeoTag {
  std::string phrase;
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t occurrences = 1;
  LocationResult result;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

// One greedy step: the (term, result) pair that won the argmax.
struct Selection {
  int phase = 1;
  Term term;
  LocationResult result;
  double score = 0.0;
};

struct Assignment {
  std::map<std::string, LocationResult> chosen;  // one result per surviving phrase
  std::vector<Term> surviving_terms;             // pairwise non-conflicting
  std::vector<GeoTag> ranked;                    // score descending
  std::vector<Selection> trace;
  std::size_t iterations = 0;
  bool flagged_budget = false;  // the loop was cut off and finalized early
};

// Single greedy loop: pick the best-scoring (term, result) among terms that
// still have several results or still overlap another term, fix the phrase
// to that result, drop every term overlapping the winner, and repeat.
//
// When the budget runs out, leftover overlaps are settled greedily by each
// term's best score and leftover phrases take their most important result.
Assignment disambiguate_1phase(const CandidateSpace& space, ScoringFunction fn,
                               Budget budget = kDefaultBudget);

// First settles every overlap without fixing results, then fixes results
// with all weights equal to 1.
Assignment disambiguate_2phase(const CandidateSpace& space, ScoringFunction fn,
                               Budget budget = kDefaultBudget);

Assignment disambiguate(const CandidateSpace& space, Variant variant,
                        Budget budget = kDefaultBudget);

// Recomputes scores with one result per phrase and unit weights and sorts
// descending; ties go to the more important result, then the smaller phrase.
std::vector<GeoTag> rank_results(const Assignment& assignment,
                                 const CandidateSpace& space, ScoringFunction fn);

}  // namespace geotag
