#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "geotag/gazetteer.h"
#include "geotag/text_model.h"
#include "geotag/weights.h"

namespace geotag {

enum class ScoringFunction {
  kTotalDistance,
  kWeightedDistance,
  kInverse,
  kWeightedInverse,
  kWeightedNormalizedInverse,
  kInverseFrequency,
  kWeightedInverseFrequency,
  kWeightedNormalizedInverseFrequency,
};

inline constexpr std::array<ScoringFunction, 8> kAllScoringFunctions = {
    ScoringFunction::kTotalDistance,
    ScoringFunction::kWeightedDistance,
    ScoringFunction::kInverse,
    ScoringFunction::kWeightedInverse,
    ScoringFunction::kWeightedNormalizedInverse,
    ScoringFunction::kInverseFrequency,
    ScoringFunction::kWeightedInverseFrequency,
    ScoringFunction::kWeightedNormalizedInverseFrequency,
};

// CLI names: total-distance, weighted-distance, inverse, weighted-inverse,
// weighted-normalized-inverse, inverse-frequency, weighted-inverse-frequency,
// weighted-normalized-inverse-frequency.
std::string_view to_string(ScoringFunction fn);
std::optional<ScoringFunction> parse_scoring_function(std::string_view name);

// Floor applied to every closeness that ends up in a denominator (1 metre).
inline constexpr double kMinDistanceKm = 1e-3;

using DistanceOracle =
    std::function<double(const LocationResult&, const LocationResult&)>;

// Spherical great-circle distance between the two results' coordinates.
double great_circle_oracle(const LocationResult& a, const LocationResult& b);

// Terms of one document together with the candidate results of each phrase.
// Terms sharing a phrase share its result list.
struct CandidateSpace {
  std::vector<Term> terms;
  std::map<std::string, std::vector<LocationResult>> results;
  DistanceOracle distance;  // empty means great_circle_oracle

  // Every term's phrase has a nonempty result list and spans are distinct.
  // Throws std::invalid_argument.
  void validate() const;

  double distance_between(const LocationResult& a, const LocationResult& b) const {
    return distance ? distance(a, b) : great_circle_oracle(a, b);
  }
};

// Shortest distance from `r` to any result of `t`'s phrase; 0 when that phrase
// is `owner_phrase`, the phrase `r` belongs to.
double closeness(const LocationResult& r, std::string_view owner_phrase, const Term& t,
                 const CandidateSpace& space);

// Score of result `r` for term `t` with every phrase's full result list.
// `weights` must cover the space's terms.
double score(const Term& t, const LocationResult& r, const CandidateSpace& space,
             const WeightTable& weights, ScoringFunction fn);

struct ScoreEntry {
  std::size_t term = 0;    // index into CandidateSpace::terms
  std::size_t result = 0;  // index into the phrase's result list
  double value = 0.0;
};

struct ScoreMatrix {
  ScoringFunction function = ScoringFunction::kTotalDistance;
  std::vector<ScoreEntry> entries;

  // Throws std::out_of_range for a missing pair.
  double at(std::size_t term, std::size_t result) const;
};

// Scores of every (term, result) pair in the space.
ScoreMatrix score_matrix(const CandidateSpace& space, const WeightTable& weights,
                         ScoringFunction fn);

// Working state shared by the greedy loops: phrase table, the current
// candidate list of each phrase (a shrinking subset of its original results),
// and a memo of pairwise distances.
class ScoringEngine {
 public:
  explicit ScoringEngine(const CandidateSpace& space);

  const CandidateSpace& space() const { return *space_; }
  std::size_t phrase_count() const { return phrases_.size(); }
  const std::string& phrase(std::size_t p) const { return phrases_[p]; }
  std::size_t phrase_of(std::size_t term) const { return term_phrase_[term]; }

  const std::vector<LocationResult>& original_results(std::size_t p) const;
  // Indices into original_results(p) still under consideration.
  const std::vector<std::size_t>& candidates(std::size_t p) const { return candidates_[p]; }
  void collapse(std::size_t p, std::size_t result);

  double distance(std::size_t pa, std::size_t ra, std::size_t pb, std::size_t rb);

  // Scores the current candidates of `alive[k]` for every k in `rows`.
  // `weights` is indexed like `alive`. out[i][c] belongs to rows[i] and
  // candidates(phrase_of(alive[rows[i]]))[c].
  std::vector<std::vector<double>> score_rows(std::span<const std::size_t> alive,
                                              const Eigen::MatrixXd& weights,
                                              std::span<const std::size_t> rows,
                                              ScoringFunction fn);

 private:
  const CandidateSpace* space_;
  std::vector<std::string> phrases_;
  std::vector<const std::vector<LocationResult>*> results_;
  std::vector<std::size_t> term_phrase_;
  std::vector<std::size_t> offset_;  // flat result index of each phrase's first result
  std::vector<std::vector<std::size_t>> candidates_;
  std::unordered_map<std::uint64_t, double> distance_memo_;
};

}  // namespace geotag
