#include "geotag/scoring.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace geotag {
namespace {

bool uses_weights(ScoringFunction fn) {
  switch (fn) {
    case ScoringFunction::kTotalDistance:
    case ScoringFunction::kInverse:
    case ScoringFunction::kInverseFrequency:
      return false;
    default:
      return true;
  }
}

std::size_t index_of_result(const std::vector<LocationResult>& list,
                            const LocationResult& r) {
  auto it = std::find(list.begin(), list.end(), r);
  if (it == list.end()) throw std::invalid_argument("result not in the term's result list");
  return static_cast<std::size_t>(it - list.begin());
}

}  // namespace

std::string_view to_string(ScoringFunction fn) {
  switch (fn) {
    case ScoringFunction::kTotalDistance: return "total-distance";
    case ScoringFunction::kWeightedDistance: return "weighted-distance";
    case ScoringFunction::kInverse: return "inverse";
    case ScoringFunction::kWeightedInverse: return "weighted-inverse";
    case ScoringFunction::kWeightedNormalizedInverse: return "weighted-normalized-inverse";
    case ScoringFunction::kInverseFrequency: return "inverse-frequency";
    case ScoringFunction::kWeightedInverseFrequency: return "weighted-inverse-frequency";
    case ScoringFunction::kWeightedNormalizedInverseFrequency:
      return "weighted-normalized-inverse-frequency";
  }
  return "unknown";
}

std::optional<ScoringFunction> parse_scoring_function(std::string_view name) {
  for (ScoringFunction fn : kAllScoringFunctions) {
    if (to_string(fn) == name) return fn;
  }
  return std::nullopt;
}

double great_circle_oracle(const LocationResult& a, const LocationResult& b) {
  return great_circle_distance(a.coordinates(), b.coordinates());
}

void CandidateSpace::validate() const {
  std::set<std::pair<std::size_t, std::size_t>> spans;
  for (const Term& t : terms) {
    if (!spans.emplace(t.start, t.end).second) {
      throw std::invalid_argument("duplicate term span in candidate space");
    }
    auto it = results.find(t.phrase);
    if (it == results.end() || it->second.empty()) {
      throw std::invalid_argument("phrase '" + t.phrase + "' has no results");
    }
  }
}

double closeness(const LocationResult& r, std::string_view owner_phrase, const Term& t,
                 const CandidateSpace& space) {
  if (t.phrase == owner_phrase) return 0.0;
  auto it = space.results.find(t.phrase);
  if (it == space.results.end() || it->second.empty()) {
    throw std::invalid_argument("phrase '" + t.phrase + "' has no results");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const LocationResult& other : it->second) {
    best = std::min(best, space.distance_between(r, other));
  }
  return best;
}

ScoringEngine::ScoringEngine(const CandidateSpace& space) : space_(&space) {
  space.validate();
  std::map<std::string, std::size_t> ids;
  std::size_t flat = 0;
  for (const auto& [phrase, list] : space.results) {
    ids.emplace(phrase, phrases_.size());
    phrases_.push_back(phrase);
    results_.push_back(&list);
    offset_.push_back(flat);
    flat += list.size();
    std::vector<std::size_t> all(list.size());
    std::iota(all.begin(), all.end(), 0);
    candidates_.push_back(std::move(all));
  }
  term_phrase_.reserve(space.terms.size());
  for (const Term& t : space.terms) term_phrase_.push_back(ids.at(t.phrase));
}

const std::vector<LocationResult>& ScoringEngine::original_results(std::size_t p) const {
  return *results_[p];
}

void ScoringEngine::collapse(std::size_t p, std::size_t result) {
  candidates_[p] = {result};
}

double ScoringEngine::distance(std::size_t pa, std::size_t ra, std::size_t pb,
                               std::size_t rb) {
  std::uint64_t a = offset_[pa] + ra;
  std::uint64_t b = offset_[pb] + rb;
  if (a > b) std::swap(a, b);
  const std::uint64_t key = (a << 32) | b;
  if (auto it = distance_memo_.find(key); it != distance_memo_.end()) return it->second;
  const double d = space_->distance_between((*results_[pa])[ra], (*results_[pb])[rb]);
  if (!std::isfinite(d) || d < 0.0) {
    throw std::domain_error("distance oracle returned an invalid value");
  }
  distance_memo_.emplace(key, d);
  return d;
}

std::vector<std::vector<double>> ScoringEngine::score_rows(
    std::span<const std::size_t> alive, const Eigen::MatrixXd& weights,
    std::span<const std::size_t> rows, ScoringFunction fn) {
  const auto n_alive = static_cast<Eigen::Index>(alive.size());
  const auto n_phrases = static_cast<Eigen::Index>(phrases_.size());
  if (weights.rows() != n_alive || weights.cols() != n_alive) {
    throw std::invalid_argument("weight table does not match the live term set");
  }

  // Collapse term columns onto phrase columns: summed weights, and the number
  // of terms with nonzero weight.
  Eigen::MatrixXd membership = Eigen::MatrixXd::Zero(n_alive, n_phrases);
  for (Eigen::Index j = 0; j < n_alive; ++j) {
    membership(j, static_cast<Eigen::Index>(term_phrase_[alive[j]])) = 1.0;
  }
  const Eigen::MatrixXd phrase_weight = weights * membership;
  const Eigen::MatrixXd phrase_count =
      (weights.array() != 0.0).cast<double>().matrix() * membership;

  // Closeness of (phrase, candidate) to phrase q over q's current candidates.
  std::unordered_map<std::uint64_t, double> closeness_memo;
  auto close = [&](std::size_t p, std::size_t r, std::size_t q) {
    const std::uint64_t key = (offset_[p] + r) * phrases_.size() + q;
    if (auto it = closeness_memo.find(key); it != closeness_memo.end()) return it->second;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t rq : candidates_[q]) best = std::min(best, distance(p, r, q, rq));
    closeness_memo.emplace(key, best);
    return best;
  };
  auto clamp = [](double c) { return std::max(c, kMinDistanceKm); };

  const bool weighted = uses_weights(fn);
  std::vector<std::vector<double>> out;
  out.reserve(rows.size());
  for (std::size_t k : rows) {
    const auto row = static_cast<Eigen::Index>(k);
    const std::size_t p1 = term_phrase_[alive[k]];
    const auto& cands = candidates_[p1];

    std::vector<std::size_t> others;
    std::vector<double> coef;
    for (std::size_t q = 0; q < phrases_.size(); ++q) {
      if (q == p1) continue;
      const double c = weighted ? phrase_weight(row, static_cast<Eigen::Index>(q))
                                : phrase_count(row, static_cast<Eigen::Index>(q));
      if (c != 0.0) {
        others.push_back(q);
        coef.push_back(c);
      }
    }
    const double same_weight = phrase_weight(row, static_cast<Eigen::Index>(p1));
    const double same_count = phrase_count(row, static_cast<Eigen::Index>(p1));

    // Best clamped closeness of any candidate of p1 to each other phrase.
    std::vector<double> best_clamped;
    if (fn == ScoringFunction::kWeightedNormalizedInverse ||
        fn == ScoringFunction::kWeightedNormalizedInverseFrequency) {
      for (std::size_t q : others) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t r : cands) m = std::min(m, clamp(close(p1, r, q)));
        best_clamped.push_back(m);
      }
    }

    std::vector<double> scores;
    scores.reserve(cands.size());
    for (std::size_t r : cands) {
      double s = 0.0;
      switch (fn) {
        case ScoringFunction::kTotalDistance:
        case ScoringFunction::kWeightedDistance:
          for (std::size_t i = 0; i < others.size(); ++i) s -= coef[i] * close(p1, r, others[i]);
          break;
        case ScoringFunction::kInverse:
        case ScoringFunction::kWeightedInverse:
        case ScoringFunction::kInverseFrequency:
        case ScoringFunction::kWeightedInverseFrequency:
          for (std::size_t i = 0; i < others.size(); ++i) {
            s += coef[i] / clamp(close(p1, r, others[i]));
          }
          if (fn == ScoringFunction::kInverseFrequency) s *= same_count;
          if (fn == ScoringFunction::kWeightedInverseFrequency) s *= same_weight;
          break;
        case ScoringFunction::kWeightedNormalizedInverse:
        case ScoringFunction::kWeightedNormalizedInverseFrequency: {
          double num = 0.0;
          double den = 0.0;
          for (std::size_t i = 0; i < others.size(); ++i) {
            num += coef[i] * best_clamped[i] / clamp(close(p1, r, others[i]));
            den += coef[i];
          }
          s = den > 0.0 ? num / den : 1.0;
          if (fn == ScoringFunction::kWeightedNormalizedInverseFrequency) s *= same_weight;
          break;
        }
      }
      scores.push_back(s);
    }
    out.push_back(std::move(scores));
  }
  return out;
}

double ScoreMatrix::at(std::size_t term, std::size_t result) const {
  for (const ScoreEntry& e : entries) {
    if (e.term == term && e.result == result) return e.value;
  }
  throw std::out_of_range("no score for this term/result pair");
}

namespace {

// Positions of the weight table's terms inside the space.
std::vector<std::size_t> align(const CandidateSpace& space, const WeightTable& weights) {
  std::vector<std::size_t> alive;
  alive.reserve(weights.terms.size());
  for (const Term& t : weights.terms) {
    auto it = std::find(space.terms.begin(), space.terms.end(), t);
    if (it == space.terms.end()) {
      throw std::invalid_argument("weight table term missing from candidate space");
    }
    alive.push_back(static_cast<std::size_t>(it - space.terms.begin()));
  }
  return alive;
}

}  // namespace

ScoreMatrix score_matrix(const CandidateSpace& space, const WeightTable& weights,
                         ScoringFunction fn) {
  ScoringEngine engine(space);
  const auto alive = align(space, weights);
  std::vector<std::size_t> rows(alive.size());
  std::iota(rows.begin(), rows.end(), 0);
  const auto scores = engine.score_rows(alive, weights.w, rows, fn);
  ScoreMatrix m{fn, {}};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& cands = engine.candidates(engine.phrase_of(alive[k]));
    for (std::size_t c = 0; c < cands.size(); ++c) {
      m.entries.push_back({alive[k], cands[c], scores[k][c]});
    }
  }
  return m;
}

double score(const Term& t, const LocationResult& r, const CandidateSpace& space,
             const WeightTable& weights, ScoringFunction fn) {
  ScoringEngine engine(space);
  const auto alive = align(space, weights);
  auto pos = weights.index_of(t);
  if (!pos) throw std::invalid_argument("term not in weight table");
  const std::size_t p = engine.phrase_of(alive[*pos]);
  const std::size_t result = index_of_result(engine.original_results(p), r);
  const std::size_t row = *pos;
  const auto scores = engine.score_rows(alive, weights.w, std::span(&row, 1), fn);
  return scores[0][result];
}

}  // namespace geotag
