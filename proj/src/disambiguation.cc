#include "geotag/disambiguation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geotag/weights.h"

namespace geotag {
namespace {

using Clock = std::chrono::steady_clock;

bool same_score(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Repeated argmax. The score tolerance makes `better` non-transitive, which
// std::sort does not allow.
template <typename T, typename Better>
std::vector<T> select_order(std::vector<T> items, Better better) {
  std::vector<T> out;
  out.reserve(items.size());
  while (!items.empty()) {
    auto top = items.begin();
    for (auto it = items.begin() + 1; it != items.end(); ++it) {
      if (better(*it, *top)) top = it;
    }
    out.push_back(std::move(*top));
    items.erase(top);
  }
  return out;
}

// A scored (term, result) pair with everything the tie-break needs.
struct Contender {
  std::size_t position = 0;  // into the live term list
  std::size_t candidate = 0; // into the phrase's current candidates
  double score = 0.0;
  double importance = 0.0;
  const std::string* phrase = nullptr;
  const std::string* source_id = nullptr;
  const Term* term = nullptr;
};

// Higher score; then the more important result; then the smaller phrase,
// source id and span, so that runs are reproducible.
bool beats(const Contender& a, const Contender& b) {
  if (!same_score(a.score, b.score)) return a.score > b.score;
  if (a.importance != b.importance) return a.importance > b.importance;
  if (*a.phrase != *b.phrase) return *a.phrase < *b.phrase;
  if (*a.source_id != *b.source_id) return *a.source_id < *b.source_id;
  return *a.term < *b.term;
}

class GreedyRun {
 public:
  enum class Mode { kCombined, kConflictsOnly, kResultsOnly };

  GreedyRun(const CandidateSpace& space, ScoringFunction fn, Budget budget)
      : space_(space),
        engine_(space),
        fn_(fn),
        deadline_(Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::max(budget, Budget::zero()))) {
    alive_.resize(space.terms.size());
    std::iota(alive_.begin(), alive_.end(), 0);
  }

  // False when the deadline passed before the loop's condition cleared.
  bool run(Mode mode, int phase_label) {
    for (;;) {
      const std::vector<bool> overlapped = overlap_flags();
      const bool any_overlap =
          std::find(overlapped.begin(), overlapped.end(), true) != overlapped.end();
      const bool any_multi = std::any_of(alive_.begin(), alive_.end(),
                                         [&](std::size_t t) { return multi(t); });
      const bool go = mode == Mode::kCombined        ? (any_multi || any_overlap)
                      : mode == Mode::kConflictsOnly ? any_overlap
                                                     : any_multi;
      if (!go) return true;
      if (Clock::now() >= deadline_) return false;

      std::vector<std::size_t> rows;
      for (std::size_t k = 0; k < alive_.size(); ++k) {
        const bool eligible = mode == Mode::kCombined ? (multi(alive_[k]) || overlapped[k])
                              : mode == Mode::kConflictsOnly ? overlapped[k]
                                                             : multi(alive_[k]);
        if (eligible) rows.push_back(k);
      }
      const auto n = static_cast<Eigen::Index>(alive_.size());
      const Eigen::MatrixXd weights = mode == Mode::kResultsOnly
                                          ? Eigen::MatrixXd::Ones(n, n)
                                          : compute_weights(live_terms()).w;
      const auto scores = engine_.score_rows(alive_, weights, rows, fn_);

      std::optional<Contender> best;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < scores[i].size(); ++c) {
          Contender cand = contender(rows[i], c, scores[i][c]);
          if (!best || beats(cand, *best)) best = cand;
        }
      }

      const std::size_t winner = alive_[best->position];
      const std::size_t p = engine_.phrase_of(winner);
      const std::size_t result = engine_.candidates(p)[best->candidate];
      trace_.push_back({phase_label, space_.terms[winner],
                        engine_.original_results(p)[result], best->score});
      if (mode != Mode::kConflictsOnly) engine_.collapse(p, result);
      drop_overlapping(winner);
      ++iterations_;
    }
  }

  // Settles whatever the loops left open after a cutoff.
  void finalize_cutoff() {
    const std::vector<bool> overlapped = overlap_flags();
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < alive_.size(); ++k) {
      if (overlapped[k]) rows.push_back(k);
    }
    if (!rows.empty()) {
      const Eigen::MatrixXd weights = compute_weights(live_terms()).w;
      const auto scores = engine_.score_rows(alive_, weights, rows, fn_);
      std::vector<Contender> order;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        std::optional<Contender> top;
        for (std::size_t c = 0; c < scores[i].size(); ++c) {
          Contender cand = contender(rows[i], c, scores[i][c]);
          if (!top || beats(cand, *top)) top = cand;
        }
        order.push_back(*top);
      }
      std::vector<std::size_t> keep_terms;
      for (const Contender& c : select_order(std::move(order), beats)) {
        keep_terms.push_back(alive_[c.position]);
      }
      for (std::size_t t : keep_terms) {
        if (std::find(alive_.begin(), alive_.end(), t) != alive_.end()) drop_overlapping(t);
      }
    }
    for (std::size_t t : alive_) {
      const std::size_t p = engine_.phrase_of(t);
      const auto& cands = engine_.candidates(p);
      if (cands.size() <= 1) continue;
      const auto& results = engine_.original_results(p);
      std::size_t pick = *std::min_element(
          cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
            if (results[a].importance != results[b].importance) {
              return results[a].importance > results[b].importance;
            }
            return results[a].source_id < results[b].source_id;
          });
      engine_.collapse(p, pick);
    }
  }

  Assignment finish(bool flagged) {
    Assignment a;
    a.flagged_budget = flagged;
    a.iterations = iterations_;
    a.trace = std::move(trace_);
    for (std::size_t t : alive_) {
      const Term& term = space_.terms[t];
      a.surviving_terms.push_back(term);
      const std::size_t p = engine_.phrase_of(t);
      a.chosen.emplace(term.phrase,
                       engine_.original_results(p)[engine_.candidates(p).front()]);
    }
    std::sort(a.surviving_terms.begin(), a.surviving_terms.end());
    a.ranked = rank_results(a, space_, fn_);
    return a;
  }

 private:
  bool multi(std::size_t term) const {
    return engine_.candidates(engine_.phrase_of(term)).size() > 1;
  }

  std::vector<Term> live_terms() const {
    std::vector<Term> out;
    out.reserve(alive_.size());
    for (std::size_t t : alive_) out.push_back(space_.terms[t]);
    return out;
  }

  std::vector<bool> overlap_flags() const {
    std::vector<bool> flags(alive_.size(), false);
    for (std::size_t i = 0; i < alive_.size(); ++i) {
      for (std::size_t j = i + 1; j < alive_.size(); ++j) {
        if (conflicts(space_.terms[alive_[i]], space_.terms[alive_[j]])) {
          flags[i] = flags[j] = true;
        }
      }
    }
    return flags;
  }

  Contender contender(std::size_t position, std::size_t candidate, double value) const {
    const std::size_t term = alive_[position];
    const std::size_t p = engine_.phrase_of(term);
    const LocationResult& r = engine_.original_results(p)[engine_.candidates(p)[candidate]];
    return Contender{position, candidate, value, r.importance, &engine_.phrase(p),
                     &r.source_id, &space_.terms[term]};
  }

  void drop_overlapping(std::size_t winner) {
    const Term& w = space_.terms[winner];
    std::erase_if(alive_, [&](std::size_t t) { return conflicts(w, space_.terms[t]); });
  }

  const CandidateSpace& space_;
  ScoringEngine engine_;
  ScoringFunction fn_;
  Clock::time_point deadline_;
  std::vector<std::size_t> alive_;
  std::vector<Selection> trace_;
  std::size_t iterations_ = 0;
};

}  // namespace

std::string_view to_string(Phase phase) {
  return phase == Phase::kOne ? "1phase" : "2phase";
}

std::optional<Phase> parse_phase(std::string_view name) {
  if (name == "1phase") return Phase::kOne;
  if (name == "2phase") return Phase::kTwo;
  return std::nullopt;
}

std::string Variant::name() const {
  return std::string(to_string(function)) + "/" + std::string(to_string(phase));
}

std::vector<Variant> all_variants() {
  std::vector<Variant> out;
  for (Phase phase : {Phase::kOne, Phase::kTwo}) {
    for (ScoringFunction fn : kAllScoringFunctions) out.push_back({fn, phase});
  }
  return out;
}

Assignment disambiguate_1phase(const CandidateSpace& space, ScoringFunction fn,
                               Budget budget) {
  GreedyRun run(space, fn, budget);
  const bool done = run.run(GreedyRun::Mode::kCombined, 1);
  if (!done) run.finalize_cutoff();
  return run.finish(!done);
}

Assignment disambiguate_2phase(const CandidateSpace& space, ScoringFunction fn,
                               Budget budget) {
  GreedyRun run(space, fn, budget);
  const bool done = run.run(GreedyRun::Mode::kConflictsOnly, 1) &&
                    run.run(GreedyRun::Mode::kResultsOnly, 2);
  if (!done) run.finalize_cutoff();
  return run.finish(!done);
}

Assignment disambiguate(const CandidateSpace& space, Variant variant, Budget budget) {
  return variant.phase == Phase::kOne ? disambiguate_1phase(space, variant.function, budget)
                                      : disambiguate_2phase(space, variant.function, budget);
}

std::vector<GeoTag> rank_results(const Assignment& assignment,
                                 const CandidateSpace& space, ScoringFunction fn) {
  if (assignment.surviving_terms.empty()) return {};
  CandidateSpace settled;
  settled.terms = assignment.surviving_terms;
  std::sort(settled.terms.begin(), settled.terms.end());
  settled.distance = space.distance;
  for (const auto& [phrase, result] : assignment.chosen) settled.results[phrase] = {result};

  ScoringEngine engine(settled);
  std::vector<std::size_t> alive(settled.terms.size());
  std::iota(alive.begin(), alive.end(), 0);
  const auto n = static_cast<Eigen::Index>(alive.size());
  const auto scores = engine.score_rows(alive, Eigen::MatrixXd::Ones(n, n), alive, fn);

  std::vector<GeoTag> tags;
  std::map<std::string, std::size_t> slot;
  for (std::size_t k = 0; k < settled.terms.size(); ++k) {
    const Term& t = settled.terms[k];
    auto [it, inserted] = slot.emplace(t.phrase, tags.size());
    if (!inserted) {
      ++tags[it->second].occurrences;
      continue;
    }
    tags.push_back(GeoTag{t.phrase, t.start, t.end, 1, assignment.chosen.at(t.phrase),
                          scores[k][0], 0});
  }
  tags = select_order(std::move(tags), [](const GeoTag& a, const GeoTag& b) {
    if (!same_score(a.score, b.score)) return a.score > b.score;
    if (a.result.importance != b.result.importance) {
      return a.result.importance > b.result.importance;
    }
    return a.phrase < b.phrase;
  });
  for (std::size_t i = 0; i < tags.size(); ++i) tags[i].rank = i + 1;
  return tags;
}

}  // namespace geotag
