#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "geotag/disambiguation.h"

using namespace geotag;

namespace {

void check_valid(const CandidateSpace& s, const Assignment& a) {
  for (std::size_t i = 0; i < a.surviving_terms.size(); ++i) {
    for (std::size_t j = i + 1; j < a.surviving_terms.size(); ++j) {
      CHECK_FALSE(conflicts(a.surviving_terms[i], a.surviving_terms[j]));
    }
  }
  for (const auto& [phrase, result] : a.chosen) {
    const auto& list = s.results.at(phrase);
    CHECK(std::find(list.begin(), list.end(), result) != list.end());
  }
  for (const Term& t : a.surviving_terms) CHECK(a.chosen.contains(t.phrase));
  for (std::size_t i = 0; i < a.ranked.size(); ++i) CHECK(a.ranked[i].rank == i + 1);
}

}  // namespace

TEST_CASE("variant names and the default") {
  Variant v;
  CHECK(v.name() == "weighted-inverse-frequency/1phase");
  CHECK(all_variants().size() == 16);
  CHECK(all_variants().front().phase == Phase::kOne);
  CHECK(parse_phase("2phase") == Phase::kTwo);
  CHECK_FALSE(parse_phase("3phase"));
}

TEST_CASE("the three-city table resolves to Ontario") {
  auto s = fixtures::three_cities();
  for (Phase phase : {Phase::kOne, Phase::kTwo}) {
    auto a = disambiguate(s, {ScoringFunction::kTotalDistance, phase});
    CHECK(a.chosen.at("Waterloo").source_id == "waterloo-on");
    CHECK(a.chosen.at("London").source_id == "london-on");
    CHECK(a.chosen.at("Guelph").source_id == "guelph-on");
    REQUIRE_FALSE(a.trace.empty());
    CHECK(a.trace[0].result.source_id == "waterloo-on");
    CHECK(a.trace[0].score == -103);
    CHECK_FALSE(a.flagged_budget);
  }
}

TEST_CASE("the mall table picks the Waterloo mall first") {
  auto s = fixtures::mall_in_waterloo();
  auto a = disambiguate_1phase(s, ScoringFunction::kWeightedDistance);
  REQUIRE(a.trace.size() == 2);
  CHECK(a.trace[0].term == Term{0, 1, ""});
  CHECK(a.trace[0].result.source_id == "cm-waterloo");
  CHECK(a.trace[0].score == -4);
  CHECK(a.chosen.at("Waterloo").source_id == "waterloo-on");
  CHECK(a.surviving_terms.size() == 2);
  CHECK_FALSE(a.chosen.contains("Conestoga"));
  check_valid(s, a);
}

TEST_CASE("two phases settle overlaps before results") {
  auto s = fixtures::mall_in_waterloo();
  auto a = disambiguate_2phase(s, ScoringFunction::kWeightedDistance);
  REQUIRE_FALSE(a.trace.empty());
  CHECK(a.trace[0].phase == 1);
  CHECK(a.trace[0].term == Term{0, 1, ""});
  CHECK(a.trace.back().phase == 2);
  CHECK(a.chosen.at("Waterloo").source_id == "waterloo-on");
  CHECK(a.chosen.at("Conestoga Mall").source_id == "cm-waterloo");
  check_valid(s, a);
}

TEST_CASE("a zero budget still yields a valid flagged assignment") {
  auto s = fixtures::mall_in_waterloo();
  for (Phase phase : {Phase::kOne, Phase::kTwo}) {
    auto a = disambiguate(s, {ScoringFunction::kWeightedInverse, phase}, Budget::zero());
    CHECK(a.flagged_budget);
    CHECK(a.iterations == 0);
    CHECK_FALSE(a.surviving_terms.empty());
    check_valid(s, a);
    // Leftover phrases fall back to their most important result.
    if (a.chosen.contains("Mall")) CHECK(a.chosen.at("Mall").source_id == "mall-dc");
  }
}

TEST_CASE("equal scores go to the more important result") {
  CandidateSpace s;
  s.terms = {Term{0, 0, "Alpha"}, Term{2, 2, "Beta"}};
  s.results["Alpha"] = {fixtures::place("a", "Alpha", 10, 10, 0.4)};
  s.results["Beta"] = {fixtures::place("b", "Beta", 10, 10, 0.6)};
  Assignment a = disambiguate_1phase(s, ScoringFunction::kInverse);
  REQUIRE(a.ranked.size() == 2);
  CHECK(a.ranked[0].phrase == "Beta");
  CHECK(a.ranked[0].score == a.ranked[1].score);
}

TEST_CASE("repeated phrases give one tag with an occurrence count") {
  CandidateSpace s;
  s.terms = {Term{0, 0, "Waterloo"}, Term{4, 4, "Waterloo"}, Term{6, 6, "Guelph"}};
  s.results["Waterloo"] = {fixtures::place("w", "Waterloo", 43.46, -80.52)};
  s.results["Guelph"] = {fixtures::place("g", "Guelph", 43.54, -80.25)};
  auto a = disambiguate_1phase(s, ScoringFunction::kInverse);
  REQUIRE(a.ranked.size() == 2);
  CHECK(a.ranked[0].phrase == "Guelph");  // sees Waterloo twice
  CHECK(a.ranked[1].occurrences == 2);
  CHECK(a.ranked[1].start == 0);
}

TEST_CASE("random spaces terminate with conflict-free outputs") {
  std::mt19937_64 rng(23);
  for (int round = 0; round < 120; ++round) {
    auto s = fixtures::random_space(rng);
    if (s.terms.empty()) continue;
    for (const Variant& v : all_variants()) {
      auto a = disambiguate(s, v);
      CHECK(a.iterations <= s.results.size() + s.terms.size());
      CHECK_FALSE(a.flagged_budget);
      check_valid(s, a);
      // Deterministic.
      auto b = disambiguate(s, v);
      CHECK(b.chosen == a.chosen);
      CHECK(b.surviving_terms == a.surviving_terms);
    }
  }
}
