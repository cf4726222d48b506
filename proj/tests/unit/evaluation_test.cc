#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "geotag/evaluation.h"

using namespace geotag;

namespace {

GeoTag tag_at(double lat, double lon, std::size_t rank) {
  GeoTag t;
  t.result = fixtures::place("t" + std::to_string(rank), "", lat, lon);
  t.rank = rank;
  return t;
}

EvalRecord record(const std::string& id, std::optional<double> top1, Variant v = {},
                  std::optional<std::string> type = std::nullopt) {
  EvalRecord r;
  r.doc_id = id;
  r.top1_error_km = top1;
  r.top5_error_km = top1;
  r.variant = v;
  r.article_type = std::move(type);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

LocalIndex three_city_index() {
  auto s = fixtures::three_cities();
  std::vector<GazetteerEntry> entries;
  for (const auto& [phrase, list] : s.results) {
    for (const auto& r : list) entries.push_back(fixtures::entry(r, phrase));
  }
  return LocalIndex(std::move(entries));
}

}  // namespace

TEST_CASE("the classified ad lands in Barrie under the unnormalized functions") {
  auto index = fixtures::rvh_index();
  auto doc = fixtures::rvh_sentence();
  for (ScoringFunction fn : kAllScoringFunctions) {
    if (fn == ScoringFunction::kWeightedNormalizedInverse ||
        fn == ScoringFunction::kWeightedNormalizedInverseFrequency) {
      continue;
    }
    for (Phase phase : {Phase::kOne, Phase::kTwo}) {
      GeolocateOptions o;
      o.variant = {fn, phase};
      auto out = geolocate(doc, index, o);
      CAPTURE(o.variant.name());
      CHECK(out.mode == ExtractionMode::kAfterPrepositions);
      CHECK(out.phrases_queried == 3);
      REQUIRE(out.tags.size() == 2);
      std::vector<std::string> phrases{out.tags[0].phrase, out.tags[1].phrase};
      std::sort(phrases.begin(), phrases.end());
      CHECK(phrases == std::vector<std::string>{"Georgian college", "RVH"});
      for (const GeoTag& t : out.tags) {
        CHECK(great_circle_distance(t.result.coordinates(), Coordinates{44.41, -79.66}) < 2.0);
      }
    }
  }
}

TEST_CASE("normalized functions tie at one on the classified ad") {
  // Toronto is the nearest "college" to RVH and the Barrie campus the
  // nearest "Georgian college", so both score 1 and importance decides.
  auto index = fixtures::rvh_index();
  GeolocateOptions o;
  o.variant = {ScoringFunction::kWeightedNormalizedInverse, Phase::kOne};
  auto out = geolocate(fixtures::rvh_sentence(), index, o);
  REQUIRE(out.tags.size() == 2);
  for (const GeoTag& t : out.tags) CHECK(t.score == doctest::Approx(1.0));
  CHECK(out.tags[0].phrase == "college");
  CHECK(out.tags[0].result.source_id == "college-toronto");
}

TEST_CASE("three cities resolve to Ontario end to end") {
  auto index = three_city_index();
  auto out = geolocate(fixtures::three_cities_sentence(), index);
  CHECK(out.mode == ExtractionMode::kNerLocations);
  REQUIRE(out.tags.size() == 3);
  for (const GeoTag& t : out.tags) CHECK(t.result.source_id.ends_with("-on"));
}

TEST_CASE("nothing to extract gives no tags") {
  auto index = fixtures::rvh_index();
  auto out = geolocate(fixtures::tokens({{"Run", "VB", "O"}, {"fast", "RB", "O"}}), index);
  CHECK(out.tags.empty());
  CHECK(out.phrases_queried == 0);
}

TEST_CASE("phrases without results are dropped") {
  auto index = fixtures::rvh_index();
  auto doc = fixtures::tokens({{"near", "IN", "O"}, {"Nowhere", "NNP", "O"},
                               {"and", "CC", "O"}, {"RVH", "NNP", "O"}});
  auto out = geolocate(doc, index);
  CHECK(out.phrases_queried == 2);
  CHECK(out.phrases_matched == 1);
  REQUIRE(out.tags.size() == 1);
  CHECK(out.tags[0].phrase == "RVH");
}

TEST_CASE("top-k error") {
  std::vector<GeoTag> tags{tag_at(0, 0, 1), tag_at(10, 10, 2), tag_at(20, 20, 3)};
  CHECK(top_k_error(tags, Coordinates{0, 1}, 1) ==
        doctest::Approx(great_circle_distance(0.0, 0.0, 0.0, 1.0)));
  CHECK(top_k_error(tags, Coordinates{20, 20}, 5) == 0.0);
  CHECK(top_k_error(tags, Coordinates{20, 20}, 2) > 0.0);
  CHECK_FALSE(top_k_error({}, Coordinates{0, 0}, 1));
}

TEST_CASE("top-5 error never exceeds top-1 error on random documents") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180);
  for (int i = 0; i < 100; ++i) {
    auto s = fixtures::random_space(rng);
    if (s.terms.empty()) continue;
    auto a = disambiguate(s, Variant{});
    const Coordinates truth{lat(rng), lon(rng)};
    auto e1 = top_k_error(a.ranked, truth, 1);
    auto e5 = top_k_error(a.ranked, truth, 5);
    REQUIRE(e1.has_value() == e5.has_value());
    if (e1) CHECK(*e5 <= *e1);
  }
}

TEST_CASE("nearest-rank percentiles") {
  std::vector<double> one{42.0};
  for (double p : {1.0, 10.0, 50.0, 100.0}) CHECK(nearest_rank(one, p) == 42.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  CHECK(nearest_rank(hundred, 50) == 50);
  CHECK(nearest_rank(hundred, 10) == 10);
  CHECK(nearest_rank(hundred, 0.5) == 1);
  CHECK(nearest_rank(hundred, 100) == 100);
  std::vector<double> four{1, 2, 3, 4};
  CHECK(nearest_rank(four, 25) == 1);
  CHECK(nearest_rank(four, 26) == 2);
  CHECK_THROWS(nearest_rank(four, 0));
}

TEST_CASE("percentile report rows, columns and shuffling") {
  std::vector<EvalRecord> records;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> err(0, 5000);
  for (const Variant& v : all_variants()) {
    for (int d = 0; d < 25; ++d) {
      std::optional<double> e;
      if (d % 7 != 0) e = err(rng);
      records.push_back(record("d" + std::to_string(d), e, v, d % 2 ? "city" : "building"));
    }
  }
  const std::vector<double> ps{10, 25, 50};
  auto table = percentile_report(records, ps);
  REQUIRE(table.rows.size() == 16);
  for (const auto& row : table.rows) {
    CHECK(row.values.size() == 3);
    CHECK(row.documents == 25);
    CHECK(row.located == 21);
    CHECK(std::is_sorted(row.values.begin(), row.values.end()));
  }
  auto shuffled = records;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto again = percentile_report(shuffled, ps);
  std::map<std::string, std::vector<double>> a, b;
  for (const auto& r : table.rows) a[r.variant] = r.values;
  for (const auto& r : again.rows) b[r.variant] = r.values;
  CHECK(a == b);

  auto typed = percentile_report(records, ps, ErrorColumn::kTop1, true);
  CHECK(typed.rows.size() == 32);
  std::ostringstream csv;
  write_percentile_csv(csv, typed);
  auto lines = lines_of(csv.str());
  CHECK(lines[0] == "variant,article_type,documents,located,p10,p25,p50");
  CHECK(lines.size() == 33);
}

TEST_CASE("untagged documents count as unbounded error") {
  std::vector<EvalRecord> records{record("a", 5.0), record("b", std::nullopt)};
  const std::vector<double> ps{50, 100};
  auto table = percentile_report(records, ps);
  CHECK(table.rows[0].values[0] == 5.0);
  CHECK(std::isinf(table.rows[0].values[1]));
  std::ostringstream csv;
  write_percentile_csv(csv, table);
  CHECK(lines_of(csv.str())[1] == "weighted-inverse-frequency/1phase,2,1,5.000000,inf");
}

TEST_CASE("cumulative curve") {
  std::vector<EvalRecord> records{record("a", 30.0), record("b", 10.0), record("c", std::nullopt),
                                  record("d", 20.0)};
  auto curve = cumulative_curve(records);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].error_km == 10.0);
  CHECK(curve[0].fraction == 0.25);
  CHECK(curve[2].fraction == 0.75);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  auto lines = lines_of(csv.str());
  CHECK(lines[0] == "variant,fraction,error_km");
  CHECK(lines[1] == "weighted-inverse-frequency/1phase,0.250000,10.000000");
}

TEST_CASE("records need true coordinates") {
  TaggedDocument doc;
  doc.id = "x";
  CHECK_THROWS_AS(make_record(doc, GeolocateOutcome{}, Variant{}), std::invalid_argument);
  doc.truth = Coordinates{1, 1};
  auto r = make_record(doc, GeolocateOutcome{}, Variant{});
  CHECK_FALSE(r.top1_error_km);
  CHECK(record_to_json(r).find("\"top1_error_km\":null") != std::string::npos);
}

TEST_CASE("mention scan") {
  LocalIndex index({
      fixtures::entry(fixtures::place("w", "Waterloo, Ontario", 43.4643, -80.5204), "Waterloo"),
      fixtures::entry(fixtures::place("far", "Kitchener far away", 10, 10), "Kitchener"),
      fixtures::entry(fixtures::place("kw", "Kitchener-Waterloo", 43.45, -80.49), "Twin Cities",
                      {"kitchener waterloo region"}),
  });
  const Coordinates truth{43.4643, -80.5204};
  auto doc = fixtures::tokens({{"in", "IN", "O"}, {"waterloo", "NN", "O"}});
  CHECK(scan_mentions(doc, index, truth) == doctest::Approx(0.0));
  CHECK_FALSE(scan_mentions(fixtures::tokens({{"nothing", "NN", "O"}}), index, truth));

  auto multi = fixtures::tokens({{"the", "DT", "O"}, {"Kitchener", "NNP", "O"},
                                 {"Waterloo", "NNP", "O"}, {"Region", "NNP", "O"}});
  const Coordinates kw{43.45, -80.49};
  auto one = scan_mentions(multi, index, kw, 1);
  auto three = scan_mentions(multi, index, kw, 3);
  REQUIRE(one);
  REQUIRE(three);
  CHECK(*three == 0.0);
  CHECK(*one > 0.0);

  // Runs never cross a record boundary.
  auto split = fixtures::tokens({{"Twin", "NNP", "O"}, {"|", "SYM", "O"}, {"Cities", "NNP", "O"}});
  CHECK_FALSE(scan_mentions(split, index, truth));
}

TEST_CASE("mention scan is non-increasing in the word limit") {
  std::mt19937_64 rng(37);
  const std::vector<std::string> words{"new", "york", "city", "port", "hope", "the", "of"};
  std::vector<GazetteerEntry> entries;
  std::uniform_real_distribution<double> lat(-60, 60), lon(-180, 180);
  int id = 0;
  for (const char* name : {"new york", "york", "new york city", "port hope", "hope", "city of"}) {
    entries.push_back(fixtures::entry(
        fixtures::place("e" + std::to_string(id++), name, lat(rng), lon(rng)), name));
  }
  LocalIndex index(std::move(entries));
  for (int round = 0; round < 50; ++round) {
    std::vector<TaggedToken> doc;
    for (std::size_t i = 0; i < 8; ++i) {
      doc.push_back(TaggedToken{i, words[rng() % words.size()], PosGroup::kNoun, NerTag::kOther});
    }
    const Coordinates truth{lat(rng), lon(rng)};
    std::optional<double> prev;
    for (std::size_t n = 1; n <= 5; ++n) {
      auto d = scan_mentions(doc, index, truth, n);
      if (prev) {
        REQUIRE(d);
        CHECK(*d <= *prev);
      }
      if (d) prev = d;
    }
  }
}

TEST_CASE("outcome JSON carries tags and errors") {
  auto index = three_city_index();
  TaggedDocument doc;
  doc.id = "cities";
  doc.truth = Coordinates{43.4643, -80.5204};
  doc.tokens = fixtures::three_cities_sentence();
  auto out = geolocate(doc.tokens, index);
  auto rec = make_record(doc, out, Variant{});
  CHECK(*rec.top1_error_km < 100);
  auto json = outcome_to_json(doc.id, out, &rec);
  CHECK(json.find("\"doc_id\":\"cities\"") != std::string::npos);
  CHECK(json.find("\"rank\":3") != std::string::npos);
  CHECK(json.find("\"top5_error_km\"") != std::string::npos);
}
