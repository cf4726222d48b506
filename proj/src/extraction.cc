#include "geotag/extraction.h"

#include <algorithm>
#include <cctype>
#include <regex>

namespace geotag {
namespace {

bool is_nounlike(const TaggedToken& t) {
  return t.pos_group == PosGroup::kNoun || t.is_location();
}

bool is_term_word(const TaggedToken& t) {
  return is_nounlike(t) || t.pos_group == PosGroup::kAdjective;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool contains_location(const Term& t, std::span<const TaggedToken> doc) {
  for (std::size_t i = t.start; i <= t.end; ++i) {
    if (doc[i].is_location()) return true;
  }
  return false;
}

const std::regex& postal_pattern() {
  static const std::regex re(
      R"(^(?:[A-Z][0-9][A-Z] ?[0-9][A-Z][0-9]|[0-9]{5}(?:-[0-9]{4})?|[0-9]{4} ?[A-Z]{2})$)",
      std::regex::icase | std::regex::optimize);
  return re;
}

}  // namespace

std::string_view to_string(ExtractionMode mode) {
  switch (mode) {
    case ExtractionMode::kNerLocations: return "ner_locations";
    case ExtractionMode::kAfterPrepositions: return "after_prepositions";
    case ExtractionMode::kAllNouns: return "all_nouns";
    case ExtractionMode::kEmpty: return "empty";
  }
  return "empty";
}

std::vector<Term> extract_candidates(std::span<const TaggedToken> doc) {
  std::vector<Term> out;
  std::size_t i = 0;
  while (i < doc.size()) {
    if (!is_term_word(doc[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end + 1 < doc.size() && is_term_word(doc[run_end + 1])) ++run_end;
    // Inside a maximal run every subsequence satisfies the first rule; keep
    // the ones holding at least one noun.
    for (std::size_t s = i; s <= run_end; ++s) {
      bool has_noun = false;
      for (std::size_t e = s; e <= run_end; ++e) {
        has_noun = has_noun || is_nounlike(doc[e]);
        if (has_noun) out.push_back(make_term(doc, s, e));
      }
    }
    i = run_end + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_after_preposition(const Term& term, std::span<const TaggedToken> doc) {
  for (std::size_t k = term.start; k-- > 0;) {
    const TaggedToken& t = doc[k];
    if (t.pos_group == PosGroup::kPreposition && !iequals(t.text, "for")) return true;
    if (t.pos_group == PosGroup::kOther) return false;
  }
  return false;
}

ExtractionOutcome filter_terms(std::vector<Term> terms,
                               std::span<const TaggedToken> doc) {
  ExtractionOutcome outcome;
  std::sort(terms.begin(), terms.end());
  if (terms.empty()) {
    outcome.mode = ExtractionMode::kEmpty;
  } else if (std::any_of(terms.begin(), terms.end(),
                         [&](const Term& t) { return contains_location(t, doc); })) {
    outcome.mode = ExtractionMode::kNerLocations;
    std::erase_if(terms, [&](const Term& t) { return !contains_location(t, doc); });
  } else if (std::any_of(terms.begin(), terms.end(),
                         [&](const Term& t) { return is_after_preposition(t, doc); })) {
    outcome.mode = ExtractionMode::kAfterPrepositions;
    std::erase_if(terms, [&](const Term& t) { return !is_after_preposition(t, doc); });
  } else {
    outcome.mode = ExtractionMode::kAllNouns;
  }
  outcome.phrases = distinct_phrases(terms);
  outcome.terms = std::move(terms);
  return outcome;
}

std::vector<Term> find_postal_codes(std::span<const TaggedToken> doc) {
  std::vector<Term> out;
  const std::regex& re = postal_pattern();
  std::size_t i = 0;
  while (i < doc.size()) {
    // Prefer the two-token reading ("N2L" "3G1") over a single token.
    if (i + 1 < doc.size() &&
        std::regex_match(doc[i].text + " " + doc[i + 1].text, re)) {
      out.push_back(make_term(doc, i, i + 1));
      i += 2;
    } else if (std::regex_match(doc[i].text, re)) {
      out.push_back(make_term(doc, i, i));
      ++i;
    } else {
      ++i;
    }
  }
  return out;
}

void add_postal_codes(ExtractionOutcome& outcome, std::span<const TaggedToken> doc) {
  for (Term& code : find_postal_codes(doc)) {
    if (std::find(outcome.terms.begin(), outcome.terms.end(), code) ==
        outcome.terms.end()) {
      outcome.terms.push_back(std::move(code));
    }
  }
  std::sort(outcome.terms.begin(), outcome.terms.end());
  outcome.phrases = distinct_phrases(outcome.terms);
}

ExtractionOutcome extract_terms(std::span<const TaggedToken> doc) {
  ExtractionOutcome outcome = filter_terms(extract_candidates(doc), doc);
  add_postal_codes(outcome, doc);
  return outcome;
}

}  // namespace geotag
