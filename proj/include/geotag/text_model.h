#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geotag {

// Coarse part-of-speech classes the extractor cares about. Penn tags outside
// the mapping land in kOther.
enum class PosGroup { kNoun, kAdjective, kPreposition, kConjunction, kOther };

enum class NerTag { kLocation, kPerson, kOrganization, kOther };

// CD->adjective, TO/IN->preposition, CC->conjunction, NN*->noun, JJ->adjective.
PosGroup pos_group_from_tag(std::string_view penn_tag);

// Accepts LOCATION / PERSON / ORGANIZATION (case-insensitive); anything else,
// including "O", is kOther.
NerTag ner_tag_from_string(std::string_view tag);

std::string_view to_string(PosGroup group);
std::string_view to_string(NerTag tag);

struct TaggedToken {
  std::size_t index = 0;
  std::string text;
  PosGroup pos_group = PosGroup::kOther;
  NerTag ner_tag = NerTag::kOther;

  bool is_location() const { return ner_tag == NerTag::kLocation; }
};

// A contiguous token span [start, end] (inclusive) that may name a place.
// Identity is the span; the phrase is derived from the token text.
struct Term {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string phrase;

  std::size_t length() const { return end - start + 1; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.start == b.start && a.end == b.end;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (auto c = a.start <=> b.start; c != 0) return c;
    return a.end <=> b.end;
  }
};

// Builds the term covering tokens [start, end]; the phrase joins the token
// texts with single spaces and keeps their casing.
Term make_term(std::span<const TaggedToken> doc, std::size_t start,
               std::size_t end);

std::string join_phrase(std::span<const TaggedToken> doc, std::size_t start,
                        std::size_t end);

// True iff the spans intersect and the terms are distinct.
bool conflicts(const Term& a, const Term& b);

// Overlap-closed set of terms. Members are sorted by span.
struct Group {
  std::vector<Term> members;
  std::size_t first = 0;  // first covered token
  std::size_t last = 0;   // last covered token

  std::size_t size() const { return members.size(); }
};

// One reading of a group: a maximal conflict-free subset, sorted by span.
struct Interpretation {
  std::vector<Term> terms;
};

// Partitions the terms into overlap-closure groups, ordered by position.
// Duplicate spans are collapsed.
std::vector<Group> compute_groups(std::span<const Term> terms);

// All maximal conflict-free subsets of the group.
std::vector<Interpretation> enumerate_interpretations(const Group& group);

// Index-level variant used by the weight computation: `members` index into
// `terms`; each returned interpretation lists indices in ascending span order.
std::vector<std::vector<std::size_t>> enumerate_interpretation_indices(
    std::span<const Term> terms, std::span<const std::size_t> members);

inline constexpr std::size_t kMaxGroupTerms = 24;

// Drops the longest multi-word terms (rightmost first on ties) from any group
// above `max_terms` members until every group fits.
std::vector<Term> cap_group_sizes(std::vector<Term> terms,
                                  std::size_t max_terms = kMaxGroupTerms);

// Distinct phrase keys in first-seen order.
std::vector<std::string> distinct_phrases(std::span<const Term> terms);

}  // namespace geotag
