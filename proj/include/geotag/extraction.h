#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geotag/text_model.h"

namespace geotag {

// Which branch of the filtering cascade produced the term set.
enum class ExtractionMode { kNerLocations, kAfterPrepositions, kAllNouns, kEmpty };

std::string_view to_string(ExtractionMode mode);

struct ExtractionOutcome {
  std::vector<Term> terms;           // sorted by span
  std::vector<std::string> phrases;  // distinct phrase keys of `terms`
  ExtractionMode mode = ExtractionMode::kEmpty;
};

// Every contiguous run whose words are all noun/adjective/LOCATION and which
// contains at least one noun or LOCATION word. LOCATION counts as a noun.
std::vector<Term> extract_candidates(std::span<const TaggedToken> doc);

// A preposition other than "for" precedes the term, and every token between
// the two is a noun, adjective, preposition or conjunction.
bool is_after_preposition(const Term& term, std::span<const TaggedToken> doc);

// LOCATION terms if any exist; otherwise terms after a preposition if any
// exist; otherwise everything.
ExtractionOutcome filter_terms(std::vector<Term> terms,
                               std::span<const TaggedToken> doc);

// Canadian (A1A 1A1), US (12345 or 12345-6789) and Dutch (1234 AB) postal
// codes, matched case-insensitively against one token or two adjacent tokens.
std::vector<Term> find_postal_codes(std::span<const TaggedToken> doc);

// Appends postal-code terms whose span is not already present and refreshes
// the phrase list. Idempotent.
void add_postal_codes(ExtractionOutcome& outcome, std::span<const TaggedToken> doc);

// Candidates, cascade, then postal codes.
ExtractionOutcome extract_terms(std::span<const TaggedToken> doc);

}  // namespace geotag
