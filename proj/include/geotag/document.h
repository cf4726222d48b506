#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geotag/geo.h"
#include "geotag/text_model.h"

namespace geotag {

// The POS and NER tagger outputs do not describe the same token sequence.
class InconsistentTokensError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record is not valid JSON or lacks required fields.
class DocumentFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaggedDocument {
  std::string id;
  std::optional<Coordinates> truth;
  std::optional<std::string> article_type;
  std::optional<std::string> user;
  std::vector<TaggedToken> tokens;
};

// One JSON object per line; see docs/formats.md. Throws
// InconsistentTokensError or DocumentFormatError.
TaggedDocument parse_document(std::string_view json_line);

std::string serialize_document(const TaggedDocument& doc);

// Pairs the two tagger outputs token by token. Throws
// InconsistentTokensError when the counts or the token texts disagree.
std::vector<TaggedToken> merge_tagger_outputs(
    const std::vector<std::pair<std::string, std::string>>& pos_tagged,
    const std::vector<std::pair<std::string, std::string>>& ner_tagged);

struct DocumentBatch {
  std::vector<TaggedDocument> documents;
  std::size_t rejected_inconsistent = 0;
  // Line number and message for every rejected line.
  std::vector<std::pair<std::size_t, std::string>> errors;
};

// Reads JSON lines, skipping blank lines. Bad records are counted, not fatal.
DocumentBatch read_documents(std::istream& in);

// Token placed between concatenated records; tagged kOther so no term
// crosses it.
inline constexpr std::string_view kRecordSeparator = "|";

// Concatenates the tokens of every record sharing a user key (records without
// one stay alone) and averages the true coordinates. Output order follows the
// first appearance of each user.
std::vector<TaggedDocument> group_by_user(std::vector<TaggedDocument> docs);

}  // namespace geotag
