#include "geotag/document.h"

#include <istream>
#include <map>

#include "json.hpp"

namespace geotag {
namespace {

using nlohmann::json;

std::vector<std::pair<std::string, std::string>> read_pairs(const json& arr,
                                                            const char* field) {
  if (!arr.is_array()) {
    throw DocumentFormatError(std::string(field) + " must be an array");
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const json& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
        !item[1].is_string()) {
      throw DocumentFormatError(std::string(field) + " entries must be [text, tag]");
    }
    out.emplace_back(item[0].get<std::string>(), item[1].get<std::string>());
  }
  return out;
}

std::vector<TaggedToken> read_tokens(const json& arr) {
  if (!arr.is_array()) throw DocumentFormatError("tokens must be an array");
  std::vector<TaggedToken> tokens;
  tokens.reserve(arr.size());
  for (const json& item : arr) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string()) {
      throw DocumentFormatError("token without text");
    }
    const bool has_pos = item.contains("pos") && item["pos"].is_string();
    const bool has_ner = item.contains("ner") && item["ner"].is_string();
    if (!has_pos || !has_ner) {
      throw InconsistentTokensError("token '" + item["text"].get<std::string>() +
                                    "' lacks a POS or NER annotation");
    }
    TaggedToken t;
    t.index = tokens.size();
    t.text = item["text"].get<std::string>();
    t.pos_group = pos_group_from_tag(item["pos"].get<std::string>());
    t.ner_tag = ner_tag_from_string(item["ner"].get<std::string>());
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw DocumentFormatError(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

}  // namespace

std::vector<TaggedToken> merge_tagger_outputs(
    const std::vector<std::pair<std::string, std::string>>& pos_tagged,
    const std::vector<std::pair<std::string, std::string>>& ner_tagged) {
  if (pos_tagged.size() != ner_tagged.size()) {
    throw InconsistentTokensError("POS tagger produced " +
                                  std::to_string(pos_tagged.size()) +
                                  " tokens, NER tagger " +
                                  std::to_string(ner_tagged.size()));
  }
  std::vector<TaggedToken> tokens;
  tokens.reserve(pos_tagged.size());
  for (std::size_t i = 0; i < pos_tagged.size(); ++i) {
    if (pos_tagged[i].first != ner_tagged[i].first) {
      throw InconsistentTokensError("token " + std::to_string(i) + " differs: '" +
                                    pos_tagged[i].first + "' vs '" +
                                    ner_tagged[i].first + "'");
    }
    tokens.push_back(TaggedToken{i, pos_tagged[i].first,
                                 pos_group_from_tag(pos_tagged[i].second),
                                 ner_tag_from_string(ner_tagged[i].second)});
  }
  return tokens;
}

TaggedDocument parse_document(std::string_view json_line) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DocumentFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DocumentFormatError("record must be a JSON object");

  TaggedDocument doc;
  if (!j.contains("id")) throw DocumentFormatError("record without id");
  doc.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();

  const bool has_lat = j.contains("lat") && !j["lat"].is_null();
  const bool has_lon = j.contains("lon") && !j["lon"].is_null();
  if (has_lat != has_lon) throw DocumentFormatError("lat and lon must appear together");
  if (has_lat) {
    if (!j["lat"].is_number() || !j["lon"].is_number()) {
      throw DocumentFormatError("lat/lon must be numbers");
    }
    Coordinates c{j["lat"].get<double>(), j["lon"].get<double>()};
    if (!valid_coordinates(c.latitude, c.longitude)) {
      throw DocumentFormatError("true coordinates out of range");
    }
    doc.truth = c;
  }
  doc.article_type = optional_string(j, "type");
  doc.user = optional_string(j, "user");

  if (j.contains("tokens")) {
    doc.tokens = read_tokens(j["tokens"]);
  } else if (j.contains("pos_tokens") && j.contains("ner_tokens")) {
    doc.tokens = merge_tagger_outputs(read_pairs(j["pos_tokens"], "pos_tokens"),
                                      read_pairs(j["ner_tokens"], "ner_tokens"));
  } else if (j.contains("pos_tokens") || j.contains("ner_tokens")) {
    throw InconsistentTokensError("only one tagger output present");
  } else {
    throw DocumentFormatError("record without tokens");
  }
  return doc;
}

std::string serialize_document(const TaggedDocument& doc) {
  // Penn tags are not kept after grouping; emit a representative tag per group.
  auto pos_tag = [](PosGroup g) -> const char* {
    switch (g) {
      case PosGroup::kNoun: return "NN";
      case PosGroup::kAdjective: return "JJ";
      case PosGroup::kPreposition: return "IN";
      case PosGroup::kConjunction: return "CC";
      case PosGroup::kOther: return "X";
    }
    return "X";
  };
  json j;
  j["id"] = doc.id;
  if (doc.truth) {
    j["lat"] = doc.truth->latitude;
    j["lon"] = doc.truth->longitude;
  }
  if (doc.article_type) j["type"] = *doc.article_type;
  if (doc.user) j["user"] = *doc.user;
  json tokens = json::array();
  for (const TaggedToken& t : doc.tokens) {
    tokens.push_back({{"text", t.text},
                      {"pos", pos_tag(t.pos_group)},
                      {"ner", std::string(to_string(t.ner_tag))}});
  }
  j["tokens"] = std::move(tokens);
  return j.dump();
}

DocumentBatch read_documents(std::istream& in) {
  DocumentBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      batch.documents.push_back(parse_document(line));
    } catch (const InconsistentTokensError& e) {
      ++batch.rejected_inconsistent;
      batch.errors.emplace_back(line_no, e.what());
    } catch (const DocumentFormatError& e) {
      batch.errors.emplace_back(line_no, e.what());
    }
  }
  return batch;
}

std::vector<TaggedDocument> group_by_user(std::vector<TaggedDocument> docs) {
  struct Accumulator {
    TaggedDocument merged;
    double lat_sum = 0.0;
    double lon_sum = 0.0;
    std::size_t located = 0;
  };
  std::vector<Accumulator> groups;
  std::map<std::string, std::size_t> by_user;
  for (TaggedDocument& doc : docs) {
    std::size_t slot;
    if (doc.user) {
      auto [it, inserted] = by_user.emplace(*doc.user, groups.size());
      if (inserted) {
        groups.emplace_back();
        groups.back().merged.id = *doc.user;
        groups.back().merged.user = doc.user;
        groups.back().merged.article_type = doc.article_type;
      }
      slot = it->second;
    } else {
      slot = groups.size();
      groups.emplace_back();
      groups.back().merged.id = doc.id;
      groups.back().merged.article_type = doc.article_type;
    }
    Accumulator& acc = groups[slot];
    // Keep terms from spanning two records.
    if (!acc.merged.tokens.empty() && !doc.tokens.empty()) {
      acc.merged.tokens.push_back(TaggedToken{acc.merged.tokens.size(), std::string(kRecordSeparator),
                                              PosGroup::kOther, NerTag::kOther});
    }
    for (TaggedToken& t : doc.tokens) {
      t.index = acc.merged.tokens.size();
      acc.merged.tokens.push_back(std::move(t));
    }
    if (doc.truth) {
      acc.lat_sum += doc.truth->latitude;
      acc.lon_sum += doc.truth->longitude;
      ++acc.located;
    }
  }
  std::vector<TaggedDocument> out;
  out.reserve(groups.size());
  for (Accumulator& acc : groups) {
    if (acc.located > 0) {
      acc.merged.truth = Coordinates{acc.lat_sum / static_cast<double>(acc.located),
                                     acc.lon_sum / static_cast<double>(acc.located)};
    }
    out.push_back(std::move(acc.merged));
  }
  return out;
}

}  // namespace geotag
