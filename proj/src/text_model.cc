#include "geotag/text_model.h"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace geotag {
namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// Maximal independent sets of an interval graph. `pending` holds candidate
// indices sorted by start; every set produced must contain a term covering
// the smallest right endpoint among the pending terms, which gives a
// branching rule that never emits duplicates.
void enumerate_rec(std::span<const Term> terms, std::vector<std::size_t> pending,
                   std::vector<std::size_t>& chosen,
                   std::vector<std::vector<std::size_t>>& out) {
  if (pending.empty()) {
    auto sorted = chosen;
    std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
      return terms[a] < terms[b];
    });
    out.push_back(std::move(sorted));
    return;
  }
  std::size_t pivot_end = terms[pending.front()].end;
  for (std::size_t i : pending) pivot_end = std::min(pivot_end, terms[i].end);

  for (std::size_t pick : pending) {
    const Term& b = terms[pick];
    if (b.start > pivot_end) continue;  // does not cover the pivot point
    std::vector<std::size_t> rest;
    rest.reserve(pending.size());
    for (std::size_t i : pending) {
      if (i != pick && terms[i].start > b.end) rest.push_back(i);
    }
    chosen.push_back(pick);
    enumerate_rec(terms, std::move(rest), chosen, out);
    chosen.pop_back();
  }
}

}  // namespace

PosGroup pos_group_from_tag(std::string_view penn_tag) {
  const std::string tag = upper(penn_tag);
  if (tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS") return PosGroup::kNoun;
  if (tag == "JJ" || tag == "CD") return PosGroup::kAdjective;
  if (tag == "IN" || tag == "TO") return PosGroup::kPreposition;
  if (tag == "CC") return PosGroup::kConjunction;
  return PosGroup::kOther;
}

NerTag ner_tag_from_string(std::string_view tag) {
  const std::string t = upper(tag);
  if (t == "LOCATION") return NerTag::kLocation;
  if (t == "PERSON") return NerTag::kPerson;
  if (t == "ORGANIZATION") return NerTag::kOrganization;
  return NerTag::kOther;
}

std::string_view to_string(PosGroup group) {
  switch (group) {
    case PosGroup::kNoun: return "noun";
    case PosGroup::kAdjective: return "adjective";
    case PosGroup::kPreposition: return "preposition";
    case PosGroup::kConjunction: return "conjunction";
    case PosGroup::kOther: return "other";
  }
  return "other";
}

std::string_view to_string(NerTag tag) {
  switch (tag) {
    case NerTag::kLocation: return "LOCATION";
    case NerTag::kPerson: return "PERSON";
    case NerTag::kOrganization: return "ORGANIZATION";
    case NerTag::kOther: return "O";
  }
  return "O";
}

std::string join_phrase(std::span<const TaggedToken> doc, std::size_t start,
                        std::size_t end) {
  if (start > end || end >= doc.size()) {
    throw std::out_of_range("term span outside document");
  }
  std::string phrase = doc[start].text;
  for (std::size_t i = start + 1; i <= end; ++i) {
    phrase += ' ';
    phrase += doc[i].text;
  }
  return phrase;
}

Term make_term(std::span<const TaggedToken> doc, std::size_t start,
               std::size_t end) {
  return Term{start, end, join_phrase(doc, start, end)};
}

bool conflicts(const Term& a, const Term& b) {
  if (a == b) return false;
  return a.start <= b.end && b.start <= a.end;
}

std::vector<Group> compute_groups(std::span<const Term> terms) {
  std::vector<Term> sorted(terms.begin(), terms.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<Group> groups;
  for (Term& t : sorted) {
    if (!groups.empty() && t.start <= groups.back().last) {
      Group& g = groups.back();
      g.last = std::max(g.last, t.end);
      g.members.push_back(std::move(t));
    } else {
      Group g;
      g.first = t.start;
      g.last = t.end;
      g.members.push_back(std::move(t));
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

std::vector<std::vector<std::size_t>> enumerate_interpretation_indices(
    std::span<const Term> terms, std::span<const std::size_t> members) {
  std::vector<std::size_t> pending(members.begin(), members.end());
  std::sort(pending.begin(), pending.end(), [&](std::size_t a, std::size_t b) {
    return terms[a] < terms[b];
  });
  std::vector<std::vector<std::size_t>> out;
  if (pending.empty()) return out;
  std::vector<std::size_t> chosen;
  enumerate_rec(terms, std::move(pending), chosen, out);
  return out;
}

std::vector<Interpretation> enumerate_interpretations(const Group& group) {
  std::vector<std::size_t> idx(group.members.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Interpretation> out;
  for (const auto& set : enumerate_interpretation_indices(group.members, idx)) {
    Interpretation interp;
    for (std::size_t i : set) interp.terms.push_back(group.members[i]);
    out.push_back(std::move(interp));
  }
  return out;
}

std::vector<Term> cap_group_sizes(std::vector<Term> terms, std::size_t max_terms) {
  if (max_terms == 0) throw std::invalid_argument("max_terms must be positive");
  for (;;) {
    auto groups = compute_groups(terms);
    std::vector<Term> dropped;
    for (const Group& g : groups) {
      if (g.size() <= max_terms) continue;
      // Longest first, rightmost first among equal lengths; single words stay.
      auto victim = std::max_element(
          g.members.begin(), g.members.end(), [](const Term& a, const Term& b) {
            if (a.length() != b.length()) return a.length() < b.length();
            return a.start < b.start;
          });
      if (victim->length() > 1) dropped.push_back(*victim);
    }
    if (dropped.empty()) return terms;
    std::erase_if(terms, [&](const Term& t) {
      return std::find(dropped.begin(), dropped.end(), t) != dropped.end();
    });
  }
}

std::vector<std::string> distinct_phrases(std::span<const Term> terms) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const Term& t : terms) {
    if (seen.insert(t.phrase).second) out.push_back(t.phrase);
  }
  return out;
}

}  // namespace geotag
