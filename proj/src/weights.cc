#include "geotag/weights.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace geotag {
namespace {

// Connected components of the overlap graph over `members`, each sorted by
// span. Components are returned in text order.
std::vector<std::vector<std::size_t>> overlap_components(
    std::span<const Term> terms, std::vector<std::size_t> members) {
  std::sort(members.begin(), members.end(),
            [&](std::size_t a, std::size_t b) { return terms[a] < terms[b]; });
  std::vector<std::vector<std::size_t>> out;
  std::size_t reach = 0;
  for (std::size_t idx : members) {
    if (!out.empty() && terms[idx].start <= reach) {
      out.back().push_back(idx);
      reach = std::max(reach, terms[idx].end);
    } else {
      out.push_back({idx});
      reach = terms[idx].end;
    }
  }
  return out;
}

}  // namespace

std::optional<std::size_t> WeightTable::index_of(const Term& t) const {
  auto it = std::find(terms.begin(), terms.end(), t);
  if (it == terms.end()) return std::nullopt;
  return static_cast<std::size_t>(it - terms.begin());
}

double WeightTable::at(const Term& from, const Term& to) const {
  auto i = index_of(from);
  auto j = index_of(to);
  if (!i || !j) throw std::out_of_range("term not in weight table");
  return w(*i, *j);
}

std::vector<InterpretationShare> interpretation_shares(std::span<const Term> terms,
                                                       std::span<const std::size_t> members) {
  auto interpretations = enumerate_interpretation_indices(terms, members);
  const double q = static_cast<double>(interpretations.size());
  std::vector<InterpretationShare> out;
  out.reserve(interpretations.size());
  for (auto& interp : interpretations) {
    const double share = 1.0 / (q * static_cast<double>(interp.size()));
    out.push_back({std::move(interp), share});
  }
  return out;
}

Eigen::VectorXd interpretation_weights(std::span<const Term> terms,
                                       std::span<const std::size_t> members) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(members.size()));
  if (members.size() == 1) {
    out(0) = 1.0;
    return out;
  }
  for (const auto& [interp, share] : interpretation_shares(terms, members)) {
    for (std::size_t idx : interp) {
      auto pos = std::find(members.begin(), members.end(), idx) - members.begin();
      out(pos) += share;
    }
  }
  return out;
}

bool has_conflicts(std::span<const Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (conflicts(terms[i], terms[j])) return true;
    }
  }
  return false;
}

WeightTable unit_weights(std::span<const Term> terms) {
  const auto n = static_cast<Eigen::Index>(terms.size());
  return WeightTable{{terms.begin(), terms.end()}, Eigen::MatrixXd::Ones(n, n)};
}

WeightTable compute_weights(std::span<const Term> terms) {
  const std::size_t n = terms.size();
  {
    std::vector<Term> sorted(terms.begin(), terms.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("compute_weights: duplicate term spans");
    }
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const auto groups = overlap_components(terms, all);

  // Weight of each term as seen from outside its group.
  std::vector<std::size_t> group_of(n);
  Eigen::VectorXd external(static_cast<Eigen::Index>(n));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Eigen::VectorXd gw = interpretation_weights(terms, groups[g]);
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      group_of[groups[g][k]] = g;
      external(static_cast<Eigen::Index>(groups[g][k])) = gw(static_cast<Eigen::Index>(k));
    }
  }

  WeightTable table{{terms.begin(), terms.end()},
                    Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(n))};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    // Start from the external view, then fix up the row's own group.
    table.w.row(row) = external.transpose();
    const auto& own = groups[group_of[i]];
    for (std::size_t j : own) table.w(row, static_cast<Eigen::Index>(j)) = 0.0;
    table.w(row, row) = 1.0;
    if (own.size() == 1) continue;

    std::vector<std::size_t> reduced;
    for (std::size_t j : own) {
      if (j != i && !conflicts(terms[i], terms[j])) reduced.push_back(j);
    }
    for (const auto& sub : overlap_components(terms, reduced)) {
      const Eigen::VectorXd sw = interpretation_weights(terms, sub);
      for (std::size_t k = 0; k < sub.size(); ++k) {
        table.w(row, static_cast<Eigen::Index>(sub[k])) = sw(static_cast<Eigen::Index>(k));
      }
    }
  }
  return table;
}

}  // namespace geotag
