#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "geotag/text_model.h"

namespace geotag {

// Pairwise interpretation weights over a term set. Entry (i, j) is the weight
// of terms[j] when scoring terms[i]:
//   * 1 on the diagonal,
//   * 0 when the two terms overlap,
//   * otherwise the sum over the interpretations i of G(terms[j]) that contain
//     terms[j] of 1/(q * n_i), where q is the number of interpretations and
//     n_i the size of interpretation i. When both terms share a group, the
//     group is first reduced by removing every term that overlaps terms[i].
struct WeightTable {
  std::vector<Term> terms;
  Eigen::MatrixXd w;

  double operator()(std::size_t i, std::size_t j) const { return w(i, j); }
  std::optional<std::size_t> index_of(const Term& t) const;
  // Throws std::out_of_range when either term is absent.
  double at(const Term& from, const Term& to) const;
};

// `terms` must have pairwise distinct spans (std::invalid_argument otherwise).
WeightTable compute_weights(std::span<const Term> terms);

// All-ones table, the weights of any conflict-free term set.
WeightTable unit_weights(std::span<const Term> terms);

// One interpretation of a group (indices into `terms`) and the weight
// 1/(q * n_i) each of its members receives from it.
struct InterpretationShare {
  std::vector<std::size_t> members;
  double share = 0.0;
};

std::vector<InterpretationShare> interpretation_shares(std::span<const Term> terms,
                                                       std::span<const std::size_t> members);

// Per-member weights of one overlap group viewed from outside the group, in
// the order of `members` (indices into `terms`). The weights sum to 1.
Eigen::VectorXd interpretation_weights(std::span<const Term> terms,
                                       std::span<const std::size_t> members);

// True when some pair of terms overlaps.
bool has_conflicts(std::span<const Term> terms);

}  // namespace geotag
