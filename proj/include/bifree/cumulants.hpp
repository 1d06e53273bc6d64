#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bifree/distribution.hpp"

namespace bifree {

// Single-word transforms. Each reads the shared lazy cumulant table of `mu`.
Scalar moments_to_bifree(const MomentTable& mu, const Word& w);
Scalar moments_to_biboolean(const MomentTable& mu, const Word& w);
Scalar moments_to_free(const MomentTable& mu, const Word& w);
Scalar moments_to_boolean(const MomentTable& mu, const Word& w);

/// Positions listed in the order the kind's lattice is built on: identity for
/// the single-variable kinds, the chi order for the two-faced kinds.
std::vector<int> lattice_order(CumulantKind kind, const Alphabet& alphabet, const Word& w);

/// Partitions summed over for a word of this kind (NC, IN, BNC or BI).
std::vector<SetPartition> lattice_partitions(CumulantKind kind, const Alphabet& alphabet, const Word& w);

/// Product over blocks of `values` on the block subwords (natural order).
Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const Alphabet& alphabet,
                           const std::function<Scalar(const Word&)>& values);
Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const CumulantTable& table);
Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const MomentTable& mu);

/// Reference route: sum over the lattice of moment products times the
/// Moebius function to the top element.
Scalar cumulant_by_mobius(CumulantKind kind, const MomentTable& mu, const Word& w);
/// Reference route for the inverse: sum of cumulant products over the lattice.
Scalar moment_by_partition_sum(const CumulantTable& cumulants, const Word& w);

/// Letter grouping: family[symbol] is the family index of that symbol.
using Grouping = std::vector<int>;

struct IndependenceVerdict {
    bool pass = true;
    std::optional<Word> witness;
    Scalar value;
    std::size_t words_checked = 0;
};

/// Scans every word up to `degree` that mixes families, shortest first then in
/// word order, and reports the first nonzero cumulant.
IndependenceVerdict test_bifree_independence(const MomentTable& mu, const Grouping& grouping, int degree);
IndependenceVerdict test_biboolean_independence(const MomentTable& mu, const Grouping& grouping, int degree);

}  // namespace bifree
