#pragma once

#include <string>
#include <vector>

#include "bifree/diagonal.hpp"

namespace bifree {

/// Which product pair is formed from two pairs (x1, y1), (x2, y2).
enum class Orientation : std::uint8_t {
    Reversed,  ///< (x1 x2, y2 y1)
    Ordered,   ///< (x1 x2, y1 y2)
};

std::string to_string(Orientation o);
/// Accepts "y2y1" / "reversed" and "y1y2" / "ordered".
Orientation parse_orientation(const std::string& text);

/// Each label doubled in place: (L, R) -> (L, L, R, R).
ChiMap chi_hat(const ChiMap& chi);

/// Joint alphabet of the two factor pairs: x1: L, y1: R, x2: L, y2: R.
Alphabet product_joint_alphabet();

/// Joint table of two bi-free R-diagonal pairs given by their sequences.
MomentTable product_joint_table(const DeterminingSequences& first, const DeterminingSequences& second, int degree);

struct ProductPattern {
    Orientation orientation = Orientation::Reversed;
    ChiMap chi;
    bool starred_first = false;  ///< false: alpha entry, true: beta entry

    /// The pattern word with every product letter replaced by its two factors,
    /// over product_joint_alphabet().
    Word expand() const;
    /// 1 or 2 for each position of expand().
    std::vector<int> factors() const;
};

/// Sum over pi in BNC(chi_hat) whose join with the consecutive pairing is the
/// top element, of the multiplicative bi-free cumulants of `joint`.
Scalar product_cumulant_oracle(const MomentTable& joint, const ProductPattern& pattern);

struct FormulaValue {
    Scalar value;
    std::string resolution;  ///< block typing actually used
};

/// Closed formula over factor-pure even partitions for the reversed product.
Scalar theorem_2_5(const DeterminingSequences& first, const DeterminingSequences& second, const ChiMap& chi,
                   bool starred_first);
/// Same for the ordered product; zero when chi is not constant.
FormulaValue corollary_2_6(const DeterminingSequences& first, const DeterminingSequences& second, const ChiMap& chi,
                           bool starred_first);

struct Theorem27Report {
    MomentTable pair;     ///< over {x: L, y: R}
    MomentTable squares;  ///< (x x*, y y*, x* x, y* y) as a: L, b: R, c: L, d: R
    bool r_diagonal = false;
    Scalar mixed_square_cumulant;  ///< kappa of (x x*, y* y) with chi (L, R)
    Scalar reversed_pair_cumulant; ///< kappa of (y, x*)
    IndependenceVerdict independence;
};

Theorem27Report theorem_2_7_witness();

}  // namespace bifree
