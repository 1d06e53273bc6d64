#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bifree/cumulants.hpp"

namespace bifree {

/// Outcome of a detector: PASS, or the first offending word with its value.
struct Verdict {
    bool pass = true;
    std::optional<Word> witness;
    Scalar value;
    std::string reason;
};

/// Alternation data attached to each even chi of length 2n. `alpha` keys have
/// the chi-ordered stars starting unstarred, `beta` keys starting starred.
/// Keys are chi label strings such as "LRRL".
struct DeterminingSequences {
    int degree = 0;
    std::map<std::string, Scalar> alpha;
    std::map<std::string, Scalar> beta;

    Scalar alpha_at(const ChiMap& chi) const;
    Scalar beta_at(const ChiMap& chi) const;
};

/// The pair word over {x: left, y: right} with chi `chi` whose chi-ordered
/// stars alternate, starting unstarred when `starred_first` is false.
Word pattern_word(const ChiMap& chi, bool starred_first);

enum class AlternationKind : std::uint8_t { AlternatingW1, AlternatingW2, MixedAlternating, Other };

struct AlternationClass {
    AlternationKind kind = AlternationKind::Other;
    /// Position masks of the factors J_1..J_d, in chi order; filled for every
    /// kind except Other (one block for the alternating kinds).
    std::vector<std::uint32_t> blocks;
};

std::string to_string(AlternationKind kind);

AlternationClass classify_word(const Alphabet& alphabet, const Word& w);
/// Even length and strictly alternating stars in chi order.
bool is_alternating(const Alphabet& alphabet, const Word& w);

Verdict is_r_diagonal(const MomentTable& mu, int degree);
DeterminingSequences determining_sequences(const MomentTable& mu, int degree);
/// Pair table whose bi-free cumulants are the given sequences and zero elsewhere.
MomentTable from_determining_sequences(const DeterminingSequences& seq, int degree,
                                       const Alphabet& alphabet = pair_alphabet());

Verdict is_eta_diagonal(const MomentTable& mu, int degree);
Verdict eta_moment_characterization(const MomentTable& mu, int degree);

/// Coefficients of a formal series in noncommuting variables, keyed by word.
struct SeriesTable {
    enum class Kind : std::uint8_t { Moment, Eta, RTransform };
    Kind kind = Kind::Eta;
    Alphabet alphabet;
    std::map<Word, Scalar> coefficients;
};

struct EtaSquares {
    // index 0: (x x*, y y*), index 1: (x* x, y* y); alphabet {a: left, b: right}
    std::array<SeriesTable, 2> direct;
    std::array<SeriesTable, 2> doubled;
    bool consistent = true;
    bool mixed_vanish = true;
    std::optional<Word> mismatch;
};

/// Eta-series of the two square pairs, computed from products directly and by
/// doubling each product letter into its two factors.
EtaSquares eta_series_of_squares(const MomentTable& mu, int degree);

/// Pair table of (Z_l, Z_r) = (left * left^*, right * right^*) (index 0) or
/// (left^* left, right^* right) (index 1) over the alphabet {a: left, b: right}.
MomentTable square_pair(const MomentTable& mu, int which, int degree);

/// Free cumulants kappa_n of the products read off the alternating tuple
/// (x, x*, ..., y, y*) in consecutive pairs; keyed by (k1, k2), the numbers of
/// x- and y-letters in the tuple.
struct ProductCumulants {
    int degree = 0;
    std::map<std::pair<int, int>, Scalar> unstarred_first;
    std::map<std::pair<int, int>, Scalar> starred_first;
};

ProductCumulants product_cumulants(const MomentTable& single, int degree);
/// Solves the mutual recursion for the two alpha families and returns them as
/// determining sequences (alpha for unstarred-first, beta for starred-first).
DeterminingSequences alpha_recursion(const ProductCumulants& input, int degree);

struct ChainVerdict {
    bool pass = true;
    std::optional<Word> witness;  ///< x..x y..y word whose chain failed
    std::vector<int> cuts;        ///< factor start positions of the witness
    Scalar value;
    std::size_t chains_checked = 0;
};

ChainVerdict condition_3_6(const MomentTable& single, int degree);

/// lr_pair(single) against lr_pair(multiply_free_haar(single)) up to `degree`.
Verdict haar_invariance_check(const MomentTable& single, int degree);

struct Corollary410Report {
    MomentTable pair;     ///< single bi-Boolean entry B(x x* y* y) = 1
    MomentTable squares;  ///< (x x*, y y*, x* x, y* y) as a: L, b: R, c: L, d: R
    bool eta_diagonal = false;
    Scalar mixed_square_cumulant;  ///< bi-Boolean cumulant of (x x*, y* y), chi (L, R)
    Scalar doubled_cumulant;       ///< bi-Boolean cumulant of (x, x*, y*, y)
    IndependenceVerdict independence;
};

Corollary410Report corollary_4_10_witness();

// JSON for determining sequences: {"degree": N, "alpha": {"LR": scalar}, "beta": {...}}.
std::string determining_json(const DeterminingSequences& seq);
DeterminingSequences parse_determining_json(const std::string& text);
DeterminingSequences load_determining_file(const std::string& path);

}  // namespace bifree
