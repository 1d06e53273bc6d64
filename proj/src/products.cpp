#include "bifree/products.hpp"

#include "bifree/errors.hpp"

namespace bifree {

namespace {

constexpr std::uint8_t kX1 = 0, kY1 = 1, kX2 = 2, kY2 = 3;

// The two factor letters replacing one letter of a pattern word.
std::pair<Letter, Letter> factor_letters(Orientation o, Side side, bool starred) {
    if (side == Side::Left) {
        if (!starred) return {Letter{kX1, false}, Letter{kX2, false}};
        return {Letter{kX2, true}, Letter{kX1, true}};
    }
    bool reversed = o == Orientation::Reversed;
    std::uint8_t first = reversed ? kY2 : kY1;
    std::uint8_t second = reversed ? kY1 : kY2;
    if (!starred) return {Letter{first, false}, Letter{second, false}};
    return {Letter{second, true}, Letter{first, true}};
}

int factor_of(Letter l) { return l.symbol == kX1 || l.symbol == kY1 ? 1 : 2; }

void require_even(const ChiMap& chi) {
    if (chi.size() == 0 || chi.size() % 2 != 0) throw PreconditionError("product patterns need an even chi");
}

std::string restricted_key(const ChiMap& chi, std::uint32_t block) {
    std::string key;
    for (int i = 0; i < chi.size(); ++i)
        if (block >> i & 1U) key += chi[i] == Side::Left ? 'L' : 'R';
    return key;
}

Scalar entry(const DeterminingSequences& seq, const std::string& key, bool beta) {
    const auto& table = beta ? seq.beta : seq.alpha;
    auto it = table.find(key);
    if (it == table.end()) {
        throw MissingEntryError(std::string("no ") + (beta ? "beta" : "alpha") + " entry for chi " + key);
    }
    return it->second;
}

// The block through the first chi-ordered position is typed like the
// requested entry, the remaining blocks of its factor the other way, and the
// blocks of the other factor like the requested entry.
Scalar formula_sum(const DeterminingSequences& first, const DeterminingSequences& second,
                   const ProductPattern& pattern) {
    ChiMap doubled = chi_hat(pattern.chi);
    const int length = doubled.size();
    if (length > first.degree || length > second.degree) {
        throw DegreeError("determining sequences do not reach length " + std::to_string(length));
    }
    std::vector<int> factors = pattern.factors();
    const int head = doubled.order()[0];
    const bool requested = pattern.starred_first;
    Scalar total;
    for (const auto& pi : bnc_partitions(doubled)) {
        if (!pi.all_blocks_even()) continue;
        bool pure = true;
        for (auto block : pi.blocks()) {
            int f = factors[static_cast<std::size_t>(std::countr_zero(block))];
            for (std::uint32_t r = block; r && pure; r &= r - 1) {
                pure = factors[static_cast<std::size_t>(std::countr_zero(r))] == f;
            }
            if (!pure) break;
        }
        if (!pure || !pairing_join_is_full(pi, doubled)) continue;
        Scalar term(1);
        for (auto block : pi.blocks()) {
            int f = factors[static_cast<std::size_t>(std::countr_zero(block))];
            bool beta = requested;
            if (block >> head & 1U) {
                beta = requested;
            } else if (f == factors[static_cast<std::size_t>(head)]) {
                beta = !requested;
            }
            term *= entry(f == 1 ? first : second, restricted_key(doubled, block), beta);
            if (term.is_zero()) break;
        }
        total += term;
    }
    return total;
}

}  // namespace

std::string to_string(Orientation o) { return o == Orientation::Reversed ? "y2y1" : "y1y2"; }

Orientation parse_orientation(const std::string& text) {
    if (text == "y2y1" || text == "reversed") return Orientation::Reversed;
    if (text == "y1y2" || text == "ordered") return Orientation::Ordered;
    throw ParseError("unknown orientation '" + text + "'");
}

ChiMap chi_hat(const ChiMap& chi) {
    std::vector<Side> labels;
    for (int i = 0; i < chi.size(); ++i) {
        labels.push_back(chi[i]);
        labels.push_back(chi[i]);
    }
    return ChiMap(std::move(labels));
}

Alphabet product_joint_alphabet() {
    return Alphabet({{"x1", Side::Left}, {"y1", Side::Right}, {"x2", Side::Left}, {"y2", Side::Right}});
}

MomentTable product_joint_table(const DeterminingSequences& first, const DeterminingSequences& second, int degree) {
    MomentTable a = from_determining_sequences(first, degree, pair_alphabet("x1", "y1"));
    MomentTable b = from_determining_sequences(second, degree, pair_alphabet("x2", "y2"));
    return bifree_join(a, b, degree);
}

Word ProductPattern::expand() const {
    require_even(chi);
    Word w = pattern_word(chi, starred_first);
    Word out;
    for (int i = 0; i < w.size(); ++i) {
        auto [a, b] = factor_letters(orientation, chi[i], w[i].starred);
        out.push_back(a);
        out.push_back(b);
    }
    return out;
}

std::vector<int> ProductPattern::factors() const {
    Word w = expand();
    std::vector<int> out;
    for (int i = 0; i < w.size(); ++i) out.push_back(factor_of(w[i]));
    return out;
}

Scalar product_cumulant_oracle(const MomentTable& joint, const ProductPattern& pattern) {
    Word w = pattern.expand();
    if (w.size() > joint.degree()) throw DegreeError("expanded pattern exceeds the joint table cap");
    ChiMap doubled = chi_hat(pattern.chi);
    std::vector<SetPartition::Block> pairs;
    for (int k = 0; k < w.size(); k += 2) pairs.push_back(3U << k);
    SetPartition pairing(w.size(), pairs);
    CumulantTable kappa = joint.cumulants(CumulantKind::BiFree);
    Scalar total;
    for (const auto& pi : bnc_partitions(doubled)) {
        if (!join(pi, pairing).is_top()) continue;
        total += multiplicative_eval(CumulantKind::BiFree, pi, w, kappa);
    }
    return total;
}

Scalar theorem_2_5(const DeterminingSequences& first, const DeterminingSequences& second, const ChiMap& chi,
                   bool starred_first) {
    require_even(chi);
    return formula_sum(first, second, ProductPattern{Orientation::Reversed, chi, starred_first});
}

FormulaValue corollary_2_6(const DeterminingSequences& first, const DeterminingSequences& second, const ChiMap& chi,
                           bool starred_first) {
    require_even(chi);
    FormulaValue out;
    if (!chi.is_constant()) {
        out.resolution = "non-constant chi: zero";
        return out;
    }
    ProductPattern pattern{Orientation::Ordered, chi, starred_first};
    out.value = formula_sum(first, second, pattern);
    const int head_factor = pattern.factors()[static_cast<std::size_t>(chi_hat(chi).order()[0])];
    const int other = 3 - head_factor;
    const char* requested = starred_first ? "beta" : "alpha";
    const char* flipped = starred_first ? "alpha" : "beta";
    out.resolution = std::string("block through the first ordered position: ") + requested + "(" +
                     std::to_string(head_factor) + "); other factor-" + std::to_string(head_factor) +
                     " blocks: " + flipped + "(" + std::to_string(head_factor) + "); factor-" +
                     std::to_string(other) + " blocks: " + requested + "(" + std::to_string(other) + ")";
    return out;
}

Theorem27Report theorem_2_7_witness() {
    Alphabet a = pair_alphabet();
    WordTable::Entries kappa;
    for (const char* w : {"x y*", "y x*", "x* y", "y* x"}) kappa[a.parse_word(w)] = Scalar(1);
    Theorem27Report r;
    r.pair = moments_from_cumulants(CumulantTable(CumulantKind::BiFree, WordTable(a, 8, std::move(kappa), true)));
    r.r_diagonal = is_r_diagonal(r.pair, 8).pass;
    const Letter x{0, false}, xs{0, true}, y{1, false}, ys{1, true};
    Alphabet sq({{"a", Side::Left}, {"b", Side::Right}, {"c", Side::Left}, {"d", Side::Right}});
    r.squares = substitute(r.pair, sq,
                           {NcPolynomial(Word{x, xs}), NcPolynomial(Word{y, ys}), NcPolynomial(Word{xs, x}),
                            NcPolynomial(Word{ys, y})},
                           4);
    CumulantTable k = r.squares.cumulants(CumulantKind::BiFree);
    r.mixed_square_cumulant = k(sq.parse_word("a d"));
    r.reversed_pair_cumulant = r.pair.cumulants(CumulantKind::BiFree)(a.parse_word("y x*"));
    r.independence = test_bifree_independence(r.squares, {0, 0, 1, 1}, 2);
    return r;
}

}  // namespace bifree
