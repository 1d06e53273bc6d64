#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bifree/partitions.hpp"
#include "bifree/scalar.hpp"

namespace bifree {

struct Letter {
    std::uint8_t symbol = 0;
    bool starred = false;

    Letter adjoint() const { return {symbol, !starred}; }
    friend bool operator==(const Letter&, const Letter&) = default;
};

/// Finite word over at most 7 symbols and their adjoints, up to 32 letters,
/// packed 4 bits per letter. Words order by length, then lexicographically
/// with `x < x* < y < y* ...` in alphabet declaration order.
class Word {
public:
    static constexpr int kMaxLength = 32;
    static constexpr int kMaxSymbols = 7;

    Word() = default;
    Word(std::initializer_list<Letter> letters);
    explicit Word(const std::vector<Letter>& letters);

    static Word letter(std::uint8_t symbol, bool starred = false) { return Word{Letter{symbol, starred}}; }

    int size() const;
    bool empty() const { return bits_ == 0; }
    Letter operator[](int i) const;

    void push_back(Letter l);
    Word concat(const Word& rhs) const;
    /// Letters at positions whose bits are set in `mask`, in increasing position order.
    Word restrict(std::uint32_t mask) const;
    /// Letters [from, to).
    Word slice(int from, int to) const;
    /// Letter k of the result is letter order[k] of *this.
    Word permuted(const std::vector<int>& order) const;
    Word star() const;
    Word rotated(int k) const;
    /// Replaces every symbol s by symbol_map[s], keeping stars.
    Word relabeled(const std::vector<int>& symbol_map) const;
    std::vector<Letter> letters() const;

    friend bool operator==(const Word&, const Word&) = default;
    friend std::strong_ordering operator<=>(const Word& a, const Word& b);

    std::size_t hash() const noexcept;

private:
    static std::uint8_t code(Letter l) { return static_cast<std::uint8_t>(1 + 2 * l.symbol + (l.starred ? 1 : 0)); }
    static Letter decode(unsigned c) { return {static_cast<std::uint8_t>((c - 1) / 2), ((c - 1) & 1) != 0}; }

    // Letter i occupies bits [124 - 4i, 128 - 4i); unused low nibbles are zero.
    unsigned __int128 bits_ = 0;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept { return w.hash(); }
};

Word star(const Word& w);

struct Symbol {
    std::string name;
    Side side = Side::Unsided;
    friend bool operator==(const Symbol&, const Symbol&) = default;
};

/// Declared *-alphabet. Every symbol has a fixed side.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<Symbol> symbols);

    int size() const { return static_cast<int>(symbols_.size()); }
    const Symbol& symbol(int index) const { return symbols_[static_cast<std::size_t>(index)]; }
    const std::vector<Symbol>& symbols() const { return symbols_; }
    std::optional<int> find(std::string_view name) const;
    int index_of(std::string_view name) const;
    Side side(Letter l) const { return symbols_[l.symbol].side; }
    bool is_sided() const;

    /// "x x* y" style; the empty string is the unit word.
    Word parse_word(std::string_view text) const;
    std::string format(const Word& w) const;
    std::string format(Letter l) const;

    /// Left/right labels of a word over a sided alphabet.
    ChiMap chi(const Word& w) const;

    /// All words of exactly `length` letters, in word order.
    std::vector<Word> words_of_length(int length) const;
    /// Number of words of length 1..degree.
    std::size_t word_count(int degree) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
    std::vector<Symbol> symbols_;
};

/// Finitely supported linear combination of words with Gaussian-rational
/// coefficients; never stores a zero coefficient.
class NcPolynomial {
public:
    using Terms = std::map<Word, Scalar>;

    NcPolynomial() = default;
    NcPolynomial(const Scalar& c);  // NOLINT(google-explicit-constructor)
    NcPolynomial(const Word& w, const Scalar& c = Scalar(1));  // NOLINT(google-explicit-constructor)

    static NcPolynomial unit() { return NcPolynomial(Scalar(1)); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    Scalar coefficient(const Word& w) const;
    Scalar constant_term() const { return coefficient(Word{}); }
    int degree() const;

    void add_term(const Word& w, const Scalar& c);

    NcPolynomial& operator+=(const NcPolynomial& rhs);
    NcPolynomial& operator-=(const NcPolynomial& rhs);
    NcPolynomial& operator*=(const Scalar& c);
    NcPolynomial operator-() const;

    friend NcPolynomial operator+(NcPolynomial a, const NcPolynomial& b) { return a += b; }
    friend NcPolynomial operator-(NcPolynomial a, const NcPolynomial& b) { return a -= b; }
    friend NcPolynomial operator*(const NcPolynomial& a, const NcPolynomial& b);
    friend NcPolynomial operator*(NcPolynomial a, const Scalar& c) { return a *= c; }
    friend NcPolynomial operator*(const Scalar& c, NcPolynomial a) { return a *= c; }
    friend bool operator==(const NcPolynomial&, const NcPolynomial&) = default;

    NcPolynomial pow(int k) const;
    /// Reverses words, stars letters and conjugates coefficients.
    NcPolynomial star() const;

    std::string to_string(const Alphabet& alphabet) const;

private:
    Terms terms_;
};

NcPolynomial star(const NcPolynomial& p);

}  // namespace bifree
