#include "bifree/ncpoly.hpp"

#include <bit>

#include "bifree/errors.hpp"

namespace bifree {

namespace {

using u128 = unsigned __int128;

int ctz128(u128 v) {
    auto lo = static_cast<std::uint64_t>(v);
    if (lo != 0) return std::countr_zero(lo);
    return 64 + std::countr_zero(static_cast<std::uint64_t>(v >> 64));
}

int shift_of(int i) { return 124 - 4 * i; }

}  // namespace

Word::Word(std::initializer_list<Letter> letters) {
    for (Letter l : letters) push_back(l);
}

Word::Word(const std::vector<Letter>& letters) {
    for (Letter l : letters) push_back(l);
}

int Word::size() const {
    if (bits_ == 0) return 0;
    return 32 - ctz128(bits_) / 4;
}

Letter Word::operator[](int i) const {
    return decode(static_cast<unsigned>(bits_ >> shift_of(i)) & 0xF);
}

void Word::push_back(Letter l) {
    if (l.symbol >= kMaxSymbols) throw SizeError("alphabet supports at most 7 symbols");
    int n = size();
    if (n >= kMaxLength) throw SizeError("word longer than 32 letters");
    bits_ |= static_cast<u128>(code(l)) << shift_of(n);
}

Word Word::concat(const Word& rhs) const {
    int n = size();
    int m = rhs.size();
    if (n + m > kMaxLength) throw SizeError("word longer than 32 letters");
    Word out = *this;
    if (m > 0) out.bits_ |= rhs.bits_ >> (4 * n);
    return out;
}

Word Word::restrict(std::uint32_t mask) const {
    Word out;
    int k = 0;
    for (std::uint32_t r = mask; r; r &= r - 1) {
        int i = std::countr_zero(r);
        u128 nib = (bits_ >> shift_of(i)) & 0xF;
        out.bits_ |= nib << shift_of(k++);
    }
    return out;
}

Word Word::slice(int from, int to) const {
    if (to <= from) return {};
    std::uint32_t mask = (to >= 32 ? ~0U : ((1U << to) - 1)) & ~((1U << from) - 1);
    return restrict(mask);
}

Word Word::permuted(const std::vector<int>& order) const {
    Word out;
    int k = 0;
    for (int i : order) {
        u128 nib = (bits_ >> shift_of(i)) & 0xF;
        out.bits_ |= nib << shift_of(k++);
    }
    return out;
}

Word Word::star() const {
    Word out;
    int n = size();
    for (int i = n - 1; i >= 0; --i) out.push_back((*this)[i].adjoint());
    return out;
}

Word Word::rotated(int k) const {
    int n = size();
    if (n == 0) return *this;
    k %= n;
    if (k < 0) k += n;
    return slice(k, n).concat(slice(0, k));
}

Word Word::relabeled(const std::vector<int>& symbol_map) const {
    Word out;
    int n = size();
    for (int i = 0; i < n; ++i) {
        Letter l = (*this)[i];
        out.push_back(Letter{static_cast<std::uint8_t>(symbol_map.at(l.symbol)), l.starred});
    }
    return out;
}

std::vector<Letter> Word::letters() const {
    std::vector<Letter> out;
    int n = size();
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back((*this)[i]);
    return out;
}

std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (auto c = a.size() <=> b.size(); c != 0) return c;
    return a.bits_ <=> b.bits_;
}

std::size_t Word::hash() const noexcept {
    auto lo = static_cast<std::uint64_t>(bits_);
    auto hi = static_cast<std::uint64_t>(bits_ >> 64);
    std::uint64_t h = hi * 0x9e3779b97f4a7c15ULL ^ (lo + 0x632be59bd9b4e019ULL + (hi << 6) + (hi >> 2));
    h ^= h >> 31;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    return static_cast<std::size_t>(h);
}

Word star(const Word& w) { return w.star(); }

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.size() > static_cast<std::size_t>(Word::kMaxSymbols)) {
        throw SizeError("alphabet supports at most 7 symbols");
    }
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        const auto& name = symbols_[i].name;
        if (name.empty() || name.find_first_of(" \t*") != std::string::npos) {
            throw PreconditionError("invalid symbol name '" + name + "'");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (symbols_[j].name == name) throw PreconditionError("duplicate symbol '" + name + "'");
        }
    }
}

std::optional<int> Alphabet::find(std::string_view name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i].name == name) return static_cast<int>(i);
    }
    return std::nullopt;
}

int Alphabet::index_of(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw PreconditionError("undeclared symbol '" + std::string(name) + "'");
    return *idx;
}

bool Alphabet::is_sided() const {
    for (const auto& s : symbols_) {
        if (s.side == Side::Unsided) return false;
    }
    return !symbols_.empty();
}

Word Alphabet::parse_word(std::string_view text) const {
    Word w;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && text[i] == ' ') ++i;
        if (i >= text.size()) break;
        std::size_t start = i;
        while (i < text.size() && text[i] != ' ') ++i;
        std::string_view token = text.substr(start, i - start);
        bool starred = false;
        if (token.size() > 1 && token.back() == '*') {
            starred = true;
            token.remove_suffix(1);
        }
        auto idx = find(token);
        if (!idx) throw ParseError("undeclared symbol '" + std::string(token) + "'", start);
        if (w.size() >= Word::kMaxLength) throw ParseError("word longer than 32 letters", start);
        w.push_back(Letter{static_cast<std::uint8_t>(*idx), starred});
    }
    return w;
}

std::string Alphabet::format(Letter l) const {
    std::string s = symbols_.at(l.symbol).name;
    if (l.starred) s += "*";
    return s;
}

std::string Alphabet::format(const Word& w) const {
    std::string s;
    for (int i = 0; i < w.size(); ++i) {
        if (i) s += " ";
        s += format(w[i]);
    }
    return s;
}

ChiMap Alphabet::chi(const Word& w) const {
    std::vector<Side> labels;
    for (int i = 0; i < w.size(); ++i) {
        Side s = side(w[i]);
        if (s == Side::Unsided) throw PreconditionError("letter '" + format(w[i]) + "' has no side");
        labels.push_back(s);
    }
    return ChiMap(std::move(labels));
}

std::vector<Word> Alphabet::words_of_length(int length) const {
    std::vector<Word> out;
    const int letters = 2 * size();
    if (length < 0 || length > Word::kMaxLength) throw SizeError("word length out of range");
    if (letters == 0) {
        if (length == 0) out.emplace_back();
        return out;
    }
    std::vector<int> digits(static_cast<std::size_t>(length), 0);
    for (;;) {
        Word w;
        for (int d : digits) w.push_back(Letter{static_cast<std::uint8_t>(d / 2), (d & 1) != 0});
        out.push_back(w);
        int i = length - 1;
        while (i >= 0 && digits[static_cast<std::size_t>(i)] == letters - 1) {
            digits[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++digits[static_cast<std::size_t>(i)];
    }
    return out;
}

std::size_t Alphabet::word_count(int degree) const {
    std::size_t total = 0;
    std::size_t p = 1;
    for (int k = 1; k <= degree; ++k) {
        p *= static_cast<std::size_t>(2 * size());
        total += p;
    }
    return total;
}

NcPolynomial::NcPolynomial(const Scalar& c) {
    if (!c.is_zero()) terms_.emplace(Word{}, c);
}

NcPolynomial::NcPolynomial(const Word& w, const Scalar& c) {
    if (!c.is_zero()) terms_.emplace(w, c);
}

Scalar NcPolynomial::coefficient(const Word& w) const {
    auto it = terms_.find(w);
    return it == terms_.end() ? Scalar() : it->second;
}

int NcPolynomial::degree() const {
    int d = 0;
    for (const auto& [w, c] : terms_) d = std::max(d, w.size());
    return d;
}

void NcPolynomial::add_term(const Word& w, const Scalar& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(w, c);
    if (inserted) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
}

NcPolynomial& NcPolynomial::operator+=(const NcPolynomial& rhs) {
    for (const auto& [w, c] : rhs.terms_) add_term(w, c);
    return *this;
}

NcPolynomial& NcPolynomial::operator-=(const NcPolynomial& rhs) {
    for (const auto& [w, c] : rhs.terms_) add_term(w, -c);
    return *this;
}

NcPolynomial& NcPolynomial::operator*=(const Scalar& c) {
    if (c.is_zero()) {
        terms_.clear();
        return *this;
    }
    for (auto& [w, v] : terms_) v *= c;
    return *this;
}

NcPolynomial NcPolynomial::operator-() const {
    NcPolynomial out = *this;
    for (auto& [w, v] : out.terms_) v = -v;
    return out;
}

NcPolynomial operator*(const NcPolynomial& a, const NcPolynomial& b) {
    NcPolynomial out;
    for (const auto& [wa, ca] : a.terms_) {
        for (const auto& [wb, cb] : b.terms_) out.add_term(wa.concat(wb), ca * cb);
    }
    return out;
}

NcPolynomial NcPolynomial::pow(int k) const {
    NcPolynomial out = unit();
    for (int i = 0; i < k; ++i) out = out * *this;
    return out;
}

NcPolynomial NcPolynomial::star() const {
    NcPolynomial out;
    for (const auto& [w, c] : terms_) out.add_term(w.star(), c.conj());
    return out;
}

std::string NcPolynomial::to_string(const Alphabet& alphabet) const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [w, c] : terms_) {
        if (!first) s += " + ";
        first = false;
        std::string coeff = c.to_string();
        if (w.empty()) {
            s += coeff;
        } else {
            if (!c.is_one()) s += "(" + coeff + ")";
            s += alphabet.format(w);
        }
    }
    return s;
}

NcPolynomial star(const NcPolynomial& p) { return p.star(); }

}  // namespace bifree
