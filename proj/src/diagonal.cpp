#include "bifree/diagonal.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bifree/errors.hpp"
#include "bifree/json_io.hpp"

namespace bifree {

namespace {

void require_pair_alphabet(const Alphabet& a) {
    if (a.size() != 2 || a.symbol(0).side != Side::Left || a.symbol(1).side != Side::Right) {
        throw PreconditionError("expected a pair alphabet {left, right}");
    }
}

void require_single_alphabet(const Alphabet& a) {
    if (a.size() != 2 || a.symbol(0).side != Side::Unsided || a.symbol(1).side != Side::Unsided) {
        throw PreconditionError("expected an unsided two-symbol alphabet {x, y}");
    }
}

void require_degree(const MomentTable& mu, int degree) {
    if (degree < 1) throw PreconditionError("degree must be positive");
    if (degree > mu.degree()) throw DegreeError("requested degree exceeds the table cap");
}

// Stars of w read in chi order.
std::vector<bool> ordered_stars(const Alphabet& a, const Word& w, std::vector<int>& order) {
    order = a.chi(w).order();
    std::vector<bool> stars;
    for (int p : order) stars.push_back(w[p].starred);
    return stars;
}

std::vector<Word> words_up_to(const Alphabet& a, int degree) {
    std::vector<Word> out;
    for (int n = 1; n <= degree; ++n) {
        auto layer = a.words_of_length(n);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::vector<ChiMap> chis_of_length(int n) {
    std::vector<ChiMap> out;
    for (std::uint32_t m = 0; m < (1U << n); ++m) {
        std::vector<Side> labels;
        for (int i = 0; i < n; ++i) labels.push_back(m >> (n - 1 - i) & 1U ? Side::Right : Side::Left);
        out.emplace_back(std::move(labels));
    }
    return out;
}

Scalar lookup(const std::map<std::string, Scalar>& table, const ChiMap& chi, const char* family) {
    auto it = table.find(chi.to_string());
    if (it == table.end()) {
        throw MissingEntryError(std::string("no ") + family + " entry for chi " + chi.to_string());
    }
    return it->second;
}

}  // namespace

Scalar DeterminingSequences::alpha_at(const ChiMap& chi) const { return lookup(alpha, chi, "alpha"); }
Scalar DeterminingSequences::beta_at(const ChiMap& chi) const { return lookup(beta, chi, "beta"); }

Word pattern_word(const ChiMap& chi, bool starred_first) {
    const int n = chi.size();
    std::vector<Letter> letters(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        int p = chi.order()[static_cast<std::size_t>(j)];
        bool starred = (j % 2 == 1) != starred_first;
        letters[static_cast<std::size_t>(p)] = Letter{static_cast<std::uint8_t>(chi[p] == Side::Left ? 0 : 1), starred};
    }
    return Word(letters);
}

std::string to_string(AlternationKind kind) {
    switch (kind) {
        case AlternationKind::AlternatingW1: return "alternating_W1";
        case AlternationKind::AlternatingW2: return "alternating_W2";
        case AlternationKind::MixedAlternating: return "mixed_alternating";
        case AlternationKind::Other: return "other";
    }
    return "other";
}

bool is_alternating(const Alphabet& alphabet, const Word& w) {
    if (w.empty() || w.size() % 2 != 0) return false;
    std::vector<int> order;
    auto stars = ordered_stars(alphabet, w, order);
    for (std::size_t i = 1; i < stars.size(); ++i) {
        if (stars[i] == stars[i - 1]) return false;
    }
    return true;
}

AlternationClass classify_word(const Alphabet& alphabet, const Word& w) {
    AlternationClass out;
    if (w.empty()) return out;
    std::vector<int> order;
    auto stars = ordered_stars(alphabet, w, order);
    // Inside a factor stars alternate, and an even factor ends opposite to how
    // it starts, so factors meet exactly where a star value repeats.
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 1; i < stars.size(); ++i) {
        if (stars[i] == stars[i - 1]) starts.push_back(i);
    }
    starts.push_back(stars.size());
    std::vector<std::uint32_t> blocks;
    for (std::size_t s = 0; s + 1 < starts.size(); ++s) {
        if ((starts[s + 1] - starts[s]) % 2 != 0) return out;
        std::uint32_t mask = 0;
        for (std::size_t r = starts[s]; r < starts[s + 1]; ++r) mask |= 1U << order[r];
        blocks.push_back(mask);
    }
    if (blocks.size() == 1) {
        out.kind = stars[0] ? AlternationKind::AlternatingW2 : AlternationKind::AlternatingW1;
    } else {
        out.kind = AlternationKind::MixedAlternating;
    }
    out.blocks = std::move(blocks);
    return out;
}

namespace {

Verdict scan_non_alternating(const MomentTable& mu, int degree, CumulantKind kind) {
    require_pair_alphabet(mu.alphabet());
    require_degree(mu, degree);
    CumulantTable k = mu.cumulants(kind);
    Verdict v;
    for (const Word& w : words_up_to(mu.alphabet(), degree)) {
        if (is_alternating(mu.alphabet(), w)) continue;
        Scalar value = k(w);
        if (!value.is_zero()) {
            v.pass = false;
            v.witness = w;
            v.value = value;
            v.reason = to_string(kind) + " cumulant of a non-alternating word is nonzero";
            return v;
        }
    }
    return v;
}

}  // namespace

Verdict is_r_diagonal(const MomentTable& mu, int degree) {
    return scan_non_alternating(mu, 2 * (degree / 2), CumulantKind::BiFree);
}

DeterminingSequences determining_sequences(const MomentTable& mu, int degree) {
    Verdict v = is_r_diagonal(mu, degree);
    if (!v.pass) {
        throw PreconditionError("table is not R-diagonal at '" + mu.alphabet().format(*v.witness) + "'");
    }
    CumulantTable k = mu.cumulants(CumulantKind::BiFree);
    DeterminingSequences out;
    out.degree = 2 * (degree / 2);
    for (int n = 2; n <= out.degree; n += 2) {
        for (const ChiMap& chi : chis_of_length(n)) {
            out.alpha[chi.to_string()] = k(pattern_word(chi, false));
            out.beta[chi.to_string()] = k(pattern_word(chi, true));
        }
    }
    return out;
}

MomentTable from_determining_sequences(const DeterminingSequences& seq, int degree, const Alphabet& alphabet) {
    require_pair_alphabet(alphabet);
    if (degree > seq.degree + 1) throw DegreeError("requested degree exceeds the sequences' cap");
    WordTable kappa(alphabet, degree, [seq](const Word& w, const WordTable& self) -> Scalar {
        if (!is_alternating(self.alphabet(), w)) return {};
        ChiMap chi = self.alphabet().chi(w);
        bool starred_first = w[chi.order()[0]].starred;
        return starred_first ? seq.beta_at(chi) : seq.alpha_at(chi);
    });
    MomentFlags flags;
    return moments_from_cumulants(CumulantTable(CumulantKind::BiFree, std::move(kappa)), flags);
}

Verdict is_eta_diagonal(const MomentTable& mu, int degree) {
    return scan_non_alternating(mu, degree, CumulantKind::BiBoolean);
}

Verdict eta_moment_characterization(const MomentTable& mu, int degree) {
    require_pair_alphabet(mu.alphabet());
    require_degree(mu, degree);
    Verdict v;
    for (const Word& w : words_up_to(mu.alphabet(), degree)) {
        AlternationClass c = classify_word(mu.alphabet(), w);
        Scalar value = mu(w);
        if (c.kind == AlternationKind::Other) {
            if (value.is_zero()) continue;
            v.reason = "moment of a word that is not mixed alternating is nonzero";
        } else {
            if (c.blocks.size() < 2) continue;
            Scalar product(1);
            for (auto block : c.blocks) product *= mu(w.restrict(block));
            if (product == value) continue;
            v.reason = "moment differs from the product over its canonical factorization";
        }
        v.pass = false;
        v.witness = w;
        v.value = value;
        return v;
    }
    return v;
}

MomentTable square_pair(const MomentTable& mu, int which, int degree) {
    require_pair_alphabet(mu.alphabet());
    const Letter x{0, false}, xs{0, true}, y{1, false}, ys{1, true};
    Alphabet squares({{"a", Side::Left}, {"b", Side::Right}});
    std::vector<NcPolynomial> polys;
    if (which == 0) {
        polys = {NcPolynomial(Word{x, xs}), NcPolynomial(Word{y, ys})};
    } else {
        polys = {NcPolynomial(Word{xs, x}), NcPolynomial(Word{ys, y})};
    }
    return substitute(mu, squares, polys, degree);
}

EtaSquares eta_series_of_squares(const MomentTable& mu, int degree) {
    Verdict v = is_eta_diagonal(mu, degree);
    if (!v.pass) {
        throw PreconditionError("table is not eta-diagonal at '" + mu.alphabet().format(*v.witness) + "'");
    }
    const int half = degree / 2;
    if (half < 1) throw DegreeError("doubling needs degree at least 2");
    EtaSquares out;
    CumulantTable b = mu.cumulants(CumulantKind::BiBoolean);
    for (int which = 0; which < 2; ++which) {
        MomentTable sq = square_pair(mu, which, half);
        CumulantTable direct = sq.cumulants(CumulantKind::BiBoolean);
        out.direct[which].alphabet = sq.alphabet();
        out.doubled[which].alphabet = sq.alphabet();
        for (int n = 1; n <= half; ++n) {
            for (const Word& w : sq.alphabet().words_of_length(n)) {
                bool plain = true;
                for (int i = 0; i < n; ++i) plain = plain && !w[i].starred;
                if (!plain) continue;
                Word doubled;
                for (int i = 0; i < n; ++i) {
                    std::uint8_t s = w[i].symbol;
                    bool first_starred = which == 1;
                    doubled.push_back(Letter{s, first_starred});
                    doubled.push_back(Letter{s, !first_starred});
                }
                Scalar d = direct(w);
                Scalar e = b(doubled);
                if (!d.is_zero()) out.direct[which].coefficients[w] = d;
                if (!e.is_zero()) out.doubled[which].coefficients[w] = e;
                bool constant = sq.alphabet().chi(w).is_constant();
                bool bad = false;
                if (d != e) {
                    out.consistent = false;
                    bad = true;
                }
                if (!constant && !d.is_zero()) {
                    out.mixed_vanish = false;
                    bad = true;
                }
                if (bad && !out.mismatch) out.mismatch = w;
            }
        }
    }
    return out;
}

ProductCumulants product_cumulants(const MomentTable& single, int degree) {
    require_single_alphabet(single.alphabet());
    require_degree(single, degree);
    const Letter x{0, false}, xs{0, true}, y{1, false}, ys{1, true};
    // Products of (unstarred, starred) pairs, then of (starred, unstarred) pairs.
    Alphabet products({{"p0", Side::Unsided},
                       {"p1", Side::Unsided},
                       {"p2", Side::Unsided},
                       {"q0", Side::Unsided},
                       {"q1", Side::Unsided},
                       {"q2", Side::Unsided}});
    std::vector<NcPolynomial> polys{NcPolynomial(Word{x, xs}), NcPolynomial(Word{x, ys}), NcPolynomial(Word{y, ys}),
                                    NcPolynomial(Word{xs, x}), NcPolynomial(Word{xs, y}), NcPolynomial(Word{ys, y})};
    const int half = degree / 2;
    ProductCumulants out;
    out.degree = 2 * half;
    if (half == 0) return out;
    MomentTable sub = substitute(single, products, polys, half);
    CumulantTable kappa = sub.cumulants(CumulantKind::Free);
    for (int n = 1; n <= half; ++n) {
        for (int k1 = 0; k1 <= 2 * n; ++k1) {
            Word first;
            Word second;
            for (int i = 0; i < n; ++i) {
                // letters 2i and 2i+1 (0-based) of the tuple
                int xs_in_pair = std::clamp(k1 - 2 * i, 0, 2);
                std::uint8_t code = xs_in_pair == 2 ? 0 : (xs_in_pair == 1 ? 1 : 2);
                first.push_back(Letter{code, false});
                second.push_back(Letter{static_cast<std::uint8_t>(code + 3), false});
            }
            out.unstarred_first[{k1, 2 * n - k1}] = kappa(first);
            out.starred_first[{k1, 2 * n - k1}] = kappa(second);
        }
    }
    return out;
}

DeterminingSequences alpha_recursion(const ProductCumulants& input, int degree) {
    const int half = degree / 2;
    if (2 * half > input.degree) throw DegreeError("product cumulants do not reach the requested degree");
    // alpha[t][{k1, k2}], t = 0 for unstarred-first tuples, 1 for starred-first
    std::array<std::map<std::pair<int, int>, Scalar>, 2> alpha;
    auto given = [&](int t, int k1, int k2) {
        const auto& m = t == 0 ? input.unstarred_first : input.starred_first;
        auto it = m.find({k1, k2});
        if (it == m.end()) {
            throw MissingEntryError("missing product cumulant for split (" + std::to_string(k1) + ", " +
                                    std::to_string(k2) + ")");
        }
        return it->second;
    };
    for (int n = 1; n <= half; ++n) {
        const auto& partitions = noncrossing_partitions(n);
        for (int k1 = 0; k1 <= 2 * n; ++k1) {
            for (int t = 0; t < 2; ++t) {
                Scalar rest;
                for (const auto& pi : partitions) {
                    if (pi.is_top()) continue;
                    Scalar term(1);
                    for (auto block : pi.blocks()) {
                        // Tuple positions (1-based) paired with the product indices of the block.
                        std::vector<int> tilde;
                        bool has_first = block & 1U;
                        if (has_first) tilde.push_back(1);
                        for (std::uint32_t r = has_first ? block & ~1U : block; r; r &= r - 1) {
                            int i = std::countr_zero(r) + 1;
                            tilde.push_back(2 * i - 2);
                            tilde.push_back(2 * i - 1);
                        }
                        if (has_first) tilde.push_back(2 * n);
                        int a = 0;
                        for (int p : tilde) a += p <= k1 ? 1 : 0;
                        int b = static_cast<int>(tilde.size()) - a;
                        int type = has_first ? t : 1 - t;
                        term *= alpha[static_cast<std::size_t>(type)].at({a, b});
                        if (term.is_zero()) break;
                    }
                    rest += term;
                }
                alpha[static_cast<std::size_t>(t)][{k1, 2 * n - k1}] = given(t, k1, 2 * n - k1) - rest;
            }
        }
    }
    DeterminingSequences out;
    out.degree = 2 * half;
    for (int n = 2; n <= out.degree; n += 2) {
        for (const ChiMap& chi : chis_of_length(n)) {
            std::pair<int, int> key{chi.left_count(), n - chi.left_count()};
            out.alpha[chi.to_string()] = alpha[0].at(key);
            out.beta[chi.to_string()] = alpha[1].at(key);
        }
    }
    return out;
}

ChainVerdict condition_3_6(const MomentTable& single, int degree) {
    require_single_alphabet(single.alphabet());
    if (!single.flags().tracial) throw PreconditionError("condition (3.6) needs a tracial table");
    if (degree < 2) throw PreconditionError("degree must be at least 2");
    require_degree(single, degree);
    ChainVerdict out;
    for (int len = 1; len <= degree; ++len) {
        std::vector<Word> words;
        for (int k = 0; k <= len; ++k) {
            for (std::uint32_t stars = 0; stars < (1U << len); ++stars) {
                Word w;
                for (int i = 0; i < len; ++i) {
                    w.push_back(Letter{static_cast<std::uint8_t>(i < k ? 0 : 1), (stars >> i & 1U) != 0});
                }
                words.push_back(w);
            }
        }
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        for (const Word& w : words) {
            std::vector<int> cuts{0};
            for (int i = 1; i < len; ++i) {
                if (w[i].starred == w[i - 1].starred) cuts.push_back(i);
            }
            NcPolynomial product = NcPolynomial::unit();
            for (std::size_t f = 0; f < cuts.size(); ++f) {
                int from = cuts[f];
                int to = f + 1 < cuts.size() ? cuts[f + 1] : len;
                NcPolynomial factor(w.slice(from, to));
                if ((to - from) % 2 == 0) factor = center(factor, single);
                product = product * factor;
            }
            ++out.chains_checked;
            Scalar value = single.evaluate(product);
            if (!value.is_zero()) {
                out.pass = false;
                out.witness = w;
                out.cuts = cuts;
                out.value = value;
                return out;
            }
        }
    }
    return out;
}

Verdict haar_invariance_check(const MomentTable& single, int degree) {
    require_single_alphabet(single.alphabet());
    require_degree(single, degree);
    MomentTable plain = lr_pair(single, degree);
    MomentTable rotated = lr_pair(multiply_free_haar(single, degree), degree);
    Verdict v;
    for (const Word& w : words_up_to(plain.alphabet(), degree)) {
        Scalar a = plain(w);
        Scalar b = rotated(w);
        if (a != b) {
            v.pass = false;
            v.witness = w;
            v.value = b - a;
            v.reason = "moment changes under multiplication by a free Haar unitary";
            return v;
        }
    }
    return v;
}

Corollary410Report corollary_4_10_witness() {
    Alphabet a = pair_alphabet();
    Corollary410Report r;
    WordTable::Entries b{{a.parse_word("x x* y* y"), Scalar(1)}};
    r.pair = moments_from_cumulants(CumulantTable(CumulantKind::BiBoolean, WordTable(a, 8, std::move(b), true)));
    r.eta_diagonal = is_eta_diagonal(r.pair, 8).pass;
    const Letter x{0, false}, xs{0, true}, y{1, false}, ys{1, true};
    Alphabet sq({{"a", Side::Left}, {"b", Side::Right}, {"c", Side::Left}, {"d", Side::Right}});
    r.squares = substitute(r.pair, sq,
                           {NcPolynomial(Word{x, xs}), NcPolynomial(Word{y, ys}), NcPolynomial(Word{xs, x}),
                            NcPolynomial(Word{ys, y})},
                           4);
    r.mixed_square_cumulant = r.squares.cumulants(CumulantKind::BiBoolean)(sq.parse_word("a d"));
    r.doubled_cumulant = r.pair.cumulants(CumulantKind::BiBoolean)(a.parse_word("x x* y* y"));
    r.independence = test_biboolean_independence(r.squares, {0, 0, 1, 1}, 2);
    return r;
}

// JSON -----------------------------------------------------------------------

std::string determining_json(const DeterminingSequences& seq) {
    Json doc;
    doc["degree"] = seq.degree;
    Json alpha = Json::object();
    Json beta = Json::object();
    for (const auto& [key, value] : seq.alpha) alpha[key] = scalar_to_json(value);
    for (const auto& [key, value] : seq.beta) beta[key] = scalar_to_json(value);
    doc["alpha"] = std::move(alpha);
    doc["beta"] = std::move(beta);
    return doc.dump(2) + "\n";
}

DeterminingSequences parse_determining_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
    }
    if (!doc.is_object() || !doc.contains("alpha") || !doc.contains("beta")) {
        throw ParseError("determining sequences need 'alpha' and 'beta'");
    }
    DeterminingSequences seq;
    int longest = 0;
    auto read = [&](const char* name, std::map<std::string, Scalar>& out) {
        const Json& m = doc.at(name);
        if (!m.is_object()) throw ParseError(std::string("'") + name + "' must be an object");
        for (const auto& [key, value] : m.items()) {
            try {
                ChiMap chi = ChiMap::parse(key);
                if (chi.size() % 2 != 0) throw ParseError("odd length chi '" + key + "'");
            } catch (const std::invalid_argument&) {
                throw ParseError("bad chi key '" + key + "'");
            }
            longest = std::max(longest, static_cast<int>(key.size()));
            out[key] = scalar_from_json(value);
        }
    };
    read("alpha", seq.alpha);
    read("beta", seq.beta);
    if (doc.contains("degree")) {
        if (!doc.at("degree").is_number_integer()) throw ParseError("degree must be an integer");
        seq.degree = doc.at("degree").get<int>();
        if (seq.degree < longest) throw ParseError("entries exceed the declared degree");
    } else {
        seq.degree = longest;
    }
    return seq;
}

DeterminingSequences load_determining_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_determining_json(buffer.str());
}

}  // namespace bifree
