#include "doctest.h"

#include "bifree/diagonal.hpp"
#include "bifree/errors.hpp"
#include "bifree/random.hpp"
#include "oracles.hpp"

using namespace bifree;

namespace {

Alphabet unsided_xy() { return Alphabet({{"x", Side::Unsided}, {"y", Side::Unsided}}); }

ChiMap chi_of(const char* text) { return ChiMap::parse(text); }

// Stars read along the left-then-reversed-right order, computed without ChiMap::order.
std::vector<bool> stars_by_reading(const Alphabet& a, const Word& w) {
    auto rank = oracle::rank_by_reading(oracle::sides_of(a, w));
    std::vector<bool> stars(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i) stars[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = w[i].starred;
    return stars;
}

bool alternating_by_reading(const Alphabet& a, const Word& w) {
    auto stars = stars_by_reading(a, w);
    if (stars.empty() || stars.size() % 2) return false;
    for (std::size_t i = 1; i < stars.size(); ++i)
        if (stars[i] == stars[i - 1]) return false;
    return true;
}

// Moments of a pair whose bi-Boolean cumulants are random on alternating words
// and zero elsewhere, summed over the filtered bi-interval lattice.
MomentTable eta_diagonal_table(int degree, Rng& rng) {
    Alphabet a = pair_alphabet();
    std::map<Word, Scalar> b;
    for (const Word& w : oracle::words_up_to(a, degree))
        if (alternating_by_reading(a, w)) b[w] = random_scalar(rng, true);
    auto kappa = [&b](const Word& w) -> Scalar {
        auto it = b.find(w);
        return it == b.end() ? Scalar() : it->second;
    };
    WordTable::Entries entries{{Word(), Scalar(1)}};
    for (const Word& w : oracle::words_up_to(a, degree))
        entries[w] = oracle::moment_sum(CumulantKind::BiBoolean, a, w, kappa);
    return MomentTable(WordTable(a, degree, std::move(entries), false), {});
}

MomentTable with_entry(const MomentTable& mu, const Word& w, const Scalar& value, MomentFlags flags = {}) {
    WordTable::Entries entries{{Word(), Scalar(1)}};
    for (const Word& v : oracle::words_up_to(mu.alphabet(), mu.degree())) entries[v] = mu(v);
    entries[w] = value;
    return MomentTable(WordTable(mu.alphabet(), mu.degree(), std::move(entries), false), flags);
}

MomentTable from_sparse(CumulantKind kind, const Alphabet& a, int degree, WordTable::Entries entries,
                        MomentFlags flags = {}) {
    return moments_from_cumulants(CumulantTable(kind, WordTable(a, degree, std::move(entries), true)), flags);
}

MomentTable haar_pair_single(int degree, std::vector<Word> images) {
    std::vector<NcPolynomial> polys;
    for (const Word& w : images) polys.emplace_back(w);
    return substitute(haar_unitary(degree * 3, "u"), unsided_xy(), polys, degree);
}

}  // namespace

TEST_CASE("word classification") {
    Alphabet a = pair_alphabet();
    CHECK(classify_word(a, a.parse_word("x x*")).kind == AlternationKind::AlternatingW1);
    CHECK(classify_word(a, a.parse_word("x* y")).kind == AlternationKind::AlternatingW2);
    CHECK(classify_word(a, a.parse_word("y x*")).kind == AlternationKind::AlternatingW2);
    auto single = classify_word(a, a.parse_word("x x* x x*"));
    CHECK(single.kind == AlternationKind::AlternatingW1);
    CHECK(single.blocks.size() == 1);
    auto mixed = classify_word(a, a.parse_word("x x* x* x"));
    CHECK(mixed.kind == AlternationKind::MixedAlternating);
    CHECK(mixed.blocks == std::vector<std::uint32_t>{0b0011, 0b1100});
    CHECK(classify_word(a, a.parse_word("x")).kind == AlternationKind::Other);
    CHECK(classify_word(a, a.parse_word("x x")).kind == AlternationKind::Other);
    CHECK(classify_word(a, a.parse_word("x x* x")).kind == AlternationKind::Other);
    // Right letters are read backwards: y* then x reads x, y*.
    CHECK(classify_word(a, a.parse_word("y* x")).kind == AlternationKind::AlternatingW1);

    for (const Word& w : oracle::words_up_to(a, 6)) {
        auto c = classify_word(a, w);
        Word flipped;
        for (int i = 0; i < w.size(); ++i) flipped.push_back(Letter{w[i].symbol, !w[i].starred});
        auto s = classify_word(a, flipped);
        CHECK(is_alternating(a, w) == alternating_by_reading(a, w));
        if (c.kind == AlternationKind::AlternatingW1) CHECK(s.kind == AlternationKind::AlternatingW2);
        if (c.kind == AlternationKind::AlternatingW2) CHECK(s.kind == AlternationKind::AlternatingW1);
        if (c.kind == AlternationKind::MixedAlternating || c.kind == AlternationKind::Other) CHECK(s.kind == c.kind);
        if (c.kind == AlternationKind::Other) continue;
        // Blocks partition the word, each alternating, types alternating.
        std::uint32_t seen = 0;
        bool previous_starred = false;
        for (std::size_t i = 0; i < c.blocks.size(); ++i) {
            CHECK((seen & c.blocks[i]) == 0);
            seen |= c.blocks[i];
            Word part = w.restrict(c.blocks[i]);
            REQUIRE(alternating_by_reading(a, part));
            bool starred = stars_by_reading(a, part)[0];
            if (i > 0) CHECK(starred != previous_starred);
            previous_starred = starred;
        }
        CHECK(seen == (1U << w.size()) - 1);
    }
}

TEST_CASE("determining patterns") {
    Alphabet a = pair_alphabet();
    CHECK(a.format(pattern_word(chi_of("LR"), false)) == "x y*");
    CHECK(a.format(pattern_word(chi_of("LR"), true)) == "x* y");
    CHECK(a.format(pattern_word(chi_of("RL"), false)) == "y* x");
    for (int n = 2; n <= 8; n += 2) {
        for (std::uint32_t m = 0; m < (1U << n); ++m) {
            std::string text;
            for (int i = 0; i < n; ++i) text += (m >> i & 1U) ? 'R' : 'L';
            ChiMap chi = chi_of(text.c_str());
            Word alpha = pattern_word(chi, false);
            Word beta = pattern_word(chi, true);
            CHECK(a.chi(alpha).to_string() == text);
            CHECK(alternating_by_reading(a, alpha));
            CHECK(alternating_by_reading(a, beta));
            CHECK(!stars_by_reading(a, alpha)[0]);
            CHECK(stars_by_reading(a, beta)[0]);
            // The pattern set is closed under taking adjoints.
            for (const Word& adj : {alpha.star(), beta.star()}) {
                REQUIRE(alternating_by_reading(a, adj));
                CHECK(adj == pattern_word(a.chi(adj), stars_by_reading(a, adj)[0]));
            }
        }
    }
}

TEST_CASE("R-diagonal detection") {
    Alphabet a = pair_alphabet();
    BiCircularSpec spec;
    spec.covariance = {{{Scalar(2), Scalar(Rational(1), Rational(1))}, {Scalar(Rational(1), Rational(-1)), Scalar(3)}}};
    MomentTable circ = bi_circular(spec, 6);
    CHECK(is_r_diagonal(circ, 6).pass);
    DeterminingSequences seq = determining_sequences(circ, 6);
    CHECK(seq.degree == 6);
    CHECK(seq.alpha_at(chi_of("LR")) == spec.covariance[0][1]);
    CHECK(seq.beta_at(chi_of("LR")) == spec.covariance[0][1]);
    CHECK(seq.alpha_at(chi_of("LL")) == Scalar(2));
    CHECK(seq.alpha_at(chi_of("RL")) == spec.covariance[1][0]);
    CHECK(seq.alpha.size() == 4 + 16 + 64);
    for (const auto& [key, value] : seq.alpha)
        if (key.size() > 2) CHECK(value.is_zero());

    MomentTable haar = bi_haar(6);
    CHECK(is_r_diagonal(haar, 6).pass);
    DeterminingSequences hs = determining_sequences(haar, 6);
    CHECK(hs.alpha_at(chi_of("LL")) == Scalar(1));
    CHECK(hs.alpha_at(chi_of("LLLL")) == Scalar(-1));

    MomentTable drift = from_sparse(CumulantKind::BiFree, a, 4, {{a.parse_word("x"), Scalar(1)}});
    Verdict v = is_r_diagonal(drift, 4);
    CHECK(!v.pass);
    CHECK(a.format(*v.witness) == "x");
    CHECK(v.value == Scalar(1));
    CHECK_THROWS_AS(determining_sequences(drift, 4), PreconditionError);

    MomentTable unit_only = from_sparse(CumulantKind::BiFree, a, 4, {});
    for (const auto& [key, value] : determining_sequences(unit_only, 4).alpha) CHECK(value.is_zero());

    CHECK_THROWS_AS(is_r_diagonal(haar_unitary(4), 4), PreconditionError);
    CHECK_THROWS_AS(is_r_diagonal(haar, 8), DegreeError);
}

TEST_CASE("tables from determining sequences") {
    Rng rng(5);
    DeterminingSequences seq;
    seq.degree = 4;
    for (const char* key : {"LL", "LR", "RL", "RR"}) {
        seq.alpha[key] = random_scalar(rng, true);
        seq.beta[key] = random_scalar(rng, true);
    }
    for (int m = 0; m < 16; ++m) {
        std::string key;
        for (int i = 0; i < 4; ++i) key += (m >> i & 1) ? 'R' : 'L';
        seq.alpha[key] = random_scalar(rng, true);
        seq.beta[key] = random_scalar(rng, true);
    }
    MomentTable mu = from_determining_sequences(seq, 4);
    CHECK(is_r_diagonal(mu, 4).pass);
    DeterminingSequences back = determining_sequences(mu, 4);
    CHECK(back.alpha == seq.alpha);
    CHECK(back.beta == seq.beta);

    Alphabet a = mu.alphabet();
    auto kappa = [&](const Word& w) -> Scalar {
        if (!alternating_by_reading(a, w)) return {};
        std::string key = a.chi(w).to_string();
        return stars_by_reading(a, w)[0] ? seq.beta.at(key) : seq.alpha.at(key);
    };
    for (const Word& w : oracle::words_up_to(a, 4))
        REQUIRE(mu(w) == oracle::moment_sum(CumulantKind::BiFree, a, w, kappa));

    DeterminingSequences partial = seq;
    partial.alpha.erase("LR");
    CHECK_THROWS_AS(from_determining_sequences(partial, 4)(a.parse_word("x y*")), MissingEntryError);

    std::string text = determining_json(seq);
    DeterminingSequences parsed = parse_determining_json(text);
    CHECK(parsed.alpha == seq.alpha);
    CHECK(parsed.degree == 4);
    CHECK_THROWS_AS(parse_determining_json(R"({"alpha": {"LRL": 1}, "beta": {}})"), ParseError);
    CHECK_THROWS_AS(parse_determining_json(R"({"alpha": {"LX": 1}, "beta": {}})"), ParseError);
    CHECK_THROWS_AS(parse_determining_json(R"({"alpha": {}})"), ParseError);
}

TEST_CASE("eta-diagonal detection and the moment characterization") {
    Alphabet a = pair_alphabet();
    MomentTable cor = from_sparse(CumulantKind::BiBoolean, a, 6, {{a.parse_word("x x* y* y"), Scalar(1)}});
    CHECK(is_eta_diagonal(cor, 6).pass);
    CHECK(eta_moment_characterization(cor, 6).pass);

    MomentTable zero = from_sparse(CumulantKind::BiBoolean, a, 4, {});
    CHECK(is_eta_diagonal(zero, 4).pass);

    MomentTable bad = from_sparse(CumulantKind::BiBoolean, a, 4, {{a.parse_word("x x"), Scalar(1)}});
    Verdict v = is_eta_diagonal(bad, 4);
    CHECK(!v.pass);
    CHECK(a.format(*v.witness) == "x x");

    Rng rng(31);
    for (int round = 0; round < 6; ++round) {
        MomentTable mu = eta_diagonal_table(5, rng);
        REQUIRE(is_eta_diagonal(mu, 5).pass);
        REQUIRE(eta_moment_characterization(mu, 5).pass);

        // Perturb a moment of a word that is not mixed alternating.
        std::vector<Word> others;
        for (const Word& w : oracle::words_up_to(a, 5))
            if (classify_word(a, w).kind == AlternationKind::Other) others.push_back(w);
        Word target = others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng)];
        MomentTable broken = with_entry(mu, target, mu(target) + Scalar(1));
        Verdict e = is_eta_diagonal(broken, 5);
        Verdict m = eta_moment_characterization(broken, 5);
        CHECK(!e.pass);
        CHECK(!m.pass);
        CHECK(*e.witness == target);
        CHECK(*m.witness == target);
    }
    for (int round = 0; round < 20; ++round) {
        MomentTable mu = random_moment_table(a, 4, {}, rng);
        CHECK(is_eta_diagonal(mu, 4).pass == eta_moment_characterization(mu, 4).pass);
    }
}

TEST_CASE("eta-series of squares") {
    Alphabet a = pair_alphabet();
    MomentTable cor = from_sparse(CumulantKind::BiBoolean, a, 8, {{a.parse_word("x x* y* y"), Scalar(1)}});
    EtaSquares sq = eta_series_of_squares(cor, 8);
    CHECK(sq.consistent);
    CHECK(sq.mixed_vanish);
    // (x x*, y* y) mixes the two square pairs; its mixed bi-Boolean cumulant is 1.
    const Letter x{0, false}, xs{0, true}, y{1, false}, ys{1, true};
    MomentTable mixed = substitute(cor, Alphabet({{"a", Side::Left}, {"b", Side::Right}}),
                                   {NcPolynomial(Word{x, xs}), NcPolynomial(Word{ys, y})}, 4);
    CHECK(mixed.cumulants(CumulantKind::BiBoolean)(mixed.alphabet().parse_word("a b")) == Scalar(1));
    CHECK(cor.cumulants(CumulantKind::BiBoolean)(a.parse_word("x x* y* y")) == Scalar(1));

    MomentTable zero = from_sparse(CumulantKind::BiBoolean, a, 4, {});
    EtaSquares z = eta_series_of_squares(zero, 4);
    CHECK(z.direct[0].coefficients.empty());
    CHECK(z.doubled[1].coefficients.empty());

    Rng rng(8);
    for (int round = 0; round < 3; ++round) {
        MomentTable mu = eta_diagonal_table(6, rng);
        EtaSquares s = eta_series_of_squares(mu, 6);
        CHECK(s.consistent);
        CHECK(s.mixed_vanish);
        // Constant chi coefficients: the Boolean cumulants of x x* alone.
        Word aa = s.direct[0].alphabet.parse_word("a a");
        Scalar expected = mu.cumulants(CumulantKind::BiBoolean)(a.parse_word("x x* x x*"));
        auto it = s.direct[0].coefficients.find(aa);
        CHECK((it == s.direct[0].coefficients.end() ? Scalar() : it->second) == expected);
    }
    CHECK_THROWS_AS(eta_series_of_squares(from_sparse(CumulantKind::BiBoolean, a, 4, {{a.parse_word("x"), Scalar(1)}}), 4),
                    PreconditionError);
}

TEST_CASE("product cumulants and the alpha recursion") {
    Rng rng(12);
    MomentTable single = random_moment_table(unsided_xy(), 6, {true, false, false}, rng);
    ProductCumulants pc = product_cumulants(single, 6);
    CHECK(pc.unstarred_first.size() == 3 + 5 + 7);
    Word xxs = unsided_xy().parse_word("x x*");
    CHECK(pc.unstarred_first.at({2, 0}) == single(xxs));
    CHECK(pc.starred_first.at({0, 2}) == single(unsided_xy().parse_word("y* y")));
    // n = 1: alpha equals the order-one product cumulant.
    DeterminingSequences d = alpha_recursion(pc, 6);
    CHECK(d.alpha_at(chi_of("LL")) == pc.unstarred_first.at({2, 0}));
    CHECK(d.alpha_at(chi_of("LR")) == pc.unstarred_first.at({1, 1}));
    CHECK(d.beta_at(chi_of("RR")) == pc.starred_first.at({0, 2}));

    ProductCumulants zero;
    zero.degree = 4;
    for (int n = 1; n <= 2; ++n)
        for (int k = 0; k <= 2 * n; ++k) {
            zero.unstarred_first[{k, 2 * n - k}] = Scalar();
            zero.starred_first[{k, 2 * n - k}] = Scalar();
        }
    for (const auto& [key, value] : alpha_recursion(zero, 4).alpha) CHECK(value.is_zero());
    ProductCumulants partial = zero;
    partial.starred_first.erase({1, 3});
    CHECK_THROWS_AS(alpha_recursion(partial, 4), MissingEntryError);

    // R-diagonal by construction: rotate by a free Haar unitary.
    for (int round = 0; round < 2; ++round) {
        MomentTable base = random_moment_table(unsided_xy(), 6, {true, false, false}, rng);
        MomentTable rotated = multiply_free_haar(base, 6);
        MomentTable pair = lr_pair(rotated, 6);
        REQUIRE(is_r_diagonal(pair, 6).pass);
        DeterminingSequences direct = determining_sequences(pair, 6);
        DeterminingSequences recursed = alpha_recursion(product_cumulants(rotated, 6), 6);
        CHECK(direct.alpha == recursed.alpha);
        CHECK(direct.beta == recursed.beta);
    }
}

TEST_CASE("left-right characterizations agree") {
    Alphabet xy = unsided_xy();
    const Letter u{0, false}, us{0, true};
    MomentTable same = haar_pair_single(6, {Word{u}, Word{u}});
    ChainVerdict c = condition_3_6(same, 6);
    CHECK(c.pass);
    CHECK(c.chains_checked > 0);
    CHECK(haar_invariance_check(same, 6).pass);
    CHECK(is_r_diagonal(lr_pair(same, 6), 6).pass);

    Rng rng(40);
    MomentTable drift = random_moment_table(xy, 4, {true, false, false}, rng);
    drift = with_entry(drift, xy.parse_word("x"), Scalar(1), {true, false, false});
    ChainVerdict df = condition_3_6(drift, 4);
    CHECK(!df.pass);
    CHECK(xy.format(*df.witness) == "x");
    Verdict hv = haar_invariance_check(drift, 4);
    CHECK(!hv.pass);

    MomentTable zero = from_sparse(CumulantKind::Free, xy, 4, {}, {true, false, false});
    CHECK(haar_invariance_check(zero, 4).pass);
    CHECK(condition_3_6(zero, 4).pass);

    // A semicircular x = y is self-adjoint, hence not R-diagonal.
    Alphabet s({{"s", Side::Unsided}});
    WordTable::Entries k2;
    for (bool p : {false, true})
        for (bool q : {false, true}) k2[Word{Letter{0, p}, Letter{0, q}}] = Scalar(1);
    MomentTable semi = from_sparse(CumulantKind::Free, s, 12, k2, {true, false, false});
    MomentTable semi_xy = substitute(semi, xy, {NcPolynomial(Word{u}), NcPolynomial(Word{u})}, 6);

    std::vector<MomentTable> samples{same, semi_xy, zero,
                                     haar_pair_single(6, {Word{u}, Word{u, u}}),
                                     haar_pair_single(6, {Word{u}, Word{us}}),
                                     haar_pair_single(6, {Word{u, u}, Word{us}})};
    for (int i = 0; i < 4; ++i) samples.push_back(random_moment_table(xy, 6, {true, false, false}, rng, i % 2 == 0));
    for (int i = 0; i < 2; ++i)
        samples.push_back(multiply_free_haar(random_moment_table(xy, 6, {true, false, false}, rng), 6));
    int passes = 0;
    for (const MomentTable& mu : samples) {
        int degree = std::min(mu.degree(), 6);
        bool chains = condition_3_6(mu, degree).pass;
        bool r = is_r_diagonal(lr_pair(mu, degree), degree).pass;
        bool h = haar_invariance_check(mu, degree).pass;
        CHECK(chains == r);
        CHECK(h == r);
        passes += r ? 1 : 0;
    }
    CHECK(passes >= 3);
    CHECK(!condition_3_6(semi_xy, 6).pass);

    CHECK_THROWS_AS(condition_3_6(random_moment_table(xy, 4, {}, rng), 4), PreconditionError);
    CHECK_THROWS_AS(condition_3_6(same, 1), PreconditionError);
}
