#include "doctest.h"

#include "bifree/cumulants.hpp"
#include "bifree/errors.hpp"
#include "bifree/json_io.hpp"
#include "bifree/random.hpp"
#include "oracles.hpp"

using namespace bifree;

namespace {

Word parse(const MomentTable& mu, const char* text) { return mu.alphabet().parse_word(text); }

Alphabet unsided_xy() { return Alphabet({{"x", Side::Unsided}, {"y", Side::Unsided}}); }

long long count_nc_pairings(int n) {
    long long count = 0;
    for (const auto& p : set_partitions(n)) {
        bool pairs = true;
        for (auto b : p.blocks()) pairs = pairs && std::popcount(b) == 2;
        if (pairs && !oracle::crosses(p)) ++count;
    }
    return count;
}

CumulantTable sparse_bifree(const Alphabet& a, int degree, WordTable::Entries entries) {
    return CumulantTable(CumulantKind::BiFree, WordTable(a, degree, std::move(entries), true));
}

}  // namespace

TEST_CASE("moments from bi-free cumulants") {
    Alphabet a = pair_alphabet();
    Word x = a.parse_word("x");
    SUBCASE("single first-order cumulant") {
        MomentTable mu = from_bifree_cumulants(sparse_bifree(a, 6, {{x, Scalar(1)}}), 6);
        Word power;
        for (int n = 1; n <= 6; ++n) {
            power = power.concat(x);
            CHECK(mu(power) == Scalar(1));
        }
        CHECK(mu(a.parse_word("x y")) == Scalar(0));
    }
    SUBCASE("second-order cumulant counts non-crossing pairings") {
        MomentTable mu = from_bifree_cumulants(sparse_bifree(a, 8, {{a.parse_word("x x"), Scalar(1)}}), 8);
        Word power;
        for (int n = 1; n <= 8; ++n) {
            power = power.concat(x);
            Scalar expected = n % 2 ? Scalar(0) : Scalar(count_nc_pairings(n));
            CHECK(mu(power) == expected);
        }
        CHECK(mu(a.parse_word("x x x x x x x x")) == Scalar(catalan(4)));
    }
    SUBCASE("zero cumulants give zero moments") {
        MomentTable mu = from_bifree_cumulants(sparse_bifree(a, 4, {}), 4);
        for (const Word& w : oracle::words_up_to(a, 4)) CHECK(mu(w) == Scalar(0));
        CHECK(mu(Word{}) == Scalar(1));
    }
    SUBCASE("lower cap and errors") {
        MomentTable mu = from_bifree_cumulants(sparse_bifree(a, 6, {{x, Scalar(2)}}), 3);
        CHECK(mu.degree() == 3);
        CHECK(mu(a.parse_word("x x x")) == Scalar(8));
        CHECK_THROWS_AS(from_bifree_cumulants(sparse_bifree(a, 3, {}), 4), DegreeError);
        CumulantTable missing(CumulantKind::BiFree, WordTable(a, 3, {{x, Scalar(1)}}, false));
        CHECK_THROWS_AS(from_bifree_cumulants(missing, 3)(a.parse_word("x y")), MissingEntryError);
    }
}

TEST_CASE("bi-circular pairs") {
    BiCircularSpec spec;
    spec.covariance = {{{Scalar(2), Scalar(Rational(1), Rational(1))}, {Scalar(Rational(1), Rational(-1)), Scalar(3)}}};
    MomentTable mu = bi_circular(spec, 6);
    CHECK(mu(parse(mu, "x x*")) == Scalar(2));
    CHECK(mu(parse(mu, "x")) == Scalar(0));
    CHECK(mu(parse(mu, "x x")) == Scalar(0));
    CHECK(mu(parse(mu, "x x* x x*")) == Scalar(8));
    CHECK(mu(parse(mu, "y* y")) == Scalar(3));

    auto kappa = [&](const Word& w) -> Scalar {
        if (w.size() != 2 || w[0].starred == w[1].starred) return {};
        int i = mu.alphabet().side(w[0]) == Side::Left ? 0 : 1;
        int j = mu.alphabet().side(w[1]) == Side::Left ? 0 : 1;
        return spec.covariance[i][j];
    };
    for (const Word& w : oracle::words_up_to(mu.alphabet(), 6)) {
        REQUIRE(mu(w) == oracle::moment_sum(CumulantKind::BiFree, mu.alphabet(), w, kappa));
    }

    BiCircularSpec bad = spec;
    bad.covariance[1][0] = Scalar(1);
    CHECK_THROWS_AS(bi_circular(bad), PreconditionError);
    bad.covariance = {{{Scalar(1), Scalar(2)}, {Scalar(2), Scalar(1)}}};
    CHECK_THROWS_AS(bi_circular(bad), PreconditionError);
    bad.covariance = {{{Scalar(-1), Scalar(0)}, {Scalar(0), Scalar(1)}}};
    CHECK_THROWS_AS(bi_circular(bad), PreconditionError);
}

TEST_CASE("bi-Haar pair") {
    MomentTable mu = bi_haar(6);
    CHECK(mu(parse(mu, "u_l u_r")) == Scalar(0));
    CHECK(mu(parse(mu, "u_l u_r*")) == Scalar(1));
    CHECK(mu(parse(mu, "u_l u_l*")) == Scalar(1));
    CHECK(mu(parse(mu, "u_l u_l u_r* u_r*")) == Scalar(1));
    // Reducing by moving left letters first, then cancelling, only the two
    // exponents survive.
    for (const Word& w : oracle::words_up_to(mu.alphabet(), 5)) {
        int left = 0;
        int right = 0;
        for (int i = 0; i < w.size(); ++i) {
            int e = w[i].starred ? -1 : 1;
            (mu.alphabet().side(w[i]) == Side::Left ? left : right) += e;
        }
        REQUIRE(mu(w) == Scalar(left + right == 0 ? 1 : 0));
    }
}

TEST_CASE("left-right pair from a tracial table") {
    Rng rng(21);
    MomentTable single = random_moment_table(unsided_xy(), 6, {true, false, false}, rng);
    MomentTable pair = lr_pair(single, 6);
    CHECK(pair(parse(pair, "x y")) == single(parse(single, "x y")));
    CHECK(pair(parse(pair, "y x")) == single(parse(single, "x y")));
    for (const Word& w : oracle::words_up_to(pair.alphabet(), 6)) {
        auto labels = oracle::sides_of(pair.alphabet(), w);
        bool all_left = std::count(labels.begin(), labels.end(), Side::Left) == w.size();
        bool all_right = std::count(labels.begin(), labels.end(), Side::Right) == w.size();
        if (all_left) REQUIRE(pair(w) == single(w));
        if (all_right) {
            Word reversed;
            for (int i = w.size() - 1; i >= 0; --i) reversed.push_back(w[i]);
            REQUIRE(pair(w) == single(reversed));
        }
    }
    MomentTable plain = random_moment_table(unsided_xy(), 4, {}, rng);
    CHECK_THROWS_AS(lr_pair(plain, 4), PreconditionError);
    CHECK_THROWS_AS(lr_pair(single, 7), DegreeError);
    // A stored table claiming traciality is checked on load.
    WordTable::Entries entries = plain.table().entries();
    CHECK_THROWS_AS(MomentTable(WordTable(unsided_xy(), 4, entries, false), {true, false, false}),
                    PreconditionError);
}

TEST_CASE("bi-free join") {
    Rng rng(22);
    MomentTable mu1 = random_moment_table(pair_alphabet("a", "b"), 5, {}, rng);
    MomentTable mu2 = random_moment_table(pair_alphabet("c", "d"), 5, {}, rng);
    MomentTable joint = bifree_join(mu1, mu2, 5);
    MomentTable swapped = bifree_join(mu2, mu1, 5);
    const std::vector<int> swap_map{2, 3, 0, 1};
    for (const Word& w : oracle::words_up_to(joint.alphabet(), 4)) {
        bool first = true;
        bool second = true;
        for (int i = 0; i < w.size(); ++i) (w[i].symbol < 2 ? second : first) = false;
        if (first) REQUIRE(joint(w) == mu1(w));
        if (second) REQUIRE(joint(w) == mu2(w.relabeled({0, 0, 0, 1})));
        if (!first && !second) REQUIRE(moments_to_bifree(joint, w) == Scalar(0));
        REQUIRE(swapped(w.relabeled(swap_map)) == joint(w));
    }
    for (const char* a : {"a", "a*", "b", "b*"}) {
        for (const char* c : {"c", "c*", "d", "d*"}) {
            Word wa = joint.alphabet().parse_word(a);
            Word wc = joint.alphabet().parse_word(c);
            CHECK(joint(wa.concat(wc)) == joint(wa) * joint(wc));
        }
    }
    // Re-extract the joint cumulants by an independent route.
    oracle::CumulantSolver solver(CumulantKind::BiFree, joint);
    for (const Word& w : oracle::words_up_to(joint.alphabet(), 3)) {
        bool mixed = false;
        for (int i = 1; i < w.size(); ++i) mixed = mixed || (w[i].symbol < 2) != (w[0].symbol < 2);
        if (mixed) REQUIRE(solver(w) == Scalar(0));
    }
    CHECK_THROWS_AS(bifree_join(mu1, mu1, 4), PreconditionError);
    CHECK_THROWS_AS(bifree_join(mu1, mu2, 6), DegreeError);
}

TEST_CASE("substitution and centering") {
    Rng rng(23);
    MomentTable mu = random_moment_table(unsided_xy(), 6, {}, rng);
    Alphabet products({{"p", Side::Left}, {"q", Side::Right}});
    NcPolynomial xxs(parse(mu, "x x*"));
    NcPolynomial ysy(parse(mu, "y* y"), Scalar(Rational(1), Rational(2)));
    MomentTable sub = substitute(mu, products, {xxs, ysy}, 3);
    CHECK(sub(products.parse_word("p q")) == mu(parse(mu, "x x* y* y")) * Scalar(Rational(1), Rational(2)));
    CHECK(sub(products.parse_word("q*")) == mu(parse(mu, "y* y")) * Scalar(Rational(1), Rational(-2)));
    CHECK_THROWS_AS(substitute(mu, products, {xxs, ysy}, 4), DegreeError);

    for (int t = 0; t < 10; ++t) {
        NcPolynomial p = NcPolynomial(random_scalar(rng, true));
        for (const Word& w : oracle::words_up_to(mu.alphabet(), 3))
            if (rng() % 9 == 0) p.add_term(w, random_scalar(rng, true));
        CHECK(mu.evaluate(center(p, mu)).is_zero());
    }
    CHECK(center(NcPolynomial::unit(), mu).is_zero());
}

TEST_CASE("multiplying by a free Haar unitary") {
    Rng rng(24);
    MomentTable single = random_moment_table(unsided_xy(), 6, {true, false, false}, rng);
    MomentTable rotated = multiply_free_haar(single, 3);
    CHECK(rotated(parse(rotated, "ux ux*")) == single(parse(single, "x x*")));
    CHECK(rotated(parse(rotated, "ux")) == Scalar(0));

    // Oracle: free moment-cumulant sum over the expanded word, with u free from {x, y}.
    Alphabet big({{"x", Side::Unsided}, {"y", Side::Unsided}, {"u", Side::Unsided}});
    oracle::CumulantSolver xy(CumulantKind::Free, single);
    oracle::CumulantSolver u(CumulantKind::Free, haar_unitary(6));
    auto kappa = [&](const Word& w) -> Scalar {
        bool has_u = false;
        bool has_xy = false;
        for (int i = 0; i < w.size(); ++i) (w[i].symbol == 2 ? has_u : has_xy) = true;
        if (has_u && has_xy) return {};
        if (has_u) return u(w.relabeled({0, 0, 0}));
        return xy(w);
    };
    for (const Word& w : oracle::words_up_to(rotated.alphabet(), 3)) {
        Word expanded;
        for (int i = 0; i < w.size(); ++i) {
            Letter l = w[i];
            if (l.starred) {
                expanded.push_back(l);
                expanded.push_back(Letter{2, true});
            } else {
                expanded.push_back(Letter{2, false});
                expanded.push_back(l);
            }
        }
        CAPTURE(rotated.alphabet().format(w));
        REQUIRE(rotated(w) == oracle::moment_sum(CumulantKind::Free, big, expanded, kappa));
    }

    MomentTable haar_x = substitute(haar_unitary(6, "x"), unsided_xy(), {NcPolynomial(Word{Letter{0, false}}), NcPolynomial(Word{Letter{0, true}})}, 6);
    MomentTable uv = multiply_free_haar(haar_x, 3);
    Word power;
    for (int n = 1; n <= 3; ++n) {
        power.push_back(Letter{0, false});
        CHECK(uv(power) == Scalar(0));
    }
    CHECK_THROWS_AS(multiply_free_haar(single, 7), DegreeError);
    CHECK_THROWS_AS(multiply_free_haar(random_moment_table(unsided_xy(), 4, {}, rng), 2), PreconditionError);
}

TEST_CASE("moment file format") {
    const std::string text = R"({
      "alphabet": [{"symbol": "x", "side": "L"}, {"symbol": "y", "side": "R"}],
      "degree": 2,
      "flags": {"sparse": true},
      "moments": {"x x*": [2, 4, 0, 1], "y": [1, 1, "-3", 1], "x* x": [1, 1, 0, 1]}
    })";
    MomentTable mu = parse_moment_json(text);
    CHECK(mu(parse(mu, "x x*")) == Scalar(Rational(1, 2)));
    CHECK(mu(parse(mu, "y")) == Scalar(Rational(1), Rational(-3)));
    CHECK(mu(parse(mu, "x y")) == Scalar(0));
    CHECK(mu.alphabet().side(Letter{1, false}) == Side::Right);

    MomentTable back = parse_moment_json(moment_json(mu, true));
    for (const Word& w : oracle::words_up_to(mu.alphabet(), 2)) CHECK(back(w) == mu(w));
    CHECK(moment_json(back) == moment_json(mu));

    std::string dense = text;
    dense.replace(dense.find("true"), 4, "false");
    CHECK_THROWS_AS(parse_moment_json(dense), MissingEntryError);
    try {
        parse_moment_json("{\"alphabet\": [}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 14);
    }
    CHECK_THROWS_AS(parse_moment_json(R"({"alphabet":[{"symbol":"x","side":"L"}],"degree":1,
        "flags":{"sparse":true},"moments":{"x":[1,0,0,1]}})"), ParseError);
    CHECK_THROWS_AS(parse_moment_json(R"({"alphabet":[{"symbol":"x","side":"L"}],"degree":1,
        "flags":{"sparse":true},"moments":{"z":[1,1,0,1]}})"), ParseError);
    CHECK_THROWS_AS(parse_moment_json(R"({"alphabet":[{"symbol":"x","side":"L"}],"degree":1,
        "flags":{"sparse":true},"moments":{"x x":[1,1,0,1]}})"), ParseError);
    CHECK_THROWS_AS(parse_moment_json(R"({"alphabet":[{"symbol":"x","side":"L"}],"degree":1,
        "moments":{"x":[1.5,1,0,1]}})"), ParseError);
    CHECK_THROWS_AS(load_moment_file("/nonexistent/table.json"), ParseError);
}

TEST_CASE("big scalars survive the file format") {
    Scalar big = Scalar(Rational::parse("123456789012345678901234567890/7"));
    Json j = scalar_to_json(big);
    CHECK(j[0].is_string());
    CHECK(scalar_from_json(j) == big);
    CHECK(scalar_from_json(Json::parse("[\"-4\", \"6\", 0, 1]")) == Scalar(Rational(-2, 3)));
}

TEST_CASE("cumulant file format") {
    Rng rng(25);
    MomentTable mu = random_moment_table(pair_alphabet(), 3, {}, rng);
    CumulantTable k = mu.cumulants(CumulantKind::BiBoolean);
    CumulantTable back = parse_cumulant_json(cumulant_json(k, true));
    CHECK(back.kind() == CumulantKind::BiBoolean);
    for (const Word& w : oracle::words_up_to(mu.alphabet(), 3)) CHECK(back(w) == k(w));
    std::string csv = cumulant_csv(k, true);
    CHECK(csv.rfind("word,re,im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 + 16 + 64);
}
