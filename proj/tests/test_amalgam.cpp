#include "doctest.h"

#include "bifree/amalgam.hpp"
#include "bifree/errors.hpp"
#include "bifree/random.hpp"

using namespace bifree;

namespace {

const Letter x{0, false};
const Letter xs{0, true};

Alphabet one() { return Alphabet({{"x", Side::Unsided}}); }

Word repeat(std::initializer_list<Letter> unit, int times) {
    Word w;
    for (int i = 0; i < times; ++i)
        for (Letter l : unit) w.push_back(l);
    return w;
}

MomentTable random_table(int degree, Rng& rng) { return random_moment_table(one(), degree, {false, true, false}, rng); }

MomentTable from_free(int degree, WordTable::Entries k) {
    return moments_from_cumulants(CumulantTable(CumulantKind::Free, WordTable(one(), degree, std::move(k), true)),
                                  {false, true, false});
}

}  // namespace

TEST_CASE("matrix basics") {
    Rng rng(1);
    MomentTable mu = random_table(6, rng);
    CHECK(f2(Mat2::identity(), mu) == Diag2{Scalar(1), Scalar(1)});
    Mat2 b = Mat2::scalar(Scalar(2), Scalar(3), Scalar(4), Scalar(5));
    CHECK(f2(b, mu) == Diag2{Scalar(2), Scalar(5)});
    Mat2 a({}, NcPolynomial(Word{x}), NcPolynomial(Word{xs}), {});
    MomentTable centered = from_free(4, {{Word{x, xs}, Scalar(1)}, {Word{xs, x}, Scalar(1)}});
    CHECK(f2(a, centered) == Diag2{});
    CHECK(a.star() == a);
    CHECK((a * a)(0, 0) == NcPolynomial(Word{x, xs}));
    CHECK((a * a)(1, 1) == NcPolynomial(Word{xs, x}));
    CHECK(a.to_string(one()) == "[[0, x], [x*, 0]]");

    // Bimodule property over the scalar diagonals.
    for (int round = 0; round < 10; ++round) {
        Diag2 d{random_scalar(rng, true), random_scalar(rng, true)};
        Diag2 e{random_scalar(rng, true), random_scalar(rng, true)};
        Mat2 m(NcPolynomial(repeat({x, xs}, 1), random_scalar(rng, true)) + NcPolynomial(random_scalar(rng, true)),
               NcPolynomial(Word{x}, random_scalar(rng, true)), NcPolynomial(Word{xs, x, xs}, random_scalar(rng, true)),
               NcPolynomial(repeat({xs, x}, 2), random_scalar(rng, true)));
        Mat2 sandwiched = Mat2::diagonal(d) * m * Mat2::diagonal(e);
        CHECK(f2(sandwiched, mu) == d * f2(m, mu) * e);
        Mat2 s = Mat2::scalar(random_scalar(rng, true), random_scalar(rng, true), random_scalar(rng, true),
                              random_scalar(rng, true));
        CHECK(f2(s, mu) == Diag2{s(0, 0).constant_term(), s(1, 1).constant_term()});
    }
}

TEST_CASE("membership shapes") {
    Mat2 displayed(NcPolynomial(repeat({x, xs}, 2), Scalar(3)), NcPolynomial(Word{x}.concat(repeat({xs, x}, 1)), Scalar(2)),
                   NcPolynomial(Word{xs}, Scalar(-1)), NcPolynomial(repeat({xs, x}, 3)));
    CHECK(in_Z_nonscalar(displayed));
    CHECK(!in_Z_nonscalar(Mat2::identity()));
    CHECK(in_Z_nonscalar(Mat2::scalar(Scalar(1), {}, {}, Scalar(2))));
    CHECK(!in_Z_nonscalar(Mat2(NcPolynomial(Word{x, xs}), {}, {}, NcPolynomial(Word{x, xs}))));
    CHECK(!in_Z_nonscalar(Mat2(NcPolynomial(Word{x}), {}, {}, {})));
    CHECK(!in_Z_nonscalar(Mat2::scalar({}, Scalar(1), {}, {})));
    CHECK(in_scalar_nonidentity(Mat2::scalar({}, Scalar(1), Scalar(1), {})));
    CHECK(in_scalar_nonidentity(Mat2::scalar(Scalar(1), {}, {}, {})));
    CHECK(!in_scalar_nonidentity(Mat2::scalar(Scalar(2), {}, {}, Scalar(2))));
    for (int m = 0; m < 3; ++m) {
        for (const auto& c : {first_witness_chain(m, 1, 0), second_witness_chain(m, 0, 2)}) {
            for (std::size_t i = 0; i < c.factors.size(); ++i) {
                CHECK((i % 2 == 0 ? in_Z_nonscalar(c.factors[i]) : in_scalar_nonidentity(c.factors[i])));
            }
        }
    }
}

TEST_CASE("witness chains") {
    Rng rng(9);
    MomentTable mu = random_table(12, rng);
    for (int m1 = 0; m1 <= 1; ++m1)
        for (int m2 = 0; m2 <= 1; ++m2)
            for (int m3 = 0; m3 <= 1; ++m3) {
                int total = m1 + m2 + m3 + 1;
                AmalgVerdict v = boolean_amalg_check(first_witness_chain(m1, m2, m3).factors, mu);
                CHECK(v.product_side == Diag2{mu(repeat({x, xs}, total)), Scalar()});
                CHECK(v.factored_side == Diag2{});
                AmalgVerdict w = boolean_amalg_check(second_witness_chain(m1, m2, m3).factors, mu);
                CHECK(w.product_side == Diag2{Scalar(), mu(repeat({xs, x}, total))});
                CHECK(w.factored_side == Diag2{});
            }
    for (int n = 1; n <= 5; ++n) {
        AmalgVerdict v = boolean_amalg_check(power_witness_chain(n).factors, mu);
        CHECK(v.product_side == Diag2{mu(repeat({x}, n)), mu(repeat({xs}, n))});
        CHECK(v.factored_side == Diag2{});
    }
    CHECK_THROWS_AS(boolean_amalg_check({Mat2::identity()}, mu), PreconditionError);
    auto c = first_witness_chain(1, 0, 0).factors;
    std::swap(c[0], c[1]);
    CHECK_THROWS_AS(boolean_amalg_check(c, mu), PreconditionError);
    MomentTable small = random_table(2, rng);
    CHECK_THROWS_AS(boolean_amalg_check(first_witness_chain(1, 1, 1).factors, small), DegreeError);
}

TEST_CASE("no Boolean independence over the diagonals") {
    MomentTable haar = haar_unitary(8, "x");
    Theorem52Report r = theorem_5_2_witness(haar, 6);
    CHECK(r.outcome == Theorem52Report::Outcome::Unequal);
    REQUIRE(r.chain);
    CHECK(r.chain->name == "Z1 A1 Z2 A2 Z3");
    CHECK(r.chain->parameters == std::vector<int>{0, 0, 0});
    CHECK(r.values.product_side == Diag2{Scalar(1), Scalar()});

    MomentTable zero = from_free(6, {});
    Theorem52Report z = theorem_5_2_witness(zero, 6);
    CHECK(z.outcome == Theorem52Report::Outcome::Inconclusive);
    CHECK(z.chains_checked > 0);

    // Only x x and x* x* cumulants: the squares see nothing, powers do.
    MomentTable squares_free = from_free(6, {{Word{x, x}, Scalar(1)}, {Word{xs, xs}, Scalar(1)}});
    Theorem52Report p = theorem_5_2_witness(squares_free, 6);
    CHECK(p.outcome == Theorem52Report::Outcome::Unequal);
    REQUIRE(p.chain);
    CHECK(p.chain->name == "(A B)^n");
    CHECK(p.chain->parameters == std::vector<int>{2});

    Rng rng(4);
    for (int round = 0; round < 10; ++round) {
        MomentTable mu = random_table(6, rng);
        bool any = false;
        for (int k = 1; k <= 3; ++k) {
            any = any || !mu(repeat({x, xs}, k)).is_zero() || !mu(repeat({xs, x}, k)).is_zero();
            any = any || !mu(repeat({x}, k)).is_zero() || !mu(repeat({xs}, k)).is_zero();
        }
        if (any) CHECK(theorem_5_2_witness(mu, 6).outcome == Theorem52Report::Outcome::Unequal);
    }
    CHECK_THROWS_AS(theorem_5_2_witness(random_moment_table(one(), 4, {}, rng), 4), PreconditionError);
}
