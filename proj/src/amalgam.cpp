#include "bifree/amalgam.hpp"

#include "bifree/errors.hpp"

namespace bifree {

namespace {

const Letter kX{0, false};
const Letter kXs{0, true};

NcPolynomial monomial(std::initializer_list<Letter> head, std::initializer_list<Letter> repeated, int times) {
    Word w(head);
    Word unit(repeated);
    for (int i = 0; i < times; ++i) w = w.concat(unit);
    return NcPolynomial(w);
}

NcPolynomial xxs(int m) { return monomial({}, {kX, kXs}, m); }
NcPolynomial xsx(int m) { return monomial({}, {kXs, kX}, m); }
NcPolynomial x_run(int m) { return monomial({kX}, {kXs, kX}, m); }
NcPolynomial xs_run(int m) { return monomial({kXs}, {kX, kXs}, m); }

// Every word of p is `head` followed by copies of `unit`.
bool spans(const NcPolynomial& p, const Word& head, const Word& unit) {
    for (const auto& [w, c] : p.terms()) {
        if (w.size() < head.size() || (w.size() - head.size()) % unit.size() != 0) return false;
        if (w.slice(0, head.size()) != head) return false;
        for (int i = head.size(); i < w.size(); i += unit.size()) {
            if (w.slice(i, i + unit.size()) != unit) return false;
        }
    }
    return true;
}

bool single_symbol(const NcPolynomial& p) {
    for (const auto& [w, c] : p.terms())
        for (int i = 0; i < w.size(); ++i)
            if (w[i].symbol != 0) return false;
    return true;
}

}  // namespace

std::string Diag2::to_string() const { return "diag(" + d11.to_string() + ", " + d22.to_string() + ")"; }

Mat2::Mat2(NcPolynomial a11, NcPolynomial a12, NcPolynomial a21, NcPolynomial a22)
    : entries_{std::move(a11), std::move(a12), std::move(a21), std::move(a22)} {}

Mat2 Mat2::identity() { return scalar(Scalar(1), Scalar(), Scalar(), Scalar(1)); }

Mat2 Mat2::scalar(const Scalar& b11, const Scalar& b12, const Scalar& b21, const Scalar& b22) {
    return Mat2(NcPolynomial(b11), NcPolynomial(b12), NcPolynomial(b21), NcPolynomial(b22));
}

Mat2 Mat2::diagonal(const Diag2& d) { return scalar(d.d11, Scalar(), Scalar(), d.d22); }

Mat2 operator+(const Mat2& a, const Mat2& b) {
    return Mat2(a(0, 0) + b(0, 0), a(0, 1) + b(0, 1), a(1, 0) + b(1, 0), a(1, 1) + b(1, 1));
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    auto cell = [&](int i, int j) { return a(i, 0) * b(0, j) + a(i, 1) * b(1, j); };
    return Mat2(cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1));
}

Mat2 Mat2::star() const { return Mat2((*this)(0, 0).star(), (*this)(1, 0).star(), (*this)(0, 1).star(), (*this)(1, 1).star()); }

bool Mat2::is_scalar() const {
    for (const auto& e : entries_)
        if (e.degree() > 0) return false;
    return true;
}

bool Mat2::is_multiple_of_identity() const {
    return is_scalar() && entries_[1].is_zero() && entries_[2].is_zero() && entries_[0] == entries_[3];
}

std::string Mat2::to_string(const Alphabet& alphabet) const {
    auto cell = [&](int k) {
        const auto& e = entries_[static_cast<std::size_t>(k)];
        return e.is_zero() ? std::string("0") : e.to_string(alphabet);
    };
    return "[[" + cell(0) + ", " + cell(1) + "], [" + cell(2) + ", " + cell(3) + "]]";
}

Diag2 f2(const Mat2& m, const MomentTable& mu) { return {mu.evaluate(m(0, 0)), mu.evaluate(m(1, 1))}; }

bool in_Z_nonscalar(const Mat2& m) {
    for (int k = 0; k < 4; ++k)
        if (!single_symbol(m(k / 2, k % 2))) return false;
    bool shaped = spans(m(0, 0), Word{}, Word{kX, kXs}) && spans(m(0, 1), Word{kX}, Word{kXs, kX}) &&
                  spans(m(1, 0), Word{kXs}, Word{kX, kXs}) && spans(m(1, 1), Word{}, Word{kXs, kX});
    return shaped && !m.is_multiple_of_identity();
}

bool in_scalar_nonidentity(const Mat2& m) { return m.is_scalar() && !m.is_multiple_of_identity(); }

AmalgVerdict boolean_amalg_check(const std::vector<Mat2>& chain, const MomentTable& mu) {
    if (chain.empty()) throw PreconditionError("empty chain");
    if (mu.alphabet().size() != 1 || mu.alphabet().symbol(0).side != Side::Unsided) {
        throw PreconditionError("expected a one-variable table");
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        bool ok = i % 2 == 0 ? in_Z_nonscalar(chain[i]) : in_scalar_nonidentity(chain[i]);
        if (!ok) {
            throw PreconditionError("chain factor " + std::to_string(i + 1) + " is not in the " +
                                    (i % 2 == 0 ? "polynomial" : "scalar") + " part");
        }
    }
    Mat2 product = chain[0];
    Diag2 factored = f2(chain[0], mu);
    for (std::size_t i = 1; i < chain.size(); ++i) {
        product = product * chain[i];
        factored = factored * f2(chain[i], mu);
    }
    for (int k : {0, 3}) {
        if (product(k / 2, k % 2).degree() > mu.degree()) throw DegreeError("chain exceeds the table cap");
    }
    AmalgVerdict v;
    v.product_side = f2(product, mu);
    v.factored_side = factored;
    v.equal = v.product_side == v.factored_side;
    return v;
}

WitnessChain first_witness_chain(int m1, int m2, int m3) {
    // The lower corner of Z1 uses x* x so that Z1 lies in the algebra.
    Mat2 z1(xxs(m1), {}, {}, NcPolynomial::unit() + xsx(m1));
    Mat2 z2({}, x_run(m2), {}, NcPolynomial::unit());
    Mat2 z3({}, {}, xs_run(m3), NcPolynomial::unit());
    Mat2 a1 = Mat2::scalar(Scalar(1), {}, {}, {});
    Mat2 a2 = Mat2::scalar({}, {}, {}, Scalar(1));
    return {"Z1 A1 Z2 A2 Z3", {m1, m2, m3}, {z1, a1, z2, a2, z3}};
}

WitnessChain second_witness_chain(int m1, int m2, int m3) {
    Mat2 w(NcPolynomial::unit() + xxs(m1), {}, {}, xsx(m1));
    Mat2 z2({}, x_run(m2), {}, NcPolynomial::unit());
    Mat2 z3({}, {}, xs_run(m3), NcPolynomial::unit());
    Mat2 a1 = Mat2::scalar(Scalar(1), {}, {}, {});
    Mat2 a2 = Mat2::scalar({}, {}, {}, Scalar(1));
    return {"W A2 Z3 A1 Z2", {m1, m2, m3}, {w, a2, z3, a1, z2}};
}

WitnessChain power_witness_chain(int n) {
    Mat2 a({}, NcPolynomial(Word{kX}), NcPolynomial(Word{kXs}), {});
    Mat2 b = Mat2::scalar({}, Scalar(1), Scalar(1), {});
    WitnessChain c{"(A B)^n", {n}, {}};
    for (int i = 0; i < n; ++i) {
        c.factors.push_back(a);
        c.factors.push_back(b);
    }
    return c;
}

std::string to_string(Theorem52Report::Outcome outcome) {
    return outcome == Theorem52Report::Outcome::Unequal ? "UNEQUAL" : "INCONCLUSIVE";
}

Theorem52Report theorem_5_2_witness(const MomentTable& mu, int degree) {
    if (!mu.flags().star_symmetric) throw PreconditionError("the table must be star-symmetric");
    if (degree < 1) throw PreconditionError("degree must be positive");
    Theorem52Report report;
    const int top = (degree - 1) / 3;
    auto attempt = [&](WitnessChain chain, int moment_degree) {
        if (moment_degree > mu.degree()) return false;
        ++report.chains_checked;
        AmalgVerdict v = boolean_amalg_check(chain.factors, mu);
        if (v.equal) return false;
        report.outcome = Theorem52Report::Outcome::Unequal;
        report.chain = std::move(chain);
        report.values = v;
        return true;
    };
    for (int family = 0; family < 2; ++family)
        for (int m1 = 0; m1 <= top; ++m1)
            for (int m2 = 0; m2 <= top; ++m2)
                for (int m3 = 0; m3 <= top; ++m3) {
                    int d = 2 * (m1 + m2 + m3 + 1);
                    // The unused corner of Z1 or W still carries degree 2 m1.
                    d = std::max(d, 2 * m1);
                    WitnessChain c = family == 0 ? first_witness_chain(m1, m2, m3) : second_witness_chain(m1, m2, m3);
                    if (attempt(std::move(c), d)) return report;
                }
    for (int n = 1; n <= degree; ++n)
        if (attempt(power_witness_chain(n), n)) return report;
    return report;
}

}  // namespace bifree
