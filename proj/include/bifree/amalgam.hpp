#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bifree/distribution.hpp"

namespace bifree {

/// Scalar diagonal 2x2 matrix.
struct Diag2 {
    Scalar d11;
    Scalar d22;

    friend Diag2 operator*(const Diag2& a, const Diag2& b) { return {a.d11 * b.d11, a.d22 * b.d22}; }
    friend bool operator==(const Diag2&, const Diag2&) = default;
    std::string to_string() const;
};

/// 2x2 matrix with polynomial entries in one variable x and its adjoint
/// (symbol 0 of any one-symbol unsided alphabet).
class Mat2 {
public:
    Mat2() = default;
    Mat2(NcPolynomial a11, NcPolynomial a12, NcPolynomial a21, NcPolynomial a22);

    static Mat2 identity();
    static Mat2 scalar(const Scalar& b11, const Scalar& b12, const Scalar& b21, const Scalar& b22);
    static Mat2 diagonal(const Diag2& d);

    const NcPolynomial& operator()(int i, int j) const { return entries_[static_cast<std::size_t>(2 * i + j)]; }

    friend Mat2 operator+(const Mat2& a, const Mat2& b);
    friend Mat2 operator*(const Mat2& a, const Mat2& b);
    friend bool operator==(const Mat2&, const Mat2&) = default;
    /// Transpose with adjoint entries.
    Mat2 star() const;

    bool is_scalar() const;                ///< every entry constant
    bool is_multiple_of_identity() const;  ///< c * I
    std::string to_string(const Alphabet& alphabet) const;

private:
    std::array<NcPolynomial, 4> entries_;
};

/// diag(phi(a11), phi(a22)).
Diag2 f2(const Mat2& m, const MomentTable& mu);

/// Membership in the algebra generated by [[0, x], [x*, 0]] and the scalar
/// diagonals, minus the multiples of the identity: diagonal entries are spans
/// of (x x*)^k and (x* x)^k, off-diagonal ones spans of x (x* x)^k and x* (x x*)^k.
bool in_Z_nonscalar(const Mat2& m);
/// A constant matrix that is not a multiple of the identity.
bool in_scalar_nonidentity(const Mat2& m);

struct AmalgVerdict {
    bool equal = true;
    Diag2 product_side;   ///< F2 of the product
    Diag2 factored_side;  ///< product of the F2 images
};

/// `chain` alternates between the two algebras, starting with the
/// polynomial one.
AmalgVerdict boolean_amalg_check(const std::vector<Mat2>& chain, const MomentTable& mu);

struct WitnessChain {
    std::string name;              ///< "Z1 A1 Z2 A2 Z3", "W A2 Z3 A1 Z2" or "(A B)^n"
    std::vector<int> parameters;   ///< (m1, m2, m3) or (n)
    std::vector<Mat2> factors;
};

/// Z1 A1 Z2 A2 Z3 with exponents m1, m2, m3.
WitnessChain first_witness_chain(int m1, int m2, int m3);
/// W A2 Z3 A1 Z2.
WitnessChain second_witness_chain(int m1, int m2, int m3);
/// (A B)^n written as 2n factors.
WitnessChain power_witness_chain(int n);

struct Theorem52Report {
    enum class Outcome : std::uint8_t { Unequal, Inconclusive };
    Outcome outcome = Outcome::Inconclusive;
    std::optional<WitnessChain> chain;
    AmalgVerdict values;
    std::size_t chains_checked = 0;
};

std::string to_string(Theorem52Report::Outcome outcome);

/// Runs the three chain families in order, exponents 0..(N-1)/3 and n <= N,
/// skipping chains whose evaluated moments exceed the table cap.
Theorem52Report theorem_5_2_witness(const MomentTable& mu, int degree);

}  // namespace bifree
