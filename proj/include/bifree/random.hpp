#pragma once

#include <random>

#include "bifree/diagonal.hpp"

namespace bifree {

using Rng = std::mt19937_64;

/// Numerators in [-3, 3], denominators in {1, 2}.
Rational random_rational(Rng& rng);
Scalar random_scalar(Rng& rng, bool complex);

/// Stored total table with random entries. Tracial and star-symmetric flags
/// are honoured by assigning one value per rotation / adjoint orbit.
MomentTable random_moment_table(const Alphabet& alphabet, int degree, MomentFlags flags, Rng& rng,
                                bool complex = true);

/// Random entries for every chi of even length up to `degree`.
DeterminingSequences random_determining_sequences(int degree, Rng& rng);

/// Hermitian covariance with c_ll, c_rr >= 1 and nonnegative determinant.
BiCircularSpec random_bicircular_spec(Rng& rng);

/// Pair table whose bi-Boolean cumulants are random on alternating words and
/// zero elsewhere.
MomentTable random_eta_diagonal_table(int degree, Rng& rng);

}  // namespace bifree
