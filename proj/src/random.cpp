#include "bifree/random.hpp"

namespace bifree {

Rational random_rational(Rng& rng) {
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 2);
    return Rational(num(rng), den(rng));
}

Scalar random_scalar(Rng& rng, bool complex) {
    Rational re = random_rational(rng);
    if (!complex) return Scalar(re);
    return Scalar(re, random_rational(rng));
}

MomentTable random_moment_table(const Alphabet& alphabet, int degree, MomentFlags flags, Rng& rng, bool complex) {
    flags.sparse = false;
    WordTable::Entries entries;
    auto orbit = [&](const Word& w) {
        std::vector<Word> out{w};
        if (flags.tracial) {
            for (int k = 1; k < w.size(); ++k) out.push_back(w.rotated(k));
        }
        return out;
    };
    for (int n = 1; n <= degree; ++n) {
        for (const Word& w : alphabet.words_of_length(n)) {
            if (entries.contains(w)) continue;
            auto own = orbit(w);
            bool self_adjoint = false;
            Word adjoint = w.star();
            if (flags.star_symmetric) {
                for (const Word& v : own) self_adjoint = self_adjoint || v == adjoint;
            }
            Scalar value = random_scalar(rng, complex && !self_adjoint);
            for (const Word& v : own) entries[v] = value;
            if (flags.star_symmetric && !self_adjoint) {
                for (const Word& v : orbit(adjoint)) entries[v] = value.conj();
            }
        }
    }
    return MomentTable(WordTable(alphabet, degree, std::move(entries), false), flags);
}

DeterminingSequences random_determining_sequences(int degree, Rng& rng) {
    DeterminingSequences seq;
    seq.degree = degree;
    for (int n = 2; n <= degree; n += 2) {
        for (std::uint32_t m = 0; m < (1U << n); ++m) {
            std::string key;
            for (int i = 0; i < n; ++i) key += (m >> i & 1U) ? 'R' : 'L';
            seq.alpha[key] = random_scalar(rng, true);
            seq.beta[key] = random_scalar(rng, true);
        }
    }
    return seq;
}

BiCircularSpec random_bicircular_spec(Rng& rng) {
    Scalar off = random_scalar(rng, true);
    auto nonnegative = [&rng] {
        Rational r = random_rational(rng);
        return Scalar(r.sign() < 0 ? -r : r);
    };
    BiCircularSpec spec;
    spec.covariance[0][0] = Scalar(1) + Scalar(off.norm()) + nonnegative();
    spec.covariance[1][1] = Scalar(1) + nonnegative();
    spec.covariance[0][1] = off;
    spec.covariance[1][0] = off.conj();
    return spec;
}

MomentTable random_eta_diagonal_table(int degree, Rng& rng) {
    Alphabet a = pair_alphabet();
    WordTable::Entries b;
    for (int n = 2; n <= degree; n += 2) {
        for (const Word& w : a.words_of_length(n)) {
            if (is_alternating(a, w)) b[w] = random_scalar(rng, true);
        }
    }
    return moments_from_cumulants(CumulantTable(CumulantKind::BiBoolean, WordTable(a, degree, std::move(b), true)));
}

}  // namespace bifree
