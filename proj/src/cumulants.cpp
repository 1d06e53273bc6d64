#include "bifree/cumulants.hpp"

#include <numeric>

#include "bifree/errors.hpp"

namespace bifree {

namespace {

bool is_bi(CumulantKind kind) { return kind == CumulantKind::BiFree || kind == CumulantKind::BiBoolean; }
bool is_interval_kind(CumulantKind kind) { return kind == CumulantKind::Boolean || kind == CumulantKind::BiBoolean; }

using Lookup = std::function<Scalar(const Word&)>;

// Sum over the lattice partitions grouped by the block V holding the first
// element of the lattice order: kappa(V) times the moments of the gaps that V
// leaves in that order. `with_top` decides whether V may be everything.
Scalar block_expansion(CumulantKind kind, const Word& w, const std::vector<int>& order, const Lookup& kappa,
                       const Lookup& phi, bool with_top) {
    const int n = w.size();
    std::vector<std::uint32_t> bit(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) bit[static_cast<std::size_t>(r)] = 1U << order[static_cast<std::size_t>(r)];
    Scalar total;
    if (is_interval_kind(kind)) {
        std::uint32_t head = 0;
        for (int k = 1; k <= n; ++k) {
            head |= bit[static_cast<std::size_t>(k - 1)];
            if (k == n && !with_top) break;
            Scalar term = kappa(w.restrict(head));
            if (term.is_zero()) continue;
            if (k < n) {
                std::uint32_t all = n == 32 ? ~0U : (1U << n) - 1;
                term *= phi(w.restrict(all & ~head));
            }
            total += term;
        }
        return total;
    }
    const std::uint32_t full = n == 1 ? 0U : (1U << (n - 1)) - 1;
    std::vector<std::uint32_t> gaps;
    for (std::uint32_t s = 0;; ++s) {
        if (s == full && !with_top) break;
        std::uint32_t block = bit[0];
        gaps.clear();
        std::uint32_t gap = 0;
        for (int r = 1; r < n; ++r) {
            if (s >> (r - 1) & 1U) {
                block |= bit[static_cast<std::size_t>(r)];
                if (gap) gaps.push_back(gap);
                gap = 0;
            } else {
                gap |= bit[static_cast<std::size_t>(r)];
            }
        }
        if (gap) gaps.push_back(gap);
        Scalar term = kappa(w.restrict(block));
        for (std::size_t g = 0; g < gaps.size() && !term.is_zero(); ++g) term *= phi(w.restrict(gaps[g]));
        total += term;
        if (s == full) break;
    }
    return total;
}

}  // namespace

std::vector<int> lattice_order(CumulantKind kind, const Alphabet& alphabet, const Word& w) {
    if (is_bi(kind)) return alphabet.chi(w).order();
    std::vector<int> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), 0);
    return order;
}

std::vector<SetPartition> lattice_partitions(CumulantKind kind, const Alphabet& alphabet, const Word& w) {
    const int n = w.size();
    switch (kind) {
        case CumulantKind::Free: return noncrossing_partitions(n);
        case CumulantKind::Boolean: return interval_partitions(n);
        case CumulantKind::BiFree: return bnc_partitions(alphabet.chi(w));
        case CumulantKind::BiBoolean: return bi_partitions(alphabet.chi(w));
    }
    return {};
}

CumulantTable MomentTable::cumulants(CumulantKind kind) const {
    const auto index = static_cast<std::size_t>(kind);
    std::call_once(state_->once[index], [this, kind, index] {
        const State* st = state_.get();
        WordTable table(alphabet(), degree(), [st, kind](const Word& w, const WordTable& self) {
            auto order = lattice_order(kind, self.alphabet(), w);
            Lookup kappa = [&self](const Word& v) { return self.at(v); };
            Lookup phi = [st](const Word& v) { return st->table.at(v); };
            return phi(w) - block_expansion(kind, w, order, kappa, phi, false);
        });
        state_->cumulants[index] = std::make_unique<CumulantTable>(kind, std::move(table));
    });
    return CumulantTable(kind, state_->cumulants[index]->table(), state_);
}

MomentTable moments_from_cumulants(const CumulantTable& cumulants, MomentFlags flags) {
    flags.sparse = false;
    CumulantTable source = cumulants;
    WordTable table(cumulants.alphabet(), cumulants.degree(), [source](const Word& w, const WordTable& self) {
        CumulantKind kind = source.kind();
        auto order = lattice_order(kind, self.alphabet(), w);
        Lookup kappa = [&source](const Word& v) { return source(v); };
        Lookup phi = [&self](const Word& v) { return self.at(v); };
        return block_expansion(kind, w, order, kappa, phi, true);
    });
    return MomentTable(std::move(table), flags);
}

Scalar moments_to_bifree(const MomentTable& mu, const Word& w) { return mu.cumulants(CumulantKind::BiFree)(w); }
Scalar moments_to_biboolean(const MomentTable& mu, const Word& w) {
    return mu.cumulants(CumulantKind::BiBoolean)(w);
}
Scalar moments_to_free(const MomentTable& mu, const Word& w) { return mu.cumulants(CumulantKind::Free)(w); }
Scalar moments_to_boolean(const MomentTable& mu, const Word& w) { return mu.cumulants(CumulantKind::Boolean)(w); }

Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const Alphabet& alphabet,
                           const std::function<Scalar(const Word&)>& values) {
    if (pi.n() != w.size()) throw SizeError("partition and word sizes differ");
    bool member = false;
    switch (kind) {
        case CumulantKind::Free: member = pi.is_noncrossing(); break;
        case CumulantKind::Boolean: member = pi.is_interval(); break;
        case CumulantKind::BiFree: member = is_bnc(pi, alphabet.chi(w)); break;
        case CumulantKind::BiBoolean: member = is_bi_interval(pi, alphabet.chi(w)); break;
    }
    if (!member) throw PreconditionError("partition " + pi.to_string() + " is outside the " + to_string(kind) +
                                         " lattice of this word");
    Scalar product(1);
    for (auto block : pi.blocks()) {
        product *= values(w.restrict(block));
        if (product.is_zero()) break;
    }
    return product;
}

Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const CumulantTable& table) {
    return multiplicative_eval(kind, pi, w, table.alphabet(), [&table](const Word& v) { return table(v); });
}

Scalar multiplicative_eval(CumulantKind kind, const SetPartition& pi, const Word& w, const MomentTable& mu) {
    return multiplicative_eval(kind, pi, w, mu.alphabet(), [&mu](const Word& v) { return mu(v); });
}

Scalar cumulant_by_mobius(CumulantKind kind, const MomentTable& mu, const Word& w) {
    if (w.empty()) throw PreconditionError("cumulants are not defined on the empty word");
    const int n = w.size();
    Lattice lattice = Lattice::NC;
    std::optional<ChiMap> chi;
    switch (kind) {
        case CumulantKind::Free: lattice = Lattice::NC; break;
        case CumulantKind::Boolean: lattice = Lattice::IN; break;
        case CumulantKind::BiFree: lattice = Lattice::BNC; break;
        case CumulantKind::BiBoolean: lattice = Lattice::BI; break;
    }
    if (is_bi(kind)) chi = mu.alphabet().chi(w);
    const SetPartition top = SetPartition::top(n);
    Scalar total;
    for (const auto& pi : lattice_partitions(kind, mu.alphabet(), w)) {
        Scalar m = multiplicative_eval(kind, pi, w, mu);
        if (m.is_zero()) continue;
        total += m * Scalar(mobius(lattice, pi, top, chi ? &*chi : nullptr));
    }
    return total;
}

Scalar moment_by_partition_sum(const CumulantTable& cumulants, const Word& w) {
    if (w.empty()) return Scalar(1);
    Scalar total;
    for (const auto& pi : lattice_partitions(cumulants.kind(), cumulants.alphabet(), w)) {
        total += multiplicative_eval(cumulants.kind(), pi, w, cumulants);
    }
    return total;
}

namespace {

IndependenceVerdict scan_mixed(const MomentTable& mu, const Grouping& grouping, int degree, CumulantKind kind) {
    const Alphabet& a = mu.alphabet();
    if (static_cast<int>(grouping.size()) != a.size()) {
        throw PreconditionError("grouping must assign a family to every symbol");
    }
    if (degree > mu.degree()) throw DegreeError("requested degree exceeds the table cap");
    CumulantTable kappa = mu.cumulants(kind);
    IndependenceVerdict verdict;
    for (int n = 2; n <= degree; ++n) {
        for (const Word& w : a.words_of_length(n)) {
            bool mixed = false;
            for (int i = 1; i < n && !mixed; ++i) {
                mixed = grouping[w[i].symbol] != grouping[w[0].symbol];
            }
            if (!mixed) continue;
            ++verdict.words_checked;
            Scalar v = kappa(w);
            if (!v.is_zero()) {
                verdict.pass = false;
                verdict.witness = w;
                verdict.value = v;
                return verdict;
            }
        }
    }
    return verdict;
}

}  // namespace

IndependenceVerdict test_bifree_independence(const MomentTable& mu, const Grouping& grouping, int degree) {
    return scan_mixed(mu, grouping, degree, CumulantKind::BiFree);
}

IndependenceVerdict test_biboolean_independence(const MomentTable& mu, const Grouping& grouping, int degree) {
    return scan_mixed(mu, grouping, degree, CumulantKind::BiBoolean);
}

}  // namespace bifree
