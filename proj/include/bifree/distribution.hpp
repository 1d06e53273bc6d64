#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "bifree/ncpoly.hpp"

namespace bifree {

inline constexpr int kDefaultDegree = 8;

/// Word -> scalar function truncated at a degree cap. Either a stored table
/// or a lazily evaluated generator whose results are memoized. Copies share
/// state; the memo tolerates concurrent readers and duplicate inserts.
class WordTable {
public:
    using Entries = std::unordered_map<Word, Scalar, WordHash>;
    using Generator = std::function<Scalar(const Word&, const WordTable& self)>;

    WordTable() = default;
    WordTable(Alphabet alphabet, int degree, Entries entries, bool zero_default);
    WordTable(Alphabet alphabet, int degree, Generator generator);

    const Alphabet& alphabet() const { return state_->alphabet; }
    int degree() const { return state_->degree; }
    bool is_stored() const { return !state_->generator; }
    bool zero_default() const { return state_->zero_default; }
    /// Stored entries (empty for generated tables).
    const Entries& entries() const { return state_->entries; }

    /// Throws DegreeError beyond the cap and MissingEntryError for absent
    /// stored words without a zero default.
    Scalar at(const Word& w) const;

private:
    struct State {
        Alphabet alphabet;
        int degree = 0;
        Entries entries;
        bool zero_default = false;
        Generator generator;
        mutable std::shared_mutex memo_mutex;
        mutable Entries memo;
    };
    std::shared_ptr<State> state_;
};

struct MomentFlags {
    bool tracial = false;
    bool star_symmetric = false;
    bool sparse = false;
    friend bool operator==(const MomentFlags&, const MomentFlags&) = default;
};

enum class CumulantKind : std::uint8_t { Free, Boolean, BiFree, BiBoolean };

std::string to_string(CumulantKind kind);
CumulantKind parse_cumulant_kind(std::string_view text);

class CumulantTable;

/// Truncated *-distribution: the unit word has moment 1, every other word up
/// to the cap is served by the underlying table.
class MomentTable {
public:
    MomentTable() = default;
    /// Stored tables are checked against the tracial and star-symmetric
    /// flags; a stored table without the sparse flag must be total.
    MomentTable(WordTable table, MomentFlags flags);

    const Alphabet& alphabet() const { return state_->table.alphabet(); }
    int degree() const { return state_->table.degree(); }
    const MomentFlags& flags() const { return state_->flags; }
    const WordTable& table() const { return state_->table; }

    Scalar operator()(const Word& w) const;
    Scalar evaluate(const NcPolynomial& p) const;

    /// Cumulants of this distribution, computed lazily and shared across calls.
    CumulantTable cumulants(CumulantKind kind) const;

private:
    struct State {
        WordTable table;
        MomentFlags flags;
        mutable std::array<std::once_flag, 4> once;
        mutable std::array<std::unique_ptr<CumulantTable>, 4> cumulants;
    };
    std::shared_ptr<State> state_;
};

/// Cumulant values of one kind, keyed by word; the empty word is never a key.
class CumulantTable {
public:
    CumulantTable() = default;
    CumulantTable(CumulantKind kind, WordTable table, std::shared_ptr<const void> owner = nullptr)
        : kind_(kind), table_(std::move(table)), owner_(std::move(owner)) {}

    CumulantKind kind() const { return kind_; }
    const Alphabet& alphabet() const { return table_.alphabet(); }
    int degree() const { return table_.degree(); }
    const WordTable& table() const { return table_; }

    Scalar operator()(const Word& w) const;

private:
    CumulantKind kind_ = CumulantKind::BiFree;
    WordTable table_;
    std::shared_ptr<const void> owner_;
};

/// Moments from cumulants of any kind, by the lazy inverse transform.
MomentTable moments_from_cumulants(const CumulantTable& cumulants, MomentFlags flags = {});
MomentTable from_bifree_cumulants(const CumulantTable& cumulants, int degree);

/// p - phi(p) * 1.
NcPolynomial center(const NcPolynomial& p, const MomentTable& mu);

/// Two-letter sided alphabet {x: left, y: right} used by pair constructions.
Alphabet pair_alphabet(const std::string& left = "x", const std::string& right = "y");

struct BiCircularSpec {
    // covariance[a][b], index 0 = left, 1 = right
    std::array<std::array<Scalar, 2>, 2> covariance;
    void validate() const;
};

MomentTable bi_circular(const BiCircularSpec& spec, int degree = kDefaultDegree);
MomentTable bi_haar(int degree = kDefaultDegree);

/// Pair distribution of (left x, right y) acting on a tracial single-variable
/// table: a word is evaluated on its chi-reordered letters.
MomentTable lr_pair(const MomentTable& single, int degree);

/// Joint table of two families whose mixed bi-free cumulants vanish.
MomentTable bifree_join(const MomentTable& first, const MomentTable& second, int degree);

/// New symbol k stands for polys[k]; its adjoint letter for polys[k].star().
MomentTable substitute(const MomentTable& mu, const Alphabet& alphabet, const std::vector<NcPolynomial>& polys,
                       int degree);

/// Single-variable table of (ux, uy) with u a Haar unitary *-free from {x, y}.
MomentTable multiply_free_haar(const MomentTable& single, int degree);

/// Haar unitary table over the one-symbol alphabet {name}.
MomentTable haar_unitary(int degree, const std::string& name = "u");

// JSON file format ---------------------------------------------------------

MomentTable parse_moment_json(const std::string& text);
MomentTable load_moment_file(const std::string& path);
std::string moment_json(const MomentTable& mu, bool include_zeros = false);
std::string moment_csv(const MomentTable& mu, bool include_zeros = false);

CumulantTable parse_cumulant_json(const std::string& text);
CumulantTable load_cumulant_file(const std::string& path);
/// Stored form of any table: every word of length 1..degree.
std::string cumulant_json(const CumulantTable& table, bool include_zeros = false);
std::string cumulant_csv(const CumulantTable& table, bool include_zeros = false);

}  // namespace bifree
