#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bifree {

enum class Side : std::uint8_t { Left, Right, Unsided };

/// Left/right labelling of positions 0..n-1 together with the sorting
/// permutation that lists left positions ascending, then right positions
/// descending. All indices are 0-based; text forms are "LRLR".
class ChiMap {
public:
    ChiMap() = default;
    explicit ChiMap(std::vector<Side> labels);

    static ChiMap parse(std::string_view text);
    static ChiMap constant(int n, Side side);

    int size() const { return static_cast<int>(labels_.size()); }
    Side operator[](int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<Side>& labels() const { return labels_; }

    /// order()[k] is the position that comes k-th in the chi order.
    const std::vector<int>& order() const { return order_; }
    /// rank()[i] is where position i sits in the chi order.
    const std::vector<int>& rank() const { return rank_; }
    int left_count() const { return left_count_; }
    bool is_constant() const { return left_count_ == 0 || left_count_ == size(); }

    std::string to_string() const;

    friend bool operator==(const ChiMap& a, const ChiMap& b) { return a.labels_ == b.labels_; }

private:
    std::vector<Side> labels_;
    std::vector<int> order_;
    std::vector<int> rank_;
    int left_count_ = 0;
};

/// Partition of {0..n-1}, n <= 32, stored as canonical block bitmasks
/// sorted by minimum element. Text form is 1-based: "{{1,2},{3}}".
class SetPartition {
public:
    using Block = std::uint32_t;
    static constexpr int kMaxSize = 32;

    SetPartition() = default;
    SetPartition(int n, std::vector<Block> blocks);

    static SetPartition from_blocks(int n, const std::vector<std::vector<int>>& one_based);
    /// Restricted growth string: labels[i] is the block index of i.
    static SetPartition from_labels(const std::vector<int>& labels);
    static SetPartition parse(std::string_view text);
    static SetPartition top(int n);
    static SetPartition bottom(int n);

    int n() const { return n_; }
    std::size_t size() const { return blocks_.size(); }
    const std::vector<Block>& blocks() const { return blocks_; }

    int block_of(int i) const;
    bool same_block(int i, int j) const { return block_of(i) == block_of(j); }
    /// Every block of *this lies inside a block of `coarser`.
    bool refines(const SetPartition& coarser) const;

    bool is_noncrossing() const;
    bool is_interval() const;
    bool all_blocks_even() const;
    bool is_top() const { return blocks_.size() == 1; }

    /// Block {i,...} maps to {perm[i],...}.
    SetPartition image(const std::vector<int>& perm) const;
    /// Inverse of image(perm).
    SetPartition preimage(const std::vector<int>& perm) const;

    std::string to_string() const;

    friend bool operator==(const SetPartition&, const SetPartition&) = default;
    friend auto operator<=>(const SetPartition&, const SetPartition&) = default;

private:
    int n_ = 0;
    std::vector<Block> blocks_;
};

struct SetPartitionHash {
    std::size_t operator()(const SetPartition& p) const noexcept;
};

/// Default cap for unrestricted enumeration (Bell growth).
inline constexpr int kSetPartitionCap = 12;
/// Cap for the non-crossing and interval lattices.
inline constexpr int kLatticeCap = 16;

/// All partitions of {0..n-1} in restricted-growth-string order.
std::vector<SetPartition> set_partitions(int n, int cap = kSetPartitionCap);
const std::vector<SetPartition>& noncrossing_partitions(int n);
const std::vector<SetPartition>& interval_partitions(int n);
std::vector<SetPartition> bnc_partitions(const ChiMap& chi);
std::vector<SetPartition> bi_partitions(const ChiMap& chi);

bool is_bnc(const SetPartition& p, const ChiMap& chi);
bool is_bi_interval(const SetPartition& p, const ChiMap& chi);

SetPartition join(const SetPartition& a, const SetPartition& b);

/// For an even-block partition in BNC of a doubled chi map: whether its join
/// with the consecutive pairing {{1,2},{3,4},...} is the top element,
/// decided by the chi-order adjacency test.
bool pairing_join_is_full(const SetPartition& p, const ChiMap& doubled);

SetPartition kreweras(const SetPartition& p);

enum class Lattice : std::uint8_t { NC, IN, BNC, BI };

/// Memoized Moebius values on NC(n) and IN(n). Safe for concurrent use.
class MobiusCache {
public:
    long long get(Lattice reduced_kind, const SetPartition& lower, const SetPartition& upper);

private:
    long long compute(Lattice kind, const SetPartition& lower, const SetPartition& upper);

    struct Key {
        Lattice kind;
        SetPartition lower;
        SetPartition upper;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };

    std::mutex mutex_;
    std::unordered_map<Key, long long, KeyHash> memo_;
};

/// Moebius function of `kind` on the interval [lower, upper]. `chi` is
/// required for BNC and BI and ignored otherwise.
long long mobius(Lattice kind, const SetPartition& lower, const SetPartition& upper, const ChiMap* chi = nullptr);

long long catalan(int n);

}  // namespace bifree
