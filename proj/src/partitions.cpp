#include "bifree/partitions.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>

#include "bifree/errors.hpp"

namespace bifree {

namespace {

using Block = SetPartition::Block;

Block bit(int i) { return Block{1} << i; }

Block range_mask(int lo, int hi) {  // bits lo..hi-1
    if (hi <= lo) return 0;
    Block upper = hi >= 32 ? ~Block{0} : bit(hi) - 1;
    return upper & ~(bit(lo) - 1);
}

void check_size(int n, int cap) {
    if (n < 1 || n > cap) {
        throw SizeError("partition size " + std::to_string(n) + " outside 1.." + std::to_string(cap));
    }
}

void check_same_size(const SetPartition& a, int n) {
    if (a.n() != n) {
        throw SizeError("size mismatch: " + std::to_string(a.n()) + " vs " + std::to_string(n));
    }
}

// Non-crossing partitions of the points offset..offset+len-1, as raw block lists.
using RawPartition = std::vector<Block>;

void append_nc(int offset, int len, std::vector<RawPartition>& out,
               std::map<std::pair<int, int>, std::vector<RawPartition>>& memo);

const std::vector<RawPartition>& nc_range(int offset, int len,
                                          std::map<std::pair<int, int>, std::vector<RawPartition>>& memo) {
    auto key = std::make_pair(offset, len);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<RawPartition> out;
    append_nc(offset, len, out, memo);
    return memo.emplace(key, std::move(out)).first->second;
}

// The block of the first point either is a singleton or has a next element j;
// points strictly between are independent, and the first point then joins j's block.
void append_nc(int offset, int len, std::vector<RawPartition>& out,
               std::map<std::pair<int, int>, std::vector<RawPartition>>& memo) {
    if (len == 0) {
        out.emplace_back();
        return;
    }
    for (const auto& rest : nc_range(offset + 1, len - 1, memo)) {
        RawPartition p = rest;
        p.push_back(bit(offset));
        out.push_back(std::move(p));
    }
    for (int j = 1; j < len; ++j) {
        const auto& inner = nc_range(offset + 1, j - 1, memo);
        const auto& outer = nc_range(offset + j, len - j, memo);
        Block joined = bit(offset + j);
        for (const auto& a : inner) {
            for (const auto& b : outer) {
                RawPartition p = a;
                for (Block blk : b) p.push_back((blk & joined) ? (blk | bit(offset)) : blk);
                out.push_back(std::move(p));
            }
        }
    }
}

}  // namespace

ChiMap::ChiMap(std::vector<Side> labels) : labels_(std::move(labels)) {
    if (labels_.empty() || labels_.size() > static_cast<std::size_t>(SetPartition::kMaxSize)) {
        throw SizeError("chi map length must be 1..32");
    }
    const int n = size();
    for (int i = 0; i < n; ++i) {
        if (labels_[static_cast<std::size_t>(i)] == Side::Unsided) {
            throw PreconditionError("chi map position " + std::to_string(i + 1) + " is unsided");
        }
        if (labels_[static_cast<std::size_t>(i)] == Side::Left) order_.push_back(i);
    }
    left_count_ = static_cast<int>(order_.size());
    for (int i = n - 1; i >= 0; --i) {
        if (labels_[static_cast<std::size_t>(i)] == Side::Right) order_.push_back(i);
    }
    rank_.assign(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < n; ++k) rank_[static_cast<std::size_t>(order_[static_cast<std::size_t>(k)])] = k;
}

ChiMap ChiMap::parse(std::string_view text) {
    std::vector<Side> labels;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == 'L' || c == 'l') {
            labels.push_back(Side::Left);
        } else if (c == 'R' || c == 'r') {
            labels.push_back(Side::Right);
        } else {
            throw ParseError("chi map expects only L and R", i);
        }
    }
    return ChiMap(std::move(labels));
}

ChiMap ChiMap::constant(int n, Side side) {
    return ChiMap(std::vector<Side>(static_cast<std::size_t>(std::max(n, 0)), side));
}

std::string ChiMap::to_string() const {
    std::string s;
    for (Side side : labels_) s.push_back(side == Side::Left ? 'L' : 'R');
    return s;
}

SetPartition::SetPartition(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
    check_size(n, kMaxSize);
    Block seen = 0;
    for (Block b : blocks_) {
        if (b == 0) throw PreconditionError("empty block");
        if (seen & b) throw PreconditionError("blocks overlap");
        seen |= b;
    }
    if (seen != range_mask(0, n)) throw PreconditionError("blocks do not cover the ground set");
    std::sort(blocks_.begin(), blocks_.end(),
              [](Block a, Block b) { return std::countr_zero(a) < std::countr_zero(b); });
}

SetPartition SetPartition::from_blocks(int n, const std::vector<std::vector<int>>& one_based) {
    std::vector<Block> blocks;
    for (const auto& blk : one_based) {
        Block m = 0;
        for (int v : blk) {
            if (v < 1 || v > n) throw PreconditionError("element " + std::to_string(v) + " outside 1.." + std::to_string(n));
            if (m & bit(v - 1)) throw PreconditionError("repeated element " + std::to_string(v));
            m |= bit(v - 1);
        }
        blocks.push_back(m);
    }
    return SetPartition(n, std::move(blocks));
}

SetPartition SetPartition::from_labels(const std::vector<int>& labels) {
    const int n = static_cast<int>(labels.size());
    std::vector<Block> blocks;
    for (int i = 0; i < n; ++i) {
        auto l = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        if (l >= blocks.size()) blocks.resize(l + 1, 0);
        blocks[l] |= bit(i);
    }
    std::erase(blocks, Block{0});
    return SetPartition(n, std::move(blocks));
}

SetPartition SetPartition::parse(std::string_view text) {
    std::vector<std::vector<int>> blocks;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    };
    auto expect = [&](char c) {
        skip();
        if (i >= text.size() || text[i] != c) throw ParseError(std::string("expected '") + c + "'", i);
        ++i;
    };
    expect('{');
    skip();
    int max_elem = 0;
    while (i < text.size() && text[i] == '{') {
        ++i;
        std::vector<int> blk;
        for (;;) {
            skip();
            std::size_t start = i;
            int v = 0;
            while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
                v = v * 10 + (text[i] - '0');
                if (v > kMaxSize) throw ParseError("element too large", start);
                ++i;
            }
            if (i == start) throw ParseError("expected element", i);
            blk.push_back(v);
            max_elem = std::max(max_elem, v);
            skip();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            expect('}');
            break;
        }
        blocks.push_back(std::move(blk));
        skip();
        if (i < text.size() && text[i] == ',') {
            ++i;
            skip();
        }
    }
    expect('}');
    skip();
    if (i != text.size()) throw ParseError("trailing characters", i);
    if (blocks.empty()) throw ParseError("partition has no blocks", 0);
    return from_blocks(max_elem, blocks);
}

SetPartition SetPartition::top(int n) {
    check_size(n, kMaxSize);
    return SetPartition(n, {range_mask(0, n)});
}

SetPartition SetPartition::bottom(int n) {
    check_size(n, kMaxSize);
    std::vector<Block> blocks;
    for (int i = 0; i < n; ++i) blocks.push_back(bit(i));
    return SetPartition(n, std::move(blocks));
}

int SetPartition::block_of(int i) const {
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (blocks_[k] & bit(i)) return static_cast<int>(k);
    }
    throw SizeError("element " + std::to_string(i) + " outside partition");
}

bool SetPartition::refines(const SetPartition& coarser) const {
    check_same_size(coarser, n_);
    for (Block b : blocks_) {
        bool inside = false;
        for (Block c : coarser.blocks_) {
            if ((b & c) == b) {
                inside = true;
                break;
            }
        }
        if (!inside) return false;
    }
    return true;
}

bool SetPartition::is_noncrossing() const {
    // Between consecutive elements of a block, every other block is either
    // fully inside the gap or disjoint from it.
    for (Block b : blocks_) {
        Block rest = b;
        int prev = std::countr_zero(rest);
        rest &= rest - 1;
        while (rest) {
            int next = std::countr_zero(rest);
            rest &= rest - 1;
            Block gap = range_mask(prev + 1, next);
            for (Block other : blocks_) {
                if (other == b) continue;
                if ((other & gap) && (other & ~gap)) return false;
            }
            prev = next;
        }
    }
    return true;
}

bool SetPartition::is_interval() const {
    for (Block b : blocks_) {
        Block shifted = b >> std::countr_zero(b);
        if ((shifted & (shifted + 1)) != 0) return false;
    }
    return true;
}

bool SetPartition::all_blocks_even() const {
    return std::all_of(blocks_.begin(), blocks_.end(), [](Block b) { return std::popcount(b) % 2 == 0; });
}

SetPartition SetPartition::image(const std::vector<int>& perm) const {
    if (perm.size() != static_cast<std::size_t>(n_)) throw SizeError("permutation size mismatch");
    std::vector<Block> out;
    out.reserve(blocks_.size());
    for (Block b : blocks_) {
        Block m = 0;
        for (Block r = b; r; r &= r - 1) m |= bit(perm[static_cast<std::size_t>(std::countr_zero(r))]);
        out.push_back(m);
    }
    return SetPartition(n_, std::move(out));
}

SetPartition SetPartition::preimage(const std::vector<int>& perm) const {
    if (perm.size() != static_cast<std::size_t>(n_)) throw SizeError("permutation size mismatch");
    std::vector<int> inverse(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inverse[static_cast<std::size_t>(perm[k])] = static_cast<int>(k);
    return image(inverse);
}

std::string SetPartition::to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (k) s += ",";
        s += "{";
        bool first = true;
        for (Block r = blocks_[k]; r; r &= r - 1) {
            if (!first) s += ",";
            first = false;
            s += std::to_string(std::countr_zero(r) + 1);
        }
        s += "}";
    }
    return s + "}";
}

std::size_t SetPartitionHash::operator()(const SetPartition& p) const noexcept {
    std::size_t h = static_cast<std::size_t>(p.n()) * 0x9e3779b97f4a7c15ULL;
    for (Block b : p.blocks()) h = (h ^ b) * 0x100000001b3ULL + (h >> 29);
    return h;
}

std::vector<SetPartition> set_partitions(int n, int cap) {
    check_size(n, std::min(cap, SetPartition::kMaxSize));
    std::vector<SetPartition> out;
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
    for (;;) {
        out.push_back(SetPartition::from_labels(rgs));
        int i = n - 1;
        while (i > 0 && rgs[static_cast<std::size_t>(i)] > prefix_max[static_cast<std::size_t>(i - 1)]) --i;
        if (i == 0) break;
        ++rgs[static_cast<std::size_t>(i)];
        int m = std::max(prefix_max[static_cast<std::size_t>(i - 1)], rgs[static_cast<std::size_t>(i)]);
        prefix_max[static_cast<std::size_t>(i)] = m;
        for (int j = i + 1; j < n; ++j) {
            rgs[static_cast<std::size_t>(j)] = 0;
            prefix_max[static_cast<std::size_t>(j)] = m;
        }
    }
    return out;
}

const std::vector<SetPartition>& noncrossing_partitions(int n) {
    check_size(n, kLatticeCap);
    static std::mutex mutex;
    static std::map<int, std::vector<SetPartition>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::map<std::pair<int, int>, std::vector<RawPartition>> memo;
    std::vector<SetPartition> out;
    for (const auto& raw : nc_range(0, n, memo)) out.emplace_back(n, raw);
    std::sort(out.begin(), out.end());
    return cache.emplace(n, std::move(out)).first->second;
}

const std::vector<SetPartition>& interval_partitions(int n) {
    check_size(n, kLatticeCap);
    static std::mutex mutex;
    static std::map<int, std::vector<SetPartition>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<SetPartition> out;
    // bit g of `cuts` set: a block ends after point g
    for (Block cuts = 0; cuts < bit(n - 1); ++cuts) {
        std::vector<Block> blocks;
        int start = 0;
        for (int g = 0; g < n; ++g) {
            if (g == n - 1 || (cuts & bit(g))) {
                blocks.push_back(range_mask(start, g + 1));
                start = g + 1;
            }
        }
        out.emplace_back(n, std::move(blocks));
    }
    std::sort(out.begin(), out.end());
    return cache.emplace(n, std::move(out)).first->second;
}

std::vector<SetPartition> bnc_partitions(const ChiMap& chi) {
    std::vector<SetPartition> out;
    for (const auto& p : noncrossing_partitions(chi.size())) out.push_back(p.image(chi.order()));
    return out;
}

std::vector<SetPartition> bi_partitions(const ChiMap& chi) {
    std::vector<SetPartition> out;
    for (const auto& p : interval_partitions(chi.size())) out.push_back(p.image(chi.order()));
    return out;
}

bool is_bnc(const SetPartition& p, const ChiMap& chi) {
    check_same_size(p, chi.size());
    return p.preimage(chi.order()).is_noncrossing();
}

bool is_bi_interval(const SetPartition& p, const ChiMap& chi) {
    check_same_size(p, chi.size());
    return p.preimage(chi.order()).is_interval();
}

SetPartition join(const SetPartition& a, const SetPartition& b) {
    check_same_size(b, a.n());
    std::vector<Block> current = a.blocks();
    for (Block blk : b.blocks()) {
        Block merged = blk;
        std::vector<Block> kept;
        for (Block c : current) {
            if (c & merged) {
                merged |= c;
            } else {
                kept.push_back(c);
            }
        }
        kept.push_back(merged);
        current = std::move(kept);
    }
    return SetPartition(a.n(), std::move(current));
}

bool pairing_join_is_full(const SetPartition& p, const ChiMap& doubled) {
    const int n = p.n();
    check_same_size(p, doubled.size());
    if (n % 2 != 0) throw SizeError("pairing test needs an even number of points");
    if (!p.all_blocks_even()) throw PreconditionError("pairing test needs every block to have even size");
    for (int k = 0; k < n; k += 2) {
        if (doubled[k] != doubled[k + 1]) throw PreconditionError("chi map is not a doubled map");
    }
    // Outside BNC the adjacency test and the lattice join disagree.
    if (!is_bnc(p, doubled)) throw PreconditionError("pairing test needs a bi-non-crossing partition");
    const auto& s = doubled.order();
    if (!p.same_block(s.front(), s.back())) return false;
    for (int i = 1; i + 1 < n; i += 2) {
        if (!p.same_block(s[static_cast<std::size_t>(i)], s[static_cast<std::size_t>(i + 1)])) return false;
    }
    return true;
}

SetPartition kreweras(const SetPartition& p) {
    if (!p.is_noncrossing()) throw PreconditionError("Kreweras complement needs a non-crossing partition");
    const int n = p.n();
    // p as a permutation cycling each block upward; complement = p^{-1} after the shift i -> i+1.
    std::vector<int> next(static_cast<std::size_t>(n));
    std::vector<int> prev(static_cast<std::size_t>(n));
    for (Block b : p.blocks()) {
        std::vector<int> elems;
        for (Block r = b; r; r &= r - 1) elems.push_back(std::countr_zero(r));
        for (std::size_t k = 0; k < elems.size(); ++k) {
            int to = elems[(k + 1) % elems.size()];
            next[static_cast<std::size_t>(elems[k])] = to;
            prev[static_cast<std::size_t>(to)] = elems[k];
        }
    }
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    int count = 0;
    for (int i = 0; i < n; ++i) {
        if (labels[static_cast<std::size_t>(i)] >= 0) continue;
        int j = i;
        while (labels[static_cast<std::size_t>(j)] < 0) {
            labels[static_cast<std::size_t>(j)] = count;
            j = prev[static_cast<std::size_t>((j + 1) % n)];
        }
        ++count;
    }
    return SetPartition::from_labels(labels);
}

std::size_t MobiusCache::KeyHash::operator()(const Key& k) const noexcept {
    SetPartitionHash h;
    return h(k.lower) * 31 + h(k.upper) * 7 + static_cast<std::size_t>(k.kind);
}

long long MobiusCache::get(Lattice kind, const SetPartition& lower, const SetPartition& upper) {
    if (kind != Lattice::NC && kind != Lattice::IN) throw PreconditionError("cache holds NC and IN values only");
    if (lower == upper) return 1;
    Key key{kind, lower, upper};
    {
        std::lock_guard lock(mutex_);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
    }
    long long value = compute(kind, lower, upper);
    std::lock_guard lock(mutex_);
    memo_.emplace(std::move(key), value);
    return value;
}

long long MobiusCache::compute(Lattice kind, const SetPartition& lower, const SetPartition& upper) {
    const auto& elements = kind == Lattice::NC ? noncrossing_partitions(lower.n()) : interval_partitions(lower.n());
    long long sum = 0;
    for (const auto& mid : elements) {
        if (mid == lower || !lower.refines(mid) || !mid.refines(upper)) continue;
        sum += get(kind, mid, upper);
    }
    return -sum;
}

long long mobius(Lattice kind, const SetPartition& lower, const SetPartition& upper, const ChiMap* chi) {
    static MobiusCache cache;
    check_same_size(upper, lower.n());
    SetPartition lo = lower;
    SetPartition hi = upper;
    Lattice reduced = kind;
    if (kind == Lattice::BNC || kind == Lattice::BI) {
        if (chi == nullptr) throw PreconditionError("bi-lattice Moebius value needs a chi map");
        check_same_size(lower, chi->size());
        lo = lower.preimage(chi->order());
        hi = upper.preimage(chi->order());
        reduced = kind == Lattice::BNC ? Lattice::NC : Lattice::IN;
    }
    bool member = reduced == Lattice::NC ? lo.is_noncrossing() && hi.is_noncrossing() : lo.is_interval() && hi.is_interval();
    if (!member) throw PreconditionError("partition outside the lattice");
    if (!lo.refines(hi)) throw PreconditionError("Moebius interval is empty: lower does not refine upper");
    return cache.get(reduced, lo, hi);
}

long long catalan(int n) {
    long long c = 1;
    for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
    return c;
}

}  // namespace bifree
