#pragma once
// primes.hpp
// Segmented sieve with O(1) membership, prime subsets with progression
// filtering, relative-density series, and two/three-prime representation
// enumeration.
//
// Tables and subsets store one bit per odd number: bit i holds 2i+3,
// value v maps to bit (v-3)/2. The prime 2 is carried separately.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitset.hpp"
#include "residue.hpp"

namespace modsum {

inline constexpr uint64_t odd_bits_for(uint64_t limit) {
    return limit < 3 ? 0 : (limit - 3) / 2 + 1;
}

class PrimeTable {
public:
    static constexpr uint64_t kDefaultMemoryBudget = 1ull << 28;  // 256 MB
    static constexpr uint64_t kBlockBits = 4096;

    explicit PrimeTable(uint64_t limit, uint64_t memory_budget = kDefaultMemoryBudget)
        : limit_(limit), odd_(odd_bits_for(limit)) {
        if (limit < 2) throw std::invalid_argument("sieve limit must be >= 2");
        uint64_t need = odd_.word_count() * 8 + (odd_.size() / kBlockBits + 2) * 8;
        if (need > memory_budget) {
            std::ostringstream os;
            os << "sieve to " << limit << " needs ~" << (need >> 20)
               << " MiB, budget " << (memory_budget >> 20) << " MiB";
            throw std::invalid_argument(os.str());
        }
        sieve();
        build_index();
    }

    uint64_t limit() const { return limit_; }

    bool is_prime(uint64_t n) const {
        if (n < 2) return false;
        if (n == 2) return true;
        if (n % 2 == 0) return false;
        assert(n <= limit_);
        return odd_.test((n - 3) / 2);
    }

    // pi(limit)
    uint64_t count() const { return count_; }

    // pi(min(x, limit))
    uint64_t count_leq(uint64_t x) const {
        if (x < 2) return 0;
        if (x > limit_) x = limit_;
        if (x < 3) return 1;
        return 1 + prefix(odd_, block_, (x - 3) / 2);
    }

    // Primes in the inclusive range [lo, hi], ascending.
    template <class F>
    void for_each_prime(uint64_t lo, uint64_t hi, F&& f) const {
        if (hi > limit_) hi = limit_;
        if (lo <= 2 && 2 <= hi) f(uint64_t{2});
        if (hi < 3) return;
        uint64_t i = lo <= 3 ? 0 : (lo - 3 + 1) / 2;
        uint64_t iend = (hi - 3) / 2;
        for (i = odd_.find_next(i); i != Bitset::npos && i <= iend;
             i = odd_.find_next(i + 1))
            f(2 * i + 3);
    }

    std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi) const {
        std::vector<uint64_t> out;
        for_each_prime(lo, hi, [&](uint64_t p) { out.push_back(p); });
        return out;
    }
    std::vector<uint64_t> primes_upto(uint64_t n) const { return primes_in(2, n); }

    const Bitset& odd_bits() const { return odd_; }

    // ---- on-disk cache (versioned binary: header, bit words, checksum) ----

    bool save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        const char magic[4] = {'M', 'S', 'P', 'T'};
        uint32_t version = 1;
        uint64_t nwords = odd_.word_count();
        out.write(magic, 4);
        out.write(reinterpret_cast<const char*>(&version), 4);
        out.write(reinterpret_cast<const char*>(&limit_), 8);
        out.write(reinterpret_cast<const char*>(&nwords), 8);
        out.write(reinterpret_cast<const char*>(odd_.words().data()), nwords * 8);
        uint64_t sum = checksum();
        out.write(reinterpret_cast<const char*>(&sum), 8);
        return bool(out);
    }

    static std::optional<PrimeTable> load(const std::string& path, uint64_t want_limit) {
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        char magic[4];
        uint32_t version = 0;
        uint64_t limit = 0, nwords = 0;
        in.read(magic, 4);
        in.read(reinterpret_cast<char*>(&version), 4);
        in.read(reinterpret_cast<char*>(&limit), 8);
        in.read(reinterpret_cast<char*>(&nwords), 8);
        if (!in || std::memcmp(magic, "MSPT", 4) != 0 || version != 1 ||
            limit != want_limit || nwords != (odd_bits_for(limit) + 63) / 64)
            return std::nullopt;
        PrimeTable t(private_tag{}, limit);
        in.read(reinterpret_cast<char*>(t.odd_.words().data()), nwords * 8);
        uint64_t sum = 0;
        in.read(reinterpret_cast<char*>(&sum), 8);
        if (!in || sum != t.checksum()) return std::nullopt;
        t.build_index();
        return t;
    }

private:
    struct private_tag {};
    PrimeTable(private_tag, uint64_t limit) : limit_(limit), odd_(odd_bits_for(limit)) {}

    uint64_t limit_;
    Bitset odd_;
    std::vector<uint64_t> block_;  // set bits in blocks before block b
    uint64_t count_ = 0;

    uint64_t checksum() const {
        uint64_t h = 0x9e3779b97f4a7c15ull ^ limit_;
        for (uint64_t w : odd_.words()) h = (h * 0x100000001b3ull) ^ w;
        return h;
    }

    void sieve() {
        if (limit_ < 3) return;
        odd_.set_all();
        // Base primes up to sqrt(limit), then mark segments of ~1M odds.
        uint64_t root = uint64_t(std::sqrt(double(limit_))) + 2;
        while (root * root > limit_ + 1) --root;
        std::vector<uint64_t> base;
        {
            std::vector<char> comp(root + 1, 0);
            for (uint64_t p = 3; p <= root; p += 2) {
                if (comp[p]) continue;
                base.push_back(p);
                for (uint64_t q = p * p; q <= root; q += 2 * p) comp[q] = 1;
            }
        }
        const uint64_t nbits = odd_.size();
        const uint64_t seg = 1ull << 20;
        for (uint64_t lo = 0; lo < nbits; lo += seg) {
            uint64_t hi = std::min(lo + seg, nbits);  // bits [lo, hi)
            uint64_t vhi = 2 * (hi - 1) + 3;
            for (uint64_t p : base) {
                if (p * p > vhi) break;
                uint64_t start = p * p;
                uint64_t vlo = 2 * lo + 3;
                if (start < vlo) {
                    uint64_t k = (vlo + p - 1) / p;
                    if (k % 2 == 0) ++k;  // odd multiples only
                    start = k * p;
                    if (start < p * p) start = p * p;
                }
                for (uint64_t v = start; v <= vhi; v += 2 * p) odd_.reset((v - 3) / 2);
            }
        }
    }

    void build_index() {
        block_.assign(odd_.size() / kBlockBits + 2, 0);
        uint64_t acc = 0;
        const auto& w = odd_.words();
        const uint64_t words_per_block = kBlockBits / 64;
        for (uint64_t b = 0; b * kBlockBits < odd_.size(); ++b) {
            block_[b] = acc;
            uint64_t w0 = b * words_per_block;
            uint64_t w1 = std::min<uint64_t>(w0 + words_per_block, w.size());
            for (uint64_t i = w0; i < w1; ++i) acc += std::popcount(w[i]);
        }
        count_ = (limit_ >= 2 ? 1 : 0) + acc;
    }

    // set bits with index <= i, using the block index
    static uint64_t prefix(const Bitset& bits, const std::vector<uint64_t>& block,
                           uint64_t i) {
        if (bits.size() == 0) return 0;
        if (i >= bits.size()) i = bits.size() - 1;
        uint64_t b = i / kBlockBits;
        return block[b] + bits.count_range(b * kBlockBits, i + 1);
    }

    friend class PrimeSubset;
};

class PrimeSubset {
public:
    explicit PrimeSubset(std::shared_ptr<const PrimeTable> table)
        : table_(std::move(table)), odd_(table_->odd_bits().size()) {}

    static PrimeSubset full(std::shared_ptr<const PrimeTable> table) {
        PrimeSubset s(std::move(table));
        s.has_two_ = true;
        s.odd_ = s.table_->odd_bits();
        s.dirty_ = true;
        return s;
    }

    const PrimeTable& table() const { return *table_; }
    std::shared_ptr<const PrimeTable> table_ptr() const { return table_; }
    uint64_t limit() const { return table_->limit(); }

    bool contains(uint64_t v) const {
        if (v == 2) return has_two_;
        if (v < 3 || v % 2 == 0 || v > limit()) return false;
        return odd_.test((v - 3) / 2);
    }

    void add(uint64_t p) {
        assert(table_->is_prime(p));
        if (p == 2) { has_two_ = true; return; }
        odd_.set((p - 3) / 2);
        dirty_ = true;
    }
    void remove(uint64_t p) {
        if (p == 2) { has_two_ = false; return; }
        if (p >= 3 && p % 2 == 1 && p <= limit()) odd_.reset((p - 3) / 2);
        dirty_ = true;
    }

    uint64_t count() const { return (has_two_ ? 1 : 0) + odd_.count(); }

    uint64_t count_leq(uint64_t x) const {
        if (x < 2) return 0;
        uint64_t c = has_two_ && x >= 2 ? 1 : 0;
        if (x < 3) return c;
        if (x > limit()) x = limit();
        ensure_index();
        return c + PrimeTable::prefix(odd_, block_, (x - 3) / 2);
    }
    // members in the inclusive range [lo, hi]
    uint64_t count_range(uint64_t lo, uint64_t hi) const {
        if (hi < lo) return 0;
        return count_leq(hi) - (lo ? count_leq(lo - 1) : 0);
    }

    template <class F>
    void for_each(uint64_t lo, uint64_t hi, F&& f) const {
        if (hi > limit()) hi = limit();
        if (has_two_ && lo <= 2 && 2 <= hi) f(uint64_t{2});
        if (hi < 3) return;
        uint64_t i = lo <= 3 ? 0 : (lo - 3 + 1) / 2;
        uint64_t iend = (hi - 3) / 2;
        for (i = odd_.find_next(i); i != Bitset::npos && i <= iend;
             i = odd_.find_next(i + 1))
            f(2 * i + 3);
    }

    std::vector<uint64_t> members_in(uint64_t lo, uint64_t hi) const {
        std::vector<uint64_t> out;
        for_each(lo, hi, [&](uint64_t p) { out.push_back(p); });
        return out;
    }

    std::optional<uint64_t> max_leq(uint64_t x) const {
        if (x > limit()) x = limit();
        if (x >= 3) {
            uint64_t i = odd_.find_prev((x - 3) / 2);
            if (i != Bitset::npos) return 2 * i + 3;
        }
        if (has_two_ && x >= 2) return 2;
        return std::nullopt;
    }
    std::optional<uint64_t> min_geq(uint64_t x) const {
        if (has_two_ && x <= 2) return 2;
        uint64_t i = odd_.find_next(x <= 3 ? 0 : (x - 3 + 1) / 2);
        if (i != Bitset::npos) return 2 * i + 3;
        return std::nullopt;
    }

    bool is_subset_of(const PrimeSubset& o) const {
        return (!has_two_ || o.has_two_) && odd_.is_subset_of(o.odd_);
    }
    bool operator==(const PrimeSubset& o) const {
        return has_two_ == o.has_two_ && odd_ == o.odd_;
    }

    const Bitset& odd_bits() const { return odd_; }
    Bitset& odd_bits() { dirty_ = true; return odd_; }
    bool has_two() const { return has_two_; }

private:
    std::shared_ptr<const PrimeTable> table_;
    bool has_two_ = false;
    Bitset odd_;
    mutable std::vector<uint64_t> block_;
    mutable bool dirty_ = true;

    void ensure_index() const {
        if (!dirty_) return;
        block_.assign(odd_.size() / PrimeTable::kBlockBits + 2, 0);
        uint64_t acc = 0;
        const auto& w = odd_.words();
        const uint64_t wpb = PrimeTable::kBlockBits / 64;
        for (uint64_t b = 0; b * PrimeTable::kBlockBits < odd_.size(); ++b) {
            block_[b] = acc;
            uint64_t w0 = b * wpb, w1 = std::min<uint64_t>(w0 + wpb, w.size());
            for (uint64_t i = w0; i < w1; ++i) acc += std::popcount(w[i]);
        }
        dirty_ = false;
    }
};

// Primes p <= limit with p mod q landing in `classes`.
inline PrimeSubset progression_filter(std::shared_ptr<const PrimeTable> table,
                                      const ResidueSet& classes) {
    PrimeSubset out(table);
    const uint64_t q = classes.m();
    table->for_each_prime(2, table->limit(), [&](uint64_t p) {
        if (classes.contains(p % q)) out.add(p);
    });
    return out;
}

struct DensityPoint {
    uint64_t x = 0;
    uint64_t count = 0;
    double value = 0;  // (log x / x) * count
};

// Exact counts at each checkpoint; min/max over the series are the
// desk-scale stand-ins for the lower/upper relative densities.
inline std::vector<DensityPoint> density_series(const PrimeSubset& s,
                                                const std::vector<uint64_t>& checkpoints) {
    std::vector<DensityPoint> out;
    out.reserve(checkpoints.size());
    for (uint64_t x : checkpoints) {
        if (x > s.limit())
            throw std::invalid_argument("density checkpoint exceeds table limit");
        if (x < 2) throw std::invalid_argument("density checkpoint must be >= 2");
        uint64_t c = s.count_leq(x);
        out.push_back({x, c, std::log(double(x)) / double(x) * double(c)});
    }
    return out;
}

struct RepPair {
    uint64_t n = 0;
    uint64_t w = 0;  // w <= v, w + v = n
    uint64_t v = 0;
};

// All unordered two-element representations of n inside S.
inline std::vector<RepPair> two_prime_reps(uint64_t n, const PrimeSubset& s) {
    std::vector<RepPair> out;
    if (n < 4) return out;
    if (n - 2 > s.limit())
        throw std::invalid_argument("two_prime_reps: n-2 exceeds table limit");
    s.for_each(2, n / 2, [&](uint64_t w) {
        if (s.contains(n - w)) out.push_back({n, w, n - w});
    });
    return out;
}

inline uint64_t two_prime_rep_count(uint64_t n, const PrimeSubset& s) {
    if (n < 4) return 0;
    uint64_t c = 0;
    s.for_each(2, n / 2, [&](uint64_t w) { c += s.contains(n - w); });
    return c;
}

// Smallest-lexicographic q1 <= q2 <= q3 in S with q1+q2+q3 = n; absence
// is certified by exhausting q1 <= n/3 and q2 <= (n-q1)/2.
inline std::optional<std::array<uint64_t, 3>> three_prime_witness(uint64_t n,
                                                                  const PrimeSubset& s) {
    if (n < 6 || n - 4 > s.limit()) {
        if (n >= 6) throw std::invalid_argument("three_prime_witness: n exceeds table limit");
        return std::nullopt;
    }
    std::optional<std::array<uint64_t, 3>> found;
    s.for_each(2, n / 3, [&](uint64_t q1) {
        if (found) return;
        s.for_each(q1, (n - q1) / 2, [&](uint64_t q2) {
            if (found) return;
            uint64_t q3 = n - q1 - q2;
            if (q3 <= s.limit() && s.contains(q3)) found = {{q1, q2, q3}};
        });
    });
    return found;
}

struct RepProfileEntry {
    uint64_t n = 0;
    uint64_t t = 0;       // unordered two-element representations in S
    double shape = 0;     // (n / log^2 n) * prod over distinct p'|n of (1 + 1/p')
    double ratio = 0;     // t / shape
};

inline double rep_bound_shape(uint64_t n) {
    double prod = 1.0;
    uint64_t m = n;
    for (uint64_t p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p) continue;
        prod *= 1.0 + 1.0 / double(p);
        while (m % p == 0) m /= p;
    }
    if (m > 1) prod *= 1.0 + 1.0 / double(m);
    double l = std::log(double(n));
    return double(n) / (l * l) * prod;
}

inline std::vector<RepProfileEntry> rep_count_profile(const std::vector<uint64_t>& targets,
                                                      const PrimeSubset& s) {
    std::vector<RepProfileEntry> out;
    out.reserve(targets.size());
    for (uint64_t n : targets) {
        if (n < 2 || n - 2 > s.limit())
            throw std::invalid_argument("rep profile target outside table limit");
        RepProfileEntry e;
        e.n = n;
        e.t = two_prime_rep_count(n, s);
        e.shape = rep_bound_shape(n);
        e.ratio = e.shape > 0 ? double(e.t) / e.shape : 0.0;
        out.push_back(e);
    }
    return out;
}

}  // namespace modsum
