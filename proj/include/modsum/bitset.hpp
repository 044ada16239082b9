#pragma once
// bitset.hpp
// Dynamic bit array backed by 64-bit words.
//
// Encoding: bit i lives in word i/64 at position i%64, so ascending bit
// index equals ascending value. Bits at or past size() in the last word
// are kept zero; every bulk operation re-masks the tail.

#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace modsum {

class Bitset {
public:
    static constexpr uint64_t npos = ~0ull;

    Bitset() = default;
    explicit Bitset(uint64_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    uint64_t size() const { return nbits_; }
    uint64_t word_count() const { return words_.size(); }
    const std::vector<uint64_t>& words() const { return words_; }
    std::vector<uint64_t>& words() { return words_; }

    void set(uint64_t i) {
        assert(i < nbits_);
        words_[i >> 6] |= 1ull << (i & 63);
    }
    void reset(uint64_t i) {
        assert(i < nbits_);
        words_[i >> 6] &= ~(1ull << (i & 63));
    }
    bool test(uint64_t i) const {
        assert(i < nbits_);
        return (words_[i >> 6] >> (i & 63)) & 1ull;
    }

    void set_all() {
        for (auto& w : words_) w = ~0ull;
        mask_tail();
    }
    void reset_all() {
        for (auto& w : words_) w = 0;
    }

    // Clear bits in the half-open range [lo, hi).
    void reset_range(uint64_t lo, uint64_t hi) {
        if (hi > nbits_) hi = nbits_;
        if (lo >= hi) return;
        uint64_t wl = lo >> 6, wh = (hi - 1) >> 6;
        uint64_t first = ~0ull << (lo & 63);
        uint64_t last = ((hi - 1) & 63) == 63 ? ~0ull : ((1ull << (((hi - 1) & 63) + 1)) - 1);
        if (wl == wh) {
            words_[wl] &= ~(first & last);
            return;
        }
        words_[wl] &= ~first;
        words_[wh] &= ~last;
        for (uint64_t w = wl + 1; w < wh; ++w) words_[w] = 0;
    }

    uint64_t count() const {
        uint64_t c = 0;
        for (uint64_t w : words_) c += std::popcount(w);
        return c;
    }

    // Set bits in the half-open value range [lo, hi).
    uint64_t count_range(uint64_t lo, uint64_t hi) const {
        if (hi > nbits_) hi = nbits_;
        if (lo >= hi) return 0;
        uint64_t wl = lo >> 6, wh = (hi - 1) >> 6;
        uint64_t first = words_[wl] & (~0ull << (lo & 63));
        uint64_t last_mask = ((hi - 1) & 63) == 63 ? ~0ull : ((1ull << (((hi - 1) & 63) + 1)) - 1);
        if (wl == wh) return std::popcount(first & last_mask);
        uint64_t c = std::popcount(first) + std::popcount(words_[wh] & last_mask);
        for (uint64_t w = wl + 1; w < wh; ++w) c += std::popcount(words_[w]);
        return c;
    }

    bool any() const {
        for (uint64_t w : words_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    // First set bit with index >= from, or npos.
    uint64_t find_next(uint64_t from) const {
        if (from >= nbits_) return npos;
        uint64_t wi = from >> 6;
        uint64_t w = words_[wi] & (~0ull << (from & 63));
        while (true) {
            if (w) return (wi << 6) + std::countr_zero(w);
            if (++wi == words_.size()) return npos;
            w = words_[wi];
        }
    }

    // Last set bit with index <= from, or npos.
    uint64_t find_prev(uint64_t from) const {
        if (nbits_ == 0) return npos;
        if (from >= nbits_) from = nbits_ - 1;
        uint64_t wi = from >> 6;
        uint64_t w = words_[wi] & (((from & 63) == 63) ? ~0ull : ((1ull << ((from & 63) + 1)) - 1));
        while (true) {
            if (w) return (wi << 6) + 63 - std::countl_zero(w);
            if (wi == 0) return npos;
            w = words_[--wi];
        }
    }

    Bitset& operator&=(const Bitset& o) {
        check_same_size(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& o) {
        check_same_size(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
        return *this;
    }
    // *this &= ~o
    Bitset& and_not(const Bitset& o) {
        check_same_size(o);
        for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
        return *this;
    }
    // Flip all bits below size().
    Bitset& complement() {
        for (auto& w : words_) w = ~w;
        mask_tail();
        return *this;
    }

    bool operator==(const Bitset& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }

    bool intersects(const Bitset& o) const {
        check_same_size(o);
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    bool is_subset_of(const Bitset& o) const {
        check_same_size(o);
        for (size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    template <class F>
    void for_each(F&& f) const {
        for (size_t wi = 0; wi < words_.size(); ++wi) {
            uint64_t w = words_[wi];
            while (w) {
                f((wi << 6) + std::countr_zero(w));
                w &= w - 1;
            }
        }
    }

    std::vector<uint64_t> to_vector() const {
        std::vector<uint64_t> v;
        v.reserve(count());
        for_each([&](uint64_t i) { v.push_back(i); });
        return v;
    }

private:
    uint64_t nbits_ = 0;
    std::vector<uint64_t> words_;

    void mask_tail() {
        if (nbits_ & 63) words_.back() &= (1ull << (nbits_ & 63)) - 1;
    }
    void check_same_size(const Bitset& o) const {
        if (nbits_ != o.nbits_) throw std::invalid_argument("bitset size mismatch");
    }
};

// Read 64 bits of `words` starting at bit offset `pos` (caller guarantees
// the words vector is long enough to cover pos .. pos+63 or past-end zeros).
inline uint64_t read_chunk(const std::vector<uint64_t>& words, uint64_t pos) {
    uint64_t wi = pos >> 6, sh = pos & 63;
    uint64_t lo = wi < words.size() ? words[wi] : 0;
    if (sh == 0) return lo;
    uint64_t hi = wi + 1 < words.size() ? words[wi + 1] : 0;
    return (lo >> sh) | (hi << (64 - sh));
}

// dst[dst_start + t] |= src[src_start + t] for t in [0, len).
inline void or_block(Bitset& dst, uint64_t dst_start, const Bitset& src,
                     uint64_t src_start, uint64_t len) {
    assert(dst_start + len <= dst.size());
    assert(src_start + len <= src.size());
    auto& dw = dst.words();
    const auto& sw = src.words();
    uint64_t done = 0;
    while (done < len) {
        uint64_t chunk = read_chunk(sw, src_start + done);
        uint64_t n = len - done;
        if (n < 64) chunk &= (1ull << n) - 1;
        uint64_t dp = dst_start + done, wi = dp >> 6, sh = dp & 63;
        dw[wi] |= chunk << sh;
        if (sh && wi + 1 < dw.size()) dw[wi + 1] |= chunk >> (64 - sh);
        done += 64;
    }
}

}  // namespace modsum
