#pragma once
// residue.hpp
// Dense set algebra over Z_m: reduced residues, sumsets by shifted-OR
// bit convolution, lifts between moduli, and coverage reports.

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bitset.hpp"

namespace modsum {

// Dense residue sets are capped so a set is never more than a few MB.
inline constexpr uint64_t kDefaultModulusCap = 1ull << 24;

class Modulus {
public:
    explicit Modulus(uint64_t m, uint64_t cap = kDefaultModulusCap) : m_(m) {
        if (m < 2) throw std::invalid_argument("modulus must be >= 2");
        if (m > cap) throw std::invalid_argument("modulus exceeds dense-set cap");
        uint64_t n = m;
        for (uint64_t p = 2; p * p <= n; ++p) {
            if (n % p) continue;
            int e = 0;
            while (n % p == 0) { n /= p; ++e; }
            factors_.push_back({p, e});
        }
        if (n > 1) factors_.push_back({n, 1});
        phi_ = m;
        for (auto [p, e] : factors_) phi_ = phi_ / p * (p - 1);
    }

    uint64_t value() const { return m_; }
    const std::vector<std::pair<uint64_t, int>>& factorization() const { return factors_; }
    uint64_t totient() const { return phi_; }
    bool square_free() const {
        for (auto [p, e] : factors_)
            if (e > 1) return false;
        return true;
    }
    bool operator==(const Modulus& o) const { return m_ == o.m_; }

private:
    uint64_t m_;
    std::vector<std::pair<uint64_t, int>> factors_;
    uint64_t phi_;
};

class ResidueSet {
public:
    explicit ResidueSet(Modulus mod) : mod_(std::move(mod)), bits_(mod_.value()) {}

    ResidueSet(Modulus mod, std::initializer_list<uint64_t> members)
        : ResidueSet(std::move(mod)) {
        for (uint64_t r : members) add(r);
    }
    ResidueSet(Modulus mod, const std::vector<uint64_t>& members)
        : ResidueSet(std::move(mod)) {
        for (uint64_t r : members) add(r);
    }

    const Modulus& modulus() const { return mod_; }
    uint64_t m() const { return mod_.value(); }

    void add(uint64_t r) { bits_.set(reduce(r)); }
    void remove(uint64_t r) { bits_.reset(reduce(r)); }
    bool contains(uint64_t r) const { return bits_.test(reduce(r)); }

    uint64_t size() const { return bits_.count(); }
    bool empty() const { return bits_.none(); }
    std::vector<uint64_t> members() const { return bits_.to_vector(); }

    const Bitset& bits() const { return bits_; }
    Bitset& bits() { return bits_; }

    bool operator==(const ResidueSet& o) const {
        return mod_ == o.mod_ && bits_ == o.bits_;
    }
    bool is_subset_of(const ResidueSet& o) const {
        require_same_modulus(o);
        return bits_.is_subset_of(o.bits_);
    }

    // Image of this set under reduction mod q. Any q >= 2 is accepted.
    ResidueSet reduced(const Modulus& q) const {
        ResidueSet out(q);
        bits_.for_each([&](uint64_t r) { out.add(r % q.value()); });
        return out;
    }

    void require_same_modulus(const ResidueSet& o) const {
        if (!(mod_ == o.mod_)) throw std::invalid_argument("modulus mismatch");
    }

private:
    Modulus mod_;
    Bitset bits_;

    uint64_t reduce(uint64_t r) const { return r % mod_.value(); }
};

inline uint64_t totient(const Modulus& m) { return m.totient(); }

inline ResidueSet full_ring(const Modulus& m) {
    ResidueSet s(m);
    s.bits().set_all();
    return s;
}

// The reduced residue classes mod m. Marks multiples of each prime
// divisor and takes the complement.
inline ResidueSet units(const Modulus& m) {
    Bitset nonunit(m.value());
    for (auto [p, e] : m.factorization())
        for (uint64_t j = 0; j < m.value(); j += p) nonunit.set(j);
    ResidueSet s(m);
    s.bits() = nonunit.complement();
    return s;
}

// {(a+b) mod m : a in A, b in B}. The smaller set supplies the shifts;
// each member contributes one rotated OR of the other set's bit array.
inline ResidueSet sumset(const ResidueSet& a, const ResidueSet& b) {
    a.require_same_modulus(b);
    const uint64_t m = a.m();
    const ResidueSet& shifts = a.size() <= b.size() ? a : b;
    const ResidueSet& body = a.size() <= b.size() ? b : a;
    ResidueSet out(a.modulus());
    shifts.bits().for_each([&](uint64_t k) {
        if (k == 0) {
            out.bits() |= body.bits();
            return;
        }
        or_block(out.bits(), k, body.bits(), 0, m - k);
        or_block(out.bits(), 0, body.bits(), m - k, k);
    });
    return out;
}

inline ResidueSet iterated_sumset(const ResidueSet& a, int fold) {
    if (fold < 1) throw std::invalid_argument("fold count must be >= 1");
    ResidueSet acc = a;
    for (int i = 1; i < fold; ++i) acc = sumset(acc, a);
    return acc;
}

// u * A elementwise mod m.
inline ResidueSet multiply(const ResidueSet& a, uint64_t u) {
    ResidueSet out(a.modulus());
    a.bits().for_each([&](uint64_t r) { out.add(r * u % a.m()); });
    return out;
}

// All residues mod `target` that reduce into `base` mod q, where q must
// divide target; intersected with the units when unit_filter is set.
inline ResidueSet lift(const ResidueSet& base, const Modulus& target, bool unit_filter) {
    const uint64_t q = base.m(), m = target.value();
    if (m % q != 0) throw std::invalid_argument("lift: base modulus must divide target");
    ResidueSet out(target);
    base.bits().for_each([&](uint64_t b) {
        for (uint64_t r = b; r < m; r += q) out.add(r);
    });
    if (unit_filter) out.bits() &= units(target).bits();
    return out;
}

struct Rational {
    int64_t num = 0;
    int64_t den = 1;

    Rational() = default;
    Rational(int64_t n, int64_t d) : num(n), den(d) {
        if (den == 0) throw std::invalid_argument("zero denominator");
        int64_t g = std::gcd(num, den);
        if (g) { num /= g; den /= g; }
        if (den < 0) { num = -num; den = -den; }
    }
    double value() const { return double(num) / double(den); }
    std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

struct CoverageFilter {
    enum class Kind { all, even, odd, congruence };
    Kind kind = Kind::all;
    uint64_t cls = 0;  // congruence class
    uint64_t mod = 0;  // congruence modulus, must divide m

    static CoverageFilter all() { return {}; }
    static CoverageFilter even() { return {Kind::even, 0, 0}; }
    static CoverageFilter odd() { return {Kind::odd, 0, 0}; }
    static CoverageFilter congruence(uint64_t r, uint64_t q) {
        return {Kind::congruence, r, q};
    }
};

struct CoverageReport {
    Modulus modulus;
    ResidueSet covered;
    ResidueSet missed;
    uint64_t missed_even_count = 0;
    uint64_t missed_odd_count = 0;
    Rational proportion_missed_even;  // missed evens / evens in the universe
};

// Partition the filtered universe into classes covered by S and classes
// missed by it. 0 counts as even.
inline CoverageReport coverage(const ResidueSet& s, const CoverageFilter& f) {
    const Modulus& mod = s.modulus();
    const uint64_t m = mod.value();
    ResidueSet universe(mod);
    switch (f.kind) {
        case CoverageFilter::Kind::all:
            universe = full_ring(mod);
            break;
        case CoverageFilter::Kind::even:
            for (uint64_t r = 0; r < m; r += 2) universe.add(r);
            break;
        case CoverageFilter::Kind::odd:
            for (uint64_t r = 1; r < m; r += 2) universe.add(r);
            break;
        case CoverageFilter::Kind::congruence:
            if (f.mod == 0 || m % f.mod != 0)
                throw std::invalid_argument("coverage: filter modulus must divide m");
            for (uint64_t r = f.cls % f.mod; r < m; r += f.mod) universe.add(r);
            break;
    }
    CoverageReport rep{mod, ResidueSet(mod), ResidueSet(mod), 0, 0, Rational(0, 1)};
    rep.covered.bits() = universe.bits();
    rep.covered.bits() &= s.bits();
    rep.missed.bits() = universe.bits();
    rep.missed.bits().and_not(s.bits());
    uint64_t universe_even = 0;
    universe.bits().for_each([&](uint64_t r) { universe_even += (r % 2 == 0); });
    rep.missed.bits().for_each([&](uint64_t r) {
        (r % 2 == 0 ? rep.missed_even_count : rep.missed_odd_count)++;
    });
    rep.proportion_missed_even =
        universe_even ? Rational(int64_t(rep.missed_even_count), int64_t(universe_even))
                      : Rational(0, 1);
    return rep;
}

}  // namespace modsum
