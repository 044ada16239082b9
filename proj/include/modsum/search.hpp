#pragma once
// search.hpp
// Exhaustive search over subsets of Z_m (usually Z_m^*) for the largest
// sets whose h-fold sumset fails to cover a target. Descends by subset
// size from the full universe; superset monotonicity makes the first
// size with a non-covering witness the exact maximum.
//
// Symmetry pruning multiplies by units of Z_m, which preserves coverage
// of the full ring but not of a parity slice, so pruning is enabled
// only for full-ring targets.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "residue.hpp"

namespace modsum {

struct SearchProblem {
    enum class Universe { units, all };
    enum class Target { full_ring, even_classes, odd_classes };

    Modulus m;
    int fold = 3;  // 2 or 3
    Universe universe = Universe::units;
    Target target = Target::full_ring;
    uint64_t min_size = 1;
};

struct SearchBudget {
    uint64_t max_nodes = 20'000'000;
    double max_seconds = 120.0;
};

struct SearchResult {
    bool found = false;
    uint64_t max_size = 0;
    // Canonical witnesses (lexicographically least orbit representative),
    // sorted, one per orbit when pruning is active.
    std::vector<std::vector<uint64_t>> witnesses;
    uint64_t orbits_explored = 0;
    uint64_t pruned = 0;
    uint64_t nodes = 0;
    bool incomplete = false;
};

namespace detail {

// Advance a k-combination of {0..n-1} in lexicographic order.
inline bool next_combination(std::vector<uint32_t>& idx, uint32_t n) {
    const size_t k = idx.size();
    if (k == 0) return false;
    size_t i = k;
    while (i-- > 0) {
        if (idx[i] + (k - i) < n) {
            ++idx[i];
            for (size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct Clock {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace detail

inline ResidueSet target_set(const SearchProblem& p) {
    switch (p.target) {
        case SearchProblem::Target::full_ring:
            return full_ring(p.m);
        case SearchProblem::Target::even_classes: {
            ResidueSet t(p.m);
            for (uint64_t r = 0; r < p.m.value(); r += 2) t.add(r);
            return t;
        }
        case SearchProblem::Target::odd_classes: {
            ResidueSet t(p.m);
            for (uint64_t r = 1; r < p.m.value(); r += 2) t.add(r);
            return t;
        }
    }
    throw std::logic_error("unreachable");
}

inline std::vector<uint64_t> universe_members(const SearchProblem& p) {
    if (p.universe == SearchProblem::Universe::units) return units(p.m).members();
    return full_ring(p.m).members();
}

// Lexicographically least sorted member list in the unit-multiplication
// orbit of `a`. Idempotent.
inline std::vector<uint64_t> canonical_orbit_rep(const std::vector<uint64_t>& a,
                                                 const Modulus& m) {
    std::vector<uint64_t> best = a;
    std::sort(best.begin(), best.end());
    std::vector<uint64_t> img(a.size());
    for (uint64_t u : units(m).members()) {
        if (u == 1) continue;
        for (size_t i = 0; i < a.size(); ++i) img[i] = a[i] * u % m.value();
        std::sort(img.begin(), img.end());
        if (img < best) best = img;
    }
    return best;
}

inline bool is_canonical(const std::vector<uint64_t>& sorted_a,
                         const std::vector<uint64_t>& unit_list, uint64_t m,
                         std::vector<uint64_t>& scratch) {
    scratch.resize(sorted_a.size());
    for (uint64_t u : unit_list) {
        if (u == 1) continue;
        for (size_t i = 0; i < sorted_a.size(); ++i) scratch[i] = sorted_a[i] * u % m;
        std::sort(scratch.begin(), scratch.end());
        if (scratch < sorted_a) return false;
    }
    return true;
}

inline bool covers(const ResidueSet& a, int fold, const ResidueSet& target) {
    return target.bits().is_subset_of(iterated_sumset(a, fold).bits());
}

// Exact maximum size of a subset of the universe whose fold-wise sumset
// misses at least one target element, with all witnesses of that size
// canonicalized. Exceeding the budget yields an explicitly flagged
// partial result.
inline SearchResult max_noncovering(const SearchProblem& p,
                                    const SearchBudget& budget = {},
                                    bool use_pruning = true) {
    if (p.fold < 2 || p.fold > 3) throw std::invalid_argument("fold must be 2 or 3");
    const std::vector<uint64_t> uni = universe_members(p);
    if (uni.empty()) throw std::invalid_argument("empty universe");
    const ResidueSet tgt = target_set(p);
    const std::vector<uint64_t> unit_list = units(p.m).members();
    const bool prune = use_pruning && p.target == SearchProblem::Target::full_ring;

    SearchResult res;
    detail::Clock clock;
    std::vector<uint64_t> scratch, members;
    for (uint64_t s = uni.size(); s + 1 > p.min_size; --s) {
        std::vector<uint32_t> idx(s);
        for (uint32_t i = 0; i < s; ++i) idx[i] = i;
        bool more = true;
        std::vector<std::vector<uint64_t>> found_here;
        while (more) {
            if (++res.nodes % 1024 == 0 && clock.elapsed() > budget.max_seconds)
                res.incomplete = true;
            if (res.nodes > budget.max_nodes) res.incomplete = true;
            if (res.incomplete) break;
            members.resize(s);
            for (uint64_t i = 0; i < s; ++i) members[i] = uni[idx[i]];
            bool consider = true;
            if (prune && !is_canonical(members, unit_list, p.m.value(), scratch)) {
                ++res.pruned;
                consider = false;
            }
            if (consider) {
                ++res.orbits_explored;
                ResidueSet a(p.m, members);
                if (!covers(a, p.fold, tgt)) {
                    found_here.push_back(prune ? members
                                               : canonical_orbit_rep(members, p.m));
                }
            }
            more = detail::next_combination(idx, uint32_t(uni.size()));
        }
        if (!found_here.empty()) {
            std::sort(found_here.begin(), found_here.end());
            found_here.erase(std::unique(found_here.begin(), found_here.end()),
                             found_here.end());
            res.found = true;
            res.max_size = s;
            res.witnesses = std::move(found_here);
            return res;
        }
        if (res.incomplete) return res;
    }
    return res;
}

struct CertificateReport {
    uint64_t m = 0;
    uint64_t phi = 0;
    uint64_t threshold_size = 0;  // floor(5 phi / 8) + 1
    bool holds = true;            // every subset of threshold_size covers
    std::vector<uint64_t> counterexample;
    bool boundary_integral = false;  // 8 | 5 phi
    bool boundary_attained = false;  // a non-covering subset of size 5 phi/8
    std::vector<uint64_t> boundary_witness;
    uint64_t subsets_checked = 0;
    bool incomplete = false;
};

// Certifies by exhaustion that every A in Z_m^* with |A| > (5/8) phi(m)
// has triple sumset Z_m; superset monotonicity reduces the check to
// subsets of size floor(5 phi/8)+1. Also reports whether the boundary
// size itself is attained by a non-covering witness.
inline CertificateReport threshold_certificate(const Modulus& m,
                                               const SearchBudget& budget = {}) {
    if (m.value() % 2 == 0 || !m.square_free())
        throw std::invalid_argument("threshold certificate requires odd square-free m");
    CertificateReport rep;
    rep.m = m.value();
    rep.phi = m.totient();
    rep.threshold_size = 5 * rep.phi / 8 + 1;
    rep.boundary_integral = (5 * rep.phi) % 8 == 0;

    const std::vector<uint64_t> uni = units(m).members();
    const ResidueSet tgt = full_ring(m);
    detail::Clock clock;

    auto sweep = [&](uint64_t s, bool stop_at_first_noncover,
                     std::vector<uint64_t>& witness_out) -> bool {
        if (s > uni.size()) return false;
        std::vector<uint32_t> idx(s);
        for (uint32_t i = 0; i < s; ++i) idx[i] = i;
        std::vector<uint64_t> members(s);
        bool more = true, any_noncover = false;
        while (more) {
            if (++rep.subsets_checked % 1024 == 0 && clock.elapsed() > budget.max_seconds)
                rep.incomplete = true;
            if (rep.subsets_checked > budget.max_nodes) rep.incomplete = true;
            if (rep.incomplete) return any_noncover;
            for (uint64_t i = 0; i < s; ++i) members[i] = uni[idx[i]];
            ResidueSet a(m, members);
            if (!covers(a, 3, tgt)) {
                any_noncover = true;
                witness_out = canonical_orbit_rep(members, m);
                if (stop_at_first_noncover) return true;
            }
            more = detail::next_combination(idx, uint32_t(uni.size()));
        }
        return any_noncover;
    };

    std::vector<uint64_t> counter;
    rep.holds = !sweep(rep.threshold_size, true, counter);
    rep.counterexample = counter;
    if (rep.boundary_integral && !rep.incomplete) {
        std::vector<uint64_t> bw;
        rep.boundary_attained = sweep(5 * rep.phi / 8, true, bw);
        rep.boundary_witness = bw;
    }
    return rep;
}

struct ShenReport {
    uint64_t m = 0;
    uint64_t phi = 0;
    uint64_t s1 = 0, s2 = 0, s3 = 0;
    bool meets_threshold = false;  // s1 > (5/8)phi and s2,s3 >= (5/8)phi
    bool holds = true;             // every (A1,A2,A3) at these sizes covers
    std::vector<uint64_t> witness1, witness2, witness3;
    uint64_t triples_checked = 0;
    bool incomplete = false;
};

inline bool covers_pair(const ResidueSet& partial, const ResidueSet& last,
                        const ResidueSet& target) {
    return target.bits().is_subset_of(sumset(partial, last).bits());
}

// Exhaustively checks A1 + A2 + A3 = Z_m over all subset triples of the
// given sizes. A1 ranges over canonical orbit representatives only: the
// diagonal unit action u.(A1,A2,A3) preserves coverage, so a violating
// triple exists iff one exists with A1 canonical.
inline ShenReport shen_variant(const Modulus& m, uint64_t s1, uint64_t s2, uint64_t s3,
                               const SearchBudget& budget = {}) {
    if (m.value() % 2 == 0 || !m.square_free())
        throw std::invalid_argument("shen variant requires odd square-free m");
    ShenReport rep;
    rep.m = m.value();
    rep.phi = m.totient();
    rep.s1 = s1; rep.s2 = s2; rep.s3 = s3;
    if (s1 < 1 || s2 < 1 || s3 < 1 || s1 > rep.phi || s2 > rep.phi || s3 > rep.phi)
        throw std::invalid_argument("sizes must lie in [1, phi(m)]");
    rep.meets_threshold = 8 * s1 > 5 * rep.phi && 8 * s2 >= 5 * rep.phi &&
                          8 * s3 >= 5 * rep.phi;

    const std::vector<uint64_t> uni = units(m).members();
    const std::vector<uint64_t> unit_list = uni;
    const ResidueSet tgt = full_ring(m);
    detail::Clock clock;
    std::vector<uint64_t> scratch;

    std::vector<uint32_t> i1(s1);
    for (uint32_t i = 0; i < s1; ++i) i1[i] = i;
    bool more1 = true;
    std::vector<uint64_t> m1(s1), m2(s2), m3(s3);
    while (more1) {
        for (uint64_t i = 0; i < s1; ++i) m1[i] = uni[i1[i]];
        if (is_canonical(m1, unit_list, m.value(), scratch)) {
            ResidueSet a1(m, m1);
            std::vector<uint32_t> i2(s2);
            for (uint32_t i = 0; i < s2; ++i) i2[i] = i;
            bool more2 = true;
            while (more2) {
                for (uint64_t i = 0; i < s2; ++i) m2[i] = uni[i2[i]];
                ResidueSet s12 = sumset(a1, ResidueSet(m, m2));
                std::vector<uint32_t> i3(s3);
                for (uint32_t i = 0; i < s3; ++i) i3[i] = i;
                bool more3 = true;
                while (more3) {
                    if (++rep.triples_checked % 1024 == 0 &&
                        clock.elapsed() > budget.max_seconds)
                        rep.incomplete = true;
                    if (rep.triples_checked > budget.max_nodes) rep.incomplete = true;
                    if (rep.incomplete) return rep;
                    for (uint64_t i = 0; i < s3; ++i) m3[i] = uni[i3[i]];
                    if (!covers_pair(s12, ResidueSet(m, m3), tgt)) {
                        rep.holds = false;
                        rep.witness1 = m1;
                        rep.witness2 = m2;
                        rep.witness3 = m3;
                        return rep;
                    }
                    more3 = detail::next_combination(i3, uint32_t(uni.size()));
                }
                more2 = detail::next_combination(i2, uint32_t(uni.size()));
            }
        }
        more1 = detail::next_combination(i1, uint32_t(uni.size()));
    }
    return rep;
}

}  // namespace modsum
