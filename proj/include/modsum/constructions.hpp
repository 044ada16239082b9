#pragma once
// constructions.hpp
// Named recipes for the counterexample sets over Z_m, each bundled with
// machine-checkable claims. verify() evaluates every claim by finite
// computation and reports failures with explicit witness summands, so a
// broken set is diagnosable from the report alone.

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "residue.hpp"

namespace modsum {

enum class ClaimKind {
    cardinality_lower_bound,  // |A| >= bound
    miss_class,               // cls not in the fold-wise sumset
    miss_congruence_family,   // no element of the fold-wise sumset is
                              // congruent to any listed class mod family_mod
    covers_all,               // fold-wise sumset == Z_m
};

struct Claim {
    ClaimKind kind;
    uint64_t bound = 0;
    int fold = 1;
    uint64_t cls = 0;
    uint64_t family_mod = 0;
    std::vector<uint64_t> family_classes;
    std::string label;  // human-readable description used in reports
};

inline Claim claim_cardinality_at_least(uint64_t bound, std::string label) {
    Claim c;
    c.kind = ClaimKind::cardinality_lower_bound;
    c.bound = bound;
    c.label = std::move(label);
    return c;
}
inline Claim claim_missed_class(int fold, uint64_t cls, std::string label) {
    Claim c;
    c.kind = ClaimKind::miss_class;
    c.fold = fold;
    c.cls = cls;
    c.label = std::move(label);
    return c;
}
inline Claim claim_missed_family(int fold, uint64_t family_mod,
                                 std::vector<uint64_t> classes, std::string label) {
    Claim c;
    c.kind = ClaimKind::miss_congruence_family;
    c.fold = fold;
    c.family_mod = family_mod;
    c.family_classes = std::move(classes);
    c.label = std::move(label);
    return c;
}
inline Claim claim_covers_all(int fold, std::string label) {
    Claim c;
    c.kind = ClaimKind::covers_all;
    c.fold = fold;
    c.label = std::move(label);
    return c;
}

struct Construction {
    std::string name;
    std::vector<std::pair<std::string, uint64_t>> params;
    ResidueSet set;
    std::vector<Claim> claims;
};

struct ClaimResult {
    std::string label;
    bool pass = false;
    std::string detail;
    // For a failed miss-claim: the offending class followed by summands.
    std::vector<uint64_t> witness;
};

struct VerificationReport {
    std::string name;
    std::vector<std::pair<std::string, uint64_t>> params;
    std::vector<ClaimResult> results;

    bool all_pass() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
};

// Summands a_1..a_fold from A with sum congruent to cls, if any exist.
// fold is tiny (<= 3 for every shipped claim) so nested scans suffice.
inline std::optional<std::vector<uint64_t>> find_summands(const ResidueSet& a,
                                                          int fold, uint64_t cls) {
    const uint64_t m = a.m();
    auto ms = a.members();
    if (fold == 1) return a.contains(cls) ? std::optional(std::vector{cls}) : std::nullopt;
    if (fold == 2) {
        for (uint64_t x : ms) {
            uint64_t y = (cls + m - x % m) % m;
            if (a.contains(y)) return std::vector{x, y};
        }
        return std::nullopt;
    }
    ResidueSet prev = iterated_sumset(a, fold - 1);
    for (uint64_t x : ms) {
        uint64_t rest = (cls + m - x % m) % m;
        if (!prev.contains(rest)) continue;
        auto sub = find_summands(a, fold - 1, rest);
        if (sub) {
            sub->insert(sub->begin(), x);
            return sub;
        }
    }
    return std::nullopt;
}

inline ClaimResult evaluate_claim(const Construction& c, const Claim& cl) {
    ClaimResult res;
    res.label = cl.label;
    std::ostringstream det;
    switch (cl.kind) {
        case ClaimKind::cardinality_lower_bound: {
            uint64_t n = c.set.size();
            res.pass = n >= cl.bound;
            det << "size=" << n << ",bound=" << cl.bound;
            if (!res.pass) res.witness = {n};
            break;
        }
        case ClaimKind::miss_class: {
            ResidueSet s = iterated_sumset(c.set, cl.fold);
            res.pass = !s.contains(cl.cls);
            det << "class=" << cl.cls << ",fold=" << cl.fold;
            if (!res.pass) {
                res.witness = {cl.cls};
                if (auto w = find_summands(c.set, cl.fold, cl.cls))
                    res.witness.insert(res.witness.end(), w->begin(), w->end());
            }
            break;
        }
        case ClaimKind::miss_congruence_family: {
            ResidueSet s = iterated_sumset(c.set, cl.fold);
            res.pass = true;
            const uint64_t m = c.set.m();
            for (uint64_t b : cl.family_classes) {
                for (uint64_t r = b % cl.family_mod; r < m && res.pass; r += cl.family_mod) {
                    if (s.contains(r)) {
                        res.pass = false;
                        res.witness = {r};
                        if (auto w = find_summands(c.set, cl.fold, r))
                            res.witness.insert(res.witness.end(), w->begin(), w->end());
                    }
                }
                if (!res.pass) break;
            }
            det << "mod=" << cl.family_mod << ",fold=" << cl.fold
                << ",classes=" << cl.family_classes.size();
            break;
        }
        case ClaimKind::covers_all: {
            ResidueSet s = iterated_sumset(c.set, cl.fold);
            res.pass = s == full_ring(c.set.modulus());
            det << "fold=" << cl.fold;
            if (!res.pass) {
                Bitset miss = full_ring(c.set.modulus()).bits();
                miss.and_not(s.bits());
                res.witness = {miss.find_next(0)};
            }
            break;
        }
    }
    res.detail = det.str();
    return res;
}

// Claims are evaluated in declaration order; failures never throw.
inline VerificationReport verify(const Construction& c) {
    VerificationReport rep;
    rep.name = c.name;
    rep.params = c.params;
    for (const auto& cl : c.claims) rep.results.push_back(evaluate_claim(c, cl));
    return rep;
}

// ---- the shipped recipes ----

// {1,2,4,7,13} mod 15: more than half the units, yet the triple sumset
// misses class 14.
inline Construction shao_mod15() {
    Modulus m(15);
    Construction c{"shao-mod15", {}, ResidueSet(m, {1, 2, 4, 7, 13}), {}};
    c.claims.push_back(claim_cardinality_at_least(5, "size exceeds phi(15)/2"));
    c.claims.push_back(claim_missed_class(3, 14, "triple sumset misses 14"));
    return c;
}

// {1,7,13,17,19} mod 30: odd classes only; the double sumset misses the
// five even classes {10,12,16,22,28} and the triple sumset misses 29.
inline Construction shifted_mod30() {
    Modulus m(30);
    Construction c{"shifted-mod30", {}, ResidueSet(m, {1, 7, 13, 17, 19}), {}};
    c.claims.push_back(claim_missed_class(3, 29, "triple sumset misses 29"));
    c.claims.push_back(claim_missed_family(2, 30, {10, 12, 16, 22, 28},
                                           "double sumset misses B"));
    return c;
}

// m = 30p: the mod-30 set lifted to all compatible residue classes and
// restricted to units. Exactly one lift per class hits a multiple of p,
// so |A| = 5(p-1) = (5/8) phi(30p).
inline Construction problem66b_family(uint64_t p) {
    if (p < 2 || 30 % p == 0 || std::gcd(p, uint64_t{30}) != 1)
        throw std::invalid_argument("problem66b: p must be a prime coprime to 30");
    Modulus base(30), m(30 * p);
    Construction c{"problem66b", {{"p", p}},
                   lift(ResidueSet(base, {1, 7, 13, 17, 19}), m, true), {}};
    c.claims.push_back(claim_cardinality_at_least(5 * (p - 1),
                                                  "size reaches 5(p-1) = (5/8)phi(m)"));
    c.claims.push_back(claim_missed_family(3, 30, {29},
                                           "triple sumset avoids 29 mod 30"));
    return c;
}

// m = 12p with the base set {1,5,7} mod 12. |A| = 3(p-1) >= 2 phi(m)/3
// and the double sumset avoids every class congruent to 4 mod 12.
inline Construction problem66a_family(uint64_t p) {
    if (p < 2 || 12 % p == 0 || std::gcd(p, uint64_t{12}) != 1)
        throw std::invalid_argument("problem66a: p must be a prime coprime to 12");
    Modulus base(12), m(12 * p);
    Construction c{"problem66a", {{"p", p}},
                   lift(ResidueSet(base, {1, 5, 7}), m, true), {}};
    uint64_t phi = m.totient();
    c.claims.push_back(claim_cardinality_at_least((2 * phi + 2) / 3,
                                                  "size reaches 2 phi(m)/3"));
    c.claims.push_back(claim_missed_family(2, 12, {4},
                                           "double sumset avoids 4 mod 12"));
    return c;
}

// Doubling tower over m_k = 30 * 2^k: A_1 = A u (A+30) in Z_60 and
// A_{j+1} = A_j u (A_j + 30*2^j). |A_k| = 5 * 2^k > phi(m_k)/2 while the
// double sumset still misses every class reducing into B mod 30.
inline Construction doubling_family(uint64_t k) {
    if (k < 1) throw std::invalid_argument("doubling: depth must be >= 1");
    uint64_t mk = 30ull << k;
    if (mk > kDefaultModulusCap)
        throw std::invalid_argument("doubling: depth exceeds dense-set cap");
    std::vector<uint64_t> cur{1, 7, 13, 17, 19};
    for (uint64_t j = 0; j < k; ++j) {
        uint64_t step = 30ull << j;
        size_t n = cur.size();
        for (size_t i = 0; i < n; ++i) cur.push_back(cur[i] + step);
    }
    Construction c{"doubling", {{"k", k}}, ResidueSet(Modulus(mk), cur), {}};
    c.claims.push_back(claim_cardinality_at_least((5ull << k),
                                                  "size reaches 5*2^k"));
    c.claims.push_back(claim_cardinality_at_least((1ull << (k + 2)) + 1,
                                                  "size exceeds phi(m_k)/2"));
    c.claims.push_back(claim_missed_family(2, 30, {10, 12, 16, 22, 28},
                                           "double sumset misses all lifts of B"));
    return c;
}

// Name + params lookup used by the CLI.
inline Construction construction_by_name(const std::string& name,
                                         std::optional<uint64_t> p,
                                         std::optional<uint64_t> k) {
    if (name == "shao-mod15") return shao_mod15();
    if (name == "shifted-mod30") return shifted_mod30();
    if (name == "problem66b") {
        if (!p) throw std::invalid_argument("problem66b requires --p");
        return problem66b_family(*p);
    }
    if (name == "problem66a") {
        if (!p) throw std::invalid_argument("problem66a requires --p");
        return problem66a_family(*p);
    }
    if (name == "doubling") {
        if (!k) throw std::invalid_argument("doubling requires --k");
        return doubling_family(*k);
    }
    throw std::invalid_argument("unknown construction: " + name);
}

}  // namespace modsum
