#pragma once
// oracles.hpp
// Test-only reference implementations. Everything here is deliberately
// naive and independent of the bit-parallel library paths it checks.

#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

namespace oracle {

inline std::vector<uint64_t> units_by_gcd(uint64_t m) {
    std::vector<uint64_t> out;
    for (uint64_t a = 0; a < m; ++a)
        if (std::gcd(a, m) == 1) out.push_back(a);
    return out;
}

inline uint64_t phi_by_gcd(uint64_t m) { return units_by_gcd(m).size(); }

inline std::set<uint64_t> sumset_loop(const std::vector<uint64_t>& a,
                                      const std::vector<uint64_t>& b, uint64_t m) {
    std::set<uint64_t> out;
    for (uint64_t x : a)
        for (uint64_t y : b) out.insert((x + y) % m);
    return out;
}

inline std::set<uint64_t> iterated_sumset_loop(const std::vector<uint64_t>& a,
                                               uint64_t m, int fold) {
    std::vector<uint64_t> acc = a;
    for (int i = 1; i < fold; ++i) {
        auto s = sumset_loop(acc, a, m);
        acc.assign(s.begin(), s.end());
    }
    return {acc.begin(), acc.end()};
}

inline bool is_prime_trial(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Plain monolithic sieve, independent of the segmented implementation.
inline std::vector<uint64_t> primes_simple_sieve(uint64_t limit) {
    std::vector<char> comp(limit + 1, 0);
    std::vector<uint64_t> out;
    for (uint64_t i = 2; i <= limit; ++i) {
        if (comp[i]) continue;
        out.push_back(i);
        for (uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
    }
    return out;
}

// Unordered prime pairs w <= v with w + v = n, via trial division only.
inline std::vector<std::pair<uint64_t, uint64_t>> two_prime_reps_trial(uint64_t n) {
    std::vector<std::pair<uint64_t, uint64_t>> out;
    for (uint64_t w = 2; w <= n / 2; ++w)
        if (is_prime_trial(w) && is_prime_trial(n - w)) out.push_back({w, n - w});
    return out;
}

// Cubic scan over ordered triples q1 <= q2 <= q3 from a prime list.
inline std::optional<std::array<uint64_t, 3>> three_prime_witness_cubic(
    uint64_t n, const std::vector<uint64_t>& primes) {
    for (uint64_t q1 : primes) {
        if (3 * q1 > n) break;
        for (uint64_t q2 : primes) {
            if (q2 < q1) continue;
            if (q1 + 2 * q2 > n) break;
            for (uint64_t q3 : primes) {
                if (q3 < q2) continue;
                if (q1 + q2 + q3 > n) break;
                if (q1 + q2 + q3 == n) return {{q1, q2, q3}};
            }
        }
    }
    return std::nullopt;
}

}  // namespace oracle
