#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>

#include "modsum/primes.hpp"
#include "modsum/qconstruct.hpp"
#include "oracles.hpp"

using namespace modsum;

namespace {

std::shared_ptr<const PrimeTable> table_1e6() {
    static auto t = std::make_shared<const PrimeTable>(1'000'000);
    return t;
}

}  // namespace

TEST_CASE("sieve matches trial division up to 1e5") {
    auto t = table_1e6();
    for (uint64_t n = 0; n <= 100'000; ++n)
        if (t->is_prime(n) != oracle::is_prime_trial(n)) {
            CAPTURE(n);
            FAIL("sieve disagrees with trial division");
        }
    SUCCEED();
}

TEST_CASE("sieve counts at the classic checkpoints") {
    auto t = table_1e6();
    CHECK(t->count() == 78498);
    CHECK(t->count_leq(10'000) == 1229);
    CHECK(t->count_leq(100'000) == 9592);
    CHECK(t->count_leq(10) == 4);
    CHECK(t->count_leq(2) == 1);
    CHECK(t->count_leq(1) == 0);
    CHECK(PrimeTable(10).primes_upto(10) == std::vector<uint64_t>{2, 3, 5, 7});
    CHECK(PrimeTable(30).primes_upto(30) ==
          std::vector<uint64_t>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
}

TEST_CASE("segmented sieve agrees with an independent simple sieve") {
    auto simple = oracle::primes_simple_sieve(300'000);
    PrimeTable seg(300'000);
    CHECK(seg.count() == simple.size());
    CHECK(seg.primes_upto(300'000) == simple);
}

TEST_CASE("sieve rejects limits beyond the memory budget") {
    CHECK_THROWS_AS(PrimeTable(1ull << 40, 1ull << 20), std::invalid_argument);
    try {
        PrimeTable(1ull << 40, 1ull << 20);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("MiB") != std::string::npos);
    }
}

TEST_CASE("prime table cache round-trips") {
    PrimeTable t(50'000);
    std::string path = "primes_cache_test.mspt";
    REQUIRE(t.save(path));
    auto loaded = PrimeTable::load(path, 50'000);
    REQUIRE(loaded.has_value());
    CHECK(loaded->count() == t.count());
    CHECK(loaded->primes_upto(50'000) == t.primes_upto(50'000));
    CHECK_FALSE(PrimeTable::load(path, 60'000).has_value());  // wrong limit
    // corrupt one byte and the checksum rejects it
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(40);
        char c = 0x7f;
        f.write(&c, 1);
    }
    CHECK_FALSE(PrimeTable::load(path, 50'000).has_value());
    std::remove(path.c_str());
}

TEST_CASE("progression filter") {
    auto t = std::make_shared<const PrimeTable>(100);
    auto sub = progression_filter(t, even_interval_classes());
    CHECK(sub.members_in(2, 100) ==
          std::vector<uint64_t>{2, 7, 13, 17, 19, 31, 37, 43, 47, 61, 67, 73, 79, 97});

    auto odd1 = progression_filter(std::make_shared<const PrimeTable>(20),
                                   ResidueSet(Modulus(2), {1}));
    CHECK(odd1.members_in(2, 20) ==
          std::vector<uint64_t>{3, 5, 7, 11, 13, 17, 19});

    auto none = progression_filter(t, ResidueSet(Modulus(15)));
    CHECK(none.count() == 0);
}

TEST_CASE("prime subset membership, counts and bounds") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    CHECK(full.contains(2));
    CHECK(full.contains(999983));
    CHECK_FALSE(full.contains(999984));
    CHECK(full.count() == 78498);
    CHECK(full.count_range(3, 10) == 3);
    CHECK(full.max_leq(10).value() == 7);
    CHECK(full.min_geq(8).value() == 11);
    CHECK(full.min_geq(999984) == std::nullopt);

    PrimeSubset s(t);
    s.add(2);
    s.add(5);
    CHECK(s.count() == 2);
    CHECK(s.max_leq(4).value() == 2);
    s.remove(2);
    CHECK(s.count() == 1);
    CHECK(s.is_subset_of(full));
}

TEST_CASE("density series") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    auto series = density_series(full, {100, 1000, 100'000, 1'000'000});
    CHECK(series.back().count == 78498);
    CHECK(series.back().value == Catch::Approx(1.0844899).epsilon(1e-4));
    // prime number theorem at desk scale: within 10% of 1 beyond 1e5
    for (const auto& d : series)
        if (d.x >= 100'000) CHECK(std::abs(d.value - 1.0) < 0.10);

    PrimeSubset empty(t);
    for (const auto& d : density_series(empty, {10, 100}))
        CHECK(d.value == 0.0);

    CHECK_THROWS_AS(density_series(full, {2'000'000}), std::invalid_argument);
}

TEST_CASE("five-class density approaches 5/8 of the primes") {
    auto t = table_1e6();
    auto sub = progression_filter(t, even_interval_classes());
    auto series = density_series(sub, {1'000'000});
    double ratio = double(series[0].count) / double(t->count());
    CHECK(std::abs(ratio - 0.625) < 0.0125);
}

TEST_CASE("two prime reps on small targets") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    auto r10 = two_prime_reps(10, full);
    REQUIRE(r10.size() == 2);
    CHECK(r10[0].w == 3);
    CHECK(r10[0].v == 7);
    CHECK(r10[1].w == 5);
    CHECK(r10[1].v == 5);
    CHECK(two_prime_reps(4, full).size() == 1);
    CHECK(two_prime_reps(11, full).empty());
    CHECK(two_prime_reps(3, full).empty());
}

TEST_CASE("two prime reps match the trial-division oracle up to 1e4") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    for (uint64_t n = 4; n <= 10'000; ++n) {
        auto got = two_prime_reps(n, full);
        auto expect = oracle::two_prime_reps_trial(n);
        REQUIRE(got.size() == expect.size());
        for (size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].w == expect[i].first);
            CHECK(got[i].v == expect[i].second);
            CHECK(got[i].w + got[i].v == n);
        }
    }
}

TEST_CASE("odd targets have at most one representation") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    std::mt19937_64 rng(0x0DD5);
    for (int i = 0; i < 200; ++i) {
        uint64_t n = 5 + 2 * (rng() % 400'000);
        auto reps = two_prime_reps(n, full);
        CHECK(reps.size() <= 1);
        if (!reps.empty()) CHECK(reps[0].w == 2);
    }
}

TEST_CASE("three prime witness") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    auto w9 = three_prime_witness(9, full);
    REQUIRE(w9.has_value());
    CHECK(*w9 == std::array<uint64_t, 3>{2, 2, 5});
    auto w7 = three_prime_witness(7, full);
    REQUIRE(w7.has_value());
    CHECK(*w7 == std::array<uint64_t, 3>{2, 2, 3});

    // restricted to the shifted mod-30 classes, 29 mod 30 is unreachable
    auto sub = progression_filter(t, ResidueSet(Modulus(30), {1, 7, 13, 17, 19}));
    for (uint64_t n = 29; n <= 1'000'000; n += 30 * 997)
        CHECK_FALSE(three_prime_witness(n, sub).has_value());
}

TEST_CASE("three prime witness absence agrees with a cubic brute force") {
    auto t = std::make_shared<const PrimeTable>(500);
    auto primes = t->primes_upto(500);
    auto full = PrimeSubset::full(t);
    std::mt19937_64 rng(0x3AB3);
    for (int i = 0; i < 150; ++i) {
        uint64_t n = 6 + rng() % 495;
        auto fast = three_prime_witness(n, full);
        auto slow = oracle::three_prime_witness_cubic(n, primes);
        CHECK(fast.has_value() == slow.has_value());
        if (fast && slow) CHECK(*fast == *slow);
    }
}

TEST_CASE("rep count profile") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    auto prof = rep_count_profile({4, 10, 11, 1 << 20}, full);
    CHECK(prof[0].t == 1);
    CHECK(prof[1].t == 2);
    CHECK(prof[2].t == 0);
    CHECK(prof[3].t == 3747);  // frozen from the trial-division oracle
    CHECK(prof[3].ratio > 0);
    CHECK(prof[3].ratio < 1);
}

TEST_CASE("rep profile ratios stay within two orders of magnitude") {
    auto t = table_1e6();
    auto full = PrimeSubset::full(t);
    std::mt19937_64 rng(1);
    std::vector<uint64_t> targets{10'000, 1'000'000};
    for (int i = 0; i < 30; ++i)
        targets.push_back((10'000 + rng() % 990'000) / 2 * 2);
    auto prof = rep_count_profile(targets, full);
    double lo = prof[0].ratio, hi = prof[0].ratio;
    for (const auto& e : prof) {
        lo = std::min(lo, e.ratio);
        hi = std::max(hi, e.ratio);
    }
    CHECK(lo > 0);
    CHECK(hi / lo < 100.0);
}
