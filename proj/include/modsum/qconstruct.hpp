#pragma once
// qconstruct.hpp
// Three-layer construction of a sparse prime set over a checkpoint
// schedule x_1 < x_2 < ... < x_K:
//
//   H: odd-index intervals (x_j, x_{j+1}] take every prime; even-index
//      intervals keep only primes in five of the eight unit classes
//      mod 15 ({1,2,4,7,13}).
//   W: each even interval loses the closed tail
//      [x_{j+1} - x_j - x_{j+1}/sqrt(log x_{j+1}), x_{j+1}].
//   Q: each even interval then loses every element that participates in
//      a two-element representation of x_{j+1} - p for any prime
//      x_1 < p <= x_j, whether or not p survives in any layer.
//
// Odd checkpoints x_3, x_5, ... are the targets: each is 29 mod 30, and
// after pruning no three elements of Q sum to one. verify_fact2 checks
// that exhaustively; fact1_series reports layer counts and densities.
//
// The representation scans are the hot path. A window of consecutive
// odd values is kept as one bit per odd number together with its
// mirror image; for a fixed even sum n, the pairs w + v = n inside the
// window are exactly the bits of fwd AND (rev shifted), so one 64-bit
// AND tests 64 candidate pairs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitset.hpp"
#include "primes.hpp"
#include "residue.hpp"

namespace modsum {

// The progression slice kept in even-index intervals.
inline ResidueSet even_interval_classes() {
    return ResidueSet(Modulus(15), {1, 2, 4, 7, 13});
}

// Least value strictly greater than `after` that is 29 mod 30.
inline uint64_t next_target_point(uint64_t after) {
    uint64_t c = after + 1;
    return c + (29 + 30 - c % 30) % 30;
}

// ---- schedule ----

struct ScheduleConfig {
    std::string rule = "geometric";  // "geometric" or "explicit"
    double ratio = 8.0;
    uint64_t x1 = 100;
    uint32_t checkpoints = 8;        // K
    std::vector<uint64_t> points;    // used by rule == "explicit"
    uint64_t max_x = 1ull << 31;     // sieve budget for the last checkpoint
};

struct Schedule {
    std::vector<uint64_t> x;  // x[0] holds x_1
    std::string rule;
    double ratio = 0;

    size_t size() const { return x.size(); }                 // K
    uint64_t point(size_t j) const { return x.at(j - 1); }   // 1-based
    size_t interval_count() const { return x.size() - 1; }   // interval j = (x_j, x_{j+1}]
    static bool even_interval(size_t j) { return j % 2 == 0; }

    // 1-based indices of target checkpoints: 3, 5, ..., <= K.
    std::vector<size_t> target_indices() const {
        std::vector<size_t> out;
        for (size_t t = 3; t <= x.size(); t += 2) out.push_back(t);
        return out;
    }
};

inline void validate_schedule(const std::vector<uint64_t>& x, uint64_t max_x) {
    if (x.size() < 4)
        throw std::invalid_argument("schedule needs at least 4 checkpoints");
    if (x[0] < 31)
        throw std::invalid_argument("x1 must be >= 31");
    for (size_t i = 1; i < x.size(); ++i)
        if (x[i] <= x[i - 1])
            throw std::invalid_argument("checkpoints must be strictly increasing at index " +
                                        std::to_string(i + 1));
    for (size_t t = 3; t <= x.size(); t += 2)
        if (x[t - 1] % 30 != 29)
            throw std::invalid_argument("target checkpoint x_" + std::to_string(t) +
                                        " must be 29 mod 30");
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] > max_x)
            throw std::invalid_argument("checkpoint x_" + std::to_string(i + 1) +
                                        " exceeds the sieve budget");
}

inline Schedule make_schedule(const ScheduleConfig& cfg) {
    Schedule s;
    s.rule = cfg.rule;
    s.ratio = cfg.ratio;
    if (cfg.rule == "geometric") {
        if (cfg.ratio <= 1.0)
            throw std::invalid_argument("geometric ratio must exceed 1");
        if (cfg.checkpoints < 4)
            throw std::invalid_argument("schedule needs at least 4 checkpoints");
        s.x.push_back(cfg.x1);
        for (uint32_t j = 2; j <= cfg.checkpoints; ++j) {
            double next = double(s.x.back()) * cfg.ratio;
            if (next > double(cfg.max_x) * 1.25)
                throw std::invalid_argument("checkpoint x_" + std::to_string(j) +
                                            " exceeds the sieve budget");
            uint64_t c = uint64_t(std::llround(next));
            if (j >= 3 && j % 2 == 1) c = next_target_point(c);
            s.x.push_back(c);
        }
    } else if (cfg.rule == "explicit") {
        s.x = cfg.points;
    } else {
        throw std::invalid_argument("unknown schedule rule: " + cfg.rule);
    }
    validate_schedule(s.x, cfg.max_x);
    return s;
}

// key = value lines; '#' starts a comment; unknown keys are rejected.
inline ScheduleConfig parse_schedule_config(std::istream& in) {
    ScheduleConfig cfg;
    std::string line;
    size_t lineno = 0;
    auto trim = [](std::string t) {
        size_t a = t.find_first_not_of(" \t\r");
        size_t b = t.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : t.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        try {
            if (key == "rule") cfg.rule = val;
            else if (key == "ratio") cfg.ratio = std::stod(val);
            else if (key == "x1") cfg.x1 = std::stoull(val);
            else if (key == "checkpoints") cfg.checkpoints = uint32_t(std::stoul(val));
            else if (key == "max_x") cfg.max_x = std::stoull(val);
            else if (key == "points") {
                cfg.points.clear();
                std::stringstream ss(val);
                std::string tok;
                while (std::getline(ss, tok, ','))
                    if (!trim(tok).empty()) cfg.points.push_back(std::stoull(trim(tok)));
            } else {
                throw std::invalid_argument("unknown config key: " + key);
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": bad value for " + key);
        }
    }
    return cfg;
}

inline ScheduleConfig load_schedule_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parse_schedule_config(in);
}

// ---- layers ----

struct IntervalStats {
    size_t index = 0;         // 1-based
    uint64_t lo = 0, hi = 0;  // (lo, hi]
    bool filtered = false;    // even interval
    double trim_left = 0;     // left end of the removed tail (even intervals)
    bool degenerate = false;  // trim consumed the whole interval
    uint64_t h_count = 0, w_count = 0, q_count = 0;
    uint64_t trimmed_count = 0, removed_count = 0;
};

struct RemovalRecord {
    uint64_t p = 0;  // prime in (x_1, x_{2k}]
    uint64_t w = 0;  // w <= v, w + v = target - p
    uint64_t v = 0;
};

struct EvenIntervalLedger {
    size_t interval_index = 0;  // the even j
    uint64_t target = 0;        // x_{j+1}
    uint64_t p_lo = 0, p_hi = 0;
    uint64_t reps_total = 0;          // sum over p of t_p
    std::vector<uint32_t> tp;         // t_p per prime p ascending
    std::vector<RemovalRecord> witnesses;  // covers every removed element
    uint64_t removed_count = 0;
    double removal_floor = 0;  // target / sqrt(log target)
    bool floor_ok = true;      // every removed element exceeds the floor
};

struct HLayer {
    Schedule schedule;
    std::shared_ptr<const PrimeTable> table;
    PrimeSubset H;
    std::vector<IntervalStats> intervals;
};

struct WLayer {
    Schedule schedule;
    std::shared_ptr<const PrimeTable> table;
    PrimeSubset H, W;
    std::vector<IntervalStats> intervals;
};

struct QLayers {
    Schedule schedule;
    std::shared_ptr<const PrimeTable> table;
    PrimeSubset H, W, Q;
    std::vector<IntervalStats> intervals;
    std::vector<EvenIntervalLedger> ledgers;
    bool pruned = true;
};

inline HLayer build_H(const Schedule& sched, std::shared_ptr<const PrimeTable> table) {
    if (table->limit() < sched.x.back())
        throw std::invalid_argument("prime table does not cover the schedule");
    HLayer out{sched, table, PrimeSubset(table), {}};
    const ResidueSet classes = even_interval_classes();
    for (size_t j = 1; j <= sched.interval_count(); ++j) {
        IntervalStats st;
        st.index = j;
        st.lo = sched.point(j);
        st.hi = sched.point(j + 1);
        st.filtered = Schedule::even_interval(j);
        if (!st.filtered) {
            // whole interval of primes: copy the table's bits
            uint64_t i0 = (std::max<uint64_t>(st.lo + 1, 3) - 2) / 2;
            uint64_t i1 = (st.hi - 3) / 2;
            if (i1 >= i0)
                or_block(out.H.odd_bits(), i0, table->odd_bits(), i0, i1 - i0 + 1);
        } else {
            table->for_each_prime(st.lo + 1, st.hi, [&](uint64_t p) {
                if (classes.contains(p % 15)) out.H.add(p);
            });
        }
        st.h_count = out.H.count_range(st.lo + 1, st.hi);
        out.intervals.push_back(st);
    }
    return out;
}

inline WLayer build_W(const HLayer& h) {
    WLayer out{h.schedule, h.table, h.H, h.H, h.intervals};
    for (auto& st : out.intervals) {
        if (!st.filtered) {
            st.w_count = st.h_count;
            continue;
        }
        const uint64_t target = st.hi;
        const double floor_term = double(target) / std::sqrt(std::log(double(target)));
        st.trim_left = double(target) - double(st.lo) - floor_term;
        st.degenerate = st.trim_left <= double(st.lo);
        uint64_t vmin = st.degenerate ? st.lo + 1 : uint64_t(std::ceil(st.trim_left));
        st.trimmed_count = out.W.count_range(vmin, st.hi);
        if (st.trimmed_count) {
            uint64_t i0 = (std::max<uint64_t>(vmin, 3) - 2) / 2;
            uint64_t i1 = (st.hi - 3) / 2;
            out.W.odd_bits().reset_range(i0, i1 + 1);
        }
        st.w_count = st.h_count - st.trimmed_count;
    }
    return out;
}

namespace detail {

// A run of odd values held as bits (slot i <-> base + 2i) plus the
// mirror image (rslot j <-> slot slots-1-j). For an even sum n the
// partner of slot i sits at rslot i + mirror_shift(n), so pair scans
// run as streaming word-ANDs of fwd against shifted rev.
struct MirrorWindow {
    uint64_t base = 0;  // smallest member (odd)
    uint64_t maxv = 0;  // largest member (odd)
    uint64_t slots = 0;
    Bitset fwd, rev;

    static std::optional<MirrorWindow> from_members(const std::vector<uint64_t>& ms) {
        if (ms.empty()) return std::nullopt;
        MirrorWindow w;
        w.base = ms.front();
        w.maxv = ms.back();
        w.slots = (w.maxv - w.base) / 2 + 1;
        w.fwd = Bitset(w.slots);
        w.rev = Bitset(w.slots + 64);  // zero pad keeps interior reads unguarded
        for (uint64_t m : ms) w.fwd.set((m - w.base) / 2);
        w.fwd.for_each([&](uint64_t i) { w.rev.set(w.slots - 1 - i); });
        return w;
    }

    bool test_value(uint64_t v) const {
        return v >= base && v <= maxv && (v - base) % 2 == 0 &&
               fwd.test((v - base) / 2);
    }

    int64_t mirror_shift(uint64_t n) const {
        return int64_t(slots) - 1 - (int64_t(n / 2) - int64_t(base));
    }

    // Unordered pairs w + v = n with both ends in the window, w <= v.
    // on_hit(word_index, mask) receives each nonzero hit word; the bits
    // of `mask` are w-slots. Returns the pair count.
    template <class FHit>
    uint32_t scan_pairs(uint64_t n, FHit&& on_hit) const {
        int64_t wlo = std::max<int64_t>(int64_t(base), int64_t(n) - int64_t(maxv));
        int64_t whi = std::min<int64_t>(int64_t(n / 2), int64_t(maxv));
        if (whi % 2 == 0) --whi;
        if (wlo % 2 == 0) ++wlo;
        if (wlo > whi) return 0;
        const uint64_t i0 = uint64_t(wlo - int64_t(base)) / 2;
        const uint64_t i1 = uint64_t(whi - int64_t(base)) / 2;
        const int64_t s = mirror_shift(n);
        // floored split of s into word offset and bit shift in [0, 64)
        const int64_t so = s >> 6;
        const uint64_t sh = uint64_t(s - (so << 6));
        const uint64_t* fw = fwd.words().data();
        const uint64_t* rw = rev.words().data();
        const uint64_t nrw = rev.word_count();
        const uint64_t w0 = i0 >> 6, w1 = i1 >> 6;
        uint32_t count = 0;
        // Edge words get range masks and bounds-checked mirror reads.
        auto edge = [&](uint64_t wi, uint64_t mask) {
            uint64_t a = fw[wi] & mask;
            if (!a) return;
            const uint64_t k = wi + uint64_t(so);  // wraps when below zero
            const uint64_t blo = k < nrw ? rw[k] : 0;
            const uint64_t bhi = k + 1 < nrw ? rw[k + 1] : 0;
            const uint64_t b = sh ? (blo >> sh) | (bhi << (64 - sh)) : blo;
            const uint64_t hit = a & b;
            if (!hit) return;
            count += uint32_t(std::popcount(hit));
            on_hit(wi, hit);
        };
        const uint64_t m0 = ~0ull << (i0 & 63);
        const uint64_t m1 = (i1 & 63) == 63 ? ~0ull : ((1ull << ((i1 & 63) + 1)) - 1);
        if (w0 == w1) {
            edge(w0, m0 & m1);
            return count;
        }
        edge(w0, m0);
        // Interior words cover only in-range slots, so their mirror
        // reads stay inside the padded rev array.
        if (sh) {
            for (uint64_t wi = w0 + 1; wi < w1; ++wi) {
                const uint64_t a = fw[wi];
                const uint64_t k = wi + uint64_t(so);
                const uint64_t b = (rw[k] >> sh) | (rw[k + 1] << (64 - sh));
                const uint64_t hit = a & b;
                if (!hit) continue;
                count += uint32_t(std::popcount(hit));
                on_hit(wi, hit);
            }
        } else {
            for (uint64_t wi = w0 + 1; wi < w1; ++wi) {
                const uint64_t hit = fw[wi] & rw[wi + uint64_t(so)];
                if (!hit) continue;
                count += uint32_t(std::popcount(hit));
                on_hit(wi, hit);
            }
        }
        edge(w1, m1);
        return count;
    }

    uint32_t count_pairs(uint64_t n) const {
        return scan_pairs(n, [](uint64_t, uint64_t) {});
    }
};

inline void or_chunk_signed(std::vector<uint64_t>& words, int64_t pos, uint64_t h) {
    if (pos < 0) {
        if (pos > -64) words[0] |= h >> uint64_t(-pos);
        return;
    }
    uint64_t wi = uint64_t(pos) >> 6, sh = uint64_t(pos) & 63;
    if (wi >= words.size()) return;
    words[wi] |= h << sh;
    if (sh && wi + 1 < words.size()) words[wi + 1] |= h >> (64 - sh);
}

}  // namespace detail

// Remove from each even interval every element participating in a
// two-element representation of target - p, for every prime p in
// (x_1, x_j]. Records exact t_p counts and one generating (p, w, v)
// witness per removed element; witnesses are found deterministically
// (largest surviving partner, hence smallest p) so rebuilds are
// bit-identical.
inline QLayers build_Q(const WLayer& wl, bool prune = true) {
    QLayers out{wl.schedule, wl.table, wl.H, wl.W, wl.W, wl.intervals, {}, prune};
    const Schedule& sched = out.schedule;
    const PrimeTable& table = *out.table;
    const uint64_t x1 = sched.point(1);

    for (auto& st : out.intervals) {
        if (!st.filtered) {
            st.q_count = st.w_count;
            continue;
        }
        EvenIntervalLedger led;
        led.interval_index = st.index;
        led.target = st.hi;
        led.p_lo = x1;
        led.p_hi = st.lo;
        led.removal_floor = double(led.target) / std::sqrt(std::log(double(led.target)));

        if (!prune) {
            st.q_count = st.w_count;
            continue;
        }
        auto win = detail::MirrorWindow::from_members(out.W.members_in(st.lo + 1, st.hi));
        if (!win) {
            st.q_count = st.w_count;
            out.ledgers.push_back(std::move(led));
            continue;
        }
        Bitset hit_w(win->slots), hit_r(win->slots);
        auto& aw = hit_w.words();
        auto& ar = hit_r.words();

        led.tp.reserve(size_t(table.count_leq(st.lo) - table.count_leq(x1)));
        table.for_each_prime(x1 + 1, st.lo, [&](uint64_t p) {
            const uint64_t n = led.target - p;  // even: target odd, p odd
            const int64_t s = win->mirror_shift(n);
            uint32_t t = win->scan_pairs(n, [&](uint64_t wi, uint64_t hit) {
                aw[wi] |= hit;
                detail::or_chunk_signed(ar, int64_t(wi << 6) + s, hit);
            });
            led.tp.push_back(t);
            led.reps_total += t;
        });

        // Fold the mirrored accumulator back and drop removed elements.
        hit_r.for_each([&](uint64_t j) { hit_w.set(win->slots - 1 - j); });
        if (win->slots & 63) aw.back() &= (1ull << (win->slots & 63)) - 1;

        std::vector<uint64_t> removed;
        hit_w.for_each([&](uint64_t i) { removed.push_back(win->base + 2 * i); });
        for (uint64_t r : removed) out.Q.remove(r);
        led.removed_count = removed.size();
        st.removed_count = removed.size();
        st.q_count = st.w_count - removed.size();
        for (uint64_t r : removed)
            if (double(r) <= led.removal_floor) led.floor_ok = false;

        // One generating witness per removed element: scan partners
        // descending, so the recorded prime is the smallest possible.
        Bitset covered(win->slots);
        for (uint64_t r : removed) {
            uint64_t ri = (r - win->base) / 2;
            if (covered.test(ri)) continue;
            int64_t s_hi = std::min<int64_t>(int64_t(win->maxv),
                                             int64_t(led.target - r) - int64_t(x1) - 1);
            int64_t s_lo = std::max<int64_t>(int64_t(win->base),
                                             int64_t(led.target - r) - int64_t(st.lo));
            if (s_hi % 2 == 0) --s_hi;
            bool found = false;
            for (int64_t sv = s_hi; sv >= s_lo; sv -= 2) {
                if (!win->fwd.test(uint64_t(sv - int64_t(win->base)) / 2)) continue;
                uint64_t p = led.target - r - uint64_t(sv);
                if (!table.is_prime(p)) continue;
                led.witnesses.push_back(
                    {p, std::min(r, uint64_t(sv)), std::max(r, uint64_t(sv))});
                covered.set(ri);
                covered.set(uint64_t(sv - int64_t(win->base)) / 2);
                found = true;
                break;
            }
            if (!found)
                throw std::logic_error("removed element without a generating pair");
        }
        out.ledgers.push_back(std::move(led));
    }
    return out;
}

inline QLayers build_pipeline(const Schedule& sched,
                              std::shared_ptr<const PrimeTable> table,
                              bool prune = true) {
    return build_Q(build_W(build_H(sched, std::move(table))), prune);
}

// ---- verification ----

struct StructureReport {
    bool nested = false;  // Q subset-of W subset-of H
    bool odd_intervals_identical = false;
    bool ledger_conserved = false;
    bool interval_counts_consistent = false;

    bool all_ok() const {
        return nested && odd_intervals_identical && ledger_conserved &&
               interval_counts_consistent;
    }
};

inline StructureReport verify_structure(const QLayers& L) {
    StructureReport rep;
    rep.nested = L.Q.is_subset_of(L.W) && L.W.is_subset_of(L.H);

    rep.odd_intervals_identical = true;
    rep.interval_counts_consistent = true;
    for (const auto& st : L.intervals) {
        uint64_t h = L.H.count_range(st.lo + 1, st.hi);
        uint64_t w = L.W.count_range(st.lo + 1, st.hi);
        uint64_t q = L.Q.count_range(st.lo + 1, st.hi);
        if (h != st.h_count || w != st.w_count || q != st.q_count)
            rep.interval_counts_consistent = false;
        // with nesting verified, equal counts pin equal sets on the interval
        if (!st.filtered && !(h == w && w == q)) rep.odd_intervals_identical = false;
    }

    rep.ledger_conserved = true;
    for (const auto& led : L.ledgers) {
        const auto& st = L.intervals[led.interval_index - 1];
        uint64_t vbase = (st.lo + 1) | 1;
        Bitset seen((st.hi - vbase) / 2 + 2);
        for (const auto& rec : led.witnesses) {
            for (uint64_t e : {rec.w, rec.v}) {
                if (e < vbase || e > st.hi || e % 2 == 0 || !L.W.contains(e) ||
                    L.Q.contains(e)) {
                    rep.ledger_conserved = false;
                    continue;
                }
                seen.set((e - vbase) / 2);
            }
            if (rec.w + rec.v + rec.p != led.target || !L.table->is_prime(rec.p) ||
                rec.p <= led.p_lo || rec.p > led.p_hi)
                rep.ledger_conserved = false;
        }
        if (seen.count() != led.removed_count ||
            led.removed_count != st.w_count - st.q_count ||
            uint64_t(led.witnesses.size()) > led.reps_total)
            rep.ledger_conserved = false;
    }
    return rep;
}

struct CompletenessReport {
    bool complete = true;
    // Primes p whose difference target - p still has a representation.
    // A lower bound when `truncated` is set.
    uint64_t residual_prime_count = 0;
    std::vector<RemovalRecord> residual_sample;  // capped at max_report
    bool used_fallback = false;  // a pair-floor premise failed somewhere
    bool truncated = false;      // stopped early after finding residuals
};

// Confirms, for every even interval and every prime p in (x_1, x_j],
// that target - p has no two-element representation inside the
// surviving layer. Independent of the build path.
//
// Pairs containing a member at or below the removal floor cannot reach
// target - x_j (their maximum sum is checked numerically per interval),
// so only members above the floor can pair. Their pairwise sums are
// accumulated as one shifted-OR bit convolution and intersected with
// the difference set {target - p}; if the numeric premise ever fails
// the interval falls back to a per-prime mirror scan. On layers with
// residuals the convolution bails out at the first nonempty
// intersection, so deliberately unpruned builds fail fast.
inline CompletenessReport verify_pruning_completeness(const QLayers& L,
                                                      size_t max_report = 16) {
    CompletenessReport rep;
    const uint64_t x1 = L.schedule.point(1);
    for (const auto& st : L.intervals) {
        if (!st.filtered) continue;
        std::vector<uint64_t> members = L.Q.members_in(st.lo + 1, st.hi);
        if (members.empty()) continue;
        const uint64_t target = st.hi;
        const uint64_t bound = target - st.lo;  // least possible target - p
        const double floor_term = double(target) / std::sqrt(std::log(double(target)));

        size_t first_high = 0;
        while (first_high < members.size() && double(members[first_high]) <= floor_term)
            ++first_high;
        const bool has_low = first_high > 0;
        const bool has_high = first_high < members.size();
        const uint64_t max_low = has_low ? members[first_high - 1] : 0;
        const uint64_t max_high = members.back();
        const bool low_pairs_excluded =
            !has_low ||
            (2 * max_low < bound && (!has_high || max_low + max_high < bound));

        // n = target - p is even; pack the difference window by evens.
        if (target < x1 + 2) continue;
        const uint64_t dbase = bound + (bound & 1);
        const uint64_t nmax_raw = target - x1 - 1;
        if (nmax_raw < dbase) continue;
        const uint64_t dslots = (nmax_raw - dbase) / 2 + 1;
        const uint64_t nmax = dbase + 2 * (dslots - 1);
        Bitset dset(dslots);
        L.table->for_each_prime(x1 + 1, st.lo, [&](uint64_t p) {
            dset.set((target - p - dbase) / 2);
        });
        if (dset.none()) continue;

        std::vector<uint64_t> hit_ns;
        auto collect_hits = [&](const Bitset& sums) {
            for (size_t wi = 0; wi < sums.word_count(); ++wi) {
                uint64_t h = sums.words()[wi] & dset.words()[wi];
                while (h) {
                    hit_ns.push_back(dbase + 2 * ((wi << 6) + std::countr_zero(h)));
                    h &= h - 1;
                }
            }
        };

        if (low_pairs_excluded) {
            if (!has_high) continue;  // no pair can reach the difference set
            const uint64_t sbase = members[first_high];
            const uint64_t sslots = (max_high - sbase) / 2 + 1;
            Bitset spack(sslots);
            for (size_t i = first_high; i < members.size(); ++i)
                spack.set((members[i] - sbase) / 2);
            Bitset sums(dslots);
            size_t since_check = 0;
            bool bailed = false;
            for (size_t i = first_high; i < members.size() && !bailed; ++i) {
                const uint64_t v = members[i];
                if (v + sbase > nmax) break;  // ascending v: nothing more fits
                uint64_t wlo = dbase > v ? std::max(sbase, dbase - v) : sbase;
                uint64_t whi = std::min(max_high, nmax - v);
                if (wlo > whi) continue;
                or_block(sums, (wlo + v - dbase) / 2, spack, (wlo - sbase) / 2,
                         (whi - wlo) / 2 + 1);
                if (++since_check == 4096) {
                    since_check = 0;
                    if (sums.intersects(dset)) bailed = true;
                }
            }
            collect_hits(sums);
            if (bailed) rep.truncated = true;
        } else {
            rep.used_fallback = true;
            auto win = detail::MirrorWindow::from_members(members);
            L.table->for_each_prime(x1 + 1, st.lo, [&](uint64_t p) {
                if (win->count_pairs(target - p)) hit_ns.push_back(target - p);
            });
        }

        if (hit_ns.empty()) continue;
        rep.complete = false;
        rep.residual_prime_count += hit_ns.size();
        if (rep.residual_sample.size() < max_report) {
            auto win = detail::MirrorWindow::from_members(members);
            for (uint64_t n : hit_ns) {
                if (rep.residual_sample.size() >= max_report) break;
                win->scan_pairs(n, [&](uint64_t wi, uint64_t hit) {
                    while (hit && rep.residual_sample.size() < max_report) {
                        uint64_t w = win->base + 2 * ((wi << 6) + std::countr_zero(hit));
                        rep.residual_sample.push_back({target - n, w, n - w});
                        hit &= hit - 1;
                    }
                });
            }
        }
        if (rep.truncated) break;
    }
    return rep;
}

struct Fact2CaseTally {
    // Candidate pairs (q1 <= q2, q3 = x - q1 - q2 >= q2) by position
    // relative to the even checkpoint x_{2k} =: mid.
    uint64_t all_inside = 0;   // q1, q2, q3 all above mid
    uint64_t one_outside = 0;  // q1 <= mid < q2
    uint64_t two_outside = 0;  // q1, q2 <= mid < q3
    uint64_t all_outside = 0;  // q3 <= mid
};

struct Fact2Target {
    size_t checkpoint_index = 0;  // odd 1-based index
    uint64_t x = 0;
    bool representable = false;
    std::array<uint64_t, 3> witness{};
    Fact2CaseTally tally;
    bool premise_classes_ok = false;       // mid-zone members all in the slice classes
    bool premise_target_class_ok = false;  // x = 14 mod 15
    bool premise_triple_miss_ok = false;   // 14 outside the triple class sumset
    bool gap_empty = false;                // Q empty on [x - 2 mid, x)
    bool one_outside_discharged = false;   // covered by the completeness scan
    uint64_t probes = 0;
};

struct Fact2Report {
    std::string mode;
    std::vector<Fact2Target> targets;

    bool all_unrepresentable() const {
        for (const auto& t : targets)
            if (t.representable) return false;
        return true;
    }
};

namespace detail {

// members of sorted `v` in [lo, hi]
inline uint64_t sorted_count(const std::vector<uint64_t>& v, uint64_t lo, uint64_t hi) {
    if (lo > hi) return 0;
    return uint64_t(std::upper_bound(v.begin(), v.end(), hi) -
                    std::lower_bound(v.begin(), v.end(), lo));
}

}  // namespace detail

// Exhaustive check that no q1 <= q2 <= q3 in Q sums to a target x.
//
// "regions" splits candidate pairs by position against mid = x_{2k}:
//   - all inside (mid, x): discharged by a verified class obstruction
//     (every member of the zone lies in the five slice classes mod 15,
//     whose triple sums avoid x mod 15);
//   - q1 <= mid < q2 <= q3: a pair (q2, q3) would be a residual
//     representation of x - q1 over the even layer, so a clean
//     completeness scan (whose prime range covers every possible q1)
//     rules the region out; without one the region is enumerated;
//   - q1, q2 <= mid: then q3 >= x - 2 mid, and Q is verified empty on
//     [x - 2 mid, x); if it is not, the region is enumerated.
// Premises are checked against the actual layer content, and every
// fallback is a direct enumeration, so the verdict is exhaustive for
// arbitrary layers.
//
// "direct" enumerates every candidate pair; quadratic in the member
// count below x, meant for small schedules and for cross-checking the
// region split.
inline Fact2Report verify_fact2(const QLayers& L, const std::string& mode = "regions",
                                const CompletenessReport* completeness = nullptr) {
    if (mode != "regions" && mode != "direct")
        throw std::invalid_argument("fact2 mode must be 'regions' or 'direct'");
    Fact2Report rep;
    rep.mode = mode;
    const ResidueSet classes = even_interval_classes();
    // targets are 29 mod 30, hence 14 mod 15
    const bool triple_miss = !iterated_sumset(classes, 3).contains(14);

    for (size_t t : L.schedule.target_indices()) {
        Fact2Target ft;
        ft.checkpoint_index = t;
        ft.x = L.schedule.point(t);
        const uint64_t x = ft.x;
        const uint64_t mid = L.schedule.point(t - 1);
        const uint64_t x1 = L.schedule.point(1);

        std::vector<uint64_t> qlow = L.Q.members_in(x1 + 1, mid);
        std::vector<uint64_t> qmid = L.Q.members_in(mid + 1, x - 1);
        const uint64_t maxmid = qmid.empty() ? 0 : qmid.back();

        ft.premise_target_class_ok = x % 15 == 14;
        ft.premise_triple_miss_ok = triple_miss;
        ft.premise_classes_ok = true;
        for (uint64_t q : qmid)
            if (!classes.contains(q % 15)) { ft.premise_classes_ok = false; break; }
        const uint64_t gap_lo = x > 2 * mid ? x - 2 * mid : 1;
        ft.gap_empty = L.Q.count_range(gap_lo, x - 1) == 0;
        ft.one_outside_discharged = completeness && completeness->complete;

        // candidate-pair tallies
        for (uint64_t q1 : qmid)
            ft.tally.all_inside += detail::sorted_count(qmid, q1, (x - q1) / 2);
        for (uint64_t q1 : qlow)
            ft.tally.one_outside += detail::sorted_count(qmid, mid + 1, (x - q1) / 2);
        // pairs inside qlow with q3 >= q2, split on q3 vs mid
        for (size_t i = 0; i < qlow.size(); ++i) {
            uint64_t q1 = qlow[i];
            if (3 * q1 > x) break;
            auto first = qlow.begin() + long(i);
            auto endj = std::upper_bound(first, qlow.end(), (x - q1) / 2);
            uint64_t pairs = uint64_t(endj - first);
            // q3 <= mid means q2 >= x - mid - q1
            uint64_t thresh = x > mid + q1 ? x - mid - q1 : 0;
            uint64_t outside = uint64_t(endj - std::lower_bound(first, endj, thresh));
            ft.tally.all_outside += outside;
            ft.tally.two_outside += pairs - outside;
        }

        auto probe_witness = [&](uint64_t q1, uint64_t q2) -> bool {
            ++ft.probes;
            uint64_t q3 = x - q1 - q2;
            if (q3 > L.Q.limit() || !L.Q.contains(q3)) return false;
            ft.representable = true;
            ft.witness = {q1, q2, q3};
            return true;
        };

        bool done = false;
        const bool class_obstruction = ft.premise_classes_ok &&
                                       ft.premise_target_class_ok &&
                                       ft.premise_triple_miss_ok;
        if (mode == "direct") {
            std::vector<uint64_t> all = L.Q.members_in(x1 + 1, x - 1);
            for (size_t i = 0; i < all.size() && !done; ++i) {
                uint64_t q1 = all[i];
                if (3 * q1 > x) break;
                for (size_t j = i; j < all.size(); ++j) {
                    uint64_t q2 = all[j];
                    if (q1 + 2 * q2 > x) break;
                    if (probe_witness(q1, q2)) { done = true; break; }
                }
            }
        } else {
            // all-inside region
            if (!class_obstruction && !qmid.empty()) {
                uint64_t q1min = x > 2 * maxmid ? x - 2 * maxmid : 0;
                auto it = std::lower_bound(qmid.begin(), qmid.end(), q1min);
                for (; it != qmid.end() && !done; ++it) {
                    uint64_t q1 = *it;
                    if (3 * q1 > x) break;
                    uint64_t lo2 = x > q1 + maxmid ? x - q1 - maxmid : 0;
                    auto jt = std::lower_bound(qmid.begin(), qmid.end(),
                                               std::max(q1, lo2));
                    for (; jt != qmid.end() && q1 + 2 * *jt <= x; ++jt)
                        if (probe_witness(q1, *jt)) { done = true; break; }
                }
            }
            // one-outside region
            if (!done && !ft.one_outside_discharged && !qmid.empty()) {
                for (uint64_t q1 : qlow) {
                    uint64_t lo2 = x > q1 + maxmid ? x - q1 - maxmid : 0;
                    auto jt = std::lower_bound(qmid.begin(), qmid.end(), lo2);
                    for (; jt != qmid.end() && q1 + 2 * *jt <= x; ++jt)
                        if (probe_witness(q1, *jt)) { done = true; break; }
                    if (done) break;
                }
            }
            // two/all-outside region
            if (!done && !ft.gap_empty) {
                uint64_t maxgap = L.Q.max_leq(x - 1).value_or(0);
                for (size_t i = 0; i < qlow.size() && !done; ++i) {
                    uint64_t q1 = qlow[i];
                    if (3 * q1 > x) break;
                    uint64_t lo2 = x > q1 + maxgap ? x - q1 - maxgap : 0;
                    auto jt = std::lower_bound(qlow.begin(), qlow.end(),
                                               std::max(q1, lo2));
                    for (; jt != qlow.end() && q1 + 2 * *jt <= x; ++jt)
                        if (probe_witness(q1, *jt)) { done = true; break; }
                }
            }
        }
        rep.targets.push_back(std::move(ft));
    }
    return rep;
}

// ---- density reporting ----

struct LayerDensityRow {
    uint64_t x = 0;
    uint64_t h = 0, w = 0, q = 0;
    double hv = 0, wv = 0, qv = 0;  // (log x / x) * count
};

struct IntervalDensityRow {
    size_t index = 0;
    uint64_t h = 0, w = 0, q = 0;
    double wh_ratio = 1;          // |W_j| / |H_j|
    double removed_fraction = 0;  // |W_j \ Q_j| / |W_j|
};

struct DensityComparison {
    std::vector<LayerDensityRow> checkpoints;
    std::vector<IntervalDensityRow> intervals;
    double max_qw_gap = 0;  // max over checkpoints of |Q(x)-W(x)|/W(x)
    bool floors_ok = true;
};

inline DensityComparison fact1_series(const QLayers& L) {
    DensityComparison out;
    for (uint64_t x : L.schedule.x) {
        LayerDensityRow row;
        row.x = x;
        row.h = L.H.count_leq(x);
        row.w = L.W.count_leq(x);
        row.q = L.Q.count_leq(x);
        double f = std::log(double(x)) / double(x);
        row.hv = f * double(row.h);
        row.wv = f * double(row.w);
        row.qv = f * double(row.q);
        if (row.w)
            out.max_qw_gap =
                std::max(out.max_qw_gap, double(row.w - row.q) / double(row.w));
        out.checkpoints.push_back(row);
    }
    for (const auto& st : L.intervals) {
        IntervalDensityRow row;
        row.index = st.index;
        row.h = st.h_count;
        row.w = st.w_count;
        row.q = st.q_count;
        row.wh_ratio = st.h_count ? double(st.w_count) / double(st.h_count) : 1.0;
        row.removed_fraction =
            st.w_count ? double(st.w_count - st.q_count) / double(st.w_count) : 0.0;
        out.intervals.push_back(row);
    }
    for (const auto& led : L.ledgers)
        if (!led.floor_ok) out.floors_ok = false;
    return out;
}

// ---- exports ----

inline void write_checkpoint_csv(std::ostream& os, const DensityComparison& dc) {
    os << "index,x,h_count,w_count,q_count,h_value,w_value,q_value\n";
    char buf[3][64];
    for (size_t i = 0; i < dc.checkpoints.size(); ++i) {
        const auto& r = dc.checkpoints[i];
        std::snprintf(buf[0], 64, "%.10g", r.hv);
        std::snprintf(buf[1], 64, "%.10g", r.wv);
        std::snprintf(buf[2], 64, "%.10g", r.qv);
        os << (i + 1) << ',' << r.x << ',' << r.h << ',' << r.w << ',' << r.q << ','
           << buf[0] << ',' << buf[1] << ',' << buf[2] << '\n';
    }
}

inline void write_ledger_csv(std::ostream& os, const QLayers& L) {
    os << "interval,p,w,v\n";
    for (const auto& led : L.ledgers)
        for (const auto& rec : led.witnesses)
            os << led.interval_index << ',' << rec.p << ',' << rec.w << ',' << rec.v
               << '\n';
}

}  // namespace modsum
