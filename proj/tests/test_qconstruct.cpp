#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "modsum/qconstruct.hpp"
#include "oracles.hpp"

using namespace modsum;

namespace {

std::shared_ptr<const PrimeTable> table_for(const Schedule& s) {
    return std::make_shared<const PrimeTable>(s.x.back());
}

Schedule small_schedule() {  // targets 6419 and 410819
    ScheduleConfig cfg;
    cfg.checkpoints = 5;
    return make_schedule(cfg);
}

}  // namespace

TEST_CASE("next target point") {
    CHECK(next_target_point(6400) == 6419);
    CHECK(next_target_point(29) == 59);
    CHECK(next_target_point(28) == 29);
    CHECK(next_target_point(410816) == 410819);
}

TEST_CASE("geometric schedule") {
    ScheduleConfig cfg;
    cfg.checkpoints = 5;
    Schedule s = make_schedule(cfg);
    CHECK(s.x == std::vector<uint64_t>{100, 800, 6419, 51352, 410819});
    CHECK(s.target_indices() == std::vector<size_t>{3, 5});
    for (size_t t : s.target_indices()) {
        CHECK(s.point(t) % 30 == 29);
        CHECK(s.point(t) % 2 == 1);
    }
}

TEST_CASE("schedule validation") {
    ScheduleConfig cfg;
    cfg.checkpoints = 3;
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);

    cfg = {};
    cfg.ratio = 1.0;
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);

    cfg = {};
    cfg.x1 = 10;  // below the floor
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);

    cfg = {};
    cfg.max_x = 100'000;  // budget overflow reports the offending index
    try {
        make_schedule(cfg);
        FAIL("expected budget rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("budget") != std::string::npos);
    }

    cfg = {};
    cfg.rule = "explicit";
    cfg.points = {100, 800, 1229, 2000};
    CHECK_NOTHROW(make_schedule(cfg));
    cfg.points = {100, 800, 1230, 2000};  // target not 29 mod 30
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);
    cfg.points = {100, 90, 1229, 2000};  // not increasing
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);
    cfg.rule = "unknown";
    CHECK_THROWS_AS(make_schedule(cfg), std::invalid_argument);
}

TEST_CASE("config parsing") {
    std::istringstream in(
        "# comment\n"
        "rule = geometric\n"
        "ratio = 4\n"
        "x1 = 200   # trailing comment\n"
        "checkpoints = 6\n");
    ScheduleConfig cfg = parse_schedule_config(in);
    CHECK(cfg.rule == "geometric");
    CHECK(cfg.ratio == 4.0);
    CHECK(cfg.x1 == 200);
    CHECK(cfg.checkpoints == 6);

    std::istringstream pts("rule = explicit\npoints = 100, 800, 1229, 2000\n");
    CHECK(parse_schedule_config(pts).points ==
          std::vector<uint64_t>{100, 800, 1229, 2000});

    std::istringstream bad1("nonsense_key = 3\n");
    CHECK_THROWS_AS(parse_schedule_config(bad1), std::invalid_argument);
    std::istringstream bad2("ratio eight\n");
    CHECK_THROWS_AS(parse_schedule_config(bad2), std::invalid_argument);
    std::istringstream bad3("ratio = eight\n");
    CHECK_THROWS_AS(parse_schedule_config(bad3), std::invalid_argument);
    CHECK_THROWS_AS(load_schedule_config("no_such_file.cfg"), std::invalid_argument);
}

TEST_CASE("H layer takes whole odd intervals and filtered even intervals") {
    ScheduleConfig cfg;
    cfg.rule = "explicit";
    cfg.points = {100, 800, 1229, 2000};
    Schedule s = make_schedule(cfg);
    auto table = table_for(s);
    HLayer h = build_H(s, table);

    CHECK(h.H.count_range(101, 800) == table->count_leq(800) - table->count_leq(100));
    // even interval keeps exactly the five classes mod 15
    auto classes = even_interval_classes();
    uint64_t expect = 0;
    table->for_each_prime(801, 1229, [&](uint64_t p) {
        bool in = classes.contains(p % 15);
        expect += in;
        CHECK(h.H.contains(p) == in);
    });
    CHECK(h.intervals[1].h_count == expect);
    CHECK_THROWS_AS(build_H(s, std::make_shared<const PrimeTable>(1000)),
                    std::invalid_argument);
}

TEST_CASE("degenerate trim removes the whole even interval and is flagged") {
    ScheduleConfig cfg;
    cfg.rule = "explicit";
    cfg.points = {100, 800, 1229, 2000};
    Schedule s = make_schedule(cfg);
    // trim left end: 1229 - 800 - 1229/sqrt(log 1229) = -31.8 < 800
    WLayer w = build_W(build_H(s, table_for(s)));
    const auto& st = w.intervals[1];
    CHECK(st.degenerate);
    CHECK(st.w_count == 0);
    CHECK(st.trimmed_count == st.h_count);
    CHECK(w.W.count_range(801, 1229) == 0);
    // odd intervals untouched
    CHECK(w.W.count_range(101, 800) == w.H.count_range(101, 800));

    // the pipeline still completes and the target check passes vacuously
    QLayers L = build_Q(w);
    auto f2 = verify_fact2(L);
    CHECK(f2.all_unrepresentable());
}

TEST_CASE("trim bound holds on a non-degenerate schedule") {
    Schedule s = small_schedule();
    WLayer w = build_W(build_H(s, table_for(s)));
    for (const auto& st : w.intervals) {
        if (!st.filtered) continue;
        CHECK_FALSE(st.degenerate);
        CHECK(st.trim_left > double(st.lo));
        auto members = w.W.members_in(st.lo + 1, st.hi);
        REQUIRE_FALSE(members.empty());
        CHECK(double(members.back()) < st.trim_left);
        CHECK(w.W.count_range(uint64_t(std::ceil(st.trim_left)), st.hi) == 0);
    }
}

TEST_CASE("pruning matches a naive per-prime enumeration") {
    Schedule s = small_schedule();
    auto table = table_for(s);
    WLayer w = build_W(build_H(s, table));
    QLayers L = build_Q(w);

    for (size_t li = 0; li < L.ledgers.size(); ++li) {
        const auto& led = L.ledgers[li];
        const auto& st = L.intervals[led.interval_index - 1];
        // rebuild the removal set through two_prime_reps on the W layer
        PrimeSubset wk(table);
        for (uint64_t m : w.W.members_in(st.lo + 1, st.hi)) wk.add(m);
        std::set<uint64_t> removed;
        uint64_t reps_total = 0;
        std::vector<uint32_t> tp;
        table->for_each_prime(s.point(1) + 1, st.lo, [&](uint64_t p) {
            auto reps = two_prime_reps(led.target - p, wk);
            tp.push_back(uint32_t(reps.size()));
            reps_total += reps.size();
            for (const auto& r : reps) {
                removed.insert(r.w);
                removed.insert(r.v);
            }
        });
        CHECK(reps_total == led.reps_total);
        CHECK(tp == led.tp);
        CHECK(removed.size() == led.removed_count);
        for (uint64_t r : removed) {
            CHECK(w.W.contains(r));
            CHECK_FALSE(L.Q.contains(r));
        }
        CHECK(st.q_count == st.w_count - removed.size());
    }
}

TEST_CASE("structure verification on a small build") {
    Schedule s = small_schedule();
    QLayers L = build_pipeline(s, table_for(s));
    auto sr = verify_structure(L);
    CHECK(sr.nested);
    CHECK(sr.odd_intervals_identical);
    CHECK(sr.interval_counts_consistent);
    CHECK(sr.ledger_conserved);

    auto cr = verify_pruning_completeness(L);
    CHECK(cr.complete);
    CHECK(cr.residual_prime_count == 0);
    CHECK_FALSE(cr.truncated);

    // ledger records are genuine representations over W
    for (const auto& led : L.ledgers)
        for (const auto& rec : led.witnesses) {
            CHECK(rec.w + rec.v + rec.p == led.target);
            CHECK(L.table->is_prime(rec.p));
            CHECK(L.W.contains(rec.w));
            CHECK(L.W.contains(rec.v));
            CHECK(rec.w <= rec.v);
            CHECK(double(rec.w) > led.removal_floor);
        }
}

TEST_CASE("fact2 holds and the region split matches the direct scan") {
    Schedule s = small_schedule();
    QLayers L = build_pipeline(s, table_for(s));
    auto cr = verify_pruning_completeness(L);
    auto regions = verify_fact2(L, "regions", &cr);
    auto regions_alone = verify_fact2(L, "regions");
    auto direct = verify_fact2(L, "direct");
    CHECK(regions.all_unrepresentable());
    CHECK(regions_alone.all_unrepresentable());
    CHECK(direct.all_unrepresentable());
    REQUIRE(regions.targets.size() == direct.targets.size());
    for (size_t i = 0; i < regions.targets.size(); ++i) {
        const auto& a = regions.targets[i];
        const auto& b = direct.targets[i];
        CHECK(a.x == b.x);
        CHECK(a.representable == b.representable);
        CHECK(a.tally.all_inside == b.tally.all_inside);
        CHECK(a.tally.one_outside == b.tally.one_outside);
        CHECK(a.tally.two_outside == b.tally.two_outside);
        CHECK(a.tally.all_outside == b.tally.all_outside);
        CHECK(a.premise_classes_ok);
        CHECK(a.premise_target_class_ok);
        CHECK(a.premise_triple_miss_ok);
    }

    // cross-check with the independent triple-witness search
    for (const auto& t : regions.targets)
        CHECK_FALSE(three_prime_witness(t.x, L.Q).has_value());
}

TEST_CASE("negative control: skipping the pruning step breaks fact2") {
    Schedule s = small_schedule();
    auto table = table_for(s);
    QLayers L = build_pipeline(s, table, false);
    CHECK_FALSE(L.pruned);

    auto cr = verify_pruning_completeness(L);
    CHECK_FALSE(cr.complete);
    CHECK(cr.residual_prime_count > 0);
    REQUIRE_FALSE(cr.residual_sample.empty());
    for (const auto& r : cr.residual_sample) {
        CHECK(L.Q.contains(r.w));
        CHECK(L.Q.contains(r.v));
        CHECK(L.table->is_prime(r.p));
    }

    auto f2 = verify_fact2(L, "regions", &cr);
    CHECK_FALSE(f2.all_unrepresentable());
    bool any = false;
    for (const auto& t : f2.targets) {
        if (!t.representable) continue;
        any = true;
        CHECK(t.witness[0] + t.witness[1] + t.witness[2] == t.x);
        CHECK(L.Q.contains(t.witness[0]));
        CHECK(L.Q.contains(t.witness[1]));
        CHECK(L.Q.contains(t.witness[2]));
        // agreement with the independent searcher
        CHECK(three_prime_witness(t.x, L.Q).has_value());
    }
    CHECK(any);
}

TEST_CASE("builds are deterministic") {
    Schedule s = small_schedule();
    auto table = table_for(s);
    QLayers a = build_pipeline(s, table);
    QLayers b = build_pipeline(s, table);
    CHECK(a.Q == b.Q);
    CHECK(a.W == b.W);
    CHECK(a.H == b.H);
    REQUIRE(a.ledgers.size() == b.ledgers.size());
    for (size_t i = 0; i < a.ledgers.size(); ++i) {
        CHECK(a.ledgers[i].tp == b.ledgers[i].tp);
        REQUIRE(a.ledgers[i].witnesses.size() == b.ledgers[i].witnesses.size());
        for (size_t j = 0; j < a.ledgers[i].witnesses.size(); ++j) {
            CHECK(a.ledgers[i].witnesses[j].p == b.ledgers[i].witnesses[j].p);
            CHECK(a.ledgers[i].witnesses[j].w == b.ledgers[i].witnesses[j].w);
            CHECK(a.ledgers[i].witnesses[j].v == b.ledgers[i].witnesses[j].v);
        }
    }
}

TEST_CASE("fact1 series reports nesting and ratios") {
    Schedule s = small_schedule();
    QLayers L = build_pipeline(s, table_for(s));
    auto dc = fact1_series(L);
    REQUIRE(dc.checkpoints.size() == s.x.size());
    for (const auto& row : dc.checkpoints) {
        CHECK(row.q <= row.w);
        CHECK(row.w <= row.h);
        CHECK(row.qv <= row.wv);
    }
    for (const auto& row : dc.intervals) {
        CHECK(row.wh_ratio <= 1.0);
        CHECK(row.removed_fraction >= 0.0);
        CHECK(row.removed_fraction <= 1.0);
    }
    CHECK(dc.floors_ok);
    CHECK(dc.max_qw_gap >= 0.0);
    CHECK(dc.max_qw_gap <= 1.0);
}

TEST_CASE("csv exports are well formed") {
    Schedule s = small_schedule();
    QLayers L = build_pipeline(s, table_for(s));
    auto dc = fact1_series(L);
    std::ostringstream cp;
    write_checkpoint_csv(cp, dc);
    std::string first = cp.str().substr(0, cp.str().find('\n'));
    CHECK(first == "index,x,h_count,w_count,q_count,h_value,w_value,q_value");
    CHECK(std::count(cp.str().begin(), cp.str().end(), '\n') ==
          long(s.x.size()) + 1);

    std::ostringstream led;
    write_ledger_csv(led, L);
    std::string lfirst = led.str().substr(0, led.str().find('\n'));
    CHECK(lfirst == "interval,p,w,v");
    uint64_t rows = 0;
    for (const auto& l : L.ledgers) rows += l.witnesses.size();
    CHECK(std::count(led.str().begin(), led.str().end(), '\n') == long(rows) + 1);
}
