// modsum.cpp
// Command-line surface: every construction, search, density series and
// the layered prime-set pipeline as reproducible, scriptable runs with
// machine-readable reports (see `modsum report-schema`).

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "modsum/constructions.hpp"
#include "modsum/primes.hpp"
#include "modsum/qconstruct.hpp"
#include "modsum/report.hpp"
#include "modsum/residue.hpp"
#include "modsum/search.hpp"
#include "modsum/version.hpp"

namespace {

using namespace modsum;

std::string join(const std::vector<uint64_t>& v, char sep = ',') {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << sep;
        os << v[i];
    }
    return os.str();
}

std::vector<uint64_t> parse_list(const std::string& s) {
    std::vector<uint64_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stoull(tok));
    return out;
}

// Sieve, or reuse a cached table if MODSUM_CACHE names a directory.
std::shared_ptr<const PrimeTable> acquire_table(uint64_t limit,
                                                uint64_t budget = PrimeTable::kDefaultMemoryBudget) {
    const char* dir = std::getenv("MODSUM_CACHE");
    if (dir && *dir) {
        std::string path = std::string(dir) + "/primes_" + std::to_string(limit) + ".mspt";
        if (auto t = PrimeTable::load(path, limit))
            return std::make_shared<PrimeTable>(std::move(*t));
        auto t = std::make_shared<PrimeTable>(limit, budget);
        t->save(path);  // best effort
        return t;
    }
    return std::make_shared<PrimeTable>(limit, budget);
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

int finish(RunReport& rep, const Timer& t) {
    rep.timing_ms = t.ms();
    rep.write(std::cout);
    return rep.exit_code();
}

std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) out += (c == ' ' ? '-' : c);
    return out;
}

int cmd_verify(const std::string& name, std::optional<uint64_t> p,
               std::optional<uint64_t> k, const std::string& cmdline) {
    Timer t;
    Construction c = construction_by_name(name, p, k);
    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("name", name);
    for (auto& [key, val] : c.params) rep.add_param(key, std::to_string(val));
    rep.add_param("modulus", std::to_string(c.set.m()));
    rep.add_param("size", std::to_string(c.set.size()));
    VerificationReport vr = verify(c);
    for (const auto& r : vr.results)
        rep.add(slug(r.label), r.pass, r.detail,
                r.witness.empty() ? "" : join(r.witness));
    return finish(rep, t);
}

int cmd_search(uint64_t m, int fold, const std::string& universe,
               const std::string& target, uint64_t min_size, uint64_t max_nodes,
               double max_seconds, bool no_prune, size_t max_witnesses,
               const std::string& cmdline) {
    Timer t;
    SearchProblem prob{Modulus(m), fold,
                       universe == "all" ? SearchProblem::Universe::all
                                         : SearchProblem::Universe::units,
                       target == "even" ? SearchProblem::Target::even_classes
                       : target == "odd" ? SearchProblem::Target::odd_classes
                                         : SearchProblem::Target::full_ring,
                       min_size};
    SearchBudget budget{max_nodes, max_seconds};
    SearchResult res = max_noncovering(prob, budget, !no_prune);
    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("m", std::to_string(m));
    rep.add_param("h", std::to_string(fold));
    rep.add_param("universe", universe);
    rep.add_param("target", target);
    std::ostringstream det;
    det << "max_size=" << res.max_size << ",found=" << res.found
        << ",orbits=" << res.orbits_explored << ",pruned=" << res.pruned
        << ",nodes=" << res.nodes;
    if (res.incomplete)
        rep.add_status("search", ClaimStatus::incomplete, det.str());
    else
        rep.add("search", true, det.str());
    for (size_t i = 0; i < res.witnesses.size() && i < max_witnesses; ++i)
        rep.add("witness." + std::to_string(i), true, "", join(res.witnesses[i]));
    if (res.witnesses.size() > max_witnesses)
        rep.warn("witnesses", "showing " + std::to_string(max_witnesses) + " of " +
                                  std::to_string(res.witnesses.size()));
    return finish(rep, t);
}

int cmd_shen(uint64_t m, const std::vector<uint64_t>& sizes, uint64_t max_nodes,
             double max_seconds, const std::string& cmdline) {
    Timer t;
    if (sizes.size() != 3) throw std::invalid_argument("--sizes wants s1,s2,s3");
    ShenReport res = shen_variant(Modulus(m), sizes[0], sizes[1], sizes[2],
                                  SearchBudget{max_nodes, max_seconds});
    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("m", std::to_string(m));
    rep.add_param("sizes", join(sizes));
    std::ostringstream det;
    det << "holds=" << res.holds << ",meets_threshold=" << res.meets_threshold
        << ",triples=" << res.triples_checked;
    if (res.incomplete)
        rep.add_status("three-set-coverage", ClaimStatus::incomplete, det.str());
    else
        rep.add("three-set-coverage", res.holds, det.str(),
                res.holds ? ""
                          : join(res.witness1) + "|" + join(res.witness2) + "|" +
                                join(res.witness3));
    return finish(rep, t);
}

int cmd_density(uint64_t limit, uint64_t mod, const std::string& classes_arg,
                std::vector<uint64_t> checkpoints, const std::string& csv,
                const std::string& cmdline) {
    Timer t;
    auto table = acquire_table(limit);
    PrimeSubset subset = PrimeSubset::full(table);
    if (classes_arg != "all") {
        ResidueSet classes(Modulus(mod), parse_list(classes_arg));
        subset = progression_filter(table, classes);
    }
    if (checkpoints.empty()) {
        for (uint64_t x = 10; x <= limit; x *= 10) checkpoints.push_back(x);
        if (checkpoints.empty() || checkpoints.back() != limit)
            checkpoints.push_back(limit);
    }
    auto series = density_series(subset, checkpoints);
    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("limit", std::to_string(limit));
    rep.add_param("mod", classes_arg == "all" ? "none" : std::to_string(mod));
    rep.add_param("classes", classes_arg);
    rep.add_param("checkpoints", join(checkpoints));
    double vmin = series.empty() ? 0 : series.front().value, vmax = vmin;
    for (const auto& d : series) {
        vmin = std::min(vmin, d.value);
        vmax = std::max(vmax, d.value);
    }
    rep.add("series", true,
            "points=" + std::to_string(series.size()) + ",min=" + format_double(vmin) +
                ",max=" + format_double(vmax));
    const auto& last = series.back();
    rep.add("final", true,
            "x=" + std::to_string(last.x) + ",count=" + std::to_string(last.count) +
                ",value=" + format_double(last.value));
    if (!csv.empty()) {
        std::ofstream out(csv);
        if (!out) throw std::invalid_argument("cannot write csv: " + csv);
        out << "x,count,value\n";
        for (const auto& d : series)
            out << d.x << ',' << d.count << ',' << format_double(d.value) << '\n';
        rep.add("csv", true, csv);
    }
    return finish(rep, t);
}

int cmd_reps(const std::vector<uint64_t>& targets, uint64_t limit, uint64_t mod,
             const std::string& classes_arg, bool list_pairs, bool three,
             const std::string& csv, const std::string& cmdline) {
    Timer t;
    if (targets.empty()) throw std::invalid_argument("--targets wants at least one n");
    uint64_t need = limit;
    for (uint64_t n : targets) need = std::max(need, n);
    auto table = acquire_table(need);
    PrimeSubset subset = PrimeSubset::full(table);
    if (classes_arg != "all")
        subset = progression_filter(table, ResidueSet(Modulus(mod), parse_list(classes_arg)));
    auto profile = rep_count_profile(targets, subset);
    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("targets", join(targets));
    rep.add_param("classes", classes_arg);
    for (const auto& e : profile) {
        std::string wit;
        if (list_pairs) {
            auto pairs = two_prime_reps(e.n, subset);
            std::ostringstream os;
            for (size_t i = 0; i < pairs.size() && i < 32; ++i)
                os << (i ? ";" : "") << pairs[i].w << "+" << pairs[i].v;
            if (pairs.size() > 32) os << ";...";
            wit = os.str();
        }
        rep.add("reps." + std::to_string(e.n), true,
                "t=" + std::to_string(e.t) + ",shape=" + format_double(e.shape) +
                    ",ratio=" + format_double(e.ratio),
                wit);
        if (three) {
            auto w3 = three_prime_witness(e.n, subset);
            rep.add("three." + std::to_string(e.n), true,
                    w3 ? "representable" : "absent",
                    w3 ? std::to_string((*w3)[0]) + "+" + std::to_string((*w3)[1]) +
                             "+" + std::to_string((*w3)[2])
                       : "");
        }
    }
    if (!csv.empty()) {
        std::ofstream out(csv);
        if (!out) throw std::invalid_argument("cannot write csv: " + csv);
        out << "n,t,shape,ratio\n";
        for (const auto& e : profile)
            out << e.n << ',' << e.t << ',' << format_double(e.shape) << ','
                << format_double(e.ratio) << '\n';
        rep.add("csv", true, csv);
    }
    return finish(rep, t);
}

int cmd_construct_q(const std::string& config_path, bool skip_pruning,
                    const std::string& fact2_mode, const std::string& csv_dir,
                    const std::string& cmdline) {
    Timer t;
    ScheduleConfig cfg = load_schedule_config(config_path);
    Schedule sched = make_schedule(cfg);
    auto table = acquire_table(sched.x.back());
    QLayers layers = build_pipeline(sched, table, !skip_pruning);

    RunReport rep;
    rep.command_line = cmdline;
    rep.add_param("config", config_path);
    rep.add_param("rule", cfg.rule);
    rep.add_param("checkpoints", join(sched.x));
    rep.add_param("pruning", skip_pruning ? "off" : "on");
    rep.add_param("fact2_mode", fact2_mode);

    for (const auto& st : layers.intervals) {
        std::ostringstream det;
        det << "range=(" << st.lo << "," << st.hi << "],filtered=" << st.filtered
            << ",h=" << st.h_count << ",w=" << st.w_count << ",q=" << st.q_count;
        rep.add("interval." + std::to_string(st.index), true, det.str());
        if (st.degenerate)
            rep.warn("interval." + std::to_string(st.index) + ".trim",
                     "degenerate: the whole interval was trimmed");
    }
    for (const auto& led : layers.ledgers) {
        std::ostringstream det;
        det << "target=" << led.target << ",reps_total=" << led.reps_total
            << ",removed=" << led.removed_count
            << ",witnesses=" << led.witnesses.size()
            << ",floor=" << format_double(led.removal_floor)
            << ",floor_ok=" << led.floor_ok;
        rep.add("ledger." + std::to_string(led.interval_index), true, det.str());
    }

    StructureReport sr = verify_structure(layers);
    rep.add("nesting", sr.nested);
    rep.add("odd-interval-identity", sr.odd_intervals_identical);
    rep.add("interval-counts", sr.interval_counts_consistent);
    rep.add("ledger-conservation", sr.ledger_conserved);

    CompletenessReport cr = verify_pruning_completeness(layers);
    {
        std::ostringstream det;
        det << "residual_primes=" << cr.residual_prime_count
            << ",fallback=" << cr.used_fallback << ",truncated=" << cr.truncated;
        std::string wit;
        if (!cr.residual_sample.empty()) {
            const auto& r = cr.residual_sample.front();
            wit = std::to_string(r.p) + ":" + std::to_string(r.w) + "+" +
                  std::to_string(r.v);
        }
        rep.add("pruning-completeness", cr.complete, det.str(), wit);
    }

    Fact2Report f2 = verify_fact2(layers, fact2_mode, &cr);
    for (const auto& ft : f2.targets) {
        std::ostringstream det;
        det << "tallies=" << ft.tally.all_inside << "/" << ft.tally.one_outside << "/"
            << ft.tally.two_outside << "/" << ft.tally.all_outside
            << ",probes=" << ft.probes << ",gap_empty=" << ft.gap_empty
            << ",discharged=" << ft.one_outside_discharged;
        rep.add("fact2.x" + std::to_string(ft.checkpoint_index) + "." +
                    std::to_string(ft.x),
                !ft.representable, det.str(),
                ft.representable ? std::to_string(ft.witness[0]) + "+" +
                                       std::to_string(ft.witness[1]) + "+" +
                                       std::to_string(ft.witness[2])
                                 : "");
    }

    DensityComparison dc = fact1_series(layers);
    rep.add("removal-floors", dc.floors_ok);
    rep.add("density", true, "max_qw_gap=" + format_double(dc.max_qw_gap));
    for (const auto& row : dc.checkpoints) {
        std::ostringstream det;
        det << "h=" << row.h << ",w=" << row.w << ",q=" << row.q
            << ",hv=" << format_double(row.hv) << ",wv=" << format_double(row.wv)
            << ",qv=" << format_double(row.qv);
        rep.add("density.x" + std::to_string(row.x), true, det.str());
    }

    if (!csv_dir.empty()) {
        {
            std::ofstream out(csv_dir + "/checkpoints.csv");
            if (!out) throw std::invalid_argument("cannot write into " + csv_dir);
            write_checkpoint_csv(out, dc);
        }
        {
            std::ofstream out(csv_dir + "/ledger.csv");
            write_ledger_csv(out, layers);
        }
        rep.add("csv", true, csv_dir + "/{checkpoints,ledger}.csv");
    }
    return finish(rep, t);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"modular sumset constructions, extremal searches, and sparse "
                 "prime-set pipelines"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.require_subcommand(1);

    std::ostringstream cmd;
    for (int i = 0; i < argc; ++i) cmd << (i ? " " : "") << argv[i];
    const std::string cmdline = cmd.str();

    // verify
    std::string v_name;
    uint64_t v_p = 0, v_k = 0;
    auto* verify_cmd = app.add_subcommand("verify", "produce a named construction and check its claims");
    verify_cmd->add_option("name", v_name,
                           "shao-mod15 | shifted-mod30 | problem66b | problem66a | doubling")
        ->required();
    auto* popt = verify_cmd->add_option("--p", v_p, "prime parameter for the families");
    auto* kopt = verify_cmd->add_option("--k", v_k, "depth for the doubling family");

    // search
    uint64_t s_m = 15, s_min = 1, s_nodes = 20'000'000;
    int s_h = 3;
    double s_secs = 120.0;
    std::string s_universe = "units", s_target = "ring";
    bool s_noprune = false;
    size_t s_maxwit = 8;
    auto* search_cmd = app.add_subcommand("search", "largest subset whose h-fold sumset misses the target");
    search_cmd->add_option("--m", s_m, "modulus")->required();
    search_cmd->add_option("--h", s_h, "fold count, 2 or 3")->required();
    search_cmd->add_option("--universe", s_universe, "units | all")
        ->check(CLI::IsMember({"units", "all"}));
    search_cmd->add_option("--target", s_target, "ring | even | odd")
        ->check(CLI::IsMember({"ring", "even", "odd"}));
    search_cmd->add_option("--min-size", s_min, "search floor");
    search_cmd->add_option("--max-nodes", s_nodes, "node budget");
    search_cmd->add_option("--max-seconds", s_secs, "wall-clock budget");
    search_cmd->add_flag("--no-prune", s_noprune, "disable orbit pruning");
    search_cmd->add_option("--max-witnesses", s_maxwit, "witnesses to print");

    // shen
    uint64_t sh_m = 15, sh_nodes = 50'000'000;
    double sh_secs = 300.0;
    std::string sh_sizes = "6,5,5";
    auto* shen_cmd = app.add_subcommand("shen", "three-set coverage check at given sizes");
    shen_cmd->add_option("--m", sh_m, "modulus")->required();
    shen_cmd->add_option("--sizes", sh_sizes, "s1,s2,s3")->required();
    shen_cmd->add_option("--max-nodes", sh_nodes, "triple budget");
    shen_cmd->add_option("--max-seconds", sh_secs, "wall-clock budget");

    // density
    uint64_t d_limit = 1'000'000, d_mod = 15;
    std::string d_classes = "all", d_checkpoints, d_csv;
    auto* density_cmd = app.add_subcommand("density", "relative density series of a prime subset");
    density_cmd->add_option("--limit", d_limit, "sieve limit")->required();
    density_cmd->add_option("--mod", d_mod, "progression modulus");
    density_cmd->add_option("--classes", d_classes, "comma list of classes, or 'all'");
    density_cmd->add_option("--checkpoints", d_checkpoints, "comma list of x values");
    density_cmd->add_option("--csv", d_csv, "write series CSV here");

    // reps
    std::string r_targets, r_classes = "all", r_csv;
    uint64_t r_limit = 0, r_mod = 15;
    bool r_list = false, r_three = false;
    auto* reps_cmd = app.add_subcommand("reps", "two-element representation counts against the bound shape");
    reps_cmd->add_option("--targets", r_targets, "comma list of n")->required();
    reps_cmd->add_option("--limit", r_limit, "sieve limit (defaults to max target)");
    reps_cmd->add_option("--mod", r_mod, "progression modulus for the subset");
    reps_cmd->add_option("--classes", r_classes, "comma list of classes, or 'all'");
    reps_cmd->add_flag("--list-pairs", r_list, "include the pairs as witnesses");
    reps_cmd->add_flag("--three", r_three, "also search a three-element witness");
    reps_cmd->add_option("--csv", r_csv, "write profile CSV here");

    // construct-q
    std::string q_config, q_mode = "regions", q_csvdir;
    bool q_skip = false;
    auto* q_cmd = app.add_subcommand("construct-q", "build the H/W/Q prime layers and verify them");
    q_cmd->add_option("--config", q_config, "schedule config file")->required();
    q_cmd->add_flag("--skip-pruning", q_skip, "negative control: skip the removal step");
    q_cmd->add_option("--fact2-mode", q_mode, "regions | direct")
        ->check(CLI::IsMember({"regions", "direct"}));
    q_cmd->add_option("--csv-dir", q_csvdir, "directory for checkpoint/ledger CSVs");

    auto* schema_cmd = app.add_subcommand("report-schema", "print the report format");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
        app.exit(e);
        return 2;
    }

    try {
        if (*verify_cmd)
            return cmd_verify(v_name,
                              *popt ? std::optional<uint64_t>(v_p) : std::nullopt,
                              *kopt ? std::optional<uint64_t>(v_k) : std::nullopt,
                              cmdline);
        if (*search_cmd)
            return cmd_search(s_m, s_h, s_universe, s_target, s_min, s_nodes, s_secs,
                              s_noprune, s_maxwit, cmdline);
        if (*shen_cmd)
            return cmd_shen(sh_m, parse_list(sh_sizes), sh_nodes, sh_secs, cmdline);
        if (*density_cmd)
            return cmd_density(d_limit, d_mod, d_classes, parse_list(d_checkpoints),
                               d_csv, cmdline);
        if (*reps_cmd)
            return cmd_reps(parse_list(r_targets), r_limit, r_mod, r_classes, r_list,
                            r_three, r_csv, cmdline);
        if (*q_cmd) return cmd_construct_q(q_config, q_skip, q_mode, q_csvdir, cmdline);
        if (*schema_cmd) {
            std::cout << report_schema_text();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
