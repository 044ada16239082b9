#pragma once
// report.hpp
// Line-oriented run reports with a stable, diffable schema. Every line
// is a record type followed by key=value fields; values containing
// spaces or quotes are double-quoted with backslash escapes. Reports
// from identical runs are byte-identical except for the timing line.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "version.hpp"

namespace modsum {

enum class ClaimStatus { pass, fail, incomplete };

inline const char* to_string(ClaimStatus s) {
    switch (s) {
        case ClaimStatus::pass: return "pass";
        case ClaimStatus::fail: return "fail";
        case ClaimStatus::incomplete: return "incomplete";
    }
    return "?";
}

// %.10g with a fixed buffer; stable across runs for identical doubles.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string quote_value(const std::string& v) {
    bool need = v.empty();
    for (char c : v)
        if (c == ' ' || c == '"' || c == '\\' || c == '\n' || c == '\t') need = true;
    if (!need) return v;
    std::string out = "\"";
    for (char c : v) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') { out += "\\n"; continue; }
        out += c;
    }
    out += '"';
    return out;
}

struct RunReport {
    std::string command_line;
    std::vector<std::pair<std::string, std::string>> params;

    struct Entry {
        std::string id;
        ClaimStatus status = ClaimStatus::pass;
        std::string detail;   // optional
        std::string witness;  // optional
    };
    std::vector<Entry> entries;

    struct Warning {
        std::string id;
        std::string detail;
    };
    std::vector<Warning> warnings;

    double timing_ms = 0;

    void add_param(const std::string& k, const std::string& v) {
        params.push_back({k, v});
    }
    void add(const std::string& id, bool pass, const std::string& detail = "",
             const std::string& witness = "") {
        entries.push_back({id, pass ? ClaimStatus::pass : ClaimStatus::fail,
                           detail, witness});
    }
    void add_status(const std::string& id, ClaimStatus st,
                    const std::string& detail = "", const std::string& witness = "") {
        entries.push_back({id, st, detail, witness});
    }
    void warn(const std::string& id, const std::string& detail) {
        warnings.push_back({id, detail});
    }

    uint64_t count(ClaimStatus st) const {
        uint64_t n = 0;
        for (const auto& e : entries) n += e.status == st;
        return n;
    }

    // pass < incomplete < fail
    ClaimStatus overall() const {
        if (count(ClaimStatus::fail)) return ClaimStatus::fail;
        if (count(ClaimStatus::incomplete)) return ClaimStatus::incomplete;
        return ClaimStatus::pass;
    }

    // Exit-code contract: 0 all pass, 1 any claim failed, 3 incomplete.
    // (2 is reserved for usage/config errors and issued by the CLI.)
    int exit_code() const {
        switch (overall()) {
            case ClaimStatus::pass: return 0;
            case ClaimStatus::fail: return 1;
            case ClaimStatus::incomplete: return 3;
        }
        return 1;
    }

    void write(std::ostream& os, bool include_timing = true) const {
        os << "report version=1\n";
        os << "tool name=" << kToolName << " version=" << kToolVersion << "\n";
        os << "command line=" << quote_value(command_line) << "\n";
        for (const auto& [k, v] : params)
            os << "param " << k << "=" << quote_value(v) << "\n";
        for (const auto& e : entries) {
            os << "claim id=" << quote_value(e.id) << " status=" << to_string(e.status);
            if (!e.detail.empty()) os << " detail=" << quote_value(e.detail);
            if (!e.witness.empty()) os << " witness=" << quote_value(e.witness);
            os << "\n";
        }
        for (const auto& w : warnings)
            os << "warning id=" << quote_value(w.id)
               << " detail=" << quote_value(w.detail) << "\n";
        os << "summary pass=" << count(ClaimStatus::pass)
           << " fail=" << count(ClaimStatus::fail)
           << " incomplete=" << count(ClaimStatus::incomplete) << "\n";
        os << "status result=" << to_string(overall()) << " exit=" << exit_code() << "\n";
        if (include_timing) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f", timing_ms);
            os << "timing ms=" << buf << "\n";
        }
    }

    std::string to_text(bool include_timing = true) const {
        std::ostringstream os;
        write(os, include_timing);
        return os.str();
    }
};

inline const char* report_schema_text() {
    return
        "modsum report schema, version 1\n"
        "\n"
        "A report is a sequence of lines. Each line is a record type\n"
        "followed by space-separated key=value fields. Values containing\n"
        "spaces or quotes are double-quoted; '\"' and '\\' are\n"
        "backslash-escaped inside quotes.\n"
        "\n"
        "Records, in order:\n"
        "  report version=1                      exactly once, first line\n"
        "  tool name=<str> version=<str>         exactly once\n"
        "  command line=<str>                    exactly once, argv echo\n"
        "  param <key>=<value>                   zero or more\n"
        "  claim id=<str> status=<pass|fail|incomplete>\n"
        "        [detail=<str>] [witness=<str>]  zero or more\n"
        "  warning id=<str> detail=<str>         zero or more\n"
        "  summary pass=<n> fail=<n> incomplete=<n>   exactly once\n"
        "  status result=<pass|fail|incomplete> exit=<0|1|3>  exactly once\n"
        "  timing ms=<float>                     exactly once, last line\n"
        "\n"
        "Reports from identical runs are byte-identical except for the\n"
        "timing line. Exit codes: 0 all claims pass, 1 any claim failed,\n"
        "2 usage or config error (no report emitted), 3 budget exhausted\n"
        "with an incomplete result.\n"
        "\n"
        "CSV outputs:\n"
        "  density series:  x,count,value\n"
        "  rep profile:     n,t,shape,ratio\n"
        "  checkpoints:     index,x,h_count,w_count,q_count,h_value,w_value,q_value\n"
        "  removal ledger:  interval,p,w,v\n";
}

}  // namespace modsum
