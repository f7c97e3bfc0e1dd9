#pragma once

// Wire formats.  Everything emitted here is deterministic: nlohmann keeps
// object keys sorted, floats serialize shortest-round-trip, and no timestamps
// or environment data enter the artifacts.  Tool/version stamps live in a
// sidecar file next to each output, never inside it.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "classifier.hpp"
#include "constructions.hpp"
#include "disk_geometry.hpp"
#include "dyadic.hpp"
#include "levels.hpp"
#include "series_engine.hpp"
#include "weights.hpp"
#include "witnesses.hpp"

namespace thinlab::io {

using json = nlohmann::json;

inline constexpr const char* tool_version = "thinlab 0.1.0";
inline constexpr const char* seq_format = "thinlab-seq/1";
inline constexpr const char* verdict_format = "thinlab-verdict/1";
inline constexpr const char* indexset_format = "thinlab-indexset/1";
inline constexpr const char* witness_format = "thinlab-witness/1";
inline constexpr const char* classify_format = "thinlab-classify/1";
inline constexpr const char* analyze_format = "thinlab-analyze/1";
inline constexpr const char* gen_format = "thinlab-gen/1";
inline constexpr const char* demo_format = "thinlab-demo/1";
inline constexpr const char* plot_format = "thinlab-plot/1";

// ---------------------------------------------------------------------------
// field-checked JSON access: every failure names the offending field

namespace detail {

[[noreturn]] inline void wire_error(const std::string& msg) { throw std::runtime_error(msg); }

inline const json& require_field(const json& j, const char* field, const char* where) {
    auto it = j.find(field);
    if (it == j.end())
        wire_error(std::string(where) + ": missing required field \"" + field + "\"");
    return *it;
}

inline double require_number(const json& j, const char* field, const char* where) {
    const json& v = require_field(j, field, where);
    if (!v.is_number())
        wire_error(std::string(where) + ": field \"" + field + "\" must be a number");
    return v.get<double>();
}

inline std::int64_t require_int(const json& j, const char* field, const char* where) {
    const json& v = require_field(j, field, where);
    if (!v.is_number_integer())
        wire_error(std::string(where) + ": field \"" + field + "\" must be an integer");
    return v.get<std::int64_t>();
}

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// plain-file helpers

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) detail::wire_error("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) detail::wire_error("cannot open file for writing: " + path);
    out << content;
    if (!out) detail::wire_error("short write to file: " + path);
}

// data files never carry version stamps; the stamp goes in `<path>.version`
inline void write_with_sidecar(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    write_text_file(path + ".version", std::string(tool_version) + "\n");
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// sequence files

inline json sequence_to_json(const point_sequence& seq) {
    json pts = json::array();
    for (const auto& p : seq.points) {
        json jp;
        jp["delta"] = p.delta;
        jp["angle"] = p.angle;
        if (p.gen) {
            jp["gen"] = json{{"m", p.gen->m}, {"j", p.gen->j}};
        }
        pts.push_back(std::move(jp));
    }
    json j;
    j["format"] = seq_format;
    j["points"] = std::move(pts);
    if (seq.claimed_separation) j["claimed_separation"] = *seq.claimed_separation;
    return j;
}

inline point_sequence sequence_from_json(const json& j) {
    constexpr const char* where = "sequence";
    if (!j.is_object()) detail::wire_error("sequence: top level must be a JSON object");
    const json& fmt = detail::require_field(j, "format", where);
    if (!fmt.is_string() || fmt.get<std::string>() != seq_format)
        detail::wire_error(std::string("sequence: field \"format\" must be \"") + seq_format + "\"");
    const json& pts = detail::require_field(j, "points", where);
    if (!pts.is_array()) detail::wire_error("sequence: field \"points\" must be an array");

    point_sequence seq;
    seq.points.reserve(pts.size());
    std::size_t k = 0;
    for (const json& jp : pts) {
        char ctx[48];
        std::snprintf(ctx, sizeof ctx, "sequence points[%zu]", k);
        if (!jp.is_object()) detail::wire_error(std::string(ctx) + ": entry must be an object");
        disk_point p;
        p.delta = detail::require_number(jp, "delta", ctx);
        p.angle = detail::require_number(jp, "angle", ctx);
        if (auto it = jp.find("gen"); it != jp.end()) {
            if (!it->is_object()) detail::wire_error(std::string(ctx) + ": field \"gen\" must be an object");
            origin_tag tag;
            tag.m = detail::require_int(*it, "m", ctx);
            std::int64_t jj = detail::require_int(*it, "j", ctx);
            if (jj < 0) detail::wire_error(std::string(ctx) + ": field \"j\" must be nonnegative");
            tag.j = static_cast<std::uint64_t>(jj);
            p.gen = tag;
        }
        validate_point(p);  // range errors for delta outside (0,1]
        seq.points.push_back(p);
        ++k;
    }
    if (auto it = j.find("claimed_separation"); it != j.end()) {
        if (!it->is_number())
            detail::wire_error("sequence: field \"claimed_separation\" must be a number");
        seq.claimed_separation = it->get<double>();
    }
    return seq;
}

inline point_sequence read_sequence_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        detail::wire_error(path + ": " + e.what());
    }
    return sequence_from_json(j);
}

// ---------------------------------------------------------------------------
// profile CSV: header `m,N_m,dbar_m,l_m`, one row per nonempty annulus,
// absent dbar_m serialized as an empty field

inline std::string profile_to_csv(const annulus_profile& prof) {
    std::ostringstream out;
    out << "m,N_m,dbar_m,l_m\n";
    for (const auto& [m, st] : prof.rows) {
        if (st.n == 0) continue;
        out << m << ',' << st.n << ',';
        if (st.dbar) out << detail::fmt_g17(*st.dbar);
        out << ',' << detail::fmt_g17(st.l) << '\n';
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double_field(const std::string& s, const std::string& ctx) {
    const char* p = s.c_str();
    char* end = nullptr;
    double v = std::strtod(p, &end);
    if (end == p || *end != '\0') wire_error(ctx + ": not a number: \"" + s + "\"");
    return v;
}

inline std::int64_t parse_int_field(const std::string& s, const std::string& ctx) {
    const char* p = s.c_str();
    char* end = nullptr;
    long long v = std::strtoll(p, &end, 10);
    if (end == p || *end != '\0') wire_error(ctx + ": not an integer: \"" + s + "\"");
    return v;
}

}  // namespace detail

inline annulus_profile profile_from_csv(const std::string& text) {
    annulus_profile prof;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto fields = detail::split_csv_row(line);
        if (lineno == 1 && !fields.empty() && fields[0] == "m") continue;  // header
        char ctxb[40];
        std::snprintf(ctxb, sizeof ctxb, "profile csv line %zu", lineno);
        std::string ctx = ctxb;
        if (fields.size() != 4)
            detail::wire_error(ctx + ": expected 4 fields m,N_m,dbar_m,l_m");
        std::int64_t m = detail::parse_int_field(fields[0], ctx + " field m");
        std::int64_t n = detail::parse_int_field(fields[1], ctx + " field N_m");
        if (n <= 0) detail::wire_error(ctx + ": field N_m must be positive");
        annulus_stats st;
        st.n = static_cast<std::uint64_t>(n);
        if (!fields[2].empty())
            st.dbar = detail::parse_double_field(fields[2], ctx + " field dbar_m");
        st.l = detail::parse_double_field(fields[3], ctx + " field l_m");
        double expect = std::ldexp(static_cast<double>(st.n), static_cast<int>(-m));
        if (expect > 0.0 && std::abs(st.l - expect) > 1e-9 * expect)
            detail::wire_error(ctx + ": field l_m inconsistent with N_m * 2^-m");
        if (prof.rows.count(m)) detail::wire_error(ctx + ": duplicate level m");
        prof.rows[m] = std::move(st);
    }
    return prof;
}

// ---------------------------------------------------------------------------
// weight-spec strings: `logpow:c,alpha,beta` | `const:c` | `table:@file.csv`
// (the reverse direction is theta_spec_string in weights.hpp)

namespace detail {

inline std::vector<double> parse_number_list(const std::string& s, std::size_t want,
                                             const std::string& ctx) {
    std::vector<double> vals;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(',', pos);
        std::string piece = s.substr(pos, next == std::string::npos ? next : next - pos);
        vals.push_back(parse_double_field(piece, ctx));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (vals.size() != want) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s: expected %zu comma-separated numbers, got %zu",
                      ctx.c_str(), want, vals.size());
        wire_error(buf);
    }
    return vals;
}

}  // namespace detail

inline tabulated_theta tabulated_from_csv(const std::string& text) {
    tabulated_theta tab;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool seen_rows = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto fields = detail::split_csv_row(line);
        char ctxb[48];
        std::snprintf(ctxb, sizeof ctxb, "theta table line %zu", lineno);
        std::string ctx = ctxb;
        if (fields.size() != 2) detail::wire_error(ctx + ": expected 2 fields m,theta_value");
        if (!seen_rows && fields[0] == "m") {  // optional header above the data
            seen_rows = true;
            continue;
        }
        seen_rows = true;
        std::int64_t m = detail::parse_int_field(fields[0], ctx + " field m");
        double v = detail::parse_double_field(fields[1], ctx + " field theta_value");
        if (m < 1) detail::wire_error(ctx + ": level m must be at least 1");
        if (tab.values.count(m)) detail::wire_error(ctx + ": duplicate level m");
        tab.values[m] = v;
    }
    if (tab.values.empty()) detail::wire_error("theta table: no data rows");
    // flags are measured from the stored samples, never asserted blindly
    tab.positive = true;
    tab.nonincreasing_in_t = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& [m, v] : tab.values) {
        if (!(v > 0.0)) tab.positive = false;
        if (v < prev) tab.nonincreasing_in_t = false;
        prev = v;
    }
    return tab;
}

inline theta_spec parse_theta_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        detail::wire_error("weight spec \"" + spec +
                           "\": expected logpow:c,alpha,beta | const:c | table:@file.csv");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "logpow") {
        auto v = detail::parse_number_list(rest, 3, "weight spec logpow");
        return log_power_theta{v[0], v[1], v[2]};
    }
    if (kind == "const") {
        auto v = detail::parse_number_list(rest, 1, "weight spec const");
        return constant_theta{v[0]};
    }
    if (kind == "table") {
        if (rest.empty() || rest[0] != '@')
            detail::wire_error("weight spec table: expected table:@file.csv");
        return tabulated_from_csv(read_text_file(rest.substr(1)));
    }
    detail::wire_error("weight spec: unknown kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// witness-spec strings:
//   const:re,im | blaschke:@zeros.json | pow:<spec>^m | prod:[spec;spec;...]

inline h_inf_function parse_witness_spec(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        detail::wire_error("witness spec \"" + spec +
                           "\": expected const:re,im | blaschke:@zeros.json | pow:<spec>^m | "
                           "prod:[spec;...]");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    if (kind == "const") {
        auto v = detail::parse_number_list(rest, 2, "witness spec const");
        return make_constant({v[0], v[1]});
    }
    if (kind == "blaschke") {
        if (rest.empty() || rest[0] != '@')
            detail::wire_error("witness spec blaschke: expected blaschke:@zeros.json");
        point_sequence zeros = read_sequence_file(rest.substr(1));
        return make_blaschke(std::move(zeros.points));
    }
    if (kind == "pow") {
        auto caret = rest.rfind('^');
        if (caret == std::string::npos)
            detail::wire_error("witness spec pow: expected pow:<spec>^m");
        std::int64_t m =
            detail::parse_int_field(rest.substr(caret + 1), "witness spec pow exponent");
        return make_power(parse_witness_spec(rest.substr(0, caret)), m);
    }
    if (kind == "prod") {
        if (rest.size() < 2 || rest.front() != '[' || rest.back() != ']')
            detail::wire_error("witness spec prod: expected prod:[spec;spec;...]");
        std::string body = rest.substr(1, rest.size() - 2);
        std::vector<h_inf_function> factors;
        std::string cur;
        int depth = 0;
        for (char c : body) {
            if (c == '[') ++depth;
            if (c == ']') --depth;
            if (c == ';' && depth == 0) {
                factors.push_back(parse_witness_spec(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) factors.push_back(parse_witness_spec(cur));
        if (factors.empty()) detail::wire_error("witness spec prod: empty factor list");
        return make_product(std::move(factors));
    }
    detail::wire_error("witness spec: unknown kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// structured weight serialization (round-trips tabulated data, unlike the
// human-oriented spec strings)

inline json theta_to_json(const theta_spec& th) {
    if (const auto* lp = std::get_if<log_power_theta>(&th))
        return json{{"logpow", json::array({lp->c, lp->alpha, lp->beta})}};
    if (const auto* ct = std::get_if<constant_theta>(&th)) return json{{"const", ct->c}};
    const auto& tab = std::get<tabulated_theta>(th);
    json vals = json::object();
    for (const auto& [m, v] : tab.values) vals[thinlab::detail::fmt_int(m)] = v;
    return json{{"table", std::move(vals)},
                {"positive", tab.positive},
                {"nonincreasing_in_t", tab.nonincreasing_in_t}};
}

inline theta_spec theta_from_json(const json& j) {
    constexpr const char* where = "theta";
    if (!j.is_object()) detail::wire_error("theta: must be an object");
    if (auto it = j.find("logpow"); it != j.end()) {
        if (!it->is_array() || it->size() != 3)
            detail::wire_error("theta: field \"logpow\" must be an array [c, alpha, beta]");
        return log_power_theta{(*it)[0].get<double>(), (*it)[1].get<double>(),
                               (*it)[2].get<double>()};
    }
    if (auto it = j.find("const"); it != j.end()) {
        if (!it->is_number()) detail::wire_error("theta: field \"const\" must be a number");
        return constant_theta{it->get<double>()};
    }
    if (auto it = j.find("table"); it != j.end()) {
        if (!it->is_object()) detail::wire_error("theta: field \"table\" must be an object");
        tabulated_theta tab;
        for (const auto& [key, val] : it->items()) {
            if (!val.is_number())
                detail::wire_error("theta table: value at level " + key + " must be a number");
            tab.values[detail::parse_int_field(key, "theta table level")] = val.get<double>();
        }
        const json& pos = detail::require_field(j, "positive", where);
        const json& noninc = detail::require_field(j, "nonincreasing_in_t", where);
        if (!pos.is_boolean() || !noninc.is_boolean())
            detail::wire_error("theta: table flags must be booleans");
        tab.positive = pos.get<bool>();
        tab.nonincreasing_in_t = noninc.get<bool>();
        return tab;
    }
    detail::wire_error("theta: expected one of \"logpow\", \"const\", \"table\"");
}

// ---------------------------------------------------------------------------
// level-count tables with their generator family

inline json counts_to_json(const level_counts& c) {
    json levels = json::array();
    for (const auto& lc : c.levels) {
        json jl;
        jl["m"] = lc.m;
        jl["log_n"] = lc.log_n;
        if (lc.n) jl["n"] = *lc.n;
        if (lc.dbar) jl["dbar"] = *lc.dbar;
        levels.push_back(std::move(jl));
    }
    json j;
    j["levels"] = std::move(levels);
    j["complete"] = c.complete;
    if (c.family) {
        json f;
        if (const auto* ep = std::get_if<example_profile_family>(&*c.family)) {
            f["kind"] = "example-profile";
            f["theta"] = theta_to_json(ep->theta);
            if (ep->p_const) f["p_const"] = *ep->p_const;
            f["p_is_log_m"] = ep->p_is_log_m;
        } else {
            f["kind"] = "full-circles";
            f["m_first"] = std::get<full_circles_family>(*c.family).m_first;
        }
        j["family"] = std::move(f);
    }
    return j;
}

inline level_counts counts_from_json(const json& j) {
    constexpr const char* where = "counts";
    if (!j.is_object()) detail::wire_error("counts: must be an object");
    const json& levels = detail::require_field(j, "levels", where);
    if (!levels.is_array()) detail::wire_error("counts: field \"levels\" must be an array");
    level_counts out;
    for (const json& jl : levels) {
        level_count lc;
        lc.m = detail::require_int(jl, "m", "counts level");
        lc.log_n = detail::require_number(jl, "log_n", "counts level");
        if (auto it = jl.find("n"); it != jl.end()) lc.n = it->get<std::uint64_t>();
        if (auto it = jl.find("dbar"); it != jl.end()) lc.dbar = it->get<double>();
        out.levels.push_back(lc);
    }
    const json& complete = detail::require_field(j, "complete", where);
    if (!complete.is_boolean()) detail::wire_error("counts: field \"complete\" must be a boolean");
    out.complete = complete.get<bool>();
    if (auto it = j.find("family"); it != j.end()) {
        std::string kind = detail::require_field(*it, "kind", "counts family").get<std::string>();
        if (kind == "example-profile") {
            example_profile_family ep;
            ep.theta = theta_from_json(detail::require_field(*it, "theta", "counts family"));
            if (auto p = it->find("p_const"); p != it->end()) ep.p_const = p->get<double>();
            ep.p_is_log_m =
                detail::require_field(*it, "p_is_log_m", "counts family").get<bool>();
            out.family = ep;
        } else if (kind == "full-circles") {
            out.family =
                full_circles_family{detail::require_int(*it, "m_first", "counts family")};
        } else {
            detail::wire_error("counts family: unknown kind \"" + kind + "\"");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// generated sequences: points + declared counts + provenance.  The measured
// profile is recomputed on load, so it can never drift from the points.

inline json generated_to_json(const generated_sequence& g) {
    json j;
    j["format"] = gen_format;
    j["seq"] = sequence_to_json(g.seq);
    j["counts"] = counts_to_json(g.counts);
    j["provenance"] = g.provenance;
    return j;
}

inline generated_sequence generated_from_json(const json& j) {
    constexpr const char* where = "generated sequence";
    if (!j.is_object()) detail::wire_error("generated sequence: top level must be a JSON object");
    const json& fmt = detail::require_field(j, "format", where);
    if (!fmt.is_string() || fmt.get<std::string>() != gen_format)
        detail::wire_error(std::string("generated sequence: field \"format\" must be \"") +
                           gen_format + "\"");
    generated_sequence g;
    g.seq = sequence_from_json(detail::require_field(j, "seq", where));
    g.counts = counts_from_json(detail::require_field(j, "counts", where));
    const json& prov = detail::require_field(j, "provenance", where);
    if (!prov.is_string())
        detail::wire_error("generated sequence: field \"provenance\" must be a string");
    g.provenance = prov.get<std::string>();
    g.measured = build_profile(g.seq);
    return g;
}

// ---------------------------------------------------------------------------
// verdict documents

inline json verdict_to_json(const series_verdict& v) {
    json j;
    j["format"] = verdict_format;
    j["decision"] = decision_name(v.decision);
    j["tier"] = tier_name(v.tier);
    j["horizon"] = v.horizon;
    if (v.tail_bound) j["tail_bound"] = *v.tail_bound;
    return j;
}

inline json expsum_to_json(const expsum_report& r) {
    json grid = json::array();
    for (const auto& g : r.per_gamma) {
        json jg;
        jg["gamma"] = g.gamma;
        jg["decision"] = decision_name(g.verdict.decision);
        jg["tier"] = tier_name(g.verdict.tier);
        jg["log_sum_all"] = g.log_sum_all;
        if (g.log_sum_excluded) jg["log_sum_excluded"] = *g.log_sum_excluded;
        grid.push_back(std::move(jg));
    }
    json j;
    j["format"] = verdict_format;
    j["scale"] = gap_scale_name(r.scale);
    j["gamma_grid"] = std::move(grid);
    j["skipped_levels"] = r.skipped_levels;
    j["certificate"] = r.certificate;
    return j;
}

inline json regime_to_json(const theta_spec& theta, const regime_verdict& rv) {
    json j;
    j["format"] = verdict_format;
    j["theta"] = theta_spec_string(theta);
    j["decision"] = regime_name(rv.regime);
    if (rv.thin_series) j["thin_series"] = verdict_to_json(*rv.thin_series);
    if (rv.thick_series) j["thick_series"] = verdict_to_json(*rv.thick_series);
    if (!rv.note.empty()) j["note"] = rv.note;
    return j;
}

inline json comparison_to_json(const theta_spec& t1, const theta_spec& t2,
                               const class_comparison& cc) {
    json w;
    w["comparable"] = tri_name(cc.weights.comparable);
    w["ratio_to_infinity"] = tri_name(cc.weights.ratio_to_infinity);
    w["rho_ratio_to_infinity"] = tri_name(cc.weights.rho_ratio_to_infinity);
    w["log_rho_gap_bounded"] = tri_name(cc.weights.log_rho_gap_bounded);
    w["ratio_at_horizon"] = cc.weights.ratio_at_horizon;
    w["gap_at_horizon"] = cc.weights.gap_at_horizon;
    if (!cc.weights.note.empty()) w["note"] = cc.weights.note;

    json j;
    j["format"] = verdict_format;
    j["theta1"] = theta_spec_string(t1);
    j["theta2"] = theta_spec_string(t2);
    j["decision"] = class_relation_name(cc.relation);
    j["weights"] = std::move(w);
    if (cc.gate_series) j["gate_series"] = verdict_to_json(*cc.gate_series);
    if (!cc.witness_plan.empty()) j["witness_plan"] = cc.witness_plan;
    j["reason"] = cc.reason;
    return j;
}

// ---------------------------------------------------------------------------
// index-set document: {"L":[...], "N":{"m":count}, "eps":{"m":eps}, ...}
// Counts that exceed exact-integer JSON range ship as {"mant","exp2"}.

namespace detail {

inline json dyadic_count_to_json(const dyadic& d) {
    if (d.mant == 0) return json(0);
    if (d.exp2 >= 0 && d.exp2 < 63) {
        unsigned long long shifted = static_cast<unsigned long long>(d.mant);
        if (d.exp2 == 0 || (shifted >> (63 - d.exp2)) == 0) {
            unsigned long long v = shifted << d.exp2;
            if (v <= (1ull << 53)) return json(v);
        }
    }
    return json{{"mant", d.mant}, {"exp2", d.exp2}};
}

inline json checkpoints_to_json(const std::vector<std::pair<std::int64_t, double>>& cps) {
    json arr = json::array();
    for (const auto& [m, v] : cps) arr.push_back(json::array({m, v}));
    return arr;
}

}  // namespace detail

inline json index_set_to_json(const index_set_with_counts& ix) {
    json n_obj = json::object();
    json eps_obj = json::object();
    for (const auto& [m, d] : ix.counts)
        n_obj[thinlab::detail::fmt_int(m)] = detail::dyadic_count_to_json(d);
    for (const auto& [m, e] : ix.eps) eps_obj[thinlab::detail::fmt_int(m)] = e;

    json blocks = json::array();
    for (const auto& b : ix.blocks) {
        json jb;
        jb["n"] = b.n;
        jb["lo"] = b.lo;
        jb["hi"] = b.hi;
        jb["sum"] = b.sum;
        jb["overshoot"] = b.overshoot;
        blocks.push_back(std::move(jb));
    }

    json j;
    j["format"] = indexset_format;
    j["L"] = ix.L;
    j["N"] = std::move(n_obj);
    j["eps"] = std::move(eps_obj);
    j["blocks"] = std::move(blocks);
    j["pruned"] = ix.pruned;
    j["start_level"] = ix.start_level;
    j["degenerate_constant"] = ix.degenerate_constant;
    j["schedule_status"] = ix.schedule_status;
    j["eps_sum"] = ix.eps_sum;
    j["eps_sq_sum"] = ix.eps_sq_sum;
    j["eps_sq_block_bound"] = ix.eps_sq_block_bound;
    j["eps_checkpoints"] = detail::checkpoints_to_json(ix.eps_checkpoints);
    j["eps_sq_checkpoints"] = detail::checkpoints_to_json(ix.eps_sq_checkpoints);
    j["provenance"] = ix.provenance;
    return j;
}

// ---------------------------------------------------------------------------
// witness-verification document: summatory report + per-point certificate

inline json certificate_to_json(const std::vector<filter_certificate_row>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        json jr;
        jr["k"] = r.k;
        jr["lhs"] = r.lhs;
        jr["rhs"] = r.rhs;
        jr["ok"] = r.ok;
        arr.push_back(std::move(jr));
    }
    return arr;
}

inline json summatory_to_json(const summatory_report& rep) {
    json per = json::object();
    for (const auto& [m, v] : rep.per_annulus) per[thinlab::detail::fmt_int(m)] = v;
    json running = json::array();
    for (const auto& [k, v] : rep.running) running.push_back(json::array({k, v}));
    json j;
    j["total"] = rep.total;
    j["per_annulus"] = std::move(per);
    j["running"] = std::move(running);
    return j;
}

// ---------------------------------------------------------------------------
// classifier document: decision + evidence + replay block

inline json classify_replay(const std::string& theta_str, const classify_options& opts,
                            const std::string& input_desc) {
    json r;
    r["theta"] = theta_str;
    r["gamma_grid"] = opts.gamma_grid;
    r["horizon"] = opts.horizon;
    r["exceptional_c"] = opts.exceptional_c;
    if (opts.cor53_c) r["cor53_c"] = *opts.cor53_c;
    json wits = json::array();
    for (const auto& [name, fn] : opts.witness_candidates) {
        (void)fn;
        wits.push_back(name);
    }
    r["witness_candidates"] = std::move(wits);
    r["input"] = input_desc;
    return r;
}

inline json sequence_verdict_to_json(const sequence_verdict& sv, const json& replay) {
    json ev = json::object();
    if (sv.thin) {
        json t;
        t["witness"] = sv.thin->witness;
        t["sum_total"] = sv.thin->sum.total;
        if (sv.thin->tail_bound) t["tail_bound"] = *sv.thin->tail_bound;
        t["tier"] = tier_name(sv.thin->tier);
        ev["thin"] = std::move(t);
    }
    if (sv.thick) {
        json t;
        t["criterion"] = sv.thick->criterion;
        if (sv.thick->expsum) t["expsum"] = expsum_to_json(*sv.thick->expsum);
        if (sv.thick->level_mass) t["level_mass"] = verdict_to_json(*sv.thick->level_mass);
        json tested = json::array();
        for (const auto& tj : sv.thick->tested_j) {
            json e;
            e["witness"] = tj.witness;
            e["j"] = tj.j;
            e["still_divergent"] = tj.still_divergent;
            tested.push_back(std::move(e));
        }
        t["tested_j"] = std::move(tested);
        t["min_spacing_mass"] = sv.thick->min_spacing_mass;
        t["horizon_limited"] = sv.thick->horizon_limited;
        ev["thick"] = std::move(t);
    }
    json j;
    j["format"] = classify_format;
    j["decision"] = seq_decision_name(sv.decision);
    j["evidence"] = std::move(ev);
    j["paper_criterion"] = sv.paper_criterion;
    if (!sv.note.empty()) j["note"] = sv.note;
    j["replay"] = replay;
    return j;
}

// ---------------------------------------------------------------------------
// plot data: two-column (x, y) text blocks, one block per series

struct plot_series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

inline std::string plotdata(const std::vector<plot_series>& series) {
    std::ostringstream out;
    out << "# " << plot_format << '\n';
    bool first = true;
    for (const auto& s : series) {
        if (!first) out << '\n';
        first = false;
        out << "# series: " << s.name << '\n';
        for (const auto& [x, y] : s.points)
            out << detail::fmt_g17(x) << ' ' << detail::fmt_g17(y) << '\n';
    }
    return out.str();
}

}  // namespace thinlab::io
