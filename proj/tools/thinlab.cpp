// thinlab: weight classification, sequence generation/analysis, witness
// verification, and the end-to-end two-weight demo.  Exit codes: 0 decided,
// 2 undecided, 1 error.  All artifacts are deterministic; versions go to
// `<output>.version` sidecars, never into the data.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <thinlab/thinlab.hpp>

namespace {

using namespace thinlab;
using io::json;

std::uint64_t env_budget() {
    if (const char* s = std::getenv("THINLAB_POINT_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(s, &end, 10);
        if (end == s || *end != '\0')
            throw std::runtime_error("THINLAB_POINT_BUDGET must be a nonnegative integer");
        return v;
    }
    return default_point_budget();
}

// "3..6" | "3.." | "4" | comma-joined mix: "3..6,9,12.."
circle_levels parse_levels(const std::string& s) {
    circle_levels out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t next = s.find(',', pos);
        std::string item = s.substr(pos, next == std::string::npos ? next : next - pos);
        if (item.empty()) throw std::runtime_error("levels: empty item in \"" + s + "\"");
        auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.listed.insert(io::detail::parse_int_field(item, "levels"));
        } else {
            std::int64_t lo = io::detail::parse_int_field(item.substr(0, dots), "levels start");
            std::string rest = item.substr(dots + 2);
            if (rest.empty()) {
                if (out.open_from) throw std::runtime_error("levels: only one open range allowed");
                out.open_from = lo;
            } else {
                std::int64_t hi = io::detail::parse_int_field(rest, "levels end");
                if (hi < lo) throw std::runtime_error("levels: range end before start in \"" + item + "\"");
                for (std::int64_t m = lo; m <= hi; ++m) out.listed.insert(m);
            }
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (out.listed.empty() && !out.open_from) throw std::runtime_error("levels: empty level list");
    return out;
}

void emit_doc(const json& j, const std::string& path) {
    std::string text = io::dump_json(j);
    if (path.empty()) {
        std::cout << text;
        return;
    }
    io::write_with_sidecar(path, text);
    std::cout << "wrote " << path << "\n";
}

void emit_plot(const std::vector<io::plot_series>& series, const std::string& path) {
    if (path.empty()) return;
    io::write_with_sidecar(path, io::plotdata(series));
    std::cout << "wrote " << path << "\n";
}

io::plot_series trajectory_series(std::string name, const series_verdict& v) {
    if (v.trajectory_is_log) name += " (log)";
    io::plot_series ps{std::move(name), {}};
    for (const auto& [lvl, val] : v.trajectory)
        ps.points.emplace_back(static_cast<double>(lvl), val);
    return ps;
}

io::plot_series running_series(std::string name, const summatory_report& rep) {
    io::plot_series ps{std::move(name), {}};
    for (const auto& [k, val] : rep.running)
        ps.points.emplace_back(static_cast<double>(k), val);
    return ps;
}

// ---------------------------------------------------------------------------
// weights classify / compare

struct weights_classify_opts {
    std::string theta;
    std::int64_t horizon = 1'000'000;
    std::string out, plot;
};

int run_weights_classify(const weights_classify_opts& o) {
    theta_spec th = io::parse_theta_spec(o.theta);
    regime_verdict rv = weight_regime(th, rho_from_theta(th), o.horizon);
    std::vector<io::plot_series> plots;
    if (rv.thin_series) plots.push_back(trajectory_series("reciprocal-theta partial sums", *rv.thin_series));
    if (rv.thick_series) plots.push_back(trajectory_series("level-weighted rho partial sums", *rv.thick_series));
    emit_plot(plots, o.plot);
    emit_doc(io::regime_to_json(th, rv), o.out);
    return rv.regime == regime_t::undecided ? 2 : 0;
}

struct weights_compare_opts {
    std::string theta1, theta2;
    std::int64_t horizon = 1'000'000;
    std::string out;
};

int run_weights_compare(const weights_compare_opts& o) {
    theta_spec t1 = io::parse_theta_spec(o.theta1);
    theta_spec t2 = io::parse_theta_spec(o.theta2);
    class_comparison cc = compare_weight_classes(t1, t2, o.horizon);
    emit_doc(io::comparison_to_json(t1, t2, cc), o.out);
    return cc.relation == class_relation::undecided ? 2 : 0;
}

// ---------------------------------------------------------------------------
// seq generate

struct gen_common_opts {
    std::string out, profile, gen_out, plot;
    std::uint64_t budget = 0;  // resolved from env at dispatch
};

int emit_generated(const generated_sequence& g, const gen_common_opts& o) {
    if (!o.profile.empty()) {
        io::write_with_sidecar(o.profile, io::profile_to_csv(g.measured));
        std::cout << "wrote " << o.profile << "\n";
    }
    if (!o.gen_out.empty()) {
        io::write_with_sidecar(o.gen_out, io::dump_json(io::generated_to_json(g)));
        std::cout << "wrote " << o.gen_out << "\n";
    }
    std::vector<io::plot_series> plots;
    io::plot_series ns{"per-annulus count N_m", {}};
    io::plot_series ls{"per-annulus mass l_m = N_m 2^-m", {}};
    for (const auto& [m, st] : g.measured.rows) {
        ns.points.emplace_back(static_cast<double>(m), static_cast<double>(st.n));
        ls.points.emplace_back(static_cast<double>(m), st.l);
    }
    plots.push_back(std::move(ns));
    plots.push_back(std::move(ls));
    emit_plot(plots, o.plot);
    emit_doc(io::sequence_to_json(g.seq), o.out);
    return 0;
}

std::vector<spaced_level> parse_spaced_levels(const std::vector<std::string>& items) {
    std::vector<spaced_level> out;
    for (const auto& item : items) {
        auto c1 = item.find(':');
        auto c2 = item.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("spaced level: expected m:n:d, got \"" + item + "\"");
        spaced_level lv;
        lv.m = io::detail::parse_int_field(item.substr(0, c1), "spaced level m");
        std::int64_t n = io::detail::parse_int_field(item.substr(c1 + 1, c2 - c1 - 1), "spaced level n");
        if (n < 1) throw std::runtime_error("spaced level: n must be positive in \"" + item + "\"");
        lv.n = static_cast<std::uint64_t>(n);
        lv.d = io::detail::parse_double_field(item.substr(c2 + 1), "spaced level d");
        out.push_back(lv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// seq analyze

struct analyze_opts {
    std::string in, out, profile, plot;
};

int run_seq_analyze(const analyze_opts& o) {
    point_sequence seq = io::read_sequence_file(o.in);
    annulus_profile prof = build_profile(seq);
    separation_report sep = separation_constant(seq);
    blaschke_sum_report bsum = blaschke_sum(seq);

    json j;
    j["format"] = io::analyze_format;
    j["points"] = seq.points.size();
    json js;
    js["value"] = sep.value;
    js["separated"] = sep.separated;
    if (seq.points.size() >= 2) {
        js["i"] = sep.i;
        js["j"] = sep.j;
    }
    j["separation"] = std::move(js);
    if (seq.claimed_separation) {
        j["claimed_separation"] = *seq.claimed_separation;
        j["claimed_ok"] = sep.value >= *seq.claimed_separation;
    }
    j["blaschke_sum"] = bsum.total;
    json rows = json::array();
    for (const auto& [m, st] : prof.rows) {
        json r;
        r["m"] = m;
        r["n"] = st.n;
        if (st.dbar) r["dbar"] = *st.dbar;
        r["l"] = st.l;
        rows.push_back(std::move(r));
    }
    j["profile"] = std::move(rows);

    if (!o.profile.empty()) {
        io::write_with_sidecar(o.profile, io::profile_to_csv(prof));
        std::cout << "wrote " << o.profile << "\n";
    }
    std::vector<io::plot_series> plots;
    io::plot_series ls{"per-annulus mass l_m", {}};
    for (const auto& [m, st] : prof.rows) ls.points.emplace_back(static_cast<double>(m), st.l);
    plots.push_back(std::move(ls));
    emit_plot(plots, o.plot);
    emit_doc(j, o.out);
    return 0;
}

// ---------------------------------------------------------------------------
// seq classify

struct classify_cli_opts {
    std::string seq_file, profile_file, gen_file;
    std::string theta;
    std::vector<double> gammas;
    std::int64_t horizon = 1'000'000;
    bool complete = false;
    std::vector<std::string> witnesses;
    bool no_default_witnesses = false;
    double exceptional_c = 1.0;
    double cor53_c = 0.0;  // 0 = unset
    std::string out, plot;
};

int run_seq_classify(const classify_cli_opts& o) {
    int sources = (!o.seq_file.empty()) + (!o.profile_file.empty()) + (!o.gen_file.empty());
    if (sources != 1)
        throw std::runtime_error("seq classify: provide exactly one of --seq, --profile, --gen");
    theta_spec th = io::parse_theta_spec(o.theta);

    classify_options opts;
    if (!o.gammas.empty()) opts.gamma_grid = o.gammas;
    opts.horizon = o.horizon;
    opts.exceptional_c = o.exceptional_c;
    if (o.cor53_c > 0.0) opts.cor53_c = o.cor53_c;
    if (!o.no_default_witnesses) opts.witness_candidates = default_witness_candidates();
    for (const auto& spec : o.witnesses)
        opts.witness_candidates.emplace_back(spec, io::parse_witness_spec(spec));

    sequence_verdict sv;
    std::string input_desc;
    point_sequence loaded_seq;
    if (!o.gen_file.empty()) {
        generated_sequence g = io::generated_from_json(json::parse(io::read_text_file(o.gen_file)));
        sv = classify_sequence(g, th, opts);
        input_desc = "gen:" + o.gen_file;
    } else if (!o.seq_file.empty()) {
        loaded_seq = io::read_sequence_file(o.seq_file);
        if (o.complete) {
            level_counts counts = counts_from_profile(build_profile(loaded_seq), true);
            sv = classify_sequence(counts, th, opts, &loaded_seq);
        } else {
            sv = classify_sequence(loaded_seq, th, opts);
        }
        input_desc = "seq:" + o.seq_file;
    } else {
        annulus_profile prof = io::profile_from_csv(io::read_text_file(o.profile_file));
        level_counts counts = counts_from_profile(prof, o.complete);
        sv = classify_sequence(counts, th, opts, nullptr);
        input_desc = "profile:" + o.profile_file;
    }

    std::vector<io::plot_series> plots;
    if (sv.thin) plots.push_back(running_series("witness summatory running sum", sv.thin->sum));
    if (sv.thick && sv.thick->expsum) {
        for (const auto& g : sv.thick->expsum->per_gamma) {
            char name[64];
            std::snprintf(name, sizeof name, "exponential sum gamma=%g", g.gamma);
            plots.push_back(trajectory_series(name, g.verdict));
        }
    }
    emit_plot(plots, o.plot);

    json replay = io::classify_replay(theta_spec_string(th), opts, input_desc);
    emit_doc(io::sequence_verdict_to_json(sv, replay), o.out);
    return sv.decision == seq_decision::undecided ? 2 : 0;
}

// ---------------------------------------------------------------------------
// witness verify

struct witness_cli_opts {
    std::string witness, theta, seq_file;
    std::string out, plot;
};

int run_witness_verify(const witness_cli_opts& o) {
    h_inf_function f = io::parse_witness_spec(o.witness);
    theta_spec th = io::parse_theta_spec(o.theta);
    point_sequence seq = io::read_sequence_file(o.seq_file);

    summatory_report sum = summatory(f, rho_from_theta(th), seq);
    filter_transform_result ft = blaschke_filter_transform(f, th, seq);
    bool all_ok = ft.removed.empty();

    json j;
    j["format"] = io::witness_format;
    j["witness"] = o.witness;
    j["theta"] = theta_spec_string(th);
    j["summatory"] = io::summatory_to_json(sum);
    j["certificate"] = io::certificate_to_json(ft.certificate);
    j["kept"] = ft.kept.size();
    j["removed"] = ft.removed.size();
    j["removed_blaschke_sum"] = ft.removed_blaschke_sum;
    j["decays_everywhere"] = all_ok;

    emit_plot({running_series("summatory running sum", sum)}, o.plot);
    emit_doc(j, o.out);
    return 0;
}

// ---------------------------------------------------------------------------
// demo thm-equiv: two-weight separation pipeline.  Build the index set for
// theta2, place N_m spaced points per chosen level, then certify both sides:
//   thin side   N_m rho2(2^-m) e^{-g/l_m} <= l_m^2  per level (any g >= 2),
//               with sum l_m^2 <= sum_n (block sum)^2 < pi^2/6 closed bound;
//   thick side  N_m rho1(2^-m) e^{-g/l_m} >= l_m from the first level where
//               theta1 >= 2g theta2, while sum l_m >= 1/2 sum eps_m diverges
//               with the harmonic block schedule.

struct demo_opts {
    std::string theta1 = "logpow:1,1,0";
    std::string theta2 = "logpow:1,0,1";
    std::int64_t m_max = 20'000;
    std::int64_t materialize = 14;
    std::vector<double> gammas;
    std::string out, plot, seq_out;
    std::uint64_t budget = 0;
};

int run_demo_thm_equiv(const demo_opts& o) {
    theta_spec t1 = io::parse_theta_spec(o.theta1);
    theta_spec t2 = io::parse_theta_spec(o.theta2);
    std::vector<double> gammas = o.gammas.empty() ? std::vector<double>{0.5, 1.0, 2.0, 4.0} : o.gammas;
    for (double g : gammas)
        if (!(g > 0.0)) throw std::runtime_error("demo: gamma values must be positive");

    index_set_with_counts ix = build_index_set_and_counts(t2, o.m_max);

    // per-level data along L
    struct row {
        std::int64_t m;
        double l, log_l, th1, th2;
    };
    std::vector<row> rows;
    rows.reserve(ix.L.size());
    for (std::int64_t m : ix.L) {
        row r;
        r.m = m;
        r.l = ix.counts.at(m).shifted(-m).to_double();
        r.log_l = std::log(r.l);
        r.th1 = theta_at_level(t1, m);
        r.th2 = theta_at_level(t2, m);
        rows.push_back(r);
    }

    // closed bound on sum of l^2: block sums stay below 1/n, future blocks too
    const int n_last = ix.blocks.empty() ? 1 : ix.blocks.back().n;
    bool blocks_compliant = !ix.degenerate_constant;
    for (const auto& b : ix.blocks)
        if (b.overshoot) blocks_compliant = false;
    const double l2_bound = ix.eps_sq_block_bound + 1.0 / static_cast<double>(n_last);

    json thin_grid = json::array();
    bool any_thin_certified = false;
    for (double g : gammas) {
        std::int64_t violations = 0;
        log_domain_sum partial;
        for (const auto& r : rows) {
            if (r.th2 - g / r.l > r.log_l) ++violations;  // term <= l^2 fails
            partial.add_log(r.log_l + r.th2 - g / r.l);
        }
        bool certified = g >= 2.0 && violations == 0 && blocks_compliant;
        any_thin_certified = any_thin_certified || certified;
        json je;
        je["gamma"] = g;
        je["certified"] = certified;
        je["violations"] = violations;
        je["log_partial_sum"] = partial.log_value();
        if (certified) je["note"] = "every term bounded by l_m^2; squared-mass bound closes the tail";
        thin_grid.push_back(std::move(je));
    }

    json thick_grid = json::array();
    bool all_thick_certified = true;
    for (double g : gammas) {
        std::int64_t m_star = -1;
        std::int64_t violations = 0;
        compensated_sum l_partial;
        for (const auto& r : rows) {
            if (m_star < 0) {
                if (r.th1 >= 2.0 * g * r.th2) m_star = r.m;
                else continue;
            }
            if (r.th1 < g / r.l) ++violations;  // term >= l fails
            l_partial.add(r.l);
        }
        // block index covering m_star: harmonic tail from there on diverges
        int n_star = -1;
        if (m_star >= 0)
            for (const auto& b : ix.blocks)
                if (b.hi >= m_star) {
                    n_star = b.n;
                    break;
                }
        bool certified = m_star >= 0 && violations == 0 && n_star >= 0 && !ix.degenerate_constant;
        all_thick_certified = all_thick_certified && certified;
        json je;
        je["gamma"] = g;
        je["certified"] = certified;
        if (m_star >= 0) je["m_star"] = m_star;
        if (n_star >= 0) je["block_star"] = n_star;
        je["violations"] = violations;
        je["partial_l_sum"] = l_partial.value();
        if (certified)
            je["note"] = "terms dominate l_m beyond m_star; harmonic block schedule diverges";
        thick_grid.push_back(std::move(je));
    }

    // materialize a shallow slice and run the constant witness through both weights
    std::uint64_t budget = o.budget ? o.budget : env_budget();
    generated_sequence gen = materialize_counts(counts_from_index_set(ix), o.materialize, budget);
    h_inf_function one = make_constant({1.0, 0.0});
    summatory_report s2 = summatory(one, rho_from_theta(t2), gen.seq);
    summatory_report s1 = summatory(one, rho_from_theta(t1), gen.seq);

    json j;
    j["format"] = io::demo_format;
    j["theta1"] = theta_spec_string(t1);
    j["theta2"] = theta_spec_string(t2);
    j["m_max"] = o.m_max;
    json jix;
    jix["levels"] = ix.L.size();
    jix["start_level"] = ix.start_level;
    jix["blocks"] = ix.blocks.size();
    jix["eps_sum"] = ix.eps_sum;
    jix["eps_sq_sum"] = ix.eps_sq_sum;
    jix["eps_sq_block_bound"] = ix.eps_sq_block_bound;
    jix["degenerate_constant"] = ix.degenerate_constant;
    jix["schedule_status"] = ix.schedule_status;
    j["index_set"] = std::move(jix);
    json jthin;
    jthin["gamma_grid"] = std::move(thin_grid);
    jthin["l2_bound"] = l2_bound;
    jthin["l2_bound_valid"] = blocks_compliant;
    j["thin_side"] = std::move(jthin);
    j["thick_side"] = json{{"gamma_grid", std::move(thick_grid)}};
    json jm;
    jm["points"] = gen.seq.points.size();
    jm["materialize"] = o.materialize;
    jm["rho2_summatory_total"] = s2.total;
    jm["rho1_summatory_total"] = s1.total;
    j["materialized"] = std::move(jm);
    bool decided = any_thin_certified && all_thick_certified;
    j["decided"] = decided;

    if (!o.seq_out.empty()) {
        io::write_with_sidecar(o.seq_out, io::dump_json(io::sequence_to_json(gen.seq)));
        std::cout << "wrote " << o.seq_out << "\n";
    }
    std::vector<io::plot_series> plots;
    plots.push_back(running_series("rho2 summatory running sum", s2));
    plots.push_back(running_series("rho1 summatory running sum", s1));
    io::plot_series l2s{"cumulative l_m^2 along the index set", {}};
    io::plot_series l1s{"cumulative l_m along the index set", {}};
    compensated_sum a2, a1;
    for (const auto& r : rows) {
        a2.add(r.l * r.l);
        a1.add(r.l);
        l2s.points.emplace_back(static_cast<double>(r.m), a2.value());
        l1s.points.emplace_back(static_cast<double>(r.m), a1.value());
    }
    plots.push_back(std::move(l2s));
    plots.push_back(std::move(l1s));
    emit_plot(plots, o.plot);
    emit_doc(j, o.out);
    return decided ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin/thick sequence toolkit"};
    app.require_subcommand(1);
    int exit_code = 0;

    // ---- weights
    auto* weights = app.add_subcommand("weights", "weight-function classification");
    weights->require_subcommand(1);

    weights_classify_opts wc;
    auto* wcls = weights->add_subcommand("classify", "regime of a single weight");
    wcls->add_option("--theta", wc.theta, "weight spec (logpow:c,alpha,beta | const:c | table:@file.csv)")->required();
    wcls->add_option("--horizon", wc.horizon, "series horizon")->check(CLI::PositiveNumber);
    wcls->add_option("-o,--out", wc.out, "write verdict JSON here");
    wcls->add_option("--plot", wc.plot, "write partial-sum trajectories here");
    wcls->callback([&] { exit_code = run_weights_classify(wc); });

    weights_compare_opts wcmp;
    auto* wcm = weights->add_subcommand("compare", "relation between two weight classes");
    wcm->add_option("--theta1", wcmp.theta1, "first weight spec")->required();
    wcm->add_option("--theta2", wcmp.theta2, "second weight spec")->required();
    wcm->add_option("--horizon", wcmp.horizon, "series horizon")->check(CLI::PositiveNumber);
    wcm->add_option("-o,--out", wcmp.out, "write verdict JSON here");
    wcm->callback([&] { exit_code = run_weights_compare(wcmp); });

    // ---- seq
    auto* seq = app.add_subcommand("seq", "sequence generation and analysis");
    seq->require_subcommand(1);

    auto* gen = seq->add_subcommand("generate", "deterministic sequence generators");
    gen->require_subcommand(1);

    auto add_gen_common = [](CLI::App* cmd, gen_common_opts& g) {
        cmd->add_option("-o,--out", g.out, "write sequence JSON here");
        cmd->add_option("--profile", g.profile, "write measured profile CSV here");
        cmd->add_option("--gen-out", g.gen_out, "write full generator document here");
        cmd->add_option("--plot", g.plot, "write per-annulus plot data here");
        cmd->add_option("--budget", g.budget, "materialized point cap (default THINLAB_POINT_BUDGET or 2000000)");
    };

    struct {
        std::string levels;
        std::int64_t materialize = 20, count_horizon = 200;
        gen_common_opts common;
    } fc;
    auto* gfc = gen->add_subcommand("full-circles", "2^m equally spaced points at delta 2^-m");
    gfc->add_option("--levels", fc.levels, "levels, e.g. 3..6 or 4,6,8 or 10.. (open)")->required();
    gfc->add_option("--materialize", fc.materialize, "emit points for levels up to this depth");
    gfc->add_option("--count-horizon", fc.count_horizon, "declare counts up to this depth for open ranges");
    add_gen_common(gfc, fc.common);
    gfc->callback([&] {
        std::uint64_t budget = fc.common.budget ? fc.common.budget : env_budget();
        exit_code = emit_generated(
            full_circle_sequence(parse_levels(fc.levels), fc.materialize, fc.count_horizon, budget),
            fc.common);
    });

    struct {
        std::vector<std::string> levels;
        bool no_floor = false;
        gen_common_opts common;
    } sc;
    auto* gsc = gen->add_subcommand("spaced-circles", "chosen counts with verified spacing");
    gsc->add_option("--level", sc.levels, "level spec m:n:d, repeatable")->required();
    gsc->add_flag("--no-dyadic-floor", sc.no_floor, "do not clamp the spacing to [2^-m, 1]");
    add_gen_common(gsc, sc.common);
    gsc->callback([&] {
        std::uint64_t budget = sc.common.budget ? sc.common.budget : env_budget();
        exit_code = emit_generated(
            spaced_circle_sequence(parse_spaced_levels(sc.levels), !sc.no_floor, budget), sc.common);
    });

    struct {
        std::string theta, levels;
        double p = 0.0;
        bool p_logm = false;
        std::int64_t materialize = 16;
        gen_common_opts common;
    } ep;
    auto* gep = gen->add_subcommand("example-profile", "density-driven counts p_m 2^m / (theta_m + log m)");
    gep->add_option("--theta", ep.theta, "weight spec")->required();
    gep->add_option("--p", ep.p, "constant density p");
    gep->add_flag("--p-logm", ep.p_logm, "density p_m = log m");
    gep->add_option("--levels", ep.levels, "finite level range, e.g. 2..40")->required();
    gep->add_option("--materialize", ep.materialize, "emit points for levels up to this depth");
    add_gen_common(gep, ep.common);
    gep->callback([&] {
        circle_levels lv = parse_levels(ep.levels);
        if (lv.open_from || lv.listed.empty())
            throw std::runtime_error("example-profile: levels must be a finite range");
        profile_density pd;
        if (ep.p_logm) pd.log_m = true;
        else if (ep.p > 0.0) pd.constant = ep.p;
        else throw std::runtime_error("example-profile: provide --p > 0 or --p-logm");
        level_counts counts = example_profile(io::parse_theta_spec(ep.theta), pd,
                                              *lv.listed.begin(), *lv.listed.rbegin());
        std::uint64_t budget = ep.common.budget ? ep.common.budget : env_budget();
        exit_code = emit_generated(materialize_counts(counts, ep.materialize, budget), ep.common);
    });

    struct {
        std::string theta;
        int j_max = 8;
        std::int64_t horizon = 100'000, materialize = 16;
        gen_common_opts common;
    } cx;
    auto* gcx = gen->add_subcommand("counterexample",
                                    "single circles along levels where rho shrinks geometrically");
    gcx->add_option("--theta", cx.theta, "weight spec with rho(t)/t -> 0, e.g. logpow:-2,0,1")->required();
    gcx->add_option("--j-max", cx.j_max, "number of geometric halvings to certify");
    gcx->add_option("--horizon", cx.horizon, "level search horizon");
    gcx->add_option("--materialize", cx.materialize, "emit points for levels up to this depth");
    add_gen_common(gcx, cx.common);
    gcx->callback([&] {
        std::uint64_t budget = cx.common.budget ? cx.common.budget : env_budget();
        counterexample_result res = small_rho_counterexample(
            rho_from_theta(io::parse_theta_spec(cx.theta)), cx.j_max, cx.horizon, cx.materialize,
            budget);
        exit_code = emit_generated(res.gen, cx.common);
    });

    struct {
        std::string theta;
        std::int64_t m_max = 100'000, materialize = 0;
        std::string seq_out;
        gen_common_opts common;
    } ixo;
    auto* gix = gen->add_subcommand("index-set", "level set and counts driven by a weight");
    gix->add_option("--theta", ixo.theta, "weight spec (reciprocal gives the level masses)")->required();
    gix->add_option("--m-max", ixo.m_max, "deepest level considered")->check(CLI::PositiveNumber);
    gix->add_option("--materialize", ixo.materialize, "also emit spaced points up to this depth");
    gix->add_option("--seq-out", ixo.seq_out, "write the materialized sequence JSON here");
    add_gen_common(gix, ixo.common);
    gix->callback([&] {
        index_set_with_counts ix = build_index_set_and_counts(io::parse_theta_spec(ixo.theta), ixo.m_max);
        if (ixo.materialize > 0 || !ixo.seq_out.empty() || !ixo.common.profile.empty() ||
            !ixo.common.gen_out.empty()) {
            std::uint64_t budget = ixo.common.budget ? ixo.common.budget : env_budget();
            std::int64_t depth = ixo.materialize > 0 ? ixo.materialize : 14;
            generated_sequence g = materialize_counts(counts_from_index_set(ix), depth, budget);
            gen_common_opts sub = ixo.common;
            sub.out = ixo.seq_out;  // index-set JSON owns -o; points go to --seq-out
            if (!sub.out.empty() || !sub.profile.empty() || !sub.gen_out.empty() || !sub.plot.empty())
                emit_generated(g, sub);
        }
        emit_doc(io::index_set_to_json(ix), ixo.common.out);
        exit_code = 0;
    });

    analyze_opts an;
    auto* sa = seq->add_subcommand("analyze", "profile, separation, and mass of a sequence file");
    sa->add_option("input", an.in, "sequence JSON file")->required();
    sa->add_option("-o,--out", an.out, "write analysis JSON here");
    sa->add_option("--profile", an.profile, "write profile CSV here");
    sa->add_option("--plot", an.plot, "write per-annulus plot data here");
    sa->callback([&] { exit_code = run_seq_analyze(an); });

    classify_cli_opts cl;
    auto* scl = seq->add_subcommand("classify", "thin/thick evidence for a sequence");
    scl->add_option("--seq", cl.seq_file, "sequence JSON input");
    scl->add_option("--profile", cl.profile_file, "profile CSV input");
    scl->add_option("--gen", cl.gen_file, "generator document input");
    scl->add_option("--theta", cl.theta, "weight spec")->required();
    scl->add_option("--gamma", cl.gammas, "gamma grid values (repeatable)");
    scl->add_option("--horizon", cl.horizon, "series horizon")->check(CLI::PositiveNumber);
    scl->add_flag("--complete", cl.complete, "treat the input counts as the whole sequence");
    scl->add_option("--witness", cl.witnesses, "extra witness spec to try (repeatable)");
    scl->add_flag("--no-default-witnesses", cl.no_default_witnesses, "only try f == 1 and --witness entries");
    scl->add_option("--exceptional-c", cl.exceptional_c, "constant for the sampled exceptional sets");
    scl->add_option("--cor53-c", cl.cor53_c, "spacing-mass hypothesis constant");
    scl->add_option("-o,--out", cl.out, "write verdict JSON here");
    scl->add_option("--plot", cl.plot, "write evidence trajectories here");
    scl->callback([&] { exit_code = run_seq_classify(cl); });

    // ---- witness
    auto* wit = app.add_subcommand("witness", "bounded-function witnesses");
    wit->require_subcommand(1);
    witness_cli_opts wv;
    auto* wvf = wit->add_subcommand("verify", "summatory sum and decay certificate on a sequence");
    wvf->add_option("--witness", wv.witness,
                    "witness spec (const:re,im | blaschke:@zeros.json | pow:<spec>^m | prod:[s;s])")
        ->required();
    wvf->add_option("--theta", wv.theta, "weight spec")->required();
    wvf->add_option("--seq", wv.seq_file, "sequence JSON input")->required();
    wvf->add_option("-o,--out", wv.out, "write verification JSON here");
    wvf->add_option("--plot", wv.plot, "write the running summatory sum here");
    wvf->callback([&] { exit_code = run_witness_verify(wv); });

    // ---- demo
    auto* demo = app.add_subcommand("demo", "end-to-end demonstrations");
    demo->require_subcommand(1);
    demo_opts dm;
    auto* dte = demo->add_subcommand("thm-equiv", "two-weight separation pipeline");
    dte->add_option("--theta1", dm.theta1, "larger weight (defaults to logpow:1,1,0)");
    dte->add_option("--theta2", dm.theta2, "smaller weight (defaults to logpow:1,0,1)");
    dte->add_option("--m-max", dm.m_max, "index-set horizon")->check(CLI::PositiveNumber);
    dte->add_option("--materialize", dm.materialize, "emit points for levels up to this depth");
    dte->add_option("--gamma", dm.gammas, "gamma grid values (repeatable)");
    dte->add_option("--budget", dm.budget, "materialized point cap");
    dte->add_option("-o,--out", dm.out, "write demo report JSON here");
    dte->add_option("--seq-out", dm.seq_out, "write the materialized sequence JSON here");
    dte->add_option("--plot", dm.plot, "write trend trajectories here");
    dte->callback([&] { exit_code = run_demo_thm_equiv(dm); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;  // --help exits 0; usage errors exit 1
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
