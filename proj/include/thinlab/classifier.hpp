#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "thinlab/constructions.hpp"
#include "thinlab/disk_geometry.hpp"
#include "thinlab/levels.hpp"
#include "thinlab/series_engine.hpp"
#include "thinlab/weights.hpp"
#include "thinlab/witnesses.hpp"

namespace thinlab {

// ---------------------------------------------------------------------------
// Weight regime: does the weight admit thin sequences, thick sequences, both?
// ---------------------------------------------------------------------------

enum class regime_t { all_thick_side, all_thin_side, mixed, undecided };

inline const char* regime_name(regime_t r) {
    switch (r) {
        case regime_t::all_thick_side: return "AllThickSide";
        case regime_t::all_thin_side: return "AllThinSide";
        case regime_t::mixed: return "Mixed";
        default: return "Undecided";
    }
}

struct regime_verdict {
    regime_t regime = regime_t::undecided;
    std::optional<series_verdict> thin_series;   // reciprocal-weight level sum
    std::optional<series_verdict> thick_series;  // level-weighted rho sum
    std::string note;
};

namespace detail {

struct linear_lower {
    bool proven = false;
    double c1 = 0.0;
    std::string note;
};

// rho(t) >= c1 * t, i.e. theta bounded below, certified symbolically.
inline linear_lower rho_linear_lower(const theta_spec& th) {
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        if (lp->c >= 0.0) return {true, 1.0, "theta nonnegative"};
        if (lp->alpha == 0.0 && lp->beta == 0.0)
            return {true, std::exp(lp->c), "theta constant"};
        return {false, 0.0, "theta tends to -infinity, no linear lower bound"};
    }
    if (const auto* ct = std::get_if<constant_theta>(&th))
        return {true, std::exp(ct->c), "theta constant"};
    return {false, 0.0, "tabulated weight cannot certify a bound at every t"};
}

}  // namespace detail

inline regime_verdict weight_regime(const theta_spec& theta, const rho_spec& rho,
                                    std::int64_t horizon = 1'000'000) {
    regime_verdict rv;
    try {
        rv.thin_series = criterion_thin_exists(theta, horizon);
    } catch (const std::exception& e) {
        rv.note += std::string("thin-existence criterion unavailable: ") + e.what() + "; ";
    }
    try {
        rv.thick_series = criterion_thick_exists(rho, horizon);
    } catch (const std::exception& e) {
        rv.note += std::string("thick-existence criterion unavailable: ") + e.what() + "; ";
    }
    const bool thin_conv = rv.thin_series && rv.thin_series->decision == decision_t::convergent &&
                           rv.thin_series->tier != tier_t::numeric_trend;
    const bool thick_conv = rv.thick_series && rv.thick_series->decision == decision_t::convergent &&
                            rv.thick_series->tier != tier_t::numeric_trend;
    const bool thin_div = rv.thin_series && rv.thin_series->decision == decision_t::divergent;
    bool thick_div = rv.thick_series && rv.thick_series->decision == decision_t::divergent;
    // When theta stays bounded below, rho dominates a multiple of the linear
    // weight, and thick sequences for the linear weight (whose level-weighted
    // mass sums 1 per level) stay thick under any larger weight.
    if (!thick_conv && !thick_div) {
        if (const auto ll = detail::rho_linear_lower(theta); ll.proven) {
            series_verdict v;
            v.decision = decision_t::divergent;
            v.tier = tier_t::symbolic_proof;
            v.horizon = horizon;
            v.partial_sum = ll.c1 * static_cast<double>(horizon);
            v.log_partial_sum = std::log(v.partial_sum);
            v.note = "thick side by domination of the linear weight (" + ll.note + ")";
            rv.thick_series = v;
            rv.note += "thick existence via domination of the linear weight; ";
            thick_div = true;
        }
    }
    if (thin_conv)
        rv.regime = regime_t::all_thick_side;
    else if (thick_conv)
        rv.regime = regime_t::all_thin_side;
    else if (thin_div && thick_div)
        rv.regime = regime_t::mixed;
    else
        rv.regime = regime_t::undecided;
    return rv;
}

// ---------------------------------------------------------------------------
// Class comparison for a pair of weights, with a construction plan whenever
// the classes are provably different.
// ---------------------------------------------------------------------------

enum class class_relation { same_class, different_class, undecided };

inline const char* class_relation_name(class_relation r) {
    switch (r) {
        case class_relation::same_class: return "SameClass";
        case class_relation::different_class: return "DifferentClass";
        default: return "Undecided";
    }
}

struct class_comparison {
    class_relation relation = class_relation::undecided;
    comparison_report weights;
    std::optional<series_verdict> gate_series;  // the series criterion that gated the plan
    std::string witness_plan;                   // construction pipeline when different
    std::string reason;
};

inline class_comparison compare_weight_classes(const theta_spec& t1, const theta_spec& t2,
                                               std::int64_t horizon = 1'000'000) {
    class_comparison cc;
    cc.weights = compare_weights(t1, t2);

    if (cc.weights.comparable == tri::proven) {
        cc.relation = class_relation::same_class;
        cc.reason = "weights agree up to constant factors";
        return cc;
    }
    if (cc.weights.log_rho_gap_bounded == tri::proven) {
        cc.relation = class_relation::same_class;
        cc.reason = "log-densities differ by a bounded amount, so the density ratio is pinched";
        return cc;
    }

    std::string blockers;
    if (cc.weights.ratio_to_infinity == tri::proven) {
        std::optional<series_verdict> thin2;
        std::string err;
        try {
            thin2 = criterion_thin_exists(t2, horizon);
        } catch (const std::exception& e) {
            err = e.what();
        }
        if (thin2 && thin2->decision == decision_t::divergent &&
            thin2->tier != tier_t::numeric_trend) {
            cc.relation = class_relation::different_class;
            cc.gate_series = thin2;
            cc.witness_plan =
                "build_index_set_and_counts on the smaller weight, then spaced_circle_sequence "
                "over the resulting levels and counts";
            cc.reason = "density ratio grows without bound and the smaller weight's "
                        "reciprocal level sum provably diverges";
            return cc;
        }
        blockers += "ratio growth proven but the reciprocal-sum gate for the smaller weight is " +
                    std::string(thin2 ? decision_name(thin2->decision) : ("unavailable: " + err)) +
                    "; ";
        if (thin2) cc.gate_series = thin2;
    }
    if (cc.weights.rho_ratio_to_infinity == tri::proven) {
        rho_spec r1 = rho_from_theta(t1);
        if (r1.dominated_by_ct) {
            std::optional<series_verdict> thick1;
            std::string err;
            try {
                thick1 = criterion_thick_exists(r1, horizon);
            } catch (const std::exception& e) {
                err = e.what();
            }
            if (thick1 && thick1->decision == decision_t::divergent &&
                thick1->tier != tier_t::numeric_trend) {
                cc.relation = class_relation::different_class;
                cc.gate_series = thick1;
                cc.witness_plan =
                    "split_series_subset on the density pair, then full_circle_sequence over "
                    "the selected levels";
                cc.reason = "density ratio rho1/rho2 grows without bound with rho1 linearly "
                            "dominated and its level sum provably divergent";
                return cc;
            }
            blockers += "rho-ratio growth proven but the level-sum gate for the larger density is " +
                        std::string(thick1 ? decision_name(thick1->decision)
                                           : ("unavailable: " + err)) +
                        "; ";
            if (!cc.gate_series && thick1) cc.gate_series = thick1;
        } else {
            blockers += "rho-ratio growth proven but no linear domination constant was "
                        "established for the larger density (" + r1.validation_note + "); ";
        }
    }
    if (blockers.empty())
        blockers = "no comparability or growth certificate available (" + cc.weights.note + ")";
    cc.relation = class_relation::undecided;
    cc.reason = blockers;
    return cc;
}

// ---------------------------------------------------------------------------
// Per-sequence classification.
// ---------------------------------------------------------------------------

enum class seq_decision { thin_witnessed, thick_indicated, undecided };

inline const char* seq_decision_name(seq_decision d) {
    switch (d) {
        case seq_decision::thin_witnessed: return "ThinWitnessed";
        case seq_decision::thick_indicated: return "ThickIndicated";
        default: return "Undecided";
    }
}

struct witness_evidence {
    std::string witness;  // textual spec of the winning function
    summatory_report sum;
    std::optional<double> tail_bound;  // mass beyond the materialized points
    tier_t tier = tier_t::numeric_trend;
};

struct tested_exceptional {
    std::string witness;
    std::vector<std::int64_t> j;
    bool still_divergent = false;
};

struct thick_evidence {
    std::string criterion;  // wire token of the decisive route
    std::optional<expsum_report> expsum;
    std::optional<series_verdict> level_mass;  // cor5.3 route: sum of N_m 2^-m
    std::vector<tested_exceptional> tested_j;
    double min_spacing_mass = 0.0;  // min over tested annuli of N_m * dbar_m
    bool horizon_limited = true;
};

struct sequence_verdict {
    seq_decision decision = seq_decision::undecided;
    std::optional<witness_evidence> thin;
    std::optional<thick_evidence> thick;
    std::string paper_criterion;  // "prop2.3a" | "cor5.2a" | "cor5.3" | "witness"
    std::string note;
};

struct classify_options {
    std::vector<double> gamma_grid{0.5, 1.0, 2.0, 4.0};
    std::vector<std::pair<std::string, h_inf_function>> witness_candidates;  // f == 1 always tried
    std::int64_t horizon = 1'000'000;
    std::optional<double> cor53_c;  // spacing-mass hypothesis constant; measured min when absent
    double exceptional_c = 1.0;     // constant for the sampled exceptional sets
};

namespace detail {

// Mass of the declared levels beyond the materialized points, plus an
// analytic tail beyond the declared horizon; a valid summatory bound for any
// witness with sup-norm at most 1.  Requires either complete counts (tail 0)
// or a family whose level masses are known.
inline std::optional<double> unseen_mass_bound(const level_counts& counts,
                                               const theta_spec& theta,
                                               const std::set<std::int64_t>& materialized) {
    compensated_sum declared;
    std::int64_t deepest = 0;
    for (const auto& lc : counts.levels) {
        deepest = std::max(deepest, lc.m);
        if (materialized.count(lc.m)) continue;
        const double lt = lc.log_n - static_cast<double>(lc.m) * ln2 + theta_at_level(theta, lc.m);
        declared.add(lt < -745.0 ? 0.0 : std::exp(lt));
    }
    if (counts.complete) return declared.value();
    if (!counts.family) return std::nullopt;
    if (std::holds_alternative<full_circles_family>(*counts.family)) {
        // every deeper level carries mass exp(theta_m)
        const auto analysis = analyze_exp_theta(theta);
        if (analysis.dec != decision_t::convergent) return std::nullopt;
        const auto tail = exp_theta_tail(theta, deepest);
        if (!tail) return std::nullopt;
        return declared.value() + *tail;
    }
    const auto& fam = std::get<example_profile_family>(*counts.family);
    // level mass <= (p_m/(theta_m + log m) + 2^-m) e^{theta_m}; try to close a
    // doubling-block tail (fails whenever the masses do not vanish)
    auto u = [&fam](std::int64_t m) {
        double tm;
        try {
            tm = theta_at_level(fam.theta, m);
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double pm = fam.p_is_log_m ? std::log(static_cast<double>(m))
                                         : (fam.p_const ? *fam.p_const : 1.0);
        const double l = pm / (tm + std::log(static_cast<double>(m))) +
                         std::ldexp(1.0, static_cast<int>(std::max<std::int64_t>(-1074, -m)));
        const double e = tm > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(tm);
        return l * e;
    };
    const auto tail = doubling_block_tail(u, std::max<std::int64_t>(deepest, 2));
    if (!tail) return std::nullopt;
    return declared.value() + *tail;
}

}  // namespace detail

// Small default family of bounded witnesses to try alongside f == 1.
inline std::vector<std::pair<std::string, h_inf_function>> default_witness_candidates() {
    std::vector<std::pair<std::string, h_inf_function>> out;
    disk_point a1{0.5, 0.0, {}};
    disk_point a2{0.25, std::numbers::pi, {}};
    out.emplace_back("blaschke:a(1/2,0)", make_blaschke({a1}));
    out.emplace_back("pow:blaschke:a(1/2,0)^8", make_power(make_blaschke({a1}), 8));
    out.emplace_back("prod:[b(1/2,0);b(1/4,pi)]",
                     make_product({make_blaschke({a1}), make_blaschke({a2})}));
    return out;
}

// Core classification over declared counts plus optional materialized points.
inline sequence_verdict classify_sequence(const level_counts& counts, const theta_spec& theta,
                                          const classify_options& opts = {},
                                          const point_sequence* pts = nullptr) {
    sequence_verdict sv;
    const rho_spec rho = rho_from_theta(theta);

    std::set<std::int64_t> materialized;
    annulus_profile prof;
    if (pts) {
        prof = build_profile(*pts);
        for (const auto& [m, st] : prof.rows)
            if (st.n > 0) materialized.insert(m);
    }

    // ---- (i) spacing-mass fast path -------------------------------------
    bool thick_proved = false;
    {
        const auto lb = detail::rho_linear_lower(theta);
        double min_mass = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const auto& lc : counts.levels) {
            if (!lc.n || *lc.n < 6 || !lc.dbar) continue;
            any = true;
            min_mass = std::min(min_mass, static_cast<double>(*lc.n) * *lc.dbar);
        }
        const double c_req = opts.cor53_c.value_or(any ? min_mass : 0.0);
        if (lb.proven && any && c_req > 0.0 && min_mass >= c_req) {
            // decisive series: sum of N_m 2^-m over the tested levels; only a
            // family-level certificate can push it past a numeric trend
            if (counts.family && std::holds_alternative<full_circles_family>(*counts.family)) {
                series_verdict mass;
                mass.decision = decision_t::divergent;
                mass.tier = tier_t::symbolic_proof;
                mass.horizon = opts.horizon;
                compensated_sum s;
                for (const auto& lc : counts.levels)
                    if (lc.n)
                        s.add(std::ldexp(static_cast<double>(*lc.n),
                                         static_cast<int>(std::max<std::int64_t>(-1074, -lc.m))));
                mass.partial_sum = s.value();
                mass.note = "every level of the family carries unit mass N_m 2^-m = 1";
                thick_evidence ev;
                ev.criterion = "cor5.3";
                ev.level_mass = mass;
                ev.min_spacing_mass = min_mass;
                ev.horizon_limited = true;
                sv.thick = std::move(ev);
                sv.paper_criterion = "cor5.3";
                thick_proved = true;
            } else {
                sv.note += "spacing-mass hypotheses hold on the tested levels but the level "
                           "mass has no family certificate; ";
            }
        } else if (!lb.proven) {
            sv.note += "spacing-mass fast path unavailable: " + lb.note + "; ";
        }
    }

    // ---- (ii) exponential-sum criteria over the gamma grid ---------------
    if (!thick_proved && !counts.levels.empty()) {
        for (gap_scale scale : {gap_scale::dyadic_gap, gap_scale::mean_spacing}) {
            expsum_options eo;
            eo.gammas = opts.gamma_grid;
            eo.scale = scale;
            eo.horizon = opts.horizon;
            std::optional<expsum_report> rep;
            try {
                rep = criterion_exponential_sum(counts, rho, eo);
            } catch (const std::exception& e) {
                sv.note += std::string(gap_scale_name(scale)) + " criterion unavailable: " +
                           e.what() + "; ";
                continue;
            }
            bool all_div = !rep->per_gamma.empty();
            bool all_proof = true;
            for (const auto& gv : rep->per_gamma) {
                if (gv.verdict.decision != decision_t::divergent) all_div = false;
                if (gv.verdict.tier == tier_t::numeric_trend) all_proof = false;
            }
            if (all_div && all_proof) {
                thick_evidence ev;
                ev.criterion = scale == gap_scale::dyadic_gap ? "prop2.3a" : "cor5.2a";
                ev.expsum = std::move(*rep);
                ev.horizon_limited = true;
                // sample the exceptional-set quantifier over the witness pool
                if (pts) {
                    std::vector<std::pair<std::string, h_inf_function>> pool;
                    pool.emplace_back("const:1,0", make_constant({1.0, 0.0}));
                    for (const auto& wc : opts.witness_candidates) pool.push_back(wc);
                    for (const auto& [label, f] : pool) {
                        tested_exceptional tj;
                        tj.witness = label;
                        const auto ex = exceptional_indices(f, *pts, opts.exceptional_c, scale);
                        tj.j.assign(ex.J.begin(), ex.J.end());
                        expsum_options eo2 = eo;
                        eo2.exclude = std::set<std::int64_t>(ex.J.begin(), ex.J.end());
                        const auto rep2 = criterion_exponential_sum(counts, rho, eo2);
                        tj.still_divergent = true;
                        for (const auto& gv : rep2.per_gamma)
                            if (gv.verdict.decision != decision_t::divergent)
                                tj.still_divergent = false;
                        ev.tested_j.push_back(std::move(tj));
                    }
                } else {
                    sv.note += "exceptional-set quantifier sampled only when points are "
                               "materialized; ";
                }
                sv.thick = std::move(ev);
                sv.paper_criterion = sv.thick->criterion;
                thick_proved = true;
                break;
            }
            if (all_div && !all_proof)
                sv.note += std::string("thick-trend under ") + gap_scale_name(scale) +
                           ": every gamma diverges numerically but without a certificate; ";
        }
    }

    // ---- (iii) witness search --------------------------------------------
    std::optional<witness_evidence> thin_found;
    {
        std::vector<std::pair<std::string, h_inf_function>> pool;
        pool.emplace_back("const:1,0", make_constant({1.0, 0.0}));
        for (const auto& wc : opts.witness_candidates) pool.push_back(wc);
        std::optional<double> unseen;
        bool unseen_known = false;
        for (const auto& [label, f] : pool) {
            if (syntactically_zero(f)) continue;
            witness_evidence ev;
            ev.witness = label;
            if (pts) ev.sum = summatory(f, rho, *pts);
            if (!unseen_known) {
                unseen = detail::unseen_mass_bound(counts, theta, materialized);
                unseen_known = true;
            }
            if (!unseen) continue;  // no certifiable tail: this pool cannot conclude
            ev.tail_bound = unseen;
            ev.tier = *unseen == 0.0 ? tier_t::symbolic_proof : tier_t::monotone_tail_bound;
            thin_found = std::move(ev);
            break;  // first certified witness wins; f == 1 is tried first
        }
        if (!thin_found && counts.levels.empty() && (!pts || pts->points.empty())) {
            witness_evidence ev;
            ev.witness = "const:1,0";
            ev.tail_bound = 0.0;
            ev.tier = tier_t::symbolic_proof;
            thin_found = std::move(ev);
            sv.note += "empty sequence: the weighted sum is vacuously finite; ";
        }
        if (!thin_found && !unseen)
            sv.note += "no certifiable bound on the unseen levels (truncated sample without "
                       "family metadata); ";
    }

    if (thick_proved && thin_found && thin_found->tier != tier_t::numeric_trend)
        throw std::logic_error(
            "classify_sequence: a proof-tier thick criterion and a certified thin witness "
            "fired on the same input");

    if (thick_proved) {
        sv.decision = seq_decision::thick_indicated;
    } else if (thin_found) {
        sv.decision = seq_decision::thin_witnessed;
        sv.thin = std::move(thin_found);
        sv.paper_criterion = "witness";
    } else {
        sv.decision = seq_decision::undecided;
    }
    return sv;
}

inline sequence_verdict classify_sequence(const point_sequence& seq, const theta_spec& theta,
                                          const classify_options& opts = {}) {
    // bare points are a truncated sample: counts incomplete, no family
    const annulus_profile prof = build_profile(seq);
    const level_counts counts = counts_from_profile(prof, /*complete=*/false);
    return classify_sequence(counts, theta, opts, &seq);
}

inline sequence_verdict classify_sequence(const generated_sequence& gen, const theta_spec& theta,
                                          const classify_options& opts = {}) {
    return classify_sequence(gen.counts, theta, opts, &gen.seq);
}

}  // namespace thinlab
