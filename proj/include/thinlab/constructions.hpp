#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "thinlab/disk_geometry.hpp"
#include "thinlab/dyadic.hpp"
#include "thinlab/levels.hpp"
#include "thinlab/series_engine.hpp"
#include "thinlab/summation.hpp"
#include "thinlab/weights.hpp"

namespace thinlab {

// ---------------------------------------------------------------------------
// Index-set construction: blocks of consecutive levels whose epsilon-sums
// follow the 1/(2n)..1/n schedule, a running-max prune, and the exact count
// recursion N_k = min(2^{k-m} N_m, floor(2^k eps_k)).
// ---------------------------------------------------------------------------

struct schedule_block {
    int n = 0;
    std::int64_t lo = 0, hi = 0;  // inclusive level range
    double sum = 0.0;             // sum of eps over the block
    bool overshoot = false;       // sum failed to stay below 1/n
};

struct index_set_with_counts {
    std::vector<std::int64_t> L;
    std::map<std::int64_t, dyadic> counts;
    std::map<std::int64_t, double> eps;
    std::vector<schedule_block> blocks;
    std::vector<std::int64_t> pruned;
    std::int64_t start_level = 0;
    bool degenerate_constant = false;  // flat epsilon: schedule kept as flagged single levels
    std::string schedule_status;
    double eps_sum = 0.0;
    double eps_sq_sum = 0.0;
    double eps_sq_block_bound = 0.0;  // sum over blocks of (block sum)^2, a bound when compliant
    std::vector<std::pair<std::int64_t, double>> eps_checkpoints;
    std::vector<std::pair<std::int64_t, double>> eps_sq_checkpoints;
    std::string provenance;
};

inline index_set_with_counts build_index_set_and_counts(const theta_spec& theta2,
                                                        std::int64_t m_max) {
    if (m_max < 2) throw std::invalid_argument("build_index_set_and_counts: m_max must be at least 2");
    // positivity (throws naming the first offending level) and sample table
    const std::vector<double> eps_all = dyadic_samples(theta2, m_max);  // eps_all[m-1] = 1/theta_m
    auto eps_at = [&](std::int64_t m) { return eps_all[static_cast<std::size_t>(m - 1)]; };
    for (std::int64_t m = 1; m + 1 <= m_max; ++m)
        if (eps_at(m + 1) > eps_at(m))
            throw std::domain_error(
                "build_index_set_and_counts: theta must be nonincreasing in t, but the dyadic "
                "samples increase between levels m=" +
                detail::fmt_int(m) + " and m=" + detail::fmt_int(m + 1));
    {
        // the gate needs its own minimum horizon; a tiny m_max should fall
        // through to the start-level scan's clearer error below
        const auto thin = criterion_thin_exists(theta2, std::max<std::int64_t>(m_max, 4));
        if (thin.decision == decision_t::convergent)
            throw std::domain_error(
                "build_index_set_and_counts: the reciprocal-weight series converges, so the "
                "construction has no divergent mass to schedule");
    }

    index_set_with_counts out;

    // start where floor(2^m eps_m) >= 2 first becomes possible
    const dyadic two{1, 1};
    std::int64_t start = 0;
    for (std::int64_t m = 1; m <= m_max; ++m) {
        if (dyadic::compare(dyadic::from_double(eps_at(m)).shifted(m), two) >= 0) {
            start = m;
            break;
        }
    }
    if (start == 0)
        throw std::domain_error(
            "build_index_set_and_counts: horizon too small, 2^m/theta(2^-m) never reaches 2 below "
            "m_max=" +
            detail::fmt_int(m_max));
    out.start_level = start;

    // block schedule
    std::int64_t p = start;
    int n = 1;
    bool degenerate = false;
    std::string status;
    while (p <= m_max) {
        const double hi_target = 1.0 / n;
        const double lo_target = 0.5 / n;
        if (!degenerate && eps_at(p) >= hi_target) {
            if (eps_at(p) == eps_at(m_max)) {
                // flat from here on: no horizon would ever admit a compliant
                // block, so fall back to flagged single-level blocks
                degenerate = true;
            } else {
                std::int64_t q = p;
                while (q <= m_max && eps_at(q) >= hi_target) ++q;
                if (q > m_max) {
                    status = "schedule exhausted at block " + detail::fmt_int(n) +
                             ": epsilon floor " + detail::fmt_real(eps_at(m_max)) +
                             " never drops below 1/" + detail::fmt_int(n);
                    break;
                }
                p = q;
            }
        }
        compensated_sum bs;
        std::int64_t q = p;
        bool closed = false;
        while (q <= m_max) {
            bs.add(eps_at(q));
            if (bs.value() > lo_target) {
                closed = true;
                break;
            }
            ++q;
        }
        if (!closed) {
            status = "schedule exhausted at block " + detail::fmt_int(n) +
                     ": remaining mass below 1/(2n)";
            break;
        }
        const double s = bs.value();
        out.blocks.push_back({n, p, q, s, !(s < hi_target)});
        p = q + 1;
        ++n;
    }
    if (status.empty()) status = "schedule ran to m_max";
    out.schedule_status = status;
    out.degenerate_constant = degenerate;
    if (out.blocks.empty())
        throw std::domain_error("build_index_set_and_counts: no block fits below m_max=" +
                                detail::fmt_int(m_max));

    // running-max prune over the blocked levels: keep m iff 2^m eps_m strictly
    // exceeds every earlier value
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : out.blocks) {
        for (std::int64_t m = b.lo; m <= b.hi; ++m) {
            const double logw = static_cast<double>(m) * ln2 + std::log(eps_at(m));
            if (logw > best) {
                best = logw;
                out.L.push_back(m);
            } else {
                out.pruned.push_back(m);
            }
        }
    }

    // exact count recursion along the survivors
    compensated_sum es, es2;
    dyadic prev_n;
    std::int64_t prev_m = 0;
    bool first = true;
    for (std::int64_t m : out.L) {
        const double e = eps_at(m);
        const dyadic cap = dyadic::floor_scaled(e, m);
        dyadic n_val = cap;
        if (!first) n_val = dyadic::min(prev_n.shifted(m - prev_m), cap);
        out.counts.emplace(m, n_val);
        out.eps.emplace(m, e);
        prev_n = n_val;
        prev_m = m;
        first = false;
        es.add(e);
        es2.add(e * e);
        if (detail::at_checkpoint(m)) {
            out.eps_checkpoints.emplace_back(m, es.value());
            out.eps_sq_checkpoints.emplace_back(m, es2.value());
        }
    }
    out.eps_sum = es.value();
    out.eps_sq_sum = es2.value();
    compensated_sum bb;
    for (const auto& b : out.blocks) bb.add(b.sum * b.sum);
    out.eps_sq_block_bound = bb.value();

    out.provenance = "index-set theta=" + theta_spec_string(theta2) + " m_max=" +
                     detail::fmt_int(m_max) + " start=" + detail::fmt_int(start) + " blocks=" +
                     detail::fmt_int(static_cast<long long>(out.blocks.size())) +
                     (degenerate ? " degenerate-constant" : "") + " (" + status + ")";
    return out;
}

// Level-count view of an index set (a horizon-truncated slice of the infinite
// construction, hence never marked complete).  Exact counts survive as long
// as they fit an integer; deeper levels keep only the log.
inline level_counts counts_from_index_set(const index_set_with_counts& ix) {
    level_counts out;
    out.complete = false;
    for (const auto& [m, d] : ix.counts) {
        level_count lc;
        lc.m = m;
        lc.log_n = d.log2_value() * ln2;
        if (d.fits_uint64()) lc.n = d.to_uint64();
        out.levels.push_back(lc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Block subset of the integers along which the rho1-mass accumulates in
// near-unit blocks while rho2 is geometrically suppressed.
// ---------------------------------------------------------------------------

struct ratio_block {
    int j = 0;
    std::int64_t lo = 0, hi = 0;  // inclusive
    double rho1_sum = 0.0;
};

struct block_subset {
    std::vector<ratio_block> blocks;
    std::vector<std::int64_t> A;
    double rho1_total = 0.0;
    double rho2_total = 0.0;
    double measured_c = 0.0;           // sup over A of 2^n rho1(2^-n)
    double rho2_certified_bound = 0.0; // sum_j 2^-j (1 + C) with the declared C
    std::string provenance;
};

inline block_subset split_series_subset(const rho_spec& rho1, const rho_spec& rho2, int j_max,
                                        std::int64_t n_max) {
    if (j_max < 1) throw std::invalid_argument("split_series_subset: j_max must be positive");
    if (n_max < 2) throw std::invalid_argument("split_series_subset: n_max must be at least 2");
    {
        const auto thick = criterion_thick_exists(rho1, std::min<std::int64_t>(n_max, 1'000'000));
        if (thick.decision != decision_t::divergent)
            throw std::domain_error(
                "split_series_subset: the level-weighted rho1 series must be provably divergent (" +
                std::string(decision_name(thick.decision)) + " at this horizon)");
    }
    {
        const auto cmp = compare_weights(rho1.theta, rho2.theta);
        if (cmp.rho_ratio_to_infinity == tri::refuted)
            throw std::domain_error(
                "split_series_subset: rho1/rho2 does not tend to infinity (" + cmp.note + ")");
    }
    const double c_declared = rho1.dominated_by_ct ? *rho1.dominated_by_ct : 0.0;

    auto th1 = [&](std::int64_t n) { return theta_at_level(rho1.theta, n); };
    auto th2 = [&](std::int64_t n) { return theta_at_level(rho2.theta, n); };

    block_subset out;
    std::int64_t pos = 1;
    for (int j = 1; j <= j_max; ++j) {
        const double margin = static_cast<double>(j) * ln2;  // rho2 <= 2^-j rho1, in logs
        // open the block at the first admissible level
        while (pos <= n_max && !(th2(pos) <= th1(pos) - margin)) ++pos;
        if (pos > n_max)
            throw std::domain_error("split_series_subset: horizon exhausted after " +
                                    detail::fmt_int(j - 1) + " of " + detail::fmt_int(j_max) +
                                    " blocks (no admissible level below n_max=" +
                                    detail::fmt_int(n_max) + ")");
        ratio_block b;
        b.j = j;
        b.lo = pos;
        compensated_sum bs;
        bool closed = false;
        while (pos <= n_max) {
            if (!(th2(pos) <= th1(pos) - margin)) {
                // admissibility lost mid-block: restart beyond the violation
                ++pos;
                b.lo = pos;
                bs = compensated_sum{};
                continue;
            }
            const double t1 = th1(pos);
            bs.add(t1 < -745.0 ? 0.0 : std::exp(t1));
            if (bs.value() >= 1.0) {
                b.hi = pos;
                b.rho1_sum = bs.value();
                closed = true;
                ++pos;
                break;
            }
            ++pos;
        }
        if (!closed)
            throw std::domain_error("split_series_subset: horizon exhausted after " +
                                    detail::fmt_int(j - 1) + " of " + detail::fmt_int(j_max) +
                                    " blocks (block " + detail::fmt_int(j) +
                                    " never reached unit mass below n_max=" +
                                    detail::fmt_int(n_max) + ")");
        out.blocks.push_back(b);
    }

    compensated_sum t1_total, t2_total;
    for (const auto& b : out.blocks) {
        for (std::int64_t n = b.lo; n <= b.hi; ++n) {
            out.A.push_back(n);
            const double u1 = std::exp(th1(n));
            t1_total.add(u1);
            t2_total.add(std::exp(th2(n)));
            out.measured_c = std::max(out.measured_c, u1);
        }
    }
    out.rho1_total = t1_total.value();
    out.rho2_total = t2_total.value();
    out.rho2_certified_bound = (1.0 + c_declared) * (1.0 - std::ldexp(1.0, -j_max));
    out.provenance = "split-series rho1=" + theta_spec_string(rho1.theta) + " rho2=" +
                     theta_spec_string(rho2.theta) + " j_max=" + detail::fmt_int(j_max) +
                     " n_max=" + detail::fmt_int(n_max);
    return out;
}

// ---------------------------------------------------------------------------
// Circle generators.
// ---------------------------------------------------------------------------

struct generated_sequence {
    point_sequence seq;        // materialized points only
    annulus_profile measured;  // profile of the materialized points
    level_counts counts;       // declared counts for every level, incl. beyond materialization
    std::string provenance;
};

inline std::uint64_t default_point_budget() { return 2'000'000; }

namespace detail {

inline double circle_angle(std::uint64_t j, std::uint64_t n) {
    return two_pi * (static_cast<double>(j) / static_cast<double>(n));
}

inline void append_circle(std::vector<disk_point>& out, std::int64_t m, std::uint64_t n) {
    const double delta = std::ldexp(1.0, static_cast<int>(-m));
    for (std::uint64_t j = 0; j < n; ++j) {
        disk_point p;
        p.delta = delta;
        p.angle = circle_angle(j, n);
        p.gen = origin_tag{m, j};
        out.push_back(p);
    }
}

// chord between adjacent points of n equally spaced points at radius 1-2^-m
inline double circle_chord(std::int64_t m, double n) {
    const double r = 1.0 - std::ldexp(1.0, static_cast<int>(-m));
    return 2.0 * r * std::sin(std::numbers::pi / n);
}

inline level_count declared_full_circle_level(std::int64_t m) {
    level_count lc;
    lc.m = m;
    if (m <= 62) {
        lc.n = std::uint64_t{1} << m;
        lc.log_n = std::log(static_cast<double>(*lc.n));
    } else {
        lc.log_n = static_cast<double>(m) * ln2;
    }
    if (m >= 3) {  // N >= 6 needed for a trimmed mean
        const double chord = circle_chord(m, std::ldexp(1.0, static_cast<int>(m)));
        if (chord > 0.0) lc.dbar = chord;
    }
    return lc;
}

inline void merge_measured_levels(level_counts& counts, const annulus_profile& measured) {
    for (auto& lc : counts.levels) {
        auto it = measured.rows.find(lc.m);
        if (it == measured.rows.end()) continue;
        const auto& st = it->second;
        lc.n = st.n;
        lc.log_n = std::log(static_cast<double>(st.n));
        lc.dbar = st.dbar;
    }
}

}  // namespace detail

struct circle_levels {
    std::set<std::int64_t> listed;
    std::optional<std::int64_t> open_from;  // declared counts for every m >= open_from
};

// Full circles of 2^m equally spaced points at delta = 2^-m.  Levels at or
// below m_materialize become explicit points (budget-guarded); deeper levels
// are emitted as declared counts only, which is all any criterion consumes.
inline generated_sequence full_circle_sequence(const circle_levels& levels,
                                               std::int64_t m_materialize,
                                               std::int64_t count_horizon,
                                               std::uint64_t budget = default_point_budget()) {
    for (std::int64_t m : levels.listed)
        if (m < 0) throw std::invalid_argument("full_circle_sequence: levels must be nonnegative");
    if (levels.open_from) {
        if (*levels.open_from < 0)
            throw std::invalid_argument("full_circle_sequence: levels must be nonnegative");
        if (count_horizon < *levels.open_from)
            throw std::invalid_argument(
                "full_circle_sequence: count horizon lies below the open level range");
    }

    std::set<std::int64_t> all = levels.listed;
    if (levels.open_from)
        for (std::int64_t m = *levels.open_from; m <= count_horizon; ++m) all.insert(m);

    std::uint64_t need = 0;
    for (std::int64_t m : all) {
        if (m > m_materialize) continue;
        if (m >= 63 || (need += (std::uint64_t{1} << m)) > budget)
            throw std::domain_error(
                "full_circle_sequence: point budget exceeded materializing level m=" +
                detail::fmt_int(m) + " (budget " + detail::fmt_int(static_cast<long long>(budget)) +
                " points); lower the materialization depth or raise the budget");
    }

    generated_sequence g;
    for (std::int64_t m : all)
        if (m <= m_materialize)
            detail::append_circle(g.seq.points, m, std::uint64_t{1} << m);
    g.measured = build_profile(g.seq);

    for (std::int64_t m : all) g.counts.levels.push_back(detail::declared_full_circle_level(m));
    detail::merge_measured_levels(g.counts, g.measured);
    g.counts.complete = !levels.open_from.has_value();
    if (levels.open_from) g.counts.family = full_circles_family{*levels.open_from};

    g.provenance = "full-circles levels=" +
                   detail::fmt_int(static_cast<long long>(levels.listed.size())) +
                   (levels.open_from ? " open-from=" + detail::fmt_int(*levels.open_from) : "") +
                   " materialize<=" + detail::fmt_int(m_materialize) + " horizon=" +
                   detail::fmt_int(count_horizon);
    return g;
}

struct spaced_level {
    std::int64_t m = 1;
    std::uint64_t n = 1;
    double d = 0.0;  // required minimal chordal spacing within the level
};

// N_m equally spaced points on the circle of radius 1-2^-m with a verified
// chordal spacing floor.  enforce_dyadic_floor additionally requires
// 2^-m <= d <= 1 per level.
inline generated_sequence spaced_circle_sequence(const std::vector<spaced_level>& levels,
                                                 bool enforce_dyadic_floor,
                                                 std::uint64_t budget = default_point_budget()) {
    std::set<std::int64_t> seen;
    std::uint64_t need = 0;
    for (const auto& lv : levels) {
        if (lv.m < 1)
            throw std::invalid_argument("spaced_circle_sequence: levels must satisfy m >= 1");
        if (!seen.insert(lv.m).second)
            throw std::invalid_argument("spaced_circle_sequence: duplicate level m=" +
                                        detail::fmt_int(lv.m));
        if (lv.n < 1) throw std::invalid_argument("spaced_circle_sequence: counts must be positive");
        if (!(lv.d > 0.0))
            throw std::invalid_argument("spaced_circle_sequence: spacing must be positive at m=" +
                                        detail::fmt_int(lv.m));
        const double r = 1.0 - std::ldexp(1.0, static_cast<int>(-lv.m));
        const double circumference = two_pi * r;
        if (static_cast<double>(lv.n) * lv.d > circumference)
            throw std::domain_error("spaced_circle_sequence: infeasible level m=" +
                                    detail::fmt_int(lv.m) + ": N*d = " +
                                    detail::fmt_real(static_cast<double>(lv.n) * lv.d) +
                                    " exceeds the circumference " + detail::fmt_real(circumference));
        if (enforce_dyadic_floor) {
            const double floor_d = std::ldexp(1.0, static_cast<int>(-lv.m));
            if (lv.d < floor_d || lv.d > 1.0)
                throw std::domain_error("spaced_circle_sequence: spacing at m=" +
                                        detail::fmt_int(lv.m) + " must lie in [2^-m, 1], got " +
                                        detail::fmt_real(lv.d));
        }
        if (lv.n >= 2) {
            const double chord = detail::circle_chord(lv.m, static_cast<double>(lv.n));
            if (chord < lv.d)
                throw std::domain_error("spaced_circle_sequence: requested spacing unreachable at m=" +
                                        detail::fmt_int(lv.m) + ": equal spacing gives chord " +
                                        detail::fmt_real(chord) + " < d = " + detail::fmt_real(lv.d));
        }
        need += lv.n;
        if (need > budget)
            throw std::domain_error("spaced_circle_sequence: point budget exceeded at level m=" +
                                    detail::fmt_int(lv.m));
    }

    generated_sequence g;
    for (const auto& lv : levels) detail::append_circle(g.seq.points, lv.m, lv.n);
    g.measured = build_profile(g.seq);
    for (const auto& lv : levels) {
        auto it = g.measured.rows.find(lv.m);
        if (it != g.measured.rows.end() && it->second.dbar && *it->second.dbar < lv.d)
            throw std::runtime_error("spaced_circle_sequence: measured trimmed spacing " +
                                     detail::fmt_real(*it->second.dbar) + " fell below d at m=" +
                                     detail::fmt_int(lv.m));
    }
    g.counts = counts_from_profile(g.measured, /*complete=*/true);
    g.provenance = "spaced-circles levels=" +
                   detail::fmt_int(static_cast<long long>(levels.size())) +
                   (enforce_dyadic_floor ? " dyadic-floor" : "");
    return g;
}

// ---------------------------------------------------------------------------
// Counterexample levels: dyadic radii along which rho/t is geometrically
// small while each full circle still carries unit Blaschke mass.
// ---------------------------------------------------------------------------

struct counterexample_result {
    std::vector<std::int64_t> m_levels;  // chosen levels, gaps >= 2
    std::vector<double> ratio_values;    // rho(2^-m)/2^-m at each level
    double ratio_sum = 0.0;
    double certified_bound = 0.0;  // sum over j of 2^-j
    double blaschke_per_level = 1.0;
    generated_sequence gen;
};

inline counterexample_result small_rho_counterexample(const rho_spec& rho, int j_max,
                                                      std::int64_t horizon,
                                                      std::int64_t m_materialize,
                                                      std::uint64_t budget = default_point_budget()) {
    if (j_max < 1) throw std::invalid_argument("small_rho_counterexample: j_max must be positive");
    counterexample_result out;
    std::int64_t prev = -1;
    compensated_sum rs;
    for (int j = 1; j <= j_max; ++j) {
        const double bound = -static_cast<double>(j) * ln2;  // rho/t <= 2^-j in logs
        std::int64_t m = std::max<std::int64_t>(prev + 2, 1);
        while (m <= horizon && !(theta_at_level(rho.theta, m) <= bound)) ++m;
        if (m > horizon)
            throw std::domain_error(
                "small_rho_counterexample: certification failure, no dyadic level below horizon " +
                detail::fmt_int(horizon) + " has rho(t)/t <= 2^-" + detail::fmt_int(j));
        out.m_levels.push_back(m);
        const double ratio = std::exp(theta_at_level(rho.theta, m));
        out.ratio_values.push_back(ratio);
        rs.add(ratio);
        prev = m;
    }
    out.ratio_sum = rs.value();
    out.certified_bound = 1.0 - std::ldexp(1.0, -j_max);

    circle_levels lv;
    lv.listed.insert(out.m_levels.begin(), out.m_levels.end());
    out.gen = full_circle_sequence(lv, m_materialize, 0, budget);
    out.gen.provenance = "counterexample rho=" + theta_spec_string(rho.theta) + " j_max=" +
                         detail::fmt_int(j_max) + "; " + out.gen.provenance;
    return out;
}

// ---------------------------------------------------------------------------
// Count profiles N_m = max(1, ceil(p_m 2^m / (theta_m + log m))).
// ---------------------------------------------------------------------------

struct profile_density {
    std::optional<double> constant;
    bool log_m = false;
};

inline level_counts example_profile(const theta_spec& th, const profile_density& p,
                                    std::int64_t m_lo, std::int64_t m_hi) {
    if (static_cast<bool>(p.constant) == p.log_m)
        throw std::invalid_argument("example_profile: density must be a constant or log m, not both");
    if (p.constant && !(*p.constant > 0.0))
        throw std::invalid_argument("example_profile: density constant must be positive");
    if (m_lo < 1 || m_hi < m_lo)
        throw std::invalid_argument("example_profile: level range must satisfy 1 <= m_lo <= m_hi");

    level_counts out;
    out.complete = false;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
        const double theta_m = theta_at_level(th, m);
        if (!(theta_m > 0.0))
            throw std::domain_error("example_profile: " +
                                    detail::fmt_level_value("theta", m, theta_m) +
                                    " is not positive");
        const double pm = p.log_m ? std::log(static_cast<double>(m)) : *p.constant;
        const double denom = theta_m + std::log(static_cast<double>(m));
        level_count lc;
        lc.m = m;
        if (m <= 900) {
            const double x = pm * std::ldexp(1.0, static_cast<int>(m)) / denom;
            double nn = std::ceil(x);
            if (!(nn >= 1.0)) nn = 1.0;
            if (nn < 9.0e18) {
                lc.n = static_cast<std::uint64_t>(nn);
                lc.log_n = std::log(nn);
                if (*lc.n >= 6) {
                    const double chord = detail::circle_chord(m, nn);
                    if (chord > 0.0) lc.dbar = chord;
                }
            } else {
                lc.log_n = std::log(pm) + static_cast<double>(m) * ln2 - std::log(denom);
            }
        } else {
            lc.log_n = std::log(pm) + static_cast<double>(m) * ln2 - std::log(denom);
        }
        out.levels.push_back(lc);
    }
    example_profile_family fam;
    fam.theta = th;
    fam.p_const = p.constant;
    fam.p_is_log_m = p.log_m;
    out.family = fam;
    return out;
}

// Materialize the explicit-count shallow levels of a profile as equally
// spaced circles with the dyadic spacing floor d = 2^-m, keeping the deep
// declared counts (and family metadata) intact.
inline generated_sequence materialize_counts(const level_counts& counts,
                                             std::int64_t m_materialize,
                                             std::uint64_t budget = default_point_budget()) {
    std::vector<spaced_level> lv;
    for (const auto& lc : counts.levels) {
        if (lc.m > m_materialize || !lc.n || *lc.n == 0) continue;
        spaced_level s;
        s.m = lc.m;
        s.n = *lc.n;
        s.d = std::ldexp(1.0, static_cast<int>(-lc.m));
        lv.push_back(s);
    }
    generated_sequence g = spaced_circle_sequence(lv, /*enforce_dyadic_floor=*/true, budget);
    level_counts merged = counts;
    detail::merge_measured_levels(merged, g.measured);
    g.counts = std::move(merged);
    g.provenance = "materialized-profile levels<=" + detail::fmt_int(m_materialize) + "; " +
                   g.provenance;
    return g;
}

}  // namespace thinlab
