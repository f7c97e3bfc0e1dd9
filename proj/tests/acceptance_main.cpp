// Acceptance gate: one numbered criterion per run() block, each a self-contained
// property check with its tolerance pinned at the call site.  Prints PASS/FAIL
// per criterion plus measured values; the exit code is the number of failures.

#include <thinlab/thinlab.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"

using namespace thinlab;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_i(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

struct runner {
    int failed = 0;
    int idx = 0;
    bool ok = true;
    std::vector<std::string> lines;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            lines.push_back("    FAILED: " + what);
        }
    }

    void note(const std::string& s) { lines.push_back("    " + s); }

    template <typename F>
    void run(const char* title, F&& body) {
        ++idx;
        ok = true;
        lines.clear();
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            ok = false;
            lines.push_back(std::string("    FAILED: unexpected exception: ") + e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", idx, title, secs);
        for (const auto& l : lines) std::printf("%s\n", l.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
};

double theta_loglog_ref(double beta, std::int64_t m) {
    // independent rewrite of c * L^0 * log(e+L)^1 with c = -beta
    return -beta * std::log(std::numbers::e + 1.0 + static_cast<double>(m) * std::log(2.0));
}

}  // namespace

int main() {
    runner R;

    // ------------------------------------------------------------------ 1
    R.run("power-weight class hierarchy", [&] {
        const double alphas[] = {0.0, 0.3, 0.7, 0.9};
        for (double a1 : alphas)
            for (double a2 : alphas) {
                const theta_spec t1 = log_power_theta{1.0 - a1, 1.0, 0.0};
                const theta_spec t2 = log_power_theta{1.0 - a2, 1.0, 0.0};
                const auto cc = compare_weight_classes(t1, t2);
                R.expect(cc.relation == class_relation::same_class,
                         "pair alpha=" + fmt(a1) + ", alpha'=" + fmt(a2) + " classified " +
                             class_relation_name(cc.relation) + " instead of SameClass");
                R.expect(cc.weights.comparable == tri::proven,
                         "pair alpha=" + fmt(a1) + ", alpha'=" + fmt(a2) +
                             " lacks a proven constant-factor comparison");
            }
        const theta_spec half = log_power_theta{0.5, 1.0, 0.0};
        const theta_spec unit = constant_theta{1.0};
        const auto cc = compare_weight_classes(half, unit);
        R.expect(cc.relation == class_relation::different_class,
                 "alpha=0.5 versus the constant weight classified " +
                     std::string(class_relation_name(cc.relation)));
        R.expect(cc.witness_plan.find("build_index_set_and_counts") != std::string::npos,
                 "separating pair carries no index-set witness plan");
        R.expect(cc.gate_series && cc.gate_series->decision == decision_t::divergent &&
                     cc.gate_series->tier == tier_t::symbolic_proof,
                 "separating pair's gate series is not a symbolic divergence");
        R.note("16 same-class pairs, 1 separated pair; plan: " +
               (cc.witness_plan.empty() ? std::string("<none>") : cc.witness_plan));
    });

    // ------------------------------------------------------------------ 2
    R.run("reciprocal-weight boundary grid", [&] {
        const double grid[] = {0.0, 0.5, 1.0, 1.5, 2.0};
        for (double a : grid)
            for (double b : grid) {
                const theta_spec th = log_power_theta{1.0, a, b};
                const auto v1 = criterion_thin_exists(th, 1'000'000);
                const auto v2 = criterion_thin_exists(th, 2'000'000);
                const bool want_div = oracle::bertrand_divergent_ref(a, b);
                const auto want = want_div ? decision_t::divergent : decision_t::convergent;
                R.expect(v1.decision == want, "alpha=" + fmt(a) + " beta=" + fmt(b) + " decided " +
                                                  decision_name(v1.decision) + ", reference says " +
                                                  decision_name(want));
                R.expect(v1.tier == tier_t::symbolic_proof,
                         "alpha=" + fmt(a) + " beta=" + fmt(b) + " not decided symbolically");
                R.expect(v2.decision == v1.decision, "alpha=" + fmt(a) + " beta=" + fmt(b) +
                                                         " flipped under horizon doubling");
            }
        R.note("25 weights, decisions exact and horizon-stable");
    });

    // ------------------------------------------------------------------ 3
    R.run("level-weighted density boundary and certified tails", [&] {
        const double betas[] = {0.5, 1.0, 1.5, 2.0};
        for (double b : betas) {
            const auto rho = rho_from_theta(theta_spec{log_power_theta{-b, 0.0, 1.0}});
            const auto v1 = criterion_thick_exists(rho, 1'000'000);
            const auto v2 = criterion_thick_exists(rho, 2'000'000);
            const auto want = b <= 1.0 ? decision_t::divergent : decision_t::convergent;
            R.expect(v1.decision == want,
                     "beta=" + fmt(b) + " decided " + decision_name(v1.decision));
            R.expect(v1.tier == tier_t::symbolic_proof, "beta=" + fmt(b) + " not symbolic");
            if (want == decision_t::convergent) {
                R.expect(v1.tail_bound.has_value(), "beta=" + fmt(b) + " has no certified tail");
                if (v1.tail_bound) {
                    const double gained = v2.partial_sum - v1.partial_sum;
                    R.expect(gained >= 0.0 && gained <= *v1.tail_bound * (1.0 + 1e-9),
                             "beta=" + fmt(b) + " horizon extension gained " + fmt(gained) +
                                 " which exceeds the certified tail " + fmt(*v1.tail_bound));
                    R.note("beta=" + fmt(b) + ": tail bound " + fmt(*v1.tail_bound) +
                           ", measured extension " + fmt(gained));
                }
            }
        }
    });

    // ------------------------------------------------------------------ 4
    R.run("index-set construction invariants", [&] {
        const std::int64_t m_max = 100'000;
        const std::int64_t deep = 90'000;  // 90% point for the Cauchy scan

        tabulated_theta tab;
        for (std::int64_t m = 1; m <= m_max; ++m)
            tab.values[m] = std::log(static_cast<double>(m) + 2.0);
        tab.positive = true;
        tab.nonincreasing_in_t = true;

        struct leg {
            const char* name;
            theta_spec th;
        };
        const leg legs[] = {
            {"constant-one", theta_spec{constant_theta{1.0}}},
            {"iterated-log", theta_spec{log_power_theta{1.0, 0.0, 1.0}}},
            {"tabulated-log(m+2)", theta_spec{tab}},
        };

        for (const auto& lg : legs) {
            const auto ix = build_index_set_and_counts(lg.th, m_max);
            bool sandwich = true, mono_n = true, mono_mass = true;
            dyadic prev_n;
            std::int64_t prev_m = 0;
            bool first = true;
            for (std::int64_t m : ix.L) {
                const dyadic n = ix.counts.at(m);
                const dyadic eps_d = dyadic::from_double(ix.eps.at(m));
                if (!(dyadic::compare(n, eps_d.shifted(m)) <= 0)) sandwich = false;
                if (!(dyadic::compare(eps_d.shifted(m - 1), n) < 0)) sandwich = false;
                if (!first) {
                    if (!(dyadic::compare(prev_n, n) <= 0)) mono_n = false;
                    if (!(dyadic::compare(n.shifted(-m), prev_n.shifted(-prev_m)) <= 0))
                        mono_mass = false;
                }
                prev_n = n;
                prev_m = m;
                first = false;
            }
            R.expect(sandwich, std::string(lg.name) + ": dyadic count sandwich violated");
            R.expect(mono_n, std::string(lg.name) + ": counts not nondecreasing");
            R.expect(mono_mass, std::string(lg.name) + ": dyadic masses not nonincreasing");

            // growth schedule: cumulative eps over L up to each block end beats
            // half the harmonic half-series over the block indices
            bool growth = true;
            std::size_t li = 0;
            double cum_eps = 0.0, cum_harm = 0.0;
            for (const auto& b : ix.blocks) {
                while (li < ix.L.size() && ix.L[li] <= b.hi) cum_eps += ix.eps.at(ix.L[li++]);
                cum_harm += 0.5 / static_cast<double>(b.n);
                if (!(cum_eps >= 0.5 * cum_harm)) growth = false;
            }
            R.expect(growth, std::string(lg.name) + ": growth schedule below half the target");

            // Cauchy scan of the squared-eps increments beyond the 90% point
            double max_inc = 0.0;
            std::int64_t worst_m = 0, tail_levels = 0;
            for (std::int64_t m : ix.L) {
                if (m <= deep) continue;
                ++tail_levels;
                const double inc = ix.eps.at(m) * ix.eps.at(m);
                if (inc > max_inc) {
                    max_inc = inc;
                    worst_m = m;
                }
            }
            R.expect(max_inc < 1e-3, std::string(lg.name) + ": squared-eps increment " +
                                         fmt(max_inc) + " at level " + fmt_i(worst_m) +
                                         " is not Cauchy-small (threshold 1e-3)");
            R.note(std::string(lg.name) + ": |L|=" + fmt_i((long long)ix.L.size()) +
                   ", last level " + fmt_i(ix.L.empty() ? 0 : ix.L.back()) + ", blocks " +
                   fmt_i((long long)ix.blocks.size()) +
                   (ix.degenerate_constant ? ", degenerate flat schedule" : "") +
                   ", tail levels past 90%: " + fmt_i(tail_levels) +
                   ", max squared increment there " + fmt(max_inc));
        }
    });

    // shared between criteria 5 and 6
    block_subset bs;

    // ------------------------------------------------------------------ 5
    R.run("two-density block schedule", [&] {
        const auto rho1 = rho_from_theta(theta_spec{constant_theta{0.0}});
        const auto rho2 = rho_from_theta(theta_spec{log_power_theta{-2.0, 0.0, 1.0}});
        bs = split_series_subset(rho1, rho2, 8, 1000);

        R.expect(bs.measured_c == 1.0,
                 "measured level weight supremum is " + fmt(bs.measured_c) + ", expected 1");
        for (const auto& b : bs.blocks)
            R.expect(b.rho1_sum >= 1.0 && b.rho1_sum <= 1.0 + bs.measured_c,
                     "block j=" + fmt_i(b.j) + " mass " + fmt(b.rho1_sum) + " outside [1, 2]");

        // ratio condition re-verified per level with an independent formula
        for (const auto& b : bs.blocks)
            for (std::int64_t n = b.lo; n <= b.hi; ++n) {
                const double t2 = theta_loglog_ref(2.0, n);
                R.expect(t2 <= 0.0 - static_cast<double>(b.j) * std::log(2.0),
                         "level n=" + fmt_i(n) + " violates the 2^-j ratio margin for j=" +
                             fmt_i(b.j));
            }

        const std::vector<std::int64_t> expected_a = {1, 2, 3, 4, 5, 7, 11, 18};
        R.expect(bs.A == expected_a, "selected levels differ from {1,2,3,4,5,7,11,18}");
        R.expect(bs.rho2_total <= 2.0 * (1.0 + bs.measured_c),
                 "weighted secondary mass " + fmt(bs.rho2_total) + " exceeds 4");
        R.expect(bs.rho2_total <= bs.rho2_certified_bound * (1.0 + 1e-12),
                 "weighted secondary mass exceeds its certified bound " +
                     fmt(bs.rho2_certified_bound));
        R.note("levels {1,2,3,4,5,7,11,18}; secondary mass " + fmt(bs.rho2_total) +
               " <= certified " + fmt(bs.rho2_certified_bound) + " <= 4");
    });

    // ------------------------------------------------------------------ 6
    R.run("full-circle demo over the block levels", [&] {
        if (bs.A.empty()) {
            R.expect(false, "no block levels available from the previous criterion");
            return;
        }
        circle_levels lv;
        for (std::int64_t m : bs.A)
            if (m <= 18) lv.listed.insert(m);
        const auto g = full_circle_sequence(lv, 18, 18);
        R.expect(g.seq.points.size() <= 500'000,
                 "point count " + fmt_i((long long)g.seq.points.size()) + " exceeds the cap");

        const auto rho1 = rho_from_theta(theta_spec{constant_theta{0.0}});
        const auto rho2 = rho_from_theta(theta_spec{log_power_theta{-2.0, 0.0, 1.0}});
        const auto ones = make_constant(std::complex<double>{1.0, 0.0});

        const auto s2 = summatory(ones, rho2, g.seq);
        for (std::int64_t m : lv.listed) {
            const double expected = std::exp(theta_loglog_ref(2.0, m));
            const auto it = s2.per_annulus.find(m);
            const double got = it == s2.per_annulus.end() ? 0.0 : it->second;
            R.expect(std::abs(got - expected) <= 1e-12 * expected,
                     "level m=" + fmt_i(m) + " weighted sum " + fmt(got) + " differs from " +
                         fmt(expected) + " beyond relative 1e-12");
        }

        // each completed block contributes one full unit of primary mass; the
        // 1e-12 slack absorbs only the exp/log roundoff of the per-point terms
        const auto s1 = summatory(ones, rho1, g.seq);
        double cum = 0.0;
        int blocks_done = 0;
        for (std::int64_t m : lv.listed) {
            const auto it = s1.per_annulus.find(m);
            cum += it == s1.per_annulus.end() ? 0.0 : it->second;
            ++blocks_done;
            R.expect(cum >= static_cast<double>(blocks_done) * (1.0 - 1e-12),
                     "after " + fmt_i(blocks_done) + " blocks the primary mass is only " +
                         fmt(cum));
        }

        const auto sep_all = separation_constant(g.seq);
        R.expect(sep_all.separated && sep_all.value > 0.0,
                 "materialized sequence is not separated");

        point_sequence shallow;
        const double floor8 = std::ldexp(1.0, -8);
        for (const auto& p : g.seq.points)
            if (p.delta >= floor8) shallow.points.push_back(p);
        const auto lib = separation_constant(shallow);
        const auto ref = oracle::brute_separation(shallow.points);
        R.expect(std::abs(lib.value - ref.value) <= 1e-12 * std::max(1.0, ref.value),
                 "separation " + fmt(lib.value) + " differs from the all-pairs value " +
                     fmt(ref.value));
        R.note(fmt_i((long long)g.seq.points.size()) + " points; separation " +
               fmt(sep_all.value) + " overall, " + fmt(lib.value) + " on the " +
               fmt_i((long long)shallow.points.size()) + " shallow points (all-pairs " +
               fmt(ref.value) + ")");
    });

    // ------------------------------------------------------------------ 7
    R.run("filter-transform decay certificate", [&] {
        oracle::rng rg(411u);
        const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
        const disk_point a{0.5, 0.0, {}};
        const disk_point c{0.25, 3.141592653589793, {}};
        const std::vector<h_inf_function> funcs = {
            make_constant(std::complex<double>{1.0, 0.0}),
            make_blaschke({a}),
            make_product({make_blaschke({a}), make_blaschke({c})}),
        };

        for (int si = 0; si < 5; ++si) {
            point_sequence seq;
            for (int attempts = 0; attempts < 4000 && seq.points.size() < 160; ++attempts) {
                const disk_point cand = oracle::random_point(rg, 1e-4, 0.95);
                bool far = true;
                for (const auto& q : seq.points)
                    if (pseudo_distance(cand, q) < 0.3) {
                        far = false;
                        break;
                    }
                if (far) seq.points.push_back(cand);
            }
            R.expect(seq.points.size() <= 200, "sequence exceeds 200 points");
            R.expect(oracle::brute_separation(seq.points).value >= 0.3,
                     "sampled sequence is not 0.3-separated");

            for (std::size_t fi = 0; fi < funcs.size(); ++fi) {
                const auto res = blaschke_filter_transform(funcs[fi], th, seq);
                R.expect(res.kept.size() + res.removed.size() == seq.points.size(),
                         "transform lost points");
                for (std::size_t k = 0; k < seq.points.size(); ++k) {
                    const double lhs = eval_log_modulus(res.f1, seq.points[k]);
                    const double rhs = -theta_evaluate(th, seq.points[k].delta);
                    R.expect(lhs <= rhs, "sequence " + fmt_i(si) + ", function " + fmt_i((long long)fi) +
                                             ": point " + fmt_i((long long)k) + " has log-modulus " +
                                             fmt(lhs) + " above the bound " + fmt(rhs));
                }
            }
        }
        R.note("5 sequences x 3 functions rescanned point by point");
    });

    // ------------------------------------------------------------------ 8
    R.run("exceptional-level probe", [&] {
        circle_levels lv;
        for (std::int64_t m = 1; m <= 12; ++m) lv.listed.insert(m);
        const auto g = full_circle_sequence(lv, 12, 12);
        const auto f = make_blaschke({disk_point{0.5, 0.0, {}}});

        std::vector<std::set<std::int64_t>> js;
        bool reached_zero = false;
        double first_zero_c = 0.0;
        for (int k = 0; k <= 10; ++k) {
            const double c = std::ldexp(1.0, k);
            const auto rep = exceptional_indices(f, g.seq, c, gap_scale::dyadic_gap);
            js.push_back(rep.J);
            if (!reached_zero && rep.blaschke_mass == 0.0) {
                reached_zero = true;
                first_zero_c = c;
            }
        }
        for (std::size_t k = 0; k + 1 < js.size(); ++k)
            R.expect(std::includes(js[k].begin(), js[k].end(), js[k + 1].begin(), js[k + 1].end()),
                     "exceptional set at C=2^" + fmt_i((long long)(k + 1)) +
                         " is not contained in the one at C=2^" + fmt_i((long long)k));
        R.expect(reached_zero, "no grid constant drives the exceptional mass to zero");
        if (reached_zero)
            R.note("exceptional mass hits zero at C=" + fmt(first_zero_c) + "; |J| at C=1 is " +
                   fmt_i((long long)js.front().size()));
    });

    // ------------------------------------------------------------------ 9
    R.run("characteristic growth and zero-counting mass", [&] {
        const std::vector<double> rgrid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95,
                                           0.99, 1.0 - std::ldexp(1.0, -8),
                                           1.0 - std::ldexp(1.0, -12), 1.0 - std::ldexp(1.0, -16),
                                           1.0 - std::ldexp(1.0, -20)};
        oracle::rng rg(902u);
        double worst_dip = 0.0, worst_eta_gap = 0.0;
        for (int pi = 0; pi < 10; ++pi) {
            const int nz = 3 + static_cast<int>(rg.pick(18));
            hinf_blaschke b;
            for (int z = 0; z < nz; ++z) {
                double delta = 0.0;
                for (;;) {
                    delta = std::exp(rg.uniform(std::log(0.05), std::log(0.9)));
                    bool clear = true;
                    for (double r : rgrid)
                        if (std::abs((1.0 - delta) - r) < 0.005) clear = false;
                    if (clear) break;
                }
                b.zeros.push_back({delta, rg.uniform(0.0, two_pi), {}});
            }
            const h_inf_function fb{b};

            std::vector<nevanlinna_report> direct, recip;
            for (double r : rgrid) {
                direct.push_back(nevanlinna_T(fb, r, 8192));
                recip.push_back(nevanlinna_T_reciprocal(b, r, 8192));
            }
            for (const auto& d : direct)
                R.expect(d.value == 0.0, "bounded-by-one product has nonzero characteristic " +
                                             fmt(d.value) + " at r=" + fmt(d.r_used));
            for (std::size_t i = 0; i + 1 < recip.size(); ++i) {
                const double dip = recip[i].value - recip[i + 1].value;
                worst_dip = std::max(worst_dip, dip);
                R.expect(dip <= 1e-8 + recip[i].quad_error + recip[i + 1].quad_error,
                         "reciprocal characteristic dips by " + fmt(dip) + " between r=" +
                             fmt(recip[i].r_used) + " and r=" + fmt(recip[i + 1].r_used));
            }

            const auto fine = nevanlinna_T_reciprocal(b, 1.0 - std::ldexp(1.0, -20), 65536);
            const auto eta = eta_measure(b, eta_region{});
            worst_eta_gap = std::max(worst_eta_gap, std::abs(fine.value - eta.value));
            R.expect(std::abs(fine.value - eta.value) <= 1e-6,
                     "zero-counting mass " + fmt(eta.value) +
                         " differs from the near-boundary characteristic " + fmt(fine.value));
        }

        hinf_blaschke single;
        single.zeros.push_back({0.5, 1.0, {}});
        const auto t1 = nevanlinna_T_reciprocal(single, 1.0 - std::ldexp(1.0, -20), 65536);
        R.expect(std::abs(t1.value - std::log(2.0)) <= 1e-6,
                 "single-factor characteristic " + fmt(t1.value) + " misses log 2");
        R.note("worst monotonicity dip " + fmt(worst_dip) + ", worst mass gap " +
               fmt(worst_eta_gap) + ", single-factor error " +
               fmt(std::abs(t1.value - std::log(2.0))));
    });

    // ------------------------------------------------------------------ 10
    R.run("disk geometry invariance and stability", [&] {
        oracle::rng rg(77u);

        // the delta floors keep the mapped points far enough from the boundary
        // that the double-rounded oracle output perturbs d by well under 1e-12
        double worst_inv = 0.0;
        for (int i = 0; i < 10'000; ++i) {
            const disk_point z = oracle::random_point(rg, 0.05, 1.0);
            const disk_point w = oracle::random_point(rg, 0.05, 1.0);
            const disk_point c = oracle::random_point(rg, 0.1, 1.0);
            const double before = pseudo_distance(z, w);
            const double after = pseudo_distance(oracle::mobius_ref(c, z), oracle::mobius_ref(c, w));
            worst_inv = std::max(worst_inv, std::abs(after - before));
        }
        R.expect(worst_inv <= 1e-12,
                 "disk-automorphism invariance drifts by " + fmt(worst_inv));

        const double tiny = std::ldexp(1.0, -45);
        double worst_rel = 0.0;
        for (int k = 5; k <= 55; ++k) {
            const disk_point p{tiny, 0.0, {}};
            const disk_point q{tiny, std::ldexp(1.0, -k), {}};
            const double lib = pseudo_distance(p, q);
            const double ref = oracle::pseudo_distance_ref(p, q);
            worst_rel = std::max(worst_rel, std::abs(lib - ref) / ref);
        }
        for (int i = 0; i < 2000; ++i) {
            const double base = rg.uniform(0.0, 1e-3);
            const double gap = std::exp(rg.uniform(std::log(std::ldexp(1.0, -58)), std::log(1.0)));
            const disk_point p{tiny, base, {}};
            const disk_point q{tiny, base + gap, {}};
            const double lib = pseudo_distance(p, q);
            const double ref = oracle::pseudo_distance_ref(p, q);
            worst_rel = std::max(worst_rel, std::abs(lib - ref) / ref);
        }
        R.expect(worst_rel <= 1e-9, "near-boundary distances drift by relative " + fmt(worst_rel));

        bool axioms = true;
        for (int i = 0; i < 2000; ++i) {
            const disk_point p = oracle::random_point(rg, 1e-6, 1.0);
            const disk_point q = oracle::random_point(rg, 1e-6, 1.0);
            if (pseudo_distance(p, p) != 0.0) axioms = false;
            if (pseudo_distance(p, q) != pseudo_distance(q, p)) axioms = false;
            const double d = pseudo_distance(p, q);
            if (!(d >= 0.0 && d < 1.0)) axioms = false;
            if ((p.delta != q.delta || p.angle != q.angle) && !(d > 0.0)) axioms = false;
        }
        R.expect(axioms, "metric axioms violated on random pairs");
        R.note("invariance drift " + fmt(worst_inv) + ", near-boundary relative drift " +
               fmt(worst_rel));
    });

    // ------------------------------------------------------------------ 11
    R.run("density-profile exponential sums", [&] {
        const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
        const auto rho = rho_from_theta(th);

        // growing density log m, counts taken as bare data (no generator family)
        level_counts grown = example_profile(th, profile_density{{}, true}, 2, 1'000'000);
        grown.family.reset();
        expsum_options opt;
        opt.gammas = {1.0, 10.0, 100.0};
        opt.scale = gap_scale::dyadic_gap;
        opt.horizon = 1'000'000;
        const auto rep = criterion_exponential_sum(grown, rho, opt);
        const double target = std::log(1e3);
        for (const auto& gv : rep.per_gamma) {
            const bool crossed = gv.verdict.log_partial_sum >= target;
            R.expect(crossed && gv.verdict.decision == decision_t::divergent &&
                         gv.verdict.tier == tier_t::numeric_trend,
                     "gamma=" + fmt(gv.gamma) + ": log partial sum " +
                         fmt(gv.verdict.log_partial_sum) + " (decision " +
                         decision_name(gv.verdict.decision) + ", tier " +
                         tier_name(gv.verdict.tier) + ") never exceeds log(1e3)=" + fmt(target));
            R.note("gamma=" + fmt(gv.gamma) + ": log partial sum " +
                   fmt(gv.verdict.log_partial_sum) + ", " + decision_name(gv.verdict.decision) +
                   "/" + tier_name(gv.verdict.tier));
        }

        // constant density 1 with its generator family attached: gamma=4 must
        // close the sum with a certified geometric tail
        const level_counts flat = example_profile(th, profile_density{1.0, false}, 2, 400);
        expsum_options opt2;
        opt2.gammas = {4.0};
        opt2.scale = gap_scale::dyadic_gap;
        opt2.horizon = 1'000'000;
        const auto rep2 = criterion_exponential_sum(flat, rho, opt2);
        const auto& v4 = rep2.per_gamma.front().verdict;
        R.expect(v4.decision == decision_t::convergent && v4.tier == tier_t::symbolic_proof,
                 "gamma=4 on the unit density decided " + std::string(decision_name(v4.decision)) +
                     "/" + tier_name(v4.tier));
        R.expect(v4.tail_bound.has_value(), "gamma=4 convergence carries no certified tail");
        if (v4.tail_bound)
            R.note("gamma=4: partial sum " + fmt(v4.partial_sum) + ", certified tail " +
                   fmt(*v4.tail_bound));
    });

    std::printf("%d of %d criteria passed\n", R.idx - R.failed, R.idx);
    return R.failed;
}
