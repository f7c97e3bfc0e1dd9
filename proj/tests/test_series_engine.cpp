#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <thinlab/constructions.hpp>
#include <thinlab/series_engine.hpp>

#include "oracles.hpp"

using namespace thinlab;

TEST_CASE("bertrand scale verdicts") {
    const auto h = classify_bertrand(1.0, 0.0, 100000);
    CHECK(h.decision == decision_t::divergent);
    CHECK(h.tier == tier_t::symbolic_proof);
    CHECK(oracle::bertrand_divergent_ref(1.0, 0.0));

    const auto sq = classify_bertrand(2.0, 0.0, 100000);
    CHECK(sq.decision == decision_t::convergent);
    REQUIRE(sq.tail_bound);
    CHECK(*sq.tail_bound == Catch::Approx(oracle::integral_tail_msq(1e5)).epsilon(1e-12));
    CHECK_FALSE(oracle::bertrand_divergent_ref(2.0, 0.0));

    const auto lg = classify_bertrand(1.0, 2.0, 100000);
    CHECK(lg.decision == decision_t::convergent);
    REQUIRE(lg.tail_bound);
    CHECK(*lg.tail_bound == Catch::Approx(1.0 / std::log(1e5)).epsilon(1e-12));

    CHECK(classify_bertrand(1.0, 1.0, 10000).decision == decision_t::divergent);
    CHECK(classify_bertrand(1.0, 1.0001, 10000).decision == decision_t::convergent);
    CHECK(classify_bertrand(0.5, 5.0, 10000).decision == decision_t::divergent);
}

TEST_CASE("bertrand boundary agrees with the condensation rule on a grid") {
    for (double a : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (double b : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            const auto v = classify_bertrand(a, b, 4096);
            const bool div = oracle::bertrand_divergent_ref(a, b);
            CHECK(v.decision == (div ? decision_t::divergent : decision_t::convergent));
            CHECK(v.tier == tier_t::symbolic_proof);
        }
}

TEST_CASE("convergent tail bounds survive a horizon extension") {
    // partial-sum increase from M to 4M must stay below the bound declared at M
    for (auto [a, b] : std::vector<std::pair<double, double>>{
             {2.0, 0.0}, {1.5, 0.0}, {1.0, 2.0}, {1.0, 1.5}, {2.0, -1.0}, {1.5, 1.0}}) {
        const std::int64_t M = 20000;
        const auto at_m = classify_bertrand(a, b, M);
        const auto at_4m = classify_bertrand(a, b, 4 * M);
        REQUIRE(at_m.tail_bound);
        INFO("alpha " << a << " beta " << b);
        CHECK(at_4m.partial_sum - at_m.partial_sum <= *at_m.tail_bound * (1 + 1e-12));
    }
}

TEST_CASE("thin-existence criterion on the closed-form family") {
    const auto harmonic = criterion_thin_exists(log_power_theta{1.0, 1.0, 0.0}, 100000);
    CHECK(harmonic.decision == decision_t::divergent);
    CHECK(harmonic.tier == tier_t::symbolic_proof);

    const auto sq = criterion_thin_exists(log_power_theta{1.0, 2.0, 0.0}, 100000);
    CHECK(sq.decision == decision_t::convergent);
    CHECK(sq.tier == tier_t::symbolic_proof);
    REQUIRE(sq.tail_bound);

    const auto loglog = criterion_thin_exists(log_power_theta{1.0, 1.0, 1.0}, 100000);
    CHECK(loglog.decision == decision_t::divergent);

    // reciprocal samples really drive the sum: partial sums match a direct scan
    compensated_sum direct;
    for (std::int64_t m = 1; m <= 100000; ++m)
        direct.add(1.0 / (1.0 + static_cast<double>(m) * ln2));
    CHECK(harmonic.partial_sum == Catch::Approx(direct.value()).epsilon(1e-14));
}

TEST_CASE("thin-existence criterion rejects nonpositive weights") {
    CHECK_THROWS_AS(criterion_thin_exists(constant_theta{0.0}), std::domain_error);
    CHECK_THROWS_AS(criterion_thin_exists(log_power_theta{-1.0, 1.0, 0.0}), std::domain_error);
    tabulated_theta tab;
    tab.values = {{1, 1.0}, {2, -0.5}};
    CHECK_THROWS_WITH(criterion_thin_exists(theta_spec{tab}),
                      Catch::Matchers::ContainsSubstring("m=2"));
}

TEST_CASE("thin-existence tail bound is honored when the horizon is extended") {
    const auto at_m = criterion_thin_exists(log_power_theta{1.0, 2.0, 0.0}, 10000);
    const auto at_4m = criterion_thin_exists(log_power_theta{1.0, 2.0, 0.0}, 40000);
    REQUIRE(at_m.tail_bound);
    CHECK(at_4m.partial_sum - at_m.partial_sum <= *at_m.tail_bound);
}

TEST_CASE("thick-existence criterion examples") {
    // rho(t) = t: every level contributes exactly 1
    const auto lin = criterion_thick_exists(rho_from_theta(constant_theta{0.0}), 1000);
    CHECK(lin.decision == decision_t::divergent);
    CHECK(lin.tier == tier_t::symbolic_proof);
    CHECK(lin.partial_sum == 1000.0);

    // rho(t) = t * (e+L)^-2: terms ~ m^-2
    const auto conv = criterion_thick_exists(rho_from_theta(log_power_theta{-2.0, 0.0, 1.0}), 100000);
    CHECK(conv.decision == decision_t::convergent);
    CHECK(conv.tier == tier_t::symbolic_proof);
    REQUIRE(conv.tail_bound);

    // rho(t) = t * (e+L)^-1: harmonic scale
    const auto div = criterion_thick_exists(rho_from_theta(log_power_theta{-1.0, 0.0, 1.0}), 100000);
    CHECK(div.decision == decision_t::divergent);
}

TEST_CASE("thick-existence criterion enforces its hypotheses by name") {
    // theta = L^2 positive: rho/t unbounded -> no domination constant
    const auto r1 = rho_from_theta(log_power_theta{1.0, 2.0, 0.0});
    CHECK_THROWS_WITH(criterion_thick_exists(r1),
                      Catch::Matchers::ContainsSubstring("nondecreasing"));

    rho_spec r2 = rho_from_theta(constant_theta{0.0});
    r2.dominated_by_ct.reset();
    CHECK_THROWS_WITH(criterion_thick_exists(r2),
                      Catch::Matchers::ContainsSubstring("C*t"));
}

TEST_CASE("thick-existence tail bound survives extension") {
    const auto r = rho_from_theta(log_power_theta{-2.0, 0.0, 1.0});
    const auto at_m = criterion_thick_exists(r, 10000);
    const auto at_4m = criterion_thick_exists(r, 40000);
    REQUIRE(at_m.tail_bound);
    CHECK(at_4m.partial_sum - at_m.partial_sum <= *at_m.tail_bound);
}

TEST_CASE("proof-tier decisions are stable under horizon doubling") {
    for (double a : {0.0, 0.5, 1.0, 1.5, 2.0})
        for (double b : {0.0, 0.5, 1.0, 1.5, 2.0}) {
            const theta_spec thin_th = log_power_theta{1.0, a, b};
            const auto v1 = criterion_thin_exists(thin_th, 8192);
            const auto v2 = criterion_thin_exists(thin_th, 16384);
            if (v1.tier != tier_t::numeric_trend) CHECK(v1.decision == v2.decision);

            const theta_spec thick_th = log_power_theta{-1.0, a, b};
            const auto r = rho_from_theta(thick_th);
            const auto w1 = criterion_thick_exists(r, 8192);
            const auto w2 = criterion_thick_exists(r, 16384);
            if (w1.tier != tier_t::numeric_trend) CHECK(w1.decision == w2.decision);
        }
}

TEST_CASE("exponential sum over a diverging-density profile") {
    // counts N_m = ceil(log m * 2^m / (theta_m + log m)) blow past every gamma
    const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
    const auto counts = example_profile(th, profile_density{{}, true}, 2, 4000);
    expsum_options opt;
    opt.gammas = {1.0, 10.0, 100.0};
    const auto rep = criterion_exponential_sum(counts, rho_from_theta(th), opt);
    REQUIRE(rep.per_gamma.size() == 3);
    for (const auto& gv : rep.per_gamma) {
        CHECK(gv.verdict.decision == decision_t::divergent);
        CHECK(gv.verdict.tier == tier_t::symbolic_proof);
    }
    CHECK_FALSE(rep.certificate.empty());
}

TEST_CASE("exponential sum over a constant-density profile splits at the density") {
    const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
    const auto counts = example_profile(th, profile_density{1.0, false}, 2, 4000);
    expsum_options opt;
    opt.gammas = {0.5, 4.0};
    const auto rep = criterion_exponential_sum(counts, rho_from_theta(th), opt);
    REQUIRE(rep.per_gamma.size() == 2);
    CHECK(rep.per_gamma[0].verdict.decision == decision_t::divergent);   // gamma below p
    CHECK(rep.per_gamma[1].verdict.decision == decision_t::convergent);  // gamma above p
    CHECK(rep.per_gamma[1].verdict.tier == tier_t::symbolic_proof);
    REQUIRE(rep.per_gamma[1].verdict.tail_bound);
}

TEST_CASE("exponential sum of an all-empty profile is exactly zero") {
    level_counts counts;
    counts.complete = true;
    for (std::int64_t m = 1; m <= 5; ++m) {
        level_count lc;
        lc.m = m;
        lc.n = 0;
        lc.log_n = -std::numeric_limits<double>::infinity();
        counts.levels.push_back(lc);
    }
    expsum_options opt;
    opt.gammas = {1.0};
    const auto rep = criterion_exponential_sum(counts, rho_from_theta(constant_theta{0.0}), opt);
    CHECK(rep.per_gamma[0].verdict.decision == decision_t::convergent);
    CHECK(rep.per_gamma[0].verdict.partial_sum == 0.0);

    opt.scale = gap_scale::mean_spacing;
    CHECK_THROWS_AS(criterion_exponential_sum(counts, rho_from_theta(constant_theta{0.0}), opt),
                    std::invalid_argument);
}

TEST_CASE("exponential sum input guards") {
    level_counts counts;
    expsum_options opt;  // empty gamma grid
    CHECK_THROWS_AS(criterion_exponential_sum(counts, rho_from_theta(constant_theta{0.0}), opt),
                    std::invalid_argument);
    opt.gammas = {-1.0};
    CHECK_THROWS_AS(criterion_exponential_sum(counts, rho_from_theta(constant_theta{0.0}), opt),
                    std::invalid_argument);
}

TEST_CASE("exponential-sum partial sums are nonincreasing in gamma") {
    const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
    const auto counts = example_profile(th, profile_density{1.0, false}, 2, 600);
    expsum_options opt;
    opt.gammas = {0.5, 1.0, 2.0, 4.0, 8.0};
    for (gap_scale scale : {gap_scale::dyadic_gap, gap_scale::mean_spacing}) {
        opt.scale = scale;
        const auto rep = criterion_exponential_sum(counts, rho_from_theta(th), opt);
        for (std::size_t g = 1; g < rep.per_gamma.size(); ++g) {
            const auto& lo = rep.per_gamma[g - 1].verdict.trajectory;
            const auto& hi = rep.per_gamma[g].verdict.trajectory;
            REQUIRE(lo.size() == hi.size());
            for (std::size_t k = 0; k < lo.size(); ++k) {
                CHECK(lo[k].first == hi[k].first);
                CHECK(hi[k].second <= lo[k].second);
            }
        }
    }
}

TEST_CASE("excluded levels split the reported sums") {
    const theta_spec th = log_power_theta{1.0, 1.0, 0.0};
    const auto counts = example_profile(th, profile_density{1.0, false}, 2, 200);
    expsum_options opt;
    // decaying terms, so dropping the first levels visibly shrinks the sum
    opt.gammas = {4.0};
    opt.exclude = std::set<std::int64_t>{2, 3, 4};
    const auto rep = criterion_exponential_sum(counts, rho_from_theta(th), opt);
    const auto& gv = rep.per_gamma[0];
    REQUIRE(gv.log_sum_excluded);
    CHECK(*gv.log_sum_excluded < gv.log_sum_all);
    CHECK(gv.verdict.log_partial_sum == *gv.log_sum_excluded);
}

TEST_CASE("mean-spacing scale skips annuli without a trimmed spacing") {
    level_counts counts;
    level_count a;
    a.m = 4;
    a.n = 16;
    a.log_n = std::log(16.0);
    a.dbar = 0.3;
    counts.levels.push_back(a);
    level_count b;
    b.m = 5;
    b.n = 4;  // too small for dbar
    b.log_n = std::log(4.0);
    counts.levels.push_back(b);
    expsum_options opt;
    opt.gammas = {1.0};
    opt.scale = gap_scale::mean_spacing;
    const auto rep = criterion_exponential_sum(counts, rho_from_theta(constant_theta{0.0}), opt);
    REQUIRE(rep.skipped_levels.size() == 1);
    CHECK(rep.skipped_levels[0] == 5);
}

TEST_CASE("partial sums of a geometric stream") {
    term_stream s;
    s.term = [](std::int64_t m) { return std::ldexp(1.0, static_cast<int>(-m)); };
    s.first = 1;
    s.nonincreasing_from = 1;
    s.tail_upper = [](std::int64_t M) { return std::ldexp(1.0, static_cast<int>(-M)); };
    const auto scan = partial_sums(s, 40, {0.9});
    CHECK(scan.sum == Catch::Approx(1.0 - std::ldexp(1.0, -40)).epsilon(1e-15));
    REQUIRE(scan.tail_upper_bound);
    CHECK(*scan.tail_upper_bound == std::ldexp(1.0, -40));
    REQUIRE(scan.tail_lower_bound);
    CHECK(*scan.tail_lower_bound == std::ldexp(1.0, -41));
    REQUIRE(scan.first_crossing[0]);
    CHECK(*scan.first_crossing[0] == 4);  // 15/16 is the first partial sum >= 0.9
}

TEST_CASE("harmonic stream crosses target 5 inside the integral-test window") {
    term_stream s;
    s.term = [](std::int64_t m) { return 1.0 / static_cast<double>(m); };
    s.first = 1;
    s.nonincreasing_from = 1;
    const auto scan = partial_sums(s, 1000, {5.0});
    REQUIRE(scan.first_crossing[0]);
    const double M = static_cast<double>(*scan.first_crossing[0]);
    CHECK(M > std::exp(4.0));
    CHECK(M <= std::exp(5.0));
}

TEST_CASE("partial sums of an empty stream") {
    term_stream s;
    s.term = [](std::int64_t) { return 1.0; };
    s.first = 10;
    const auto scan = partial_sums(s, 5, {1.0});
    CHECK(scan.sum == 0.0);
    CHECK(scan.checkpoints.empty());
    CHECK_FALSE(scan.first_crossing[0]);
    CHECK_FALSE(scan.tail_upper_bound);
}

TEST_CASE("measured doubling-block tail is a genuine upper bound") {
    // terms m^-2 without a declared closed form: the engine must measure one
    term_stream s;
    s.term = [](std::int64_t m) { return 1.0 / (static_cast<double>(m) * static_cast<double>(m)); };
    s.first = 1;
    s.nonincreasing_from = 1;
    const auto scan = partial_sums(s, 1000, {});
    REQUIRE(scan.tail_upper_bound);
    const auto more = partial_sums(s, 64000, {});
    CHECK(more.sum - scan.sum <= *scan.tail_upper_bound);
    CHECK(*scan.tail_upper_bound >= 1.0 / 1001.0);  // true tail is ~1/M
}
