#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "thinlab/levels.hpp"
#include "thinlab/summation.hpp"
#include "thinlab/weights.hpp"

namespace thinlab {

enum class decision_t { divergent, convergent, undecided };
enum class tier_t { symbolic_proof, monotone_tail_bound, numeric_trend };

inline const char* decision_name(decision_t d) {
    switch (d) {
        case decision_t::divergent: return "Divergent";
        case decision_t::convergent: return "Convergent";
        default: return "Undecided";
    }
}

inline const char* tier_name(tier_t t) {
    switch (t) {
        case tier_t::symbolic_proof: return "SymbolicProof";
        case tier_t::monotone_tail_bound: return "MonotoneTailBound";
        default: return "NumericTrend";
    }
}

struct series_verdict {
    decision_t decision = decision_t::undecided;
    tier_t tier = tier_t::numeric_trend;
    std::int64_t horizon = 0;
    // upper bound on the mass beyond `horizon`, when convergence is proven and
    // a bound could be closed
    std::optional<double> tail_bound;
    double partial_sum = 0.0;
    double log_partial_sum = -std::numeric_limits<double>::infinity();
    bool trajectory_is_log = false;
    std::vector<std::pair<std::int64_t, double>> trajectory;  // (level, partial sum) at 2^k levels
    std::string note;
};

namespace detail {

inline bool at_checkpoint(std::int64_t m) { return m > 0 && (m & (m - 1)) == 0; }

inline double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

inline std::string fmt_level_value(const char* what, std::int64_t m, double v) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%s at level m=%lld is %.6g", what, static_cast<long long>(m), v);
    return buf;
}

inline std::string fmt_int(long long v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%lld", v);
    return buf;
}

inline std::string fmt_real(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Upper bound on sum_{m>M} u(m), u positive and nonincreasing beyond M.
// Doubling blocks [l, 2l) contribute at most l*u(l); the block-to-block
// factor f = 2*u(2l)/u(l) is measured, and once it settles below 1/2 the
// remainder closes geometrically.  Callers must guarantee monotone u and a
// nonincreasing factor profile (true for the weight families used here);
// measured violations abort the bound instead of papering over them.
inline std::optional<double> doubling_block_tail(const std::function<double(std::int64_t)>& u,
                                                 std::int64_t M) {
    long double total = 0.0L;
    std::int64_t l = M + 1;
    double ul = u(l);
    if (!(ul >= 0.0) || !std::isfinite(ul)) return std::nullopt;
    double prev_f = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 62; ++k) {
        total += static_cast<long double>(l) * ul;
        if (!(total < 1e300L)) return std::nullopt;
        if (ul == 0.0) return static_cast<double>(total);
        if (l > (std::int64_t{1} << 61)) return std::nullopt;
        const std::int64_t l2 = 2 * l;
        const double ul2 = u(l2);
        const double f = 2.0 * ul2 / ul;
        if (f <= 0.5 && f <= prev_f) {
            return static_cast<double>(total) + static_cast<double>(l2) * ul2 / (1.0 - f);
        }
        if (k > 0 && f > prev_f * (1.0 + 1e-9)) return std::nullopt;
        prev_f = f;
        l = l2;
        ul = ul2;
    }
    return std::nullopt;
}

inline std::string trend_note(const std::vector<std::pair<std::int64_t, double>>& traj,
                              double target) {
    if (traj.empty()) return "no terms in range";
    const double last = traj.back().second;
    if (last >= target) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "divergent-trend: partial sums reached %.3g", last);
        return buf;
    }
    const std::int64_t half = traj.back().first / 2;
    double s_half = traj.front().second;
    for (const auto& [m, s] : traj)
        if (m <= half) s_half = s;
    if (last - s_half <= 1e-9 * std::max(1.0, std::fabs(last)))
        return "convergent-trend: partial sums have flattened";
    return "inconclusive-trend: partial sums still drifting";
}

// Symbolic classification of sum_m exp(theta_m).
struct exp_theta_analysis {
    std::optional<decision_t> dec;
    std::string why;
};

inline exp_theta_analysis analyze_exp_theta(const theta_spec& th) {
    if (std::holds_alternative<constant_theta>(th))
        return {decision_t::divergent, "terms are a positive constant"};
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        const double c = lp->c, a = lp->alpha, b = lp->beta;
        if (c == 0.0) return {decision_t::divergent, "terms are identically 1"};
        if (c > 0.0) return {decision_t::divergent, "terms are bounded below by a positive constant"};
        if (a > 0.0) return {decision_t::convergent, "terms decay at least stretched-exponentially in the level"};
        if (a == 0.0) {
            if (b < 1.0) return {decision_t::divergent, "terms decay slower than any power of the level"};
            if (b == 1.0) {
                if (-c <= 1.0) return {decision_t::divergent, "terms compare with the harmonic scale"};
                return {decision_t::convergent, "terms decay like a summable power of the level"};
            }
            return {decision_t::convergent, "terms decay faster than any power of the level"};
        }
        return {decision_t::divergent, "theta tends to zero, so the terms approach 1"};
    }
    return {std::nullopt, "tabulated weight: no closed form available"};
}

// Upper bound on sum_{m>M} exp(theta_m) for the provably convergent shapes.
inline std::optional<double> exp_theta_tail(const theta_spec& th, std::int64_t M) {
    const auto* lp = std::get_if<log_power_theta>(&th);
    if (!lp || !(lp->c < 0.0)) return std::nullopt;
    const double A = -lp->c, a = lp->alpha, b = lp->beta;
    auto u = [&](std::int64_t m) {
        const double t = theta_at_level(th, m);
        return t < -745.0 ? 0.0 : std::exp(t);
    };
    if (a >= 1.0 && b >= 0.0) {
        // each level multiplies the term by at most 2^{-A}
        const double r = std::exp2(-A);
        const double log_tail = theta_at_level(th, M) + std::log(r) - std::log1p(-r);
        if (log_tail > 700.0) return std::nullopt;
        // below exp's range the floor 1e-300 still over-estimates the true tail
        return log_tail < -700.0 ? 1e-300 : std::exp(log_tail);
    }
    if (a == 0.0 && b == 1.0 && A > 1.0) {
        const double base = std::numbers::e + 1.0 + static_cast<double>(M) * ln2;
        return std::pow(base, 1.0 - A) / ((A - 1.0) * ln2);
    }
    const bool monotone = (a > 0.0 && b >= 0.0) || (a == 0.0 && b > 1.0) ||
                          (a > 0.0 && a * std::log(std::numbers::e + big_l_at_level(M + 1)) >= -b);
    if (!monotone) return std::nullopt;
    return doubling_block_tail(u, M);
}

}  // namespace detail

inline bool bertrand_divergent(double alpha, double beta) {
    return alpha < 1.0 || (alpha == 1.0 && beta <= 1.0);
}

// sum_{m>=2} m^-alpha (log m)^-beta: decision by the log-scale comparison
// rule, partial sums to the horizon, integral-test tail when convergent.
inline series_verdict classify_bertrand(double alpha, double beta, std::int64_t horizon = 1'000'000) {
    if (horizon < 4) throw std::invalid_argument("classify_bertrand: horizon must be at least 4");
    series_verdict v;
    v.horizon = horizon;
    v.tier = tier_t::symbolic_proof;
    v.decision = bertrand_divergent(alpha, beta) ? decision_t::divergent : decision_t::convergent;
    compensated_sum acc;
    for (std::int64_t m = 2; m <= horizon; ++m) {
        const double lm = std::log(static_cast<double>(m));
        acc.add(std::exp(-alpha * lm - beta * std::log(lm)));
        if (detail::at_checkpoint(m)) v.trajectory.emplace_back(m, acc.value());
    }
    v.partial_sum = acc.value();
    v.log_partial_sum = detail::safe_log(v.partial_sum);
    if (v.trajectory.empty() || v.trajectory.back().first != horizon)
        v.trajectory.emplace_back(horizon, v.partial_sum);
    if (v.decision == decision_t::convergent) {
        const double M = static_cast<double>(horizon);
        double tail;
        if (alpha > 1.0) {
            if (beta >= 0.0) {
                tail = std::pow(std::log(M), -beta) * std::pow(M, 1.0 - alpha) / (alpha - 1.0);
            } else {
                // (log x)^k x^-alpha <= C x^-(1+alpha)/2 with C the sup of
                // (log x)^k x^-s beyond M, s = (alpha-1)/2
                const double k = -beta, s = 0.5 * (alpha - 1.0);
                auto h = [&](double x) { return std::pow(std::log(x), k) * std::pow(x, -s); };
                double c_sup = h(M);
                const double xstar = std::exp(k / s);
                if (xstar > M) c_sup = std::max(c_sup, h(xstar));
                tail = c_sup * std::pow(M, -s) / s;
            }
        } else {
            tail = std::pow(std::log(M), 1.0 - beta) / (beta - 1.0);
        }
        v.tail_bound = tail;
        v.note = "integral-test tail bound beyond the horizon";
    } else {
        v.note = "partial sums grow without bound";
    }
    return v;
}

// sum_m 1/theta(2^-m): divergence here is what makes a positive weight admit
// thin separated sequences.  theta must be positive on the dyadic grid.
inline series_verdict criterion_thin_exists(const theta_spec& th, std::int64_t horizon = 1'000'000) {
    if (horizon < 4) throw std::invalid_argument("criterion_thin_exists: horizon must be at least 4");
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        if (!(lp->c > 0.0))
            throw std::domain_error("theta is not positive on the dyadic grid: " +
                                    detail::fmt_level_value("theta", 1, theta_at_level(th, 1)));
    } else if (const auto* ct = std::get_if<constant_theta>(&th)) {
        if (!(ct->c > 0.0))
            throw std::domain_error("theta is not positive on the dyadic grid: " +
                                    detail::fmt_level_value("theta", 1, ct->c));
    } else {
        for (const auto& [m, val] : std::get<tabulated_theta>(th).values)
            if (m >= 1 && m <= horizon && !(val > 0.0))
                throw std::domain_error("theta is not positive on the dyadic grid: " +
                                        detail::fmt_level_value("theta", m, val));
    }

    series_verdict v;
    v.horizon = horizon;
    compensated_sum acc;
    std::int64_t effective = horizon;
    const auto* tab = std::get_if<tabulated_theta>(&th);
    if (tab) {
        effective = 0;
        for (const auto& [m, val] : tab->values) {
            if (m < 1 || m > horizon) continue;
            acc.add(1.0 / val);
            effective = m;
            if (detail::at_checkpoint(m)) v.trajectory.emplace_back(m, acc.value());
        }
    } else {
        for (std::int64_t m = 1; m <= horizon; ++m) {
            acc.add(1.0 / theta_at_level(th, m));
            if (detail::at_checkpoint(m)) v.trajectory.emplace_back(m, acc.value());
        }
    }
    v.partial_sum = acc.value();
    v.log_partial_sum = detail::safe_log(v.partial_sum);
    if (effective > 0 && (v.trajectory.empty() || v.trajectory.back().first != effective))
        v.trajectory.emplace_back(effective, v.partial_sum);

    if (std::holds_alternative<constant_theta>(th)) {
        v.decision = decision_t::divergent;
        v.tier = tier_t::symbolic_proof;
        v.note = "terms are a positive constant";
        return v;
    }
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        const double c = lp->c, a = lp->alpha, b = lp->beta;
        v.tier = tier_t::symbolic_proof;
        if (bertrand_divergent(a, b)) {
            v.decision = decision_t::divergent;
            v.note = "log-scale comparison: the reciprocal weight is not summable";
            return v;
        }
        v.decision = decision_t::convergent;
        v.note = "log-scale comparison: the reciprocal weight is summable";
        const double M = static_cast<double>(horizon);
        if (a == 1.0) {
            // b > 1 here
            v.tail_bound = std::pow(std::log(M * ln2), 1.0 - b) / ((b - 1.0) * c * ln2);
        } else if (b >= 0.0) {
            // a > 1: 1/theta(2^-m) <= (1/c)(m ln2)^-a (log(m ln2))^-b for m >= 2
            v.tail_bound = std::pow(std::log(M * ln2), -b) * std::pow(M * ln2, 1.0 - a) /
                           ((a - 1.0) * c * ln2);
        } else {
            const bool monotone = a * std::log(std::numbers::e + big_l_at_level(horizon + 1)) >= -b;
            auto u = [&](std::int64_t m) { return 1.0 / theta_at_level(th, m); };
            std::optional<double> tb;
            if (monotone) tb = detail::doubling_block_tail(u, horizon);
            if (tb) {
                v.tail_bound = tb;
                v.note += "; measured doubling-block tail";
            } else {
                v.note += "; tail bound unavailable at this horizon";
            }
        }
        return v;
    }
    // tabulated: honest about the missing tail
    v.decision = decision_t::undecided;
    v.tier = tier_t::numeric_trend;
    char buf[96];
    std::snprintf(buf, sizeof buf, "; table ends at level m=%lld", static_cast<long long>(effective));
    v.note = detail::trend_note(v.trajectory, 1e3) + buf;
    return v;
}

// sum_m 2^m rho(2^-m) = sum_m exp(theta_m): divergence here is what makes a
// nondecreasing weight rho(t) <= C t admit thick separated sequences.  Both
// hypotheses are enforced up front.
inline series_verdict criterion_thick_exists(const rho_spec& rho, std::int64_t horizon = 1'000'000) {
    if (horizon < 4) throw std::invalid_argument("criterion_thick_exists: horizon must be at least 4");
    if (!rho.nondecreasing)
        throw std::domain_error("thick-series criterion: rho must be nondecreasing, which fails here (" +
                                rho.validation_note + ")");
    if (!rho.dominated_by_ct)
        throw std::domain_error(
            "thick-series criterion: rho(t) <= C*t must hold for some constant C, "
            "and none was established (" +
            rho.validation_note + ")");

    series_verdict v;
    v.horizon = horizon;
    compensated_sum acc;
    std::int64_t effective = horizon;
    const auto* tab = std::get_if<tabulated_theta>(&rho.theta);
    if (tab) {
        effective = 0;
        for (const auto& [m, val] : tab->values) {
            if (m < 1 || m > horizon) continue;
            acc.add(val < -745.0 ? 0.0 : std::exp(val));
            effective = m;
            if (detail::at_checkpoint(m)) v.trajectory.emplace_back(m, acc.value());
        }
    } else {
        for (std::int64_t m = 1; m <= horizon; ++m) {
            const double t = theta_at_level(rho.theta, m);
            acc.add(t < -745.0 ? 0.0 : std::exp(t));
            if (detail::at_checkpoint(m)) v.trajectory.emplace_back(m, acc.value());
        }
    }
    v.partial_sum = acc.value();
    v.log_partial_sum = detail::safe_log(v.partial_sum);
    if (effective > 0 && (v.trajectory.empty() || v.trajectory.back().first != effective))
        v.trajectory.emplace_back(effective, v.partial_sum);

    const auto an = detail::analyze_exp_theta(rho.theta);
    if (an.dec) {
        v.decision = *an.dec;
        v.tier = tier_t::symbolic_proof;
        v.note = an.why;
        if (v.decision == decision_t::convergent) {
            if (auto tb = detail::exp_theta_tail(rho.theta, horizon))
                v.tail_bound = tb;
            else
                v.note += "; tail bound unavailable at this horizon";
        }
        return v;
    }
    v.decision = decision_t::undecided;
    v.tier = tier_t::numeric_trend;
    char buf[96];
    std::snprintf(buf, sizeof buf, "; table ends at level m=%lld", static_cast<long long>(effective));
    v.note = detail::trend_note(v.trajectory, 1e3) + buf;
    return v;
}

enum class gap_scale { dyadic_gap, mean_spacing };

inline const char* gap_scale_name(gap_scale s) {
    return s == gap_scale::dyadic_gap ? "DyadicGap" : "MeanSpacing";
}

struct expsum_options {
    std::vector<double> gammas;
    gap_scale scale = gap_scale::dyadic_gap;
    std::int64_t horizon = 1'000'000;
    double divergence_target = 1e3;
    // levels removed from the decisive sum (the full sum is still reported)
    std::optional<std::set<std::int64_t>> exclude;
};

struct gamma_verdict {
    double gamma = 0.0;
    series_verdict verdict;  // decision on the decisive (possibly pruned) sum
    double log_sum_all = -std::numeric_limits<double>::infinity();
    std::optional<double> log_sum_excluded;
};

struct expsum_report {
    gap_scale scale = gap_scale::dyadic_gap;
    std::vector<gamma_verdict> per_gamma;
    std::vector<std::int64_t> skipped_levels;  // unusable under the chosen scale
    std::string certificate;                   // family-level reasoning shared across gammas
};

// sum_m N_m rho(2^-m) exp(-gamma g_m) with g_m the dyadic gap 2^m/N_m or the
// inverse mean-spacing mass 1/(N_m dbar_m).  Counts enter through log N_m, so
// deep analytic families never overflow.  Generator metadata upgrades the
// verdict from a numeric trend to a proof where the family shape allows it.
inline expsum_report criterion_exponential_sum(const level_counts& counts, const rho_spec& rho,
                                               const expsum_options& opt) {
    if (opt.gammas.empty())
        throw std::invalid_argument("criterion_exponential_sum: at least one gamma is required");
    for (double g : opt.gammas)
        if (!(g > 0.0)) throw std::invalid_argument("criterion_exponential_sum: gamma must be positive");

    const theta_spec& th = rho.theta;
    expsum_report rep;
    rep.scale = opt.scale;

    struct row {
        std::int64_t m;
        double log_n;
        double gap;
        double theta;
    };
    std::vector<row> rows;
    rows.reserve(counts.levels.size());
    const auto* tab = std::get_if<tabulated_theta>(&th);
    for (const auto& lc : counts.levels) {
        if (lc.m < 1 || lc.m > opt.horizon) continue;
        if (opt.scale == gap_scale::mean_spacing && lc.n && *lc.n == 0)
            throw std::invalid_argument(
                "criterion_exponential_sum: the spacing scale cannot weight an empty level (" +
                detail::fmt_level_value("N", lc.m, 0.0) + ")");
        if (lc.n && *lc.n == 0) continue;  // empty level contributes nothing
        if (tab && !tab->values.count(lc.m)) {
            rep.skipped_levels.push_back(lc.m);
            continue;
        }
        double gap;
        if (opt.scale == gap_scale::dyadic_gap) {
            gap = std::exp(static_cast<double>(lc.m) * ln2 - lc.log_n);
        } else {
            if (!lc.dbar || !lc.n || *lc.n < 6) {
                rep.skipped_levels.push_back(lc.m);
                continue;
            }
            gap = 1.0 / (static_cast<double>(*lc.n) * *lc.dbar);
        }
        rows.push_back({lc.m, lc.log_n, gap, theta_at_level(th, lc.m)});
    }

    // family certificates hoisted out of the gamma loop
    const full_circles_family* circles = nullptr;
    const example_profile_family* profile = nullptr;
    if (counts.family) {
        circles = std::get_if<full_circles_family>(&*counts.family);
        profile = std::get_if<example_profile_family>(&*counts.family);
    }
    bool profile_theta_matches = false;
    const log_power_theta* lp = std::get_if<log_power_theta>(&th);
    if (profile) {
        const auto* flp = std::get_if<log_power_theta>(&profile->theta);
        profile_theta_matches = lp && flp && lp->c == flp->c && lp->alpha == flp->alpha &&
                                lp->beta == flp->beta && lp->c > 0.0 && lp->alpha >= 1.0 &&
                                lp->beta >= 0.0;
    }

    const auto exp_theta = detail::analyze_exp_theta(th);

    for (double gamma : opt.gammas) {
        gamma_verdict gv;
        gv.gamma = gamma;
        series_verdict& v = gv.verdict;
        v.horizon = opt.horizon;
        v.trajectory_is_log = true;
        log_domain_sum all, decisive;
        for (const auto& r : rows) {
            const double lt = r.log_n - static_cast<double>(r.m) * ln2 + r.theta - gamma * r.gap;
            all.add_log(lt);
            if (!(opt.exclude && opt.exclude->count(r.m))) decisive.add_log(lt);
            if (detail::at_checkpoint(r.m)) v.trajectory.emplace_back(r.m, decisive.log_value());
        }
        gv.log_sum_all = all.log_value();
        if (opt.exclude) gv.log_sum_excluded = decisive.log_value();
        v.log_partial_sum = decisive.log_value();
        v.partial_sum = decisive.value();
        if (!rows.empty() && (v.trajectory.empty() || v.trajectory.back().first != rows.back().m))
            v.trajectory.emplace_back(rows.back().m, v.log_partial_sum);

        const std::int64_t last_m = rows.empty() ? 0 : rows.back().m;
        bool decided = false;

        if (circles && exp_theta.dec) {
            // unit dyadic density: the gap factor is pinched between positive
            // constants, so the decision matches sum exp(theta_m) for every gamma
            v.decision = *exp_theta.dec;
            v.tier = tier_t::symbolic_proof;
            v.note = "full-circle counts: gamma only rescales the terms; " + exp_theta.why;
            rep.certificate = "gamma-independent: decision equals the thick-series decision for theta";
            if (v.decision == decision_t::convergent) {
                const double gap_floor =
                    opt.scale == gap_scale::dyadic_gap ? 1.0 : 1.0 / (2.0 * std::numbers::pi);
                if (auto tb = detail::exp_theta_tail(th, last_m > 0 ? last_m : 1)) {
                    const double scale_cap = std::exp(-gamma * gap_floor);
                    v.tail_bound = *tb * scale_cap;
                }
            }
            decided = true;
        } else if (profile && profile_theta_matches) {
            if (opt.scale == gap_scale::mean_spacing) {
                // equally spaced points keep N*dbar >= 2, so the gap factor is
                // bounded and the unweighted terms l_m exp(theta_m) blow up
                v.decision = decision_t::divergent;
                v.tier = tier_t::symbolic_proof;
                v.note = "profile counts under the spacing scale: gap factor bounded, terms unbounded";
                rep.certificate = "gamma-independent: bounded spacing gap cannot tame growing terms";
                decided = true;
            } else if (profile->p_is_log_m) {
                v.decision = decision_t::divergent;
                v.tier = tier_t::symbolic_proof;
                v.note =
                    "profile density log m outgrows every fixed gamma: terms exceed any bound "
                    "once log m > gamma";
                rep.certificate = "divergent for every gamma: the density p_m = log m is unbounded";
                decided = true;
            } else if (profile->p_const) {
                const double p = *profile->p_const;
                if (gamma < p) {
                    v.decision = decision_t::divergent;
                    v.tier = tier_t::symbolic_proof;
                    char buf[128];
                    std::snprintf(buf, sizeof buf,
                                  "gamma=%.6g below the profile density p=%.6g: the surviving "
                                  "exponent grows linearly",
                                  gamma, p);
                    v.note = buf;
                    decided = true;
                } else if (gamma > p) {
                    // log-term increments are eventually <= (1 - gamma/p) c ln 2 < 0
                    const double r = std::exp2((1.0 - gamma / p) * lp->c);
                    v.decision = decision_t::convergent;
                    v.tier = tier_t::symbolic_proof;
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "gamma=%.6g above the profile density p=%.6g: terms are eventually "
                                  "geometric with ratio %.4g",
                                  gamma, p, r);
                    v.note = buf;
                    if (!rows.empty() && r < 1.0) {
                        const double last_lt = rows.back().log_n -
                                               static_cast<double>(last_m) * ln2 +
                                               rows.back().theta - gamma * rows.back().gap;
                        const double log_tail = last_lt + std::log(r) - std::log1p(-r);
                        if (log_tail <= 700.0)
                            // floor instead of exp underflow: 1e-300 still over-estimates
                            v.tail_bound = log_tail < -700.0 ? 1e-300 : std::exp(log_tail);
                    }
                    decided = true;
                }
                if (decided && rep.certificate.empty())
                    rep.certificate =
                        "constant-density profile: divergent below the density, convergent above it";
            }
        } else if (counts.complete && !counts.family) {
            v.decision = decision_t::convergent;
            v.tier = tier_t::symbolic_proof;
            v.tail_bound = 0.0;
            v.note = "finite level support: the sum is exact";
            decided = true;
        }

        if (!decided) {
            if (v.log_partial_sum >= std::log(opt.divergence_target)) {
                v.decision = decision_t::divergent;
                v.tier = tier_t::numeric_trend;
                char buf[96];
                std::snprintf(buf, sizeof buf, "partial sums crossed %.3g", opt.divergence_target);
                v.note = buf;
            } else {
                v.decision = decision_t::undecided;
                v.tier = tier_t::numeric_trend;
                std::vector<std::pair<std::int64_t, double>> lin;
                lin.reserve(v.trajectory.size());
                for (const auto& [m, s] : v.trajectory)
                    lin.emplace_back(m, s > 700.0 ? std::numeric_limits<double>::infinity()
                                                  : std::exp(s));
                v.note = detail::trend_note(lin, opt.divergence_target);
            }
        }
        rep.per_gamma.push_back(std::move(gv));
    }
    return rep;
}

// A positive term stream with side-declared shape metadata: the stream may
// certify monotonicity beyond some index and may carry a closed-form bound on
// the mass beyond any M (e.g. an antiderivative tail).
struct term_stream {
    std::function<double(std::int64_t)> term;
    std::int64_t first = 1;
    std::optional<std::int64_t> nonincreasing_from;
    std::function<double(std::int64_t)> tail_upper;  // optional; honored only with monotonicity
};

struct partial_sum_scan {
    double sum = 0.0;
    std::vector<std::pair<std::int64_t, double>> checkpoints;
    std::vector<std::optional<std::int64_t>> first_crossing;  // parallel to targets
    std::optional<double> tail_upper_bound;                   // mass beyond the horizon
    std::optional<double> tail_lower_bound;
};

// Running sums of the stream over [first, horizon], recording where each
// target is first reached.  With a monotone certificate the tail beyond the
// horizon is bracketed: below by the next term, above by the declared bound
// or by measured doubling blocks.
inline partial_sum_scan partial_sums(const term_stream& stream, std::int64_t horizon,
                                     const std::vector<double>& targets) {
    partial_sum_scan out;
    out.first_crossing.assign(targets.size(), std::nullopt);
    if (horizon < stream.first) return out;  // empty range: sum 0, nothing crossed
    std::size_t pending = targets.size();
    compensated_sum acc;
    for (std::int64_t m = stream.first; m <= horizon; ++m) {
        acc.add(stream.term(m));
        if (pending > 0) {
            const double s = acc.value();
            for (std::size_t i = 0; i < targets.size(); ++i)
                if (!out.first_crossing[i] && s >= targets[i]) {
                    out.first_crossing[i] = m;
                    --pending;
                }
        }
        if (detail::at_checkpoint(m) || m == horizon) out.checkpoints.emplace_back(m, acc.value());
    }
    out.sum = acc.value();
    if (stream.nonincreasing_from && *stream.nonincreasing_from <= horizon) {
        out.tail_lower_bound = stream.term(horizon + 1);
        if (stream.tail_upper)
            out.tail_upper_bound = stream.tail_upper(horizon);
        else if (auto tb = detail::doubling_block_tail(stream.term, horizon))
            out.tail_upper_bound = tb;
    }
    return out;
}

}  // namespace thinlab
