#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace thinlab {

inline constexpr double ln2 = 0.6931471805599453094;

// L(t) = log(e/t) = 1 + log(1/t), >= 1 on (0,1].  At the dyadic point
// t = 2^-m this is 1 + m*ln2, which is how all level-indexed code computes it
// (2^-m itself underflows for m > 1074; the level index never does).
inline double big_l_of_t(double t) {
    if (!(t > 0.0) || !(t < 1.0 + 1e-15))
        throw std::domain_error("weight argument t must lie in (0,1], got " + std::to_string(t));
    return 1.0 - std::log(t);
}

inline double big_l_at_level(std::int64_t m) { return 1.0 + static_cast<double>(m) * ln2; }

// theta(t) = c * L(t)^alpha * (log(e + L(t)))^beta
struct log_power_theta {
    double c = 1.0;
    double alpha = 1.0;
    double beta = 0.0;
};

struct constant_theta {
    double c = 1.0;
};

// Values at dyadic points t = 2^-m only.  The flags are caller assertions
// about the underlying weight; they are validated against the stored samples
// and never extend a verdict beyond what samples support.
struct tabulated_theta {
    std::map<std::int64_t, double> values;  // m -> theta(2^-m)
    bool nonincreasing_in_t = false;        // i.e. values nondecreasing in m
    bool positive = false;
};

using theta_spec = std::variant<log_power_theta, constant_theta, tabulated_theta>;

namespace detail {

// x^p for the small exponent grid used throughout; avoids pow() in hot loops.
inline double fast_pow(double x, double p) {
    if (p == 0.0) return 1.0;
    if (p == 1.0) return x;
    if (p == 2.0) return x * x;
    if (p == 0.5) return std::sqrt(x);
    if (p == 1.5) return x * std::sqrt(x);
    return std::pow(x, p);
}

inline double log_power_of_l(const log_power_theta& th, double L) {
    return th.c * fast_pow(L, th.alpha) * fast_pow(std::log(std::exp(1.0) + L), th.beta);
}

}  // namespace detail

inline void validate_tabulated(const tabulated_theta& tab) {
    if (tab.values.empty()) throw std::invalid_argument("tabulated weight: empty table");
    const double* prev = nullptr;
    std::int64_t prev_m = 0;
    for (const auto& [m, v] : tab.values) {
        if (m < 0) throw std::invalid_argument("tabulated weight: level " + std::to_string(m) + " is negative");
        if (tab.positive && !(v > 0.0))
            throw std::invalid_argument("tabulated weight: positive flag set but theta(2^-" + std::to_string(m) +
                                        ") = " + std::to_string(v));
        if (tab.nonincreasing_in_t && prev && v < *prev)
            throw std::invalid_argument("tabulated weight: monotone flag set but theta decreases from level " +
                                        std::to_string(prev_m) + " to " + std::to_string(m));
        prev = &v;
        prev_m = m;
    }
}

// Canonical short spelling of a weight, used in provenance strings; matches
// the CLI weight syntax for the closed-form families.
inline std::string theta_spec_string(const theta_spec& th) {
    char buf[120];
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        std::snprintf(buf, sizeof buf, "logpow:%.17g,%.17g,%.17g", lp->c, lp->alpha, lp->beta);
        return buf;
    }
    if (const auto* ct = std::get_if<constant_theta>(&th)) {
        std::snprintf(buf, sizeof buf, "const:%.17g", ct->c);
        return buf;
    }
    const auto& tab = std::get<tabulated_theta>(th);
    if (tab.values.empty()) return "table:empty";
    std::snprintf(buf, sizeof buf, "table:%lld levels [%lld..%lld]",
                  static_cast<long long>(tab.values.size()),
                  static_cast<long long>(tab.values.begin()->first),
                  static_cast<long long>(tab.values.rbegin()->first));
    return buf;
}

// theta(2^-m) by level index; total over the supported families.
inline double theta_at_level(const theta_spec& th, std::int64_t m) {
    if (m < 0) throw std::domain_error("theta level must be >= 0, got " + std::to_string(m));
    if (const auto* lp = std::get_if<log_power_theta>(&th))
        return detail::log_power_of_l(*lp, big_l_at_level(m));
    if (const auto* ct = std::get_if<constant_theta>(&th)) return ct->c;
    const auto& tab = std::get<tabulated_theta>(th);
    auto it = tab.values.find(m);
    if (it == tab.values.end())
        throw std::domain_error("tabulated weight: no sample at level " + std::to_string(m));
    return it->second;
}

// theta(t) for general t in (0,1].  Tabulated weights are defined at dyadic
// points only: t must equal 2^-m for a stored m.
inline double theta_evaluate(const theta_spec& th, double t) {
    if (const auto* lp = std::get_if<log_power_theta>(&th))
        return detail::log_power_of_l(*lp, big_l_of_t(t));
    if (const auto* ct = std::get_if<constant_theta>(&th)) {
        big_l_of_t(t);  // domain check
        return ct->c;
    }
    int e = 0;
    double f = std::frexp(t, &e);
    if (f != 0.5)
        throw std::domain_error("tabulated weight: defined only at dyadic points, got t = " + std::to_string(t));
    return theta_at_level(th, static_cast<std::int64_t>(1) - e);  // t = 2^(e-1) = 2^-(1-e)
}

struct rho_value {
    double rho = 0.0;      // may under/overflow; log_rho is authoritative
    double log_rho = 0.0;
};

// rho_theta(t) = t * exp(theta(t)); evaluated in log form first.
inline rho_value rho_evaluate(const theta_spec& th, double t) {
    double log_rho = std::log(t) + theta_evaluate(th, t);
    double r = log_rho > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(log_rho);
    return {r, log_rho};
}

inline rho_value rho_at_level(const theta_spec& th, std::int64_t m) {
    double log_rho = -static_cast<double>(m) * ln2 + theta_at_level(th, m);
    double r = log_rho > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(log_rho);
    return {r, log_rho};
}

// eps_m = 1/theta(2^-m) for m = 1..horizon; the reciprocals drive both the
// thin-existence criterion and the index-set construction.
inline std::vector<double> dyadic_samples(const theta_spec& th, std::int64_t horizon) {
    if (horizon < 1) throw std::invalid_argument("dyadic_samples: horizon must be >= 1");
    std::vector<double> eps;
    eps.reserve(static_cast<std::size_t>(horizon));
    for (std::int64_t m = 1; m <= horizon; ++m) {
        double v = theta_at_level(th, m);
        if (!(v > 0.0))
            throw std::domain_error("theta(2^-m) <= 0 at m = " + std::to_string(m) +
                                    "; reciprocal samples undefined");
        eps.push_back(1.0 / v);
    }
    return eps;
}

// rho flags: monotonicity and linear domination, each validated rather than
// assumed.  dominated_by_ct stores a witness C with rho(t) <= C*t.
struct rho_spec {
    theta_spec theta;
    bool nondecreasing = false;
    std::optional<double> dominated_by_ct;
    std::string validation_note;
};

namespace detail {

// t * theta'(t) for the closed-form family; enters d rho/dt = e^theta (1 + t theta').
inline double t_theta_prime(const log_power_theta& th, double L) {
    double llog = std::log(std::exp(1.0) + L);
    double g = th.alpha * fast_pow(L, th.alpha - 1.0) * fast_pow(llog, th.beta);
    if (th.beta != 0.0) g += fast_pow(L, th.alpha) * th.beta * fast_pow(llog, th.beta - 1.0) / (std::exp(1.0) + L);
    return -th.c * g;
}

}  // namespace detail

// Derives and validates the rho flags for a weight.  Symbolic where the
// family allows, grid-checked on levels 0..horizon otherwise.
inline rho_spec rho_from_theta(const theta_spec& th, std::int64_t horizon = 64) {
    rho_spec rs;
    rs.theta = th;
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        bool trivial = lp->c == 0.0 || (lp->alpha == 0.0 && lp->beta == 0.0);
        if (lp->c <= 0.0) {
            // theta nonincreasing in L => rho = t e^theta has both factors
            // nondecreasing in t; and theta <= theta(L=1) bounds rho/t.
            rs.nondecreasing = true;
            rs.dominated_by_ct = std::exp(detail::log_power_of_l(*lp, 1.0));
            rs.validation_note = "symbolic: c <= 0";
            return rs;
        }
        if (trivial) {  // constant theta in disguise
            rs.nondecreasing = true;
            rs.dominated_by_ct = std::exp(lp->c);
            rs.validation_note = "symbolic: constant theta";
            return rs;
        }
        // c > 0: rho/t = e^theta is unbounded, so no linear domination.
        // Monotonicity needs 1 + t*theta'(t) >= 0.
        bool eventually = lp->alpha < 1.0 || (lp->alpha == 1.0 && lp->beta == 0.0 && lp->c <= 1.0);
        bool grid_ok = true;
        std::int64_t bad_m = -1;
        for (std::int64_t m = 0; m <= horizon && grid_ok; ++m) {
            if (1.0 + detail::t_theta_prime(*lp, big_l_at_level(m)) < 0.0) {
                grid_ok = false;
                bad_m = m;
            }
        }
        rs.nondecreasing = eventually && grid_ok;
        rs.validation_note = rs.nondecreasing
                                 ? "symbolic limit + grid to horizon"
                                 : (grid_ok ? "fails in the limit (t theta' -> -inf)"
                                            : "grid violation at m = " + std::to_string(bad_m));
        return rs;
    }
    if (const auto* ct = std::get_if<constant_theta>(&th)) {
        rs.nondecreasing = true;
        rs.dominated_by_ct = std::exp(ct->c);
        rs.validation_note = "symbolic: constant theta";
        return rs;
    }
    const auto& tab = std::get<tabulated_theta>(th);
    validate_tabulated(tab);
    bool mono = true;
    double max_theta = -std::numeric_limits<double>::infinity();
    const double* prev = nullptr;
    double prev_log_rho = 0.0;
    for (const auto& [m, v] : tab.values) {
        double log_rho = -static_cast<double>(m) * ln2 + v;
        if (prev && log_rho > prev_log_rho) mono = false;  // rho must not grow as t shrinks
        prev = &v;
        prev_log_rho = log_rho;
        max_theta = std::max(max_theta, v);
    }
    rs.nondecreasing = mono;
    rs.dominated_by_ct = std::exp(max_theta);
    rs.validation_note = "table-validated (horizon-limited)";
    return rs;
}

enum class tri { proven, refuted, undecided };

inline const char* tri_name(tri t) {
    switch (t) {
        case tri::proven: return "Proven";
        case tri::refuted: return "Refuted";
        default: return "Undecided";
    }
}

struct comparison_report {
    tri comparable = tri::undecided;           // theta1 and theta2 within constant factors
    tri ratio_to_infinity = tri::undecided;    // theta1/theta2 -> inf
    tri rho_ratio_to_infinity = tri::undecided;  // rho1/rho2 -> inf, i.e. theta1-theta2 -> +inf
    tri log_rho_gap_bounded = tri::undecided;  // |theta1-theta2| bounded
    double ratio_at_horizon = std::numeric_limits<double>::quiet_NaN();
    double gap_at_horizon = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

namespace detail {

struct canon_theta {  // LogPower/Constant normal form: c * L^a * llog^b
    double c, a, b;
};

inline std::optional<canon_theta> canonical(const theta_spec& th) {
    if (const auto* lp = std::get_if<log_power_theta>(&th)) {
        if (lp->c == 0.0) return canon_theta{0.0, 0.0, 0.0};
        return canon_theta{lp->c, lp->alpha, lp->beta};
    }
    if (const auto* ct = std::get_if<constant_theta>(&th)) return canon_theta{ct->c, 0.0, 0.0};
    return std::nullopt;
}

inline bool order_gt(const canon_theta& x, const canon_theta& y) {
    return x.a != y.a ? x.a > y.a : x.b > y.b;
}

inline bool order_positive(const canon_theta& x) { return x.a > 0.0 || (x.a == 0.0 && x.b > 0.0); }

}  // namespace detail

// Tri-state comparison facts about a pair of weights.  Symbolic for the
// closed-form family; tabulated weights only ever yield numeric trends, which
// stay Undecided (a finite table cannot certify behaviour at t -> 0).
inline comparison_report compare_weights(const theta_spec& t1, const theta_spec& t2,
                                         std::int64_t horizon = 1 << 20) {
    comparison_report rep;
    auto c1 = detail::canonical(t1), c2 = detail::canonical(t2);
    {   // numeric annotations at the horizon, for every family
        double v1 = 0, v2 = 0;
        bool have = true;
        try {
            v1 = theta_at_level(t1, horizon);
            v2 = theta_at_level(t2, horizon);
        } catch (const std::domain_error&) {
            have = false;  // table shorter than horizon
            std::int64_t mt = horizon;
            if (const auto* tab = std::get_if<tabulated_theta>(&t1))
                mt = std::min(mt, tab->values.rbegin()->first);
            if (const auto* tab = std::get_if<tabulated_theta>(&t2))
                mt = std::min(mt, tab->values.rbegin()->first);
            if (mt >= 0) {
                v1 = theta_at_level(t1, mt);
                v2 = theta_at_level(t2, mt);
                have = true;
            }
        }
        if (have) {
            rep.ratio_at_horizon = v2 != 0.0 ? v1 / v2 : std::numeric_limits<double>::infinity();
            rep.gap_at_horizon = v1 - v2;
        }
    }
    if (!c1 || !c2) {
        rep.note = "tabulated operand: numeric trend only, no certificate";
        return rep;
    }
    const auto& x = *c1;
    const auto& y = *c2;
    // ratio facts
    if (x.c == 0.0 && y.c == 0.0) {
        rep.comparable = tri::proven;
        rep.ratio_to_infinity = tri::refuted;
        rep.rho_ratio_to_infinity = tri::refuted;
        rep.log_rho_gap_bounded = tri::proven;
        rep.note = "both weights identically zero";
        return rep;
    }
    if (y.c == 0.0) {
        rep.ratio_to_infinity = tri::undecided;
        rep.note = "theta2 identically zero: ratio undefined";
        rep.comparable = tri::refuted;
    } else if (x.c == 0.0) {
        rep.ratio_to_infinity = tri::refuted;
        rep.comparable = tri::refuted;
    } else if (detail::order_gt(x, y)) {
        rep.ratio_to_infinity = (x.c > 0.0) == (y.c > 0.0) ? tri::proven : tri::refuted;
        rep.comparable = tri::refuted;
    } else if (detail::order_gt(y, x)) {
        rep.ratio_to_infinity = tri::refuted;  // ratio -> 0
        rep.comparable = tri::refuted;
    } else {  // equal growth order
        rep.ratio_to_infinity = tri::refuted;  // finite limit x.c/y.c
        rep.comparable = x.c / y.c > 0.0 ? tri::proven : tri::refuted;
    }
    // difference facts: theta1 - theta2
    double dom_c;
    bool dom_positive_order;
    if (detail::order_gt(x, y)) {
        dom_c = x.c;
        dom_positive_order = detail::order_positive(x);
    } else if (detail::order_gt(y, x)) {
        dom_c = -y.c;
        dom_positive_order = detail::order_positive(y);
    } else {
        dom_c = x.c - y.c;
        dom_positive_order = detail::order_positive(x);
    }
    if (dom_c == 0.0 || !dom_positive_order) {
        rep.log_rho_gap_bounded = tri::proven;
        rep.rho_ratio_to_infinity = tri::refuted;
    } else {
        rep.log_rho_gap_bounded = tri::refuted;
        rep.rho_ratio_to_infinity = dom_c > 0.0 ? tri::proven : tri::refuted;
    }
    return rep;
}

}  // namespace thinlab
