#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "thinlab/disk_geometry.hpp"
#include "thinlab/series_engine.hpp"
#include "thinlab/summation.hpp"
#include "thinlab/weights.hpp"

namespace thinlab {

// ---------------------------------------------------------------------------
// Bounded holomorphic witnesses: constants, finite Blaschke products, powers
// and products thereof.  Everything with sup-norm at most 1 by construction.
// ---------------------------------------------------------------------------

struct hinf_constant {
    std::complex<double> value{1.0, 0.0};
};

// Zeros listed with multiplicity (repeat a point to raise its multiplicity).
struct hinf_blaschke {
    std::vector<disk_point> zeros;
};

struct h_inf_function;

struct hinf_power {
    std::shared_ptr<const h_inf_function> base;
    std::int64_t m = 1;
};

struct hinf_product {
    std::vector<std::shared_ptr<const h_inf_function>> factors;
};

struct h_inf_function {
    std::variant<hinf_constant, hinf_blaschke, hinf_power, hinf_product> f;
};

inline h_inf_function make_constant(std::complex<double> c) {
    if (std::abs(c) > 1.0)
        throw std::invalid_argument("witness constant must have modulus at most 1");
    return {hinf_constant{c}};
}

inline h_inf_function make_blaschke(std::vector<disk_point> zeros) {
    for (const auto& z : zeros) validate_point(z);
    return {hinf_blaschke{std::move(zeros)}};
}

inline h_inf_function make_power(h_inf_function base, std::int64_t m) {
    if (m < 1) throw std::invalid_argument("witness power exponent must be a positive integer");
    hinf_power p;
    p.base = std::make_shared<const h_inf_function>(std::move(base));
    p.m = m;
    return {std::move(p)};
}

inline h_inf_function make_product(std::vector<h_inf_function> factors) {
    hinf_product pr;
    pr.factors.reserve(factors.size());
    for (auto& g : factors) pr.factors.push_back(std::make_shared<const h_inf_function>(std::move(g)));
    return {std::move(pr)};
}

// True only when the function is the zero function for syntactic reasons:
// a zero constant, possibly buried in powers/products.
inline bool syntactically_zero(const h_inf_function& fn) {
    if (const auto* c = std::get_if<hinf_constant>(&fn.f)) return std::abs(c->value) == 0.0;
    if (std::holds_alternative<hinf_blaschke>(fn.f)) return false;
    if (const auto* p = std::get_if<hinf_power>(&fn.f)) return syntactically_zero(*p->base);
    const auto& pr = std::get<hinf_product>(fn.f);
    for (const auto& g : pr.factors)
        if (syntactically_zero(*g)) return true;
    return false;
}

// log|f(z)| with -inf exactly at zeros.  Blaschke factors evaluate through
// the cancellation-free pseudohyperbolic identity |b_a(z)| = d(a, z).
inline double eval_log_modulus(const h_inf_function& fn, const disk_point& p) {
    if (!(p.delta > 0.0)) throw std::domain_error("eval_log_modulus: point must lie in the open disk");
    if (const auto* c = std::get_if<hinf_constant>(&fn.f)) return std::log(std::abs(c->value));
    if (const auto* b = std::get_if<hinf_blaschke>(&fn.f)) {
        double s = 0.0;
        for (const auto& a : b->zeros) {
            const double d = pseudo_distance(a, p);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            s += std::log(d);
        }
        return s;
    }
    if (const auto* pw = std::get_if<hinf_power>(&fn.f))
        return static_cast<double>(pw->m) * eval_log_modulus(*pw->base, p);
    const auto& pr = std::get<hinf_product>(fn.f);
    double s = 0.0;
    for (const auto& g : pr.factors) {
        const double v = eval_log_modulus(*g, p);
        if (v == -std::numeric_limits<double>::infinity()) return v;
        s += v;
    }
    return s;
}

// ---------------------------------------------------------------------------
// The weighted summatory functional  sum_k rho(delta_k) |f(z_k)|.
// ---------------------------------------------------------------------------

struct summatory_report {
    double total = 0.0;
    std::map<std::int64_t, double> per_annulus;
    std::vector<std::pair<std::size_t, double>> running;  // (points consumed, partial sum)
};

inline summatory_report summatory(const h_inf_function& fn, const rho_spec& rho,
                                  const point_sequence& seq) {
    summatory_report rep;
    compensated_sum total;
    std::map<std::int64_t, compensated_sum> per;
    std::size_t k = 0;
    for (const auto& p : seq.points) {
        validate_point(p);
        const double lf = eval_log_modulus(fn, p);
        double term = 0.0;
        if (lf != -std::numeric_limits<double>::infinity()) {
            const double lt = rho_evaluate(rho.theta, p.delta).log_rho + lf;
            term = lt < -745.0 ? 0.0 : std::exp(lt);
        }
        total.add(term);
        per[annulus_index(p.delta)].add(term);
        ++k;
        if (detail::at_checkpoint(static_cast<std::int64_t>(k)))
            rep.running.emplace_back(k, total.value());
    }
    if (rep.running.empty() || rep.running.back().first != k) rep.running.emplace_back(k, total.value());
    rep.total = total.value();
    for (auto& [m, cs] : per) rep.per_annulus.emplace(m, cs.value());
    return rep;
}

// ---------------------------------------------------------------------------
// Filter transform: keep the points where f is already small, kill the rest
// with a Blaschke factor, and certify the decay pointwise.
// ---------------------------------------------------------------------------

struct filter_certificate_row {
    std::size_t k = 0;
    double lhs = 0.0;  // log|f1(z_k)|
    double rhs = 0.0;  // -theta(delta_k)
    bool ok = false;
};

struct filter_transform_result {
    h_inf_function f1;
    std::vector<std::size_t> kept;     // |f(z_k)| <= e^{-theta(delta_k)} already
    std::vector<std::size_t> removed;  // zeroed out by the Blaschke factor
    std::vector<filter_certificate_row> certificate;  // one row per sequence point
    double removed_blaschke_sum = 0.0;                // sum of delta over removed points
};

inline filter_transform_result blaschke_filter_transform(const h_inf_function& fn,
                                                         const theta_spec& th,
                                                         const point_sequence& seq) {
    filter_transform_result res;
    std::vector<disk_point> removed_pts;
    compensated_sum bsum;
    for (std::size_t k = 0; k < seq.points.size(); ++k) {
        const auto& p = seq.points[k];
        validate_point(p);
        const double lf = eval_log_modulus(fn, p);
        const double bound = -theta_evaluate(th, p.delta);
        if (lf <= bound) {
            res.kept.push_back(k);
        } else {
            res.removed.push_back(k);
            removed_pts.push_back(p);
            bsum.add(p.delta);
        }
    }
    res.removed_blaschke_sum = bsum.value();
    if (removed_pts.empty()) {
        res.f1 = fn;
    } else {
        std::vector<h_inf_function> factors;
        factors.push_back(fn);
        factors.push_back(make_blaschke(std::move(removed_pts)));
        res.f1 = make_product(std::move(factors));
    }
    for (std::size_t k = 0; k < seq.points.size(); ++k) {
        const auto& p = seq.points[k];
        filter_certificate_row row;
        row.k = k;
        row.lhs = eval_log_modulus(res.f1, p);
        row.rhs = -theta_evaluate(th, p.delta);
        row.ok = !(row.lhs > row.rhs);
        res.certificate.push_back(row);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Power trick: given certified decay |f(z_k)| <= e^{-theta(delta_k)} and a
// lower bound on theta against loglog(1/t), raising f to the power m turns
// the weighted sum into a convergent one.
// ---------------------------------------------------------------------------

struct power_trick_report {
    std::int64_t m = 2;              // chosen exponent
    double finite_sum = 0.0;         // per-annulus bound sum over the profile
    double c_delta = 0.0;            // max over profiled annuli of l_n
    std::optional<double> tail_bound;
    tier_t tier = tier_t::numeric_trend;
    std::string note;
};

inline power_trick_report power_trick(const h_inf_function& fn, const theta_spec& th,
                                      const annulus_profile& prof,
                                      const std::vector<filter_certificate_row>& decay_certificate,
                                      double l_lower, std::int64_t grid_horizon = 4096) {
    if (!(l_lower > 0.0))
        throw std::invalid_argument("power_trick: the loglog lower bound must be positive");
    if (syntactically_zero(fn))
        throw std::invalid_argument("power_trick: witness is identically zero");
    for (const auto& row : decay_certificate)
        if (!row.ok)
            throw std::invalid_argument("power_trick: decay certificate row " +
                                        std::to_string(row.k) + " is violated");
    // The claimed bound is on a liminf, so early levels may dip below it;
    // validate theta(2^-n) >= l_lower * log(n ln 2) on the deep half of the grid.
    if (grid_horizon < 4) throw std::invalid_argument("power_trick: grid horizon too small");
    std::int64_t checked = 0;
    for (std::int64_t n = std::max<std::int64_t>(2, grid_horizon / 2); n <= grid_horizon; ++n) {
        double tn = 0.0;
        try {
            tn = theta_at_level(th, n);
        } catch (const std::domain_error&) {
            continue;  // tabulated weight has no sample here
        }
        ++checked;
        const double ll = std::log(static_cast<double>(n) * ln2);
        if (tn < l_lower * ll)
            throw std::domain_error(
                "power_trick: claimed lower bound fails on the dyadic grid at level n=" +
                std::to_string(n));
    }
    if (checked == 0)
        throw std::domain_error(
            "power_trick: no dyadic samples available to validate the lower bound");

    power_trick_report rep;
    rep.m = static_cast<std::int64_t>(std::floor(2.0 / l_lower)) + 2;  // smallest m with (m-1) l/2 > 1

    // per-annulus bound: sum over Y_n of delta * e^{theta} |f|^m <= l_n e^{-(m-1) theta_n},
    // valid when theta is nonincreasing in t (samples nondecreasing in n)
    std::int64_t n_last = 0;
    double prev_theta = -std::numeric_limits<double>::infinity();
    for (const auto& [n, st] : prof.rows) {
        if (st.n == 0) continue;
        const double tn = theta_at_level(th, n);
        if (tn < prev_theta)
            throw std::domain_error(
                "power_trick: theta must be nonincreasing in t across the profiled annuli; "
                "samples decrease at level n=" + std::to_string(n));
        prev_theta = tn;
        n_last = std::max(n_last, n);
        rep.c_delta = std::max(rep.c_delta, st.l);
    }
    compensated_sum fs;
    const double q = static_cast<double>(rep.m - 1);
    for (const auto& [n, st] : prof.rows) {
        if (st.n == 0) continue;
        const double e = -q * theta_at_level(th, n);
        fs.add(e < -745.0 ? 0.0 : st.l * std::exp(e));
    }
    rep.finite_sum = fs.value();

    if (n_last > 0 && rep.c_delta > 0.0) {
        auto u = [&](std::int64_t n) {
            double tn;
            try {
                tn = theta_at_level(th, n);
            } catch (const std::domain_error&) {
                return std::numeric_limits<double>::quiet_NaN();  // aborts the block tail
            }
            const double e = -q * tn;
            return e < -745.0 ? 0.0 : rep.c_delta * std::exp(e);
        };
        rep.tail_bound = detail::doubling_block_tail(u, n_last);
    }
    if (rep.tail_bound) {
        rep.tier = tier_t::monotone_tail_bound;
        rep.note = "per-annulus mass capped by " + detail::fmt_real(rep.c_delta) +
                   "; doubling-block tail certified beyond level " + detail::fmt_int(n_last);
    } else {
        rep.note = "tail bound unavailable beyond level " + detail::fmt_int(n_last);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Exceptional annuli: levels where fewer than half the points keep
// |f| above the gap-scaled lower bound.
// ---------------------------------------------------------------------------

struct exceptional_report {
    std::set<std::int64_t> J;
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> counts;  // m -> (passing, required)
    double blaschke_mass = 0.0;          // sum over J of N_m 2^-m
    std::vector<std::int64_t> skipped;   // annuli not tested (spacing scale, N_m < 6)
};

inline exceptional_report exceptional_indices(const h_inf_function& fn, const point_sequence& seq,
                                              double c, gap_scale scale) {
    if (!(c > 0.0)) throw std::invalid_argument("exceptional_indices: C must be positive");
    std::map<std::int64_t, std::vector<std::size_t>> by_annulus;
    for (std::size_t k = 0; k < seq.points.size(); ++k) {
        validate_point(seq.points[k]);
        by_annulus[annulus_index(seq.points[k].delta)].push_back(k);
    }
    const annulus_profile prof = build_profile(seq);

    exceptional_report rep;
    compensated_sum mass;
    for (const auto& [m, idx] : by_annulus) {
        const auto& st = prof.rows.at(m);
        double gap = 0.0;
        if (scale == gap_scale::dyadic_gap) {
            gap = std::exp(static_cast<double>(m) * ln2 - std::log(static_cast<double>(st.n)));
        } else {
            if (!st.dbar) {
                rep.skipped.push_back(m);
                continue;
            }
            gap = 1.0 / (static_cast<double>(st.n) * *st.dbar);
        }
        const double bound = -c * gap;
        std::uint64_t passing = 0;
        for (std::size_t k : idx)
            if (eval_log_modulus(fn, seq.points[k]) > bound) ++passing;
        const std::uint64_t required = (st.n + 1) / 2;  // ceil(N_m / 2)
        rep.counts.emplace(m, std::make_pair(passing, required));
        if (passing < required) {
            rep.J.insert(m);
            mass.add(std::ldexp(static_cast<double>(st.n), static_cast<int>(std::max<std::int64_t>(-1074, -m))));
        }
    }
    rep.blaschke_mass = mass.value();
    return rep;
}

// Smallest constant on the grid for which the exceptional mass drops to the
// threshold; for a fixed finite product some finite constant always works, so
// nullopt only means the grid stopped too early.
inline std::optional<double> exceptional_threshold_scan(const h_inf_function& fn,
                                                        const point_sequence& seq,
                                                        std::vector<double> c_grid, double threshold,
                                                        gap_scale scale) {
    std::sort(c_grid.begin(), c_grid.end());
    for (double c : c_grid)
        if (exceptional_indices(fn, seq, c, scale).blaschke_mass <= threshold) return c;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Nevanlinna characteristic by periodic trapezoidal quadrature, and the
// zero-counting measure eta of a finite Blaschke product.
// ---------------------------------------------------------------------------

struct nevanlinna_report {
    double value = 0.0;
    double integral_part = 0.0;
    double pole_part = 0.0;
    double quad_error = 0.0;  // |T(quad_n) - T(quad_n/2)|
    double r_used = 0.0;
};

namespace detail {

template <typename Integrand>
inline double circle_mean(Integrand&& g, std::int64_t quad_n) {
    compensated_sum s;
    for (std::int64_t j = 0; j < quad_n; ++j)
        s.add(g(two_pi * (static_cast<double>(j) / static_cast<double>(quad_n))));
    return s.value() / static_cast<double>(quad_n);
}

}  // namespace detail

inline nevanlinna_report nevanlinna_T(const h_inf_function& fn, double r, std::int64_t quad_n) {
    if (!(r > 0.0) || !(r < 1.0))
        throw std::domain_error("nevanlinna_T: r must lie in (0,1)");
    if (quad_n < 8) throw std::invalid_argument("nevanlinna_T: need at least 8 quadrature nodes");
    if (quad_n % 2 != 0) ++quad_n;
    auto g = [&](double phi) {
        disk_point p;
        p.delta = 1.0 - r;
        p.angle = phi;
        return std::max(0.0, eval_log_modulus(fn, p));
    };
    nevanlinna_report rep;
    rep.r_used = r;
    rep.integral_part = detail::circle_mean(g, quad_n);
    rep.quad_error = std::abs(rep.integral_part - detail::circle_mean(g, quad_n / 2));
    rep.value = rep.integral_part;
    return rep;
}

// Characteristic of 1/B for a finite Blaschke product B: boundary integral of
// log^+ |1/B| plus the pole term over the zeros inside radius r.
inline nevanlinna_report nevanlinna_T_reciprocal(const hinf_blaschke& b, double r,
                                                 std::int64_t quad_n) {
    if (!(r > 0.0) || !(r < 1.0))
        throw std::domain_error("nevanlinna_T: r must lie in (0,1)");
    if (quad_n < 8) throw std::invalid_argument("nevanlinna_T: need at least 8 quadrature nodes");
    if (quad_n % 2 != 0) ++quad_n;
    for (const auto& z : b.zeros) {
        validate_point(z);
        if (z.delta == 1.0)
            throw std::domain_error("nevanlinna_T: reciprocal has a pole at the origin");
    }
    // keep r off every zero modulus so no quadrature circle passes through a zero
    bool moved = true;
    while (moved) {
        moved = false;
        for (const auto& z : b.zeros)
            if (1.0 - z.delta == r) {
                r = std::nextafter(r, 1.0);
                moved = true;
            }
        if (!(r < 1.0)) throw std::domain_error("nevanlinna_T: r collided with the boundary");
    }
    const h_inf_function fb{b};
    auto g = [&](double phi) {
        disk_point p;
        p.delta = 1.0 - r;
        p.angle = phi;
        return std::max(0.0, -eval_log_modulus(fb, p));
    };
    nevanlinna_report rep;
    rep.r_used = r;
    rep.integral_part = detail::circle_mean(g, quad_n);
    rep.quad_error = std::abs(rep.integral_part - detail::circle_mean(g, quad_n / 2));
    compensated_sum poles;
    for (const auto& z : b.zeros) {
        const double mod = 1.0 - z.delta;
        if (mod < r) poles.add(std::log(r / mod));
    }
    rep.pole_part = poles.value();
    rep.value = rep.integral_part + rep.pole_part;
    return rep;
}

// Region of integration for eta: a Euclidean disk, or the whole closed disk.
struct eta_region {
    std::optional<std::pair<std::complex<double>, double>> disk;  // nullopt = closed unit disk
};

struct eta_report {
    double value = 0.0;
    double boundary_component = 0.0;  // provably zero for finite Blaschke products
    std::size_t zeros_in_region = 0;
};

inline eta_report eta_measure(const hinf_blaschke& b, const eta_region& region) {
    if (region.disk && region.disk->second < 0.0)
        throw std::invalid_argument("eta_measure: region radius must be nonnegative");
    eta_report rep;
    compensated_sum s;
    for (const auto& z : b.zeros) {
        validate_point(z);
        bool inside = true;
        if (region.disk) {
            const double rad = 1.0 - z.delta;
            const std::complex<double> a{rad * std::cos(z.angle), rad * std::sin(z.angle)};
            inside = std::abs(a - region.disk->first) <= region.disk->second;
        }
        if (!inside) continue;
        if (z.delta == 1.0)
            throw std::domain_error("eta_measure: a zero at the origin carries infinite mass");
        ++rep.zeros_in_region;
        s.add(-std::log1p(-z.delta));  // log(1/|a|)
    }
    rep.value = s.value();
    return rep;
}

}  // namespace thinlab
