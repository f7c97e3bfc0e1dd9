#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thinlab/summation.hpp"

namespace thinlab {

inline constexpr double two_pi = 2.0 * std::numbers::pi_v<double>;

struct origin_tag {
    std::int64_t m = 0;   // dyadic level
    std::uint64_t j = 0;  // index on the circle
};

// A point of the unit disk stored by its boundary gap delta = 1-|z| and its
// argument.  Storing the gap (never |z|) keeps points near the boundary at
// full relative precision; |z| is only ever formed as 1-delta where it is
// harmless (radius factors of order one).
struct disk_point {
    double delta = 1.0;          // 1-|z|, in (0,1]
    double angle = 0.0;          // in [0, 2*pi)
    std::optional<origin_tag> gen;
};

inline void validate_point(const disk_point& p) {
    if (!(p.delta > 0.0) || !(p.delta <= 1.0))
        throw std::domain_error("disk_point: delta must lie in (0,1], got " + std::to_string(p.delta));
    if (!(p.angle >= 0.0) || !(p.angle < two_pi))
        throw std::domain_error("disk_point: angle must lie in [0,2*pi), got " + std::to_string(p.angle));
}

struct point_sequence {
    std::vector<disk_point> points;
    std::optional<double> claimed_separation;
};

// Pseudohyperbolic distance |z-w| / |1 - conj(z) w| evaluated through the
// cancellation-free identities
//   |z-w|^2        = (s-u)^2       + 4(1-s)(1-u) sin^2((phi-psi)/2)
//   |1-conj(z)w|^2 = (s+u-s*u)^2   + 4(1-s)(1-u) sin^2((phi-psi)/2)
// where s,u are the boundary gaps.  Both sides stay accurate down to
// delta ~ 2^-45 and beyond; no 1-|z| is ever formed by subtraction.
inline double pseudo_distance(const disk_point& a, const disk_point& b) {
    double s = a.delta, u = b.delta;
    double sp = std::sin(0.5 * (a.angle - b.angle));
    double cross = 4.0 * (1.0 - s) * (1.0 - u) * sp * sp;
    double dnum = (s - u) * (s - u) + cross;
    double dden = (s + u - s * u) * (s + u - s * u) + cross;
    return std::sqrt(dnum / dden);
}

// Euclidean (chordal) distance from the same identity.
inline double chord_distance(const disk_point& a, const disk_point& b) {
    double s = a.delta, u = b.delta;
    double sp = std::sin(0.5 * (a.angle - b.angle));
    return std::sqrt((s - u) * (s - u) + 4.0 * (1.0 - s) * (1.0 - u) * sp * sp);
}

// The unique m >= 0 with 2^-(m+1) < delta <= 2^-m; delta = 2^-m maps to m.
inline std::int64_t annulus_index(double delta) {
    if (!(delta > 0.0) || !(delta <= 1.0))
        throw std::domain_error("annulus_index: delta must lie in (0,1], got " + std::to_string(delta));
    int e = 0;
    double f = std::frexp(delta, &e);  // delta = f * 2^e, f in [0.5, 1)
    // f == 0.5 means delta = 2^(e-1) exactly: boundary goes to the outer annulus.
    return f == 0.5 ? static_cast<std::int64_t>(1 - e) : static_cast<std::int64_t>(-e);
}

struct annulus_stats {
    std::uint64_t n = 0;               // N_m
    std::vector<double> spacings;      // sorted nearest-neighbour chord distances, N_m entries when N_m >= 2
    std::optional<double> dbar;        // mean of the floor(N_m/6) smallest spacings; absent when N_m < 6
    double l = 0.0;                    // N_m * 2^-m
};

struct annulus_profile {
    std::map<std::int64_t, annulus_stats> rows;
};

struct separation_report {
    double value = 1.0;
    bool separated = true;              // false when two points coincide
    std::size_t i = 0, j = 0;           // attaining pair (when 2+ points)
};

namespace detail {

struct bucket {
    std::int64_t m = 0;
    std::vector<std::size_t> idx;   // indices into the sequence, sorted by angle
    double r_min = 0.0;             // smallest radius in the bucket
    double q_max = 0.0;             // largest 1 - |z|^2 = delta (2 - delta) in the bucket
};

inline std::vector<bucket> make_buckets(const std::vector<disk_point>& pts) {
    std::map<std::int64_t, std::vector<std::size_t>> by_m;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        validate_point(pts[k]);
        by_m[annulus_index(pts[k].delta)].push_back(k);
    }
    std::vector<bucket> out;
    out.reserve(by_m.size());
    for (auto& [m, idx] : by_m) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (pts[a].angle != pts[b].angle) return pts[a].angle < pts[b].angle;
            return a < b;
        });
        double r_min = std::numeric_limits<double>::infinity();
        double q_max = 0.0;
        for (std::size_t k : idx) {
            r_min = std::min(r_min, 1.0 - pts[k].delta);
            q_max = std::max(q_max, pts[k].delta * (2.0 - pts[k].delta));
        }
        out.push_back({m, std::move(idx), r_min, q_max});
    }
    return out;
}

// Scans bucket b for the best (smallest) value of dist(q, .) around angle
// q.angle.  stop(sin_half) may return true once no point at cyclic angular gap
// dphi (sin_half = sin(dphi/2), dphi <= pi) can beat the caller's current best;
// that direction of the walk then ends.  skip is an index excluded from
// comparison (the query point itself).
template <typename Dist, typename Stop>
inline void scan_bucket(const std::vector<disk_point>& pts, const bucket& b, const disk_point& q,
                        std::size_t skip, Stop stop, Dist dist, double& best,
                        std::size_t& best_idx) {
    const auto& idx = b.idx;
    std::size_t n = idx.size();
    if (n == 0) return;
    auto angle_of = [&](std::size_t pos) { return pts[idx[pos]].angle; };
    // first position with angle >= q.angle
    std::size_t lo = std::lower_bound(idx.begin(), idx.end(), q.angle, [&](std::size_t a, double v) {
                         return pts[a].angle < v;
                     }) - idx.begin();
    // walk outward in both directions; the nearest-in-angle candidate is always
    // evaluated before any pruning applies
    for (int dir = 0; dir < 2; ++dir) {
        std::size_t steps = 0;
        std::size_t pos = dir == 0 ? (lo % n) : (lo + n - 1) % n;
        double raw = 0.0;
        while (steps < n) {
            double dphi = dir == 0 ? angle_of(pos) - q.angle : q.angle - angle_of(pos);
            if (dphi < 0) dphi += two_pi;
            raw = dphi;
            if (raw > std::numbers::pi_v<double> && steps > 0) break;  // other direction covers these
            if (steps > 0 &&
                stop(std::sin(0.5 * std::min(raw, std::numbers::pi_v<double>))))
                break;
            if (idx[pos] != skip) {
                double d = dist(q, pts[idx[pos]]);
                if (d < best) {
                    best = d;
                    best_idx = idx[pos];
                }
            }
            pos = dir == 0 ? (pos + 1) % n : (pos + n - 1) % n;
            ++steps;
        }
    }
}

}  // namespace detail

// Smallest pairwise pseudohyperbolic distance.  Near-linear for
// circle-structured inputs: points are bucketed by annulus and sorted by
// angle; annulus pairs with gap g are skipped once 1 - 2^(6-g) >= best^2
// (cross-annulus distances satisfy 1 - d^2 <= 2^(6-g)).  In-bucket walks stop
// via the exact identity d^2 = c^2 / (c^2 + (1-|z|^2)(1-|w|^2)): with the
// bucket-wide cap P on the second factor and the chord floor
// c >= 2 sqrt(r_x r_y) sin(dphi/2), everything beyond
// c^2 (1 - best^2) >= P best^2 is provably no better than best.
inline separation_report separation_constant(const point_sequence& seq) {
    const auto& pts = seq.points;
    separation_report rep;
    if (pts.size() < 2) {
        for (const auto& p : pts) validate_point(p);
        return rep;  // value 1 by convention
    }
    auto buckets = detail::make_buckets(pts);
    double best = 1.0;
    std::size_t bi = 0, bj = 0;
    auto dist = [](const disk_point& a, const disk_point& b) { return pseudo_distance(a, b); };
    for (std::size_t x = 0; x < buckets.size(); ++x) {
        for (std::size_t y = x; y < buckets.size(); ++y) {
            std::int64_t gap = buckets[y].m - buckets[x].m;
            if (gap > 6) {
                double bound2 = 1.0 - std::ldexp(1.0, static_cast<int>(std::min<std::int64_t>(6 - gap, 0)));
                if (bound2 >= best * best) continue;  // whole pair of annuli too far apart
            }
            const double r_lo = std::min(buckets[x].r_min, buckets[y].r_min);
            const double chord_scale = 2.0 * std::sqrt(buckets[x].r_min * buckets[y].r_min);
            const double p_cap = buckets[x].q_max * buckets[y].q_max;
            auto stop = [&](double sin_half) {
                if (!(best > 0.0)) return true;  // coincident pair found already
                if (r_lo * sin_half >= best) return true;  // d >= c/2 >= r_lo sin
                const double c = chord_scale * sin_half;
                return best < 1.0 && c * c * (1.0 - best * best) >= p_cap * best * best;
            };
            for (std::size_t k : buckets[x].idx) {
                std::size_t hit = pts.size();
                double before = best;
                detail::scan_bucket(pts, buckets[y], pts[k], k, stop, dist, best, hit);
                if (best < before) {
                    bi = k;
                    bj = hit;
                }
            }
        }
    }
    rep.value = best;
    rep.separated = best > 0.0;
    rep.i = std::min(bi, bj);
    rep.j = std::max(bi, bj);
    return rep;
}

// Per-annulus counts, nearest-neighbour chord spacings, trimmed mean dbar and
// normalized count l = N_m * 2^-m.
inline annulus_profile build_profile(const point_sequence& seq) {
    const auto& pts = seq.points;
    annulus_profile prof;
    auto buckets = detail::make_buckets(pts);
    auto dist = [](const disk_point& a, const disk_point& b) { return chord_distance(a, b); };
    for (const auto& b : buckets) {
        annulus_stats st;
        st.n = b.idx.size();
        st.l = static_cast<double>(st.n) * std::ldexp(1.0, static_cast<int>(std::max<std::int64_t>(-1074, -b.m)));
        if (st.n >= 2) {
            st.spacings.reserve(st.n);
            for (std::size_t k : b.idx) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t hit = pts.size();
                auto stop = [&](double sin_half) { return 2.0 * b.r_min * sin_half >= best; };
                detail::scan_bucket(pts, b, pts[k], k, stop, dist, best, hit);
                st.spacings.push_back(best);
            }
            std::sort(st.spacings.begin(), st.spacings.end());
            if (st.n >= 6) {
                std::size_t take = st.n / 6;
                compensated_sum acc;
                for (std::size_t t = 0; t < take; ++t) acc.add(st.spacings[t]);
                st.dbar = acc.value() / static_cast<double>(take);
            }
        }
        prof.rows[b.m] = std::move(st);
    }
    return prof;
}

struct blaschke_sum_report {
    double total = 0.0;
    std::map<std::int64_t, double> per_annulus;
};

// Sum of boundary gaps (the Blaschke condition quantity), compensated, with a
// per-annulus breakdown.
inline blaschke_sum_report blaschke_sum(const point_sequence& seq) {
    blaschke_sum_report rep;
    std::map<std::int64_t, compensated_sum> parts;
    for (const auto& p : seq.points) {
        validate_point(p);
        parts[annulus_index(p.delta)].add(p.delta);
    }
    compensated_sum total;
    for (auto& [m, acc] : parts) {
        rep.per_annulus[m] = acc.value();
        total.add(acc.value());
    }
    rep.total = total.value();
    return rep;
}

}  // namespace thinlab
