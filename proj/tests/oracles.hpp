#pragma once

// Independent reference computations for the test suite.  Everything here is
// deliberately naive: direct complex arithmetic (in quad precision where the
// tolerance demands it), all-pairs scans, textbook integral/condensation
// bounds.  Nothing includes library internals beyond the basic point types.

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <thinlab/disk_geometry.hpp>

namespace oracle {

// quad-precision complex value of a stored (delta, angle) point
struct qcomplex {
    __float128 re = 0, im = 0;
};

inline qcomplex to_q(const thinlab::disk_point& p) {
    __float128 r = 1.0q - static_cast<__float128>(p.delta);
    __float128 a = static_cast<__float128>(p.angle);
    return {r * cosq(a), r * sinq(a)};
}

inline qcomplex q_sub(qcomplex a, qcomplex b) { return {a.re - b.re, a.im - b.im}; }

inline qcomplex q_mul(qcomplex a, qcomplex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

inline qcomplex q_conj(qcomplex a) { return {a.re, -a.im}; }

inline __float128 q_abs(qcomplex a) { return sqrtq(a.re * a.re + a.im * a.im); }

inline qcomplex q_div(qcomplex a, qcomplex b) {
    __float128 d = b.re * b.re + b.im * b.im;
    qcomplex n = q_mul(a, q_conj(b));
    return {n.re / d, n.im / d};
}

// |z - w| / |1 - conj(z) w| by direct arithmetic
inline double pseudo_distance_ref(const thinlab::disk_point& p, const thinlab::disk_point& q) {
    qcomplex z = to_q(p), w = to_q(q);
    qcomplex num = q_sub(z, w);
    qcomplex den = q_sub(qcomplex{1.0q, 0.0q}, q_mul(q_conj(z), w));
    return static_cast<double>(q_abs(num) / q_abs(den));
}

// Moebius map phi_a(z) = (a - z) / (1 - conj(a) z), returned as a disk_point
inline thinlab::disk_point mobius_ref(const thinlab::disk_point& a, const thinlab::disk_point& z) {
    qcomplex qa = to_q(a), qz = to_q(z);
    qcomplex img = q_div(q_sub(qa, qz), q_sub(qcomplex{1.0q, 0.0q}, q_mul(q_conj(qa), qz)));
    __float128 mod = q_abs(img);
    double delta = static_cast<double>(1.0q - mod);
    double ang = static_cast<double>(atan2q(img.im, img.re));
    if (ang < 0) ang += 2.0 * std::acos(-1.0);
    if (delta <= 0) delta = std::numeric_limits<double>::min();
    if (delta > 1) delta = 1.0;
    return {delta, ang, {}};
}

// all-pairs separation scan
struct brute_pair {
    double value = 1.0;
    std::size_t i = 0, j = 0;
};

inline brute_pair brute_separation(const std::vector<thinlab::disk_point>& pts) {
    brute_pair best;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = thinlab::pseudo_distance(pts[i], pts[j]);
            if (d < best.value) best = {d, i, j};
        }
    return best;
}

inline brute_pair brute_separation_ref(const std::vector<thinlab::disk_point>& pts) {
    brute_pair best;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double d = pseudo_distance_ref(pts[i], pts[j]);
            if (d < best.value) best = {d, i, j};
        }
    return best;
}

// deterministic doubles in [0,1) independent of distribution internals
struct rng {
    std::mt19937_64 gen;
    explicit rng(std::uint64_t seed) : gen(seed) {}
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::int64_t pick(std::int64_t n) { return static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(n)); }
};

inline thinlab::disk_point random_point(rng& r, double delta_lo = 1e-6, double delta_hi = 1.0) {
    // uniform in log(delta), uniform angle: spreads mass toward the boundary
    double ld = r.uniform(std::log(delta_lo), std::log(delta_hi));
    return {std::exp(ld), r.uniform(0.0, 2.0 * std::acos(-1.0)), {}};
}

// Cauchy condensation for sum 1/(m^a (log m)^b (e-ish offsets ignored)):
// condensed terms 2^k / f(2^k); divergence decided by comparing growth.
inline bool bertrand_divergent_ref(double a, double b) {
    if (a < 1.0) return true;
    if (a > 1.0) return false;
    return b <= 1.0;
}

// integral-test tail of sum_{m > M} m^-2
inline double integral_tail_msq(double M) { return 1.0 / M; }

}  // namespace oracle
