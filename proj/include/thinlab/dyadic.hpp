#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace thinlab {

// Exact nonnegative dyadic rational mant * 2^exp2 with mant < 2^63.
// Every quantity in the index-set construction (counts N_m, bounds 2^m*eps_m,
// ratios N_m*2^-m) has this shape when eps_m is a double, so comparisons and
// the floor/shift/min recursion are exact without bignums.
struct dyadic {
    std::uint64_t mant = 0;
    std::int64_t exp2 = 0;

    static dyadic zero() { return {0, 0}; }

    bool is_zero() const { return mant == 0; }

    dyadic shifted(std::int64_t k) const {
        if (mant == 0) return zero();
        return {mant, exp2 + k};
    }

    // Exact value of a positive double as mant * 2^exp2.
    static dyadic from_double(double x) {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::domain_error("dyadic: value must be finite and nonnegative");
        if (x == 0.0) return zero();
        int e = 0;
        double f = std::frexp(x, &e);           // x = f * 2^e, f in [0.5, 1)
        double scaled = std::ldexp(f, 53);      // integer in [2^52, 2^53)
        return {static_cast<std::uint64_t>(scaled), static_cast<std::int64_t>(e) - 53};
    }

    // Exact floor(x * 2^k) for a nonnegative double x.
    static dyadic floor_scaled(double x, std::int64_t k) {
        dyadic d = from_double(x);
        if (d.mant == 0) return zero();
        std::int64_t e = d.exp2 + k;
        if (e >= 0) return {d.mant, e};
        std::int64_t s = -e;
        if (s >= 64) return zero();
        return {d.mant >> s, 0};
    }

    // Three-way compare of the represented values.
    static int compare(const dyadic& a, const dyadic& b) {
        if (a.mant == 0 && b.mant == 0) return 0;
        if (a.mant == 0) return -1;
        if (b.mant == 0) return 1;
        // Normalize so both mantissas keep their magnitude visible: compare
        // a.mant * 2^(a.exp2-b.exp2) against b.mant using 128-bit shifts.
        std::int64_t d = a.exp2 - b.exp2;
        if (d >= 0) {
            if (d >= 64) return 1;  // a.mant >= 1 so a >= 2^64 * 2^b.exp2 > b
            unsigned __int128 lhs = static_cast<unsigned __int128>(a.mant) << d;
            unsigned __int128 rhs = b.mant;
            return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
        }
        return -compare(b, a);
    }

    friend bool operator<(const dyadic& a, const dyadic& b) { return compare(a, b) < 0; }
    friend bool operator<=(const dyadic& a, const dyadic& b) { return compare(a, b) <= 0; }
    friend bool operator>(const dyadic& a, const dyadic& b) { return compare(a, b) > 0; }
    friend bool operator>=(const dyadic& a, const dyadic& b) { return compare(a, b) >= 0; }
    friend bool operator==(const dyadic& a, const dyadic& b) { return compare(a, b) == 0; }

    static dyadic min(const dyadic& a, const dyadic& b) { return a <= b ? a : b; }

    bool fits_uint64() const {
        if (mant == 0) return true;
        if (exp2 < 0) return false;  // integer values always carry exp2 >= 0 here
        int lead = 63 - __builtin_clzll(mant);
        return exp2 + lead <= 63;
    }

    std::uint64_t to_uint64() const {
        if (!fits_uint64()) throw std::overflow_error("dyadic: value exceeds uint64");
        return mant << exp2;
    }

    // May overflow to +inf for huge exponents; fine for display.
    double to_double() const {
        if (mant == 0) return 0.0;
        return std::ldexp(static_cast<double>(mant), static_cast<int>(std::max<std::int64_t>(
            std::min<std::int64_t>(exp2, 40000), -40000)));
    }

    double log2_value() const {
        if (mant == 0) return -std::numeric_limits<double>::infinity();
        return std::log2(static_cast<double>(mant)) + static_cast<double>(exp2);
    }

    std::string to_string() const {
        if (mant == 0) return "0";
        if (fits_uint64()) return std::to_string(to_uint64());
        return std::to_string(mant) + "*2^" + std::to_string(exp2);
    }
};

}  // namespace thinlab
