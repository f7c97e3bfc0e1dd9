#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace thinlab {

// Kahan-Babuska-Neumaier compensated accumulator.  Sequential adds in a fixed
// order keep results deterministic across runs.
struct compensated_sum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

// Pairwise reduction of a vector, compensated at the leaves.  Deterministic
// for a fixed input order.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 64) {
        compensated_sum acc;
        for (std::size_t i = lo; i < hi; ++i) acc.add(v[i]);
        return acc.value();
    }
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(v, 0, v.size());
}

// log(e^a + e^b) without overflow; -inf is the additive identity.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = a > b ? a : b;
    double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

// Accumulates sums whose terms are given by their logarithms.  Used wherever
// terms can over- or underflow double range; exp is taken only on readout.
struct log_domain_sum {
    double log_total = -std::numeric_limits<double>::infinity();
    std::size_t terms = 0;

    void add_log(double log_x) {
        log_total = log_add_exp(log_total, log_x);
        ++terms;
    }

    double log_value() const { return log_total; }

    // Clamped to double range on readout.
    double value() const {
        if (log_total > 700.0) return std::numeric_limits<double>::infinity();
        return std::exp(log_total);
    }
};

}  // namespace thinlab
