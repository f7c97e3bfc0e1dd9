#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "thinlab/disk_geometry.hpp"
#include "thinlab/weights.hpp"

namespace thinlab {

// One dyadic level of a count profile.  log_n is authoritative (counts for
// deep levels exceed double/uint64 range); n is kept when exactly
// representable.  dbar is the trimmed nearest-neighbour spacing when known.
struct level_count {
    std::int64_t m = 0;
    double log_n = 0.0;
    std::optional<std::uint64_t> n;
    std::optional<double> dbar;
};

// Generator metadata: lets the series engine attach symbolic certificates to
// count families instead of treating them as bare finite tables.
struct example_profile_family {
    theta_spec theta;
    std::optional<double> p_const;  // p_m = constant
    bool p_is_log_m = false;        // p_m = log m
};

struct full_circles_family {
    std::int64_t m_first = 1;  // N_m = 2^m for every m >= m_first
};

using counts_family = std::variant<example_profile_family, full_circles_family>;

struct level_counts {
    std::vector<level_count> levels;  // sorted by m, unique
    bool complete = true;             // false: truncated view of an infinite family
    std::optional<counts_family> family;
};

inline level_counts counts_from_profile(const annulus_profile& prof, bool complete = false) {
    level_counts out;
    out.complete = complete;
    for (const auto& [m, st] : prof.rows) {
        if (st.n == 0) continue;
        level_count lc;
        lc.m = m;
        lc.n = st.n;
        lc.log_n = std::log(static_cast<double>(st.n));
        lc.dbar = st.dbar;
        out.levels.push_back(lc);
    }
    return out;
}

inline const level_count* find_level(const level_counts& c, std::int64_t m) {
    auto it = std::lower_bound(c.levels.begin(), c.levels.end(), m,
                               [](const level_count& lc, std::int64_t v) { return lc.m < v; });
    if (it == c.levels.end() || it->m != m) return nullptr;
    return &*it;
}

}  // namespace thinlab
