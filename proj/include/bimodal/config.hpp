#pragma once

#include <cstddef>

namespace bimodal {

/// Numerical tolerances and iteration budgets shared by every module and
/// its tests. Changing a value here changes it everywhere.
struct Tolerances {
    static constexpr double deriv = 1e-12;          // f'(critical point) == 0
    static constexpr double xcheck = 1e-8;          // closed form vs. composed formula
    static constexpr double critical_guard = 1e-10; // |f'| below this rejects the Schwarzian
    static constexpr double region_tie = 1e-14;     // boundary-curve equality in classify()
    static constexpr double period_rel = 1e-8;      // cycle detection, relative to tail diameter
    static constexpr double chaos_lyapunov = 1e-3;  // positive-exponent threshold
    static constexpr double same_attractor = 1e-6;  // Hausdorff merge distance for cycles
    static constexpr double newton_residual = 1e-11;
    static constexpr double singular_det = 1e-14;
};

struct OrbitDefaults {
    static constexpr std::size_t max_period = 512;
    static constexpr std::size_t n_transient = 100000;
    static constexpr std::size_t n_sample = 2 * max_period;
    static constexpr std::size_t max_iterations = 10000000;
    static constexpr double escape_bound = 1e6;
};

}  // namespace bimodal
