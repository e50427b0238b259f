#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bimodal/config.hpp"
#include "bimodal/map_core.hpp"

namespace bimodal {

struct OrbitConfig {
    std::size_t n_transient = OrbitDefaults::n_transient;
    std::size_t n_sample = OrbitDefaults::n_sample;
    /// Unresolved orbits are re-run with a doubled transient until the total
    /// iteration count would exceed this cap.
    std::size_t max_iterations = OrbitDefaults::max_iterations;
};

struct OrbitResult {
    double seed = 0.0;
    std::vector<double> tail;
    bool escaped = false;
};

enum class AttractorKind { FixedPoint, Cycle, Chaotic, Divergent };

std::string_view to_string(AttractorKind kind) noexcept;

struct Band {
    double lo = 0.0;
    double hi = 0.0;
};

struct Attractor {
    AttractorKind kind = AttractorKind::Divergent;
    /// Cycle length for FixedPoint/Cycle; band count for Chaotic.
    std::size_t period = 0;
    /// Sorted cycle points, or sorted band endpoints for chaotic attractors.
    std::vector<double> points;
    std::vector<Band> bands;
    double lyapunov = 0.0;

    bool periodic() const noexcept
    {
        return kind == AttractorKind::FixedPoint || kind == AttractorKind::Cycle;
    }
};

struct AttractorSet {
    /// attractors[i] carries the index of the critical seeds that reach it:
    /// seeds[0] is the x_max orbit, seeds[1] the x_min orbit.
    std::vector<Attractor> attractors;
    std::vector<std::size_t> seed_owner;  // size 2, indexes into attractors
    bool bistable = false;
};

struct Period2Orbit {
    double x1 = 0.0;
    double x2 = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double B = 0.0;
    double k_reconstructed = 0.0;
};

OrbitResult iterate(const MapParams& p, double x0, std::size_t n_transient, std::size_t n_sample);

double lyapunov_estimate(const MapParams& p, std::span<const double> tail);

/// Smallest q (<= max_period) with max_i |x_{i+q} - x_i| below the relative
/// tolerance, if any.
std::optional<std::size_t> minimal_period(std::span<const double> tail,
                                          std::size_t max_period = OrbitDefaults::max_period);

/// Cyclic band structure of a chaotic tail: the largest q for which the
/// residue classes i mod q occupy pairwise disjoint intervals.
std::vector<Band> detect_bands(std::span<const double> tail, std::size_t max_bands);

/// Classifies a bounded tail. Throws UnresolvedAttractor when neither a
/// period nor a Lyapunov exponent above Tolerances::chaos_lyapunov is found.
Attractor classify_orbit(std::span<const double> tail, const MapParams& p);

/// iterate + classify_orbit with transient doubling for unresolved orbits.
Attractor find_attractor(const MapParams& p, double x0, const OrbitConfig& cfg = {});

double hausdorff(std::span<const double> a, std::span<const double> b);

/// Same-attractor test used to merge the two critical-seed results.
bool same_attractor(const Attractor& a, const Attractor& b);

/// Attractors reached from x_max and x_min. Requires (b, k) in P, k < -4.
AttractorSet attractor_set(const MapParams& p, const OrbitConfig& cfg = {});

/// Index of the attractor of `set` that the tail of an orbit belongs to, or
/// nothing. Cycles must match within `cycle_tol` (Hausdorff); chaotic tails
/// must lie in the nearest attractor's bands.
std::optional<std::size_t> match_orbit(const AttractorSet& set, std::span<const double> tail,
                                       double cycle_tol = 1e-5);

struct SeedCheck {
    std::size_t seeds = 0;
    std::size_t matched = 0;
    std::size_t escaped = 0;
    std::vector<std::size_t> hits;  // per attractor
};

/// Runs n random seeds from [lo, hi] and matches each against `set`. An
/// unmatched bounded orbit keeps iterating with a doubling budget up to
/// cfg.max_iterations before it counts as a stray.
SeedCheck check_random_seeds(const MapParams& p, const AttractorSet& set, std::size_t n_seeds,
                             std::uint64_t rng_seed, double lo, double hi, const OrbitConfig& cfg = {});

/// Unique 2-cycle for (b, k) in P with an unstable fixed point.
Period2Orbit find_period2(const MapParams& p);

/// Number of roots of f^2(x) - x other than x*, counted as sign changes on
/// a dense mesh over the absorbing interval inflated by 20%.
int period2_uniqueness_check(const MapParams& p, std::size_t mesh = 200000);

/// k as a function of u = 1/(1+e^{x1}) along B = 2b/k = const.
double k_of_u(double B, double u);

/// Upper bound and u -> B/2 limit of k_of_u.
double k_of_u_limit(double B);

}  // namespace bimodal
