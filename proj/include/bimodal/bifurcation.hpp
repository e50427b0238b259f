#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "bimodal/map_core.hpp"
#include "bimodal/orbit.hpp"

namespace bimodal {

/// Fold: cycle multiplier +1. Flip: multiplier -1.
enum class BifurcationKind { Fold, Flip };

std::string_view to_string(BifurcationKind kind) noexcept;

struct BifurcationPoint {
    double b = 0.0;
    double k = 0.0;
    double x = 0.0;  // a point of the n-cycle
    int n = 1;
    BifurcationKind kind = BifurcationKind::Fold;

    MapParams params() const noexcept { return {b, k}; }
};

/// Residuals and analytic derivatives of the n-cycle system at (x, b, k):
///   G1 = f^n(x) - x,  G2 = (f^n)'(x) - s.
struct CycleJet {
    double g1 = 0.0;
    double g2 = 0.0;
    double multiplier = 0.0;
    std::array<double, 3> dg1{};  // d/dx, d/db, d/dk
    std::array<double, 3> dg2{};
};

CycleJet cycle_jet(const MapParams& p, double x, int n, BifurcationKind kind);

/// Which parameter Newton solves for alongside x.
enum class FreeParam { Auto, B, K };

/// Newton iteration on {f^n(x) - x = 0, (f^n)'(x) = +-1} in (x, b) at
/// fixed k or (x, k) at fixed b. Throws NoConvergence, SingularJacobian,
/// or DegenerateCycle (the solution has a smaller minimal period).
BifurcationPoint locate_cycle_bifurcation(const MapParams& p0, double x0, int n, BifurcationKind kind,
                                          FreeParam free = FreeParam::Auto);

/// Re-check of the defining equations through plain map composition.
bool verify_bifurcation_point(const BifurcationPoint& pt, double cycle_tol = 1e-10, double eig_tol = 1e-8);

enum class StopReason { RangeExhausted, LeftDomain, NoConvergence, MaxPoints };

std::string_view to_string(StopReason reason) noexcept;

struct BifurcationCurve {
    BifurcationKind kind = BifurcationKind::Fold;
    int n = 1;
    std::vector<BifurcationPoint> points;
    StopReason stop_forward = StopReason::RangeExhausted;
    StopReason stop_backward = StopReason::RangeExhausted;
};

struct ContinuationOptions {
    double step = 1e-3;
    double k_lo = -60.0;
    double k_hi = -4.0;
    /// Optional b-window; points outside end that branch.
    double b_lo = -1e300;
    double b_hi = 1e300;
    std::size_t max_points = 20000;
    int min_step_divisor = 64;
};

/// Pseudo-arclength continuation in (x, b, k), both directions from the
/// seed, joined into one ordered polyline.
BifurcationCurve continue_curve(const BifurcationPoint& seed, const ContinuationOptions& opts);

/// Tangent of the curve in the (b, k) plane at a point, unit length.
std::array<double, 2> curve_tangent_bk(const BifurcationPoint& pt);

struct CurveIntersection {
    double b = 0.0;
    double k = 0.0;
    BifurcationPoint on_first;
    BifurcationPoint on_second;
};

/// Crossing points of two curves, refined by bisection along the first
/// curve on the signed distance to the second.
std::vector<CurveIntersection> intersect_curves(const BifurcationCurve& first, const BifurcationCurve& second);

/// Seed for a fold (or flip) curve of n-cycles harvested from a coarse
/// parameter scan of the window: the cell whose stable n-cycle has the
/// multiplier closest to the critical value is polished by Newton.
std::optional<BifurcationPoint> harvest_seed(double b_lo, double b_hi, double k_lo, double k_hi, int n,
                                             BifurcationKind kind, int grid = 40, const OrbitConfig& cfg = {});

struct CrisisBoundarySample {
    double b = 0.0;
    double k = 0.0;
    int n_family = 0;
};

enum class ScanAxis { B, K };

/// True when the attractor set holds an n*2^m cycle or a chaotic attractor
/// with n*2^m bands.
bool has_family(const AttractorSet& set, int n_family);

/// Final-bifurcation points of the period-n family. Lines across the
/// window are spaced `resolution` apart; along each line (in the `axis`
/// direction) every step where a chaotic n*2^m-band attractor on one side
/// meets no family attractor on the other is bisected to resolution / 100.
/// The recorded point is the last parameter where the family is present.
std::vector<CrisisBoundarySample> crisis_boundary_scan(double b_lo, double b_hi, double k_lo, double k_hi,
                                                       int n_family, ScanAxis axis, double resolution,
                                                       const OrbitConfig& cfg = {}, int threads = 1);

}  // namespace bimodal
