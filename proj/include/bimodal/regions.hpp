#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "bimodal/map_core.hpp"

namespace bimodal {

/// Partition of the (b, k) plane.
///
/// Inside P = {k < b < 0} the fixed point is stable when k (b + 2) <= b^2.
/// The remaining points all have k < -4 and split by the curves
/// b = b1(k) (f(x_max) = x_min) and b = b2(k) (f(x_min) = x_max):
///
///   UnimodalLeft   b < min(b1, b2)         absorbing [f^2(x_max), f(x_max)]
///   UnimodalRight  b > max(b1, b2)         absorbing [f(x_min), f^2(x_min)]
///   MonotoneCore   b2 < b < b1             f monotone on [f(x_min), f(x_max)]
///   Bimodal        b1 < b < b2             absorbing [f(x_min), f(x_max)]
enum class RegionTag {
    OutsideP,
    FixedPointStable,
    MonotoneCore,
    UnimodalLeft,
    UnimodalRight,
    Bimodal,
};

std::string_view to_string(RegionTag tag) noexcept;
RegionTag region_from_string(std::string_view name);

enum class IntervalKind { Jminus, Jplus, J0, MonotoneCoreInterval };

std::string_view to_string(IntervalKind kind) noexcept;

struct AbsorbingInterval {
    double lo = 0.0;
    double hi = 0.0;
    IntervalKind kind = IntervalKind::J0;

    bool contains(double x, double slack = 0.0) const noexcept
    {
        return x >= lo - slack && x <= hi + slack;
    }
};

enum class BoundaryCurve { Eta1Flip, Gamma1, Gamma2 };

std::string_view to_string(BoundaryCurve curve) noexcept;

struct BoundaryCurveSample {
    double k = 0.0;
    double b = 0.0;
    BoundaryCurve curve_id = BoundaryCurve::Eta1Flip;
};

/// Ties on a boundary curve (within Tolerances::region_tie) go to the
/// simpler side: FixedPointStable, then MonotoneCore, then Unimodal*.
RegionTag classify(const MapParams& p);

bool fixed_point_stable(const MapParams& p) noexcept;

/// k on the fixed point's period-doubling curve k = b^2 / (b + 2).
/// The curve lies inside P exactly for b < -2; DomainError otherwise.
double flip_curve_k(double b);

/// The two b-values of the flip curve at a given k (k < -8), ordered
/// (left, right). They are conjugate: left + right = k.
std::pair<double, double> flip_curve_b(double k);

/// (b1, b2) with f(x_max) = x_min on b = b1 and f(x_min) = x_max on b = b2.
/// DomainError for k >= -4.
std::pair<double, double> gamma_boundaries(double k);

/// k at which b1(k) = b2(k); below it the Bimodal band opens.
double gamma_intersection_k();

/// Globally attracting absorbing interval for (b, k) in P with k < -4 whose fixed
/// point is unstable. DomainError otherwise.
AbsorbingInterval absorbing_interval(const MapParams& p);

/// Samples of the analytic boundary curves over k in [k_lo, k_hi].
std::vector<BoundaryCurveSample> sample_boundary_curves(double k_lo, double k_hi, int n);

}  // namespace bimodal
