#include "bimodal/regions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bimodal/config.hpp"
#include "bimodal/errors.hpp"

namespace bimodal {

namespace {

bool near(double a, double b) noexcept
{
    return std::abs(a - b) <= Tolerances::region_tie * std::max(1.0, std::abs(b));
}

}  // namespace

std::string_view to_string(RegionTag tag) noexcept
{
    switch (tag) {
    case RegionTag::OutsideP: return "OutsideP";
    case RegionTag::FixedPointStable: return "FixedPointStable";
    case RegionTag::MonotoneCore: return "MonotoneCore";
    case RegionTag::UnimodalLeft: return "UnimodalLeft";
    case RegionTag::UnimodalRight: return "UnimodalRight";
    case RegionTag::Bimodal: return "Bimodal";
    }
    return "?";
}

RegionTag region_from_string(std::string_view name)
{
    for (auto tag : {RegionTag::OutsideP, RegionTag::FixedPointStable, RegionTag::MonotoneCore,
                     RegionTag::UnimodalLeft, RegionTag::UnimodalRight, RegionTag::Bimodal}) {
        if (to_string(tag) == name) {
            return tag;
        }
    }
    throw DomainError("unknown region tag '" + std::string(name) + "'");
}

std::string_view to_string(IntervalKind kind) noexcept
{
    switch (kind) {
    case IntervalKind::Jminus: return "Jminus";
    case IntervalKind::Jplus: return "Jplus";
    case IntervalKind::J0: return "J0";
    case IntervalKind::MonotoneCoreInterval: return "MonotoneCore";
    }
    return "?";
}

std::string_view to_string(BoundaryCurve curve) noexcept
{
    switch (curve) {
    case BoundaryCurve::Eta1Flip: return "eta1_flip";
    case BoundaryCurve::Gamma1: return "gamma1";
    case BoundaryCurve::Gamma2: return "gamma2";
    }
    return "?";
}

bool fixed_point_stable(const MapParams& p) noexcept
{
    // f'(x*) = 1 + b (k - b) / k > -1  <=>  k (b + 2) < b^2
    const double lhs = p.k * (p.b + 2.0);
    const double rhs = p.b * p.b;
    return lhs - rhs <= Tolerances::region_tie * std::max(1.0, rhs);
}

RegionTag classify(const MapParams& p)
{
    if (!in_domain_p(p)) {
        return RegionTag::OutsideP;
    }
    if (fixed_point_stable(p) || p.k >= -4.0) {
        return RegionTag::FixedPointStable;
    }
    const auto [b1, b2] = gamma_boundaries(p.k);
    const double lo = std::min(b1, b2);
    const double hi = std::max(b1, b2);
    const bool on_lo = near(p.b, lo);
    const bool on_hi = near(p.b, hi);

    if (b1 >= b2) {
        // Above the intersection of the curves: monotone core in between.
        if (p.b < lo && !on_lo) return RegionTag::UnimodalLeft;
        if (p.b > hi && !on_hi) return RegionTag::UnimodalRight;
        return RegionTag::MonotoneCore;
    }
    if (p.b < lo || on_lo) return RegionTag::UnimodalLeft;
    if (p.b > hi || on_hi) return RegionTag::UnimodalRight;
    return RegionTag::Bimodal;
}

double flip_curve_k(double b)
{
    if (!(b < -2.0)) {
        throw DomainError("flip curve of the fixed point lies in P only for b < -2, got b = " + std::to_string(b));
    }
    return b * b / (b + 2.0);
}

std::pair<double, double> flip_curve_b(double k)
{
    if (!(k <= -8.0)) {
        throw DomainError("flip curve of the fixed point exists only for k <= -8, got k = " + std::to_string(k));
    }
    // b^2 - k b - 2k = 0
    const double disc = std::sqrt(std::max(0.0, k * k + 8.0 * k));
    const double left = 0.5 * (k - disc);
    // product of roots is -2k; avoids cancellation in 0.5 (k + disc)
    const double right = -2.0 * k / left;
    return {left, right};
}

std::pair<double, double> gamma_boundaries(double k)
{
    if (!(k < -4.0)) {
        throw DomainError("gamma curves are defined for k < -4, got k = " + std::to_string(k));
    }
    const auto [x_max, x_min] = critical_abscissae(k);
    (void)x_max;
    const double z = std::exp(x_min);
    const double b1 = 2.0 * x_min - 1.0 - z;
    const double b2 = -2.0 * x_min - 1.0 - 1.0 / z;
    return {b1, b2};
}

double gamma_intersection_k()
{
    // b1 - b2 = 4 ln z - z + 1/z with z = e^{x_min} > 1, and
    // k = -2 - z - 1/z. The non-trivial zero lies in (2, 100).
    auto g = [](double z) { return 4.0 * std::log(z) - z + 1.0 / z; };
    double lo = 2.0;
    double hi = 100.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    const double z = 0.5 * (lo + hi);
    return -2.0 - z - 1.0 / z;
}

AbsorbingInterval absorbing_interval(const MapParams& p)
{
    const RegionTag tag = classify(p);
    if (tag == RegionTag::OutsideP || tag == RegionTag::FixedPointStable) {
        throw DomainError("absorbing interval needs (b, k) in P with an unstable fixed point; region is " +
                          std::string(to_string(tag)));
    }
    const auto [x_max, x_min] = critical_abscissae(p.k);
    const double fmax = eval(p, x_max);
    const double fmin = eval(p, x_min);
    switch (tag) {
    case RegionTag::UnimodalLeft:
        return {eval(p, fmax), fmax, IntervalKind::Jminus};
    case RegionTag::UnimodalRight:
        return {fmin, eval(p, fmin), IntervalKind::Jplus};
    case RegionTag::Bimodal:
        return {fmin, fmax, IntervalKind::J0};
    default:
        return {fmin, fmax, IntervalKind::MonotoneCoreInterval};
    }
}

std::vector<BoundaryCurveSample> sample_boundary_curves(double k_lo, double k_hi, int n)
{
    if (n < 2 || !(k_lo < k_hi)) {
        throw DomainError("boundary sampling needs n >= 2 and k_lo < k_hi");
    }
    std::vector<BoundaryCurveSample> out;
    for (int i = 0; i < n; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / (n - 1);
        if (k < -4.0) {
            const auto [b1, b2] = gamma_boundaries(k);
            out.push_back({k, b1, BoundaryCurve::Gamma1});
            out.push_back({k, b2, BoundaryCurve::Gamma2});
        }
        if (k <= -8.0) {
            const auto [left, right] = flip_curve_b(k);
            out.push_back({k, left, BoundaryCurve::Eta1Flip});
            out.push_back({k, right, BoundaryCurve::Eta1Flip});
        }
    }
    return out;
}

}  // namespace bimodal
