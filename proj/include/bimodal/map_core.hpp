#pragma once

#include <optional>
#include <utility>

namespace bimodal {

/// Parameters of x -> b + x - k / (1 + e^x).
struct MapParams {
    double b = 0.0;
    double k = 0.0;

    friend bool operator==(const MapParams&, const MapParams&) = default;
};

/// Extrema and fixed point of the map. The extrema exist only for k < -4;
/// the fixed point only inside P = {k < b < 0}.
struct CriticalStructure {
    std::optional<double> x_max;
    std::optional<double> x_min;
    std::optional<double> x_star;

    bool exists_extrema() const noexcept { return x_max.has_value(); }
};

/// 1 / (1 + e^x), evaluated without overflow for any finite x.
double logistic_down(double x) noexcept;

/// e^x / (1 + e^x)^2, the slope factor of the map's derivative.
double logistic_slope(double x) noexcept;

double eval(const MapParams& p, double x) noexcept;

/// n-fold composition.
double eval_n(const MapParams& p, double x, int n) noexcept;

/// Analytic derivative of order 1, 2 or 3. Throws DomainError otherwise.
double derivative(const MapParams& p, double x, int order);

/// Closed-form Schwarzian derivative. Throws CriticalPointError when
/// |f'(x)| < Tolerances::critical_guard.
double schwarzian(const MapParams& p, double x);

/// Roots (x_max, x_min) of f' = 0 for k <= -4; at k = -4 both are 0.
/// Throws DomainError for k > -4.
std::pair<double, double> critical_abscissae(double k);

CriticalStructure critical_points(const MapParams& p);

/// x* = ln(k/b - 1). Throws NoFixedPoint when k/b - 1 <= 0.
double fixed_point(const MapParams& p);

/// (b, k) -> (k - b, k); f_{b,k}(x) = -f_{k-b,k}(-x).
MapParams symmetry_conjugate(const MapParams& p) noexcept;

bool in_domain_p(const MapParams& p) noexcept;

}  // namespace bimodal
