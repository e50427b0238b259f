#include "bimodal/map_core.hpp"

#include <cmath>
#include <string>

#include "bimodal/config.hpp"
#include "bimodal/errors.hpp"

namespace bimodal {

double logistic_down(double x) noexcept
{
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

double logistic_slope(double x) noexcept
{
    // u (1 - u) with u = 1/(1+e^x); 1 - u = 1/(1+e^{-x}) is computed
    // directly so that neither factor cancels.
    return logistic_down(x) * logistic_down(-x);
}

double eval(const MapParams& p, double x) noexcept
{
    return p.b + x - p.k * logistic_down(x);
}

double eval_n(const MapParams& p, double x, int n) noexcept
{
    for (int i = 0; i < n; ++i) {
        x = eval(p, x);
    }
    return x;
}

double derivative(const MapParams& p, double x, int order)
{
    const double s = logistic_slope(x);
    switch (order) {
    case 1:
        return 1.0 + p.k * s;
    case 2:
        // (1 - e^x)/(1 + e^x) = -tanh(x/2)
        return -p.k * s * std::tanh(0.5 * x);
    case 3:
        return p.k * s * (1.0 - 6.0 * s);
    default:
        throw DomainError("derivative order must be 1, 2 or 3, got " + std::to_string(order));
    }
}

double schwarzian(const MapParams& p, double x)
{
    const double s = logistic_slope(x);
    const double d1 = 1.0 + p.k * s;
    if (std::abs(d1) < Tolerances::critical_guard) {
        throw CriticalPointError("Schwarzian undefined at a critical point (x = " + std::to_string(x) + ")");
    }
    // k e^x (2(e^x-1)^2 - (k+4)e^x) / (2((e^x+1)^2 + k e^x)^2), numerator and
    // denominator divided by (1+e^x)^4.
    return p.k * s * (2.0 - (p.k + 12.0) * s) / (2.0 * d1 * d1);
}

std::pair<double, double> critical_abscissae(double k)
{
    if (!(k <= -4.0)) {
        throw DomainError("map has no extrema for k > -4");
    }
    // e^x solves z^2 + (2 + k) z + 1 = 0; the roots are reciprocal.
    const double disc = std::sqrt(std::max(0.0, k * k + 4.0 * k));
    const double z_big = -1.0 - 0.5 * k + 0.5 * disc;
    const double x_min = std::log(z_big);
    return {-x_min, x_min};
}

CriticalStructure critical_points(const MapParams& p)
{
    CriticalStructure cs;
    if (p.k < -4.0) {
        const auto [x_max, x_min] = critical_abscissae(p.k);
        cs.x_max = x_max;
        cs.x_min = x_min;
    }
    if (in_domain_p(p)) {
        cs.x_star = fixed_point(p);
    }
    return cs;
}

double fixed_point(const MapParams& p)
{
    const double arg = p.k / p.b - 1.0;
    if (!(arg > 0.0) || !std::isfinite(arg)) {
        throw NoFixedPoint("no fixed point for b = " + std::to_string(p.b) + ", k = " + std::to_string(p.k));
    }
    return std::log(arg);
}

MapParams symmetry_conjugate(const MapParams& p) noexcept
{
    return {p.k - p.b, p.k};
}

bool in_domain_p(const MapParams& p) noexcept
{
    return p.k < p.b && p.b < 0.0;
}

}  // namespace bimodal
