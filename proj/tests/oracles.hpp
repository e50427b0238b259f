#pragma once

// Reference computations that share no code with the library: 50-digit
// arithmetic, finite differences, plain bisection and mesh root counts.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>

#include <boost/multiprecision/cpp_dec_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_dec_float_50;

inline Big map_big(const Big& b, const Big& k, const Big& x)
{
    return b + x - k / (1 + exp(x));
}

inline double map(double b, double k, double x)
{
    return static_cast<double>(map_big(Big(b), Big(k), Big(x)));
}

/// Derivative of order 1..3 of the map by central differences in 50 digits.
inline double derivative(double b, double k, double x, int order)
{
    const Big h("1e-10");
    const Big B(b), K(k), X(x);
    auto f = [&](const Big& t) { return map_big(B, K, t); };
    switch (order) {
    case 1: return static_cast<double>((f(X + h) - f(X - h)) / (2 * h));
    case 2: return static_cast<double>((f(X + h) - 2 * f(X) + f(X - h)) / (h * h));
    default: {
        const Big h3("1e-8");
        return static_cast<double>((f(X + 2 * h3) - 2 * f(X + h3) + 2 * f(X - h3) - f(X - 2 * h3)) / (2 * h3 * h3 * h3));
    }
    }
}

/// Root of g on [lo, hi] with g(lo), g(hi) of opposite signs.
inline double bisect(const std::function<double(double)>& g, double lo, double hi, int iterations = 200)
{
    double glo = g(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double gm = g(mid);
        if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Sign changes of g on a uniform mesh of [lo, hi].
inline int count_sign_changes(const std::function<double(double)>& g, double lo, double hi, std::size_t steps)
{
    int count = 0;
    double prev = g(lo);
    for (std::size_t i = 1; i <= steps; ++i) {
        const double cur = g(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps));
        if ((prev < 0) != (cur < 0)) ++count;
        prev = cur;
    }
    return count;
}

/// f'(x*) at the fixed point, evaluated directly from e^{x*} = k/b - 1.
inline double fixed_point_multiplier(double b, double k)
{
    const double e = k / b - 1.0;
    return 1.0 + k * e / ((1.0 + e) * (1.0 + e));
}

/// Iterates of the map in plain double arithmetic.
inline double iterate(double b, double k, double x, int n)
{
    for (int i = 0; i < n; ++i) x = b + x - k / (1.0 + std::exp(x));
    return x;
}

}  // namespace oracle
