#include "bimodal/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "bimodal/errors.hpp"
#include "bimodal/regions.hpp"

namespace bimodal {

namespace {

double scale_of(std::span<const double> xs) noexcept
{
    double s = 0.0;
    for (double x : xs) {
        s = std::max(s, std::abs(x));
    }
    return s;
}

// Distance from x to a sorted point set.
double distance_to_sorted(std::span<const double> sorted, double x) noexcept
{
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    double d = std::numeric_limits<double>::infinity();
    if (it != sorted.end()) d = std::min(d, *it - x);
    if (it != sorted.begin()) d = std::min(d, x - *std::prev(it));
    return d;
}

double distance_to_bands(std::span<const Band> bands, double x) noexcept
{
    double d = std::numeric_limits<double>::infinity();
    for (const Band& band : bands) {
        if (x >= band.lo && x <= band.hi) return 0.0;
        d = std::min(d, x < band.lo ? band.lo - x : x - band.hi);
    }
    return d;
}

// Sampled bands underestimate the true ones; orbits on the same attractor
// may stray this far outside.
double band_slack(const Attractor& a) noexcept
{
    double widest = 0.0;
    for (const Band& band : a.bands) widest = std::max(widest, band.hi - band.lo);
    const double hull = a.bands.empty() ? 0.0 : a.bands.back().hi - a.bands.front().lo;
    return std::max(0.25 * widest, 1e-3 * hull);
}

}  // namespace

std::string_view to_string(AttractorKind kind) noexcept
{
    switch (kind) {
    case AttractorKind::FixedPoint: return "FixedPoint";
    case AttractorKind::Cycle: return "Cycle";
    case AttractorKind::Chaotic: return "Chaotic";
    case AttractorKind::Divergent: return "Divergent";
    }
    return "?";
}

OrbitResult iterate(const MapParams& p, double x0, std::size_t n_transient, std::size_t n_sample)
{
    OrbitResult r;
    r.seed = x0;
    double x = x0;
    for (std::size_t i = 0; i < n_transient; ++i) {
        x = eval(p, x);
        if (!(std::abs(x) <= OrbitDefaults::escape_bound)) {
            r.escaped = true;
            return r;
        }
    }
    r.tail.reserve(n_sample);
    for (std::size_t i = 0; i < n_sample; ++i) {
        x = eval(p, x);
        if (!(std::abs(x) <= OrbitDefaults::escape_bound)) {
            r.escaped = true;
            return r;
        }
        r.tail.push_back(x);
    }
    return r;
}

double lyapunov_estimate(const MapParams& p, std::span<const double> tail)
{
    if (tail.empty()) {
        throw DomainError("Lyapunov estimate of an empty tail");
    }
    double sum = 0.0;
    for (double x : tail) {
        sum += std::log(std::abs(derivative(p, x, 1)));
    }
    return sum / static_cast<double>(tail.size());
}

std::optional<std::size_t> minimal_period(std::span<const double> tail, std::size_t max_period)
{
    if (tail.empty()) return std::nullopt;
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    const double diam = *hi - *lo;
    // Absolute floor: a tail that is constant up to rounding is a fixed point.
    const double tol = std::max(Tolerances::period_rel * diam, 1e-13 * (1.0 + scale_of(tail)));
    const std::size_t limit = std::min(max_period, tail.size() / 2);
    for (std::size_t q = 1; q <= limit; ++q) {
        bool ok = true;
        for (std::size_t i = 0; i + q < tail.size(); ++i) {
            if (!(std::abs(tail[i + q] - tail[i]) < tol)) {
                ok = false;
                break;
            }
        }
        if (ok) return q;
    }
    if (tail.size() == 1) return 1;
    return std::nullopt;
}

std::vector<Band> detect_bands(std::span<const double> tail, std::size_t max_bands)
{
    if (tail.empty()) return {};
    // At least 16 samples per residue class keeps spurious splits rare.
    const std::size_t q_max = std::max<std::size_t>(1, std::min(max_bands, tail.size() / 16));
    std::vector<Band> bands;
    for (std::size_t q = q_max; q >= 1; --q) {
        bands.assign(q, Band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
        for (std::size_t i = 0; i < tail.size(); ++i) {
            Band& band = bands[i % q];
            band.lo = std::min(band.lo, tail[i]);
            band.hi = std::max(band.hi, tail[i]);
        }
        std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
        bool disjoint = true;
        for (std::size_t i = 1; i < bands.size(); ++i) {
            if (!(bands[i - 1].hi < bands[i].lo)) {
                disjoint = false;
                break;
            }
        }
        if (disjoint) return bands;
    }
    return bands;
}

Attractor classify_orbit(std::span<const double> tail, const MapParams& p)
{
    if (tail.empty()) {
        throw DomainError("cannot classify an empty orbit tail");
    }
    Attractor a;
    if (scale_of(tail) > OrbitDefaults::escape_bound || !std::isfinite(scale_of(tail))) {
        a.kind = AttractorKind::Divergent;
        a.lyapunov = std::numeric_limits<double>::quiet_NaN();
        return a;
    }
    if (const auto q = minimal_period(tail)) {
        a.period = *q;
        a.kind = *q == 1 ? AttractorKind::FixedPoint : AttractorKind::Cycle;
        a.points.assign(tail.begin(), tail.begin() + static_cast<std::ptrdiff_t>(*q));
        a.lyapunov = lyapunov_estimate(p, a.points);
        std::sort(a.points.begin(), a.points.end());
        return a;
    }
    a.lyapunov = lyapunov_estimate(p, tail);
    if (a.lyapunov > Tolerances::chaos_lyapunov) {
        a.kind = AttractorKind::Chaotic;
        a.bands = detect_bands(tail, OrbitDefaults::max_period);
        a.period = a.bands.size();
        for (const Band& band : a.bands) {
            a.points.push_back(band.lo);
            a.points.push_back(band.hi);
        }
        return a;
    }
    throw UnresolvedAttractor("orbit neither periodic (period <= " + std::to_string(OrbitDefaults::max_period) +
                                  ") nor chaotic; Lyapunov estimate " + std::to_string(a.lyapunov),
                              a.lyapunov);
}

Attractor find_attractor(const MapParams& p, double x0, const OrbitConfig& cfg)
{
    std::size_t transient = cfg.n_transient;
    std::size_t spent = 0;
    double x = x0;
    for (;;) {
        OrbitResult orbit = iterate(p, x, transient, cfg.n_sample);
        spent += transient + cfg.n_sample;
        if (orbit.escaped) {
            Attractor a;
            a.kind = AttractorKind::Divergent;
            a.lyapunov = std::numeric_limits<double>::quiet_NaN();
            return a;
        }
        try {
            return classify_orbit(orbit.tail, p);
        } catch (const UnresolvedAttractor&) {
            // Continue the same orbit with twice the transient.
            transient = std::max<std::size_t>(2 * transient, 1024);
            if (spent + transient + cfg.n_sample > cfg.max_iterations) throw;
            x = orbit.tail.back();
        }
    }
}

double hausdorff(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double d = 0.0;
    for (double x : sa) d = std::max(d, distance_to_sorted(sb, x));
    for (double x : sb) d = std::max(d, distance_to_sorted(sa, x));
    return d;
}

bool same_attractor(const Attractor& a, const Attractor& b)
{
    if (a.periodic() != b.periodic() || a.kind == AttractorKind::Divergent || b.kind == AttractorKind::Divergent) {
        return false;
    }
    if (a.periodic()) {
        return a.period == b.period && hausdorff(a.points, b.points) < Tolerances::same_attractor;
    }
    // Distinct attractors of an interval map have disjoint bands.
    for (const Band& x : a.bands) {
        for (const Band& y : b.bands) {
            if (x.lo <= y.hi && y.lo <= x.hi) return true;
        }
    }
    return false;
}

AttractorSet attractor_set(const MapParams& p, const OrbitConfig& cfg)
{
    if (!in_domain_p(p) || !(p.k < -4.0)) {
        throw DomainError("attractor_set needs k < b < 0 and k < -4");
    }
    const auto [x_max, x_min] = critical_abscissae(p.k);
    Attractor from_max = find_attractor(p, x_max, cfg);
    Attractor from_min = find_attractor(p, x_min, cfg);

    AttractorSet set;
    if (same_attractor(from_max, from_min)) {
        set.attractors.push_back(std::move(from_max));
        set.seed_owner = {0, 0};
    } else {
        set.attractors.push_back(std::move(from_max));
        set.attractors.push_back(std::move(from_min));
        set.seed_owner = {0, 1};
        set.bistable = true;
    }
    return set;
}

std::optional<std::size_t> match_orbit(const AttractorSet& set, std::span<const double> tail, double cycle_tol)
{
    if (tail.empty()) return std::nullopt;
    std::optional<std::size_t> best;
    double best_excess = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < set.attractors.size(); ++i) {
        const Attractor& a = set.attractors[i];
        double excess;
        if (a.periodic()) {
            excess = hausdorff(tail, a.points) - cycle_tol;
        } else if (a.kind == AttractorKind::Chaotic) {
            double worst = 0.0;
            for (double x : tail) worst = std::max(worst, distance_to_bands(a.bands, x));
            excess = worst - band_slack(a);
        } else {
            continue;
        }
        if (excess < 0.0 && excess < best_excess) {
            best_excess = excess;
            best = i;
        }
    }
    return best;
}

SeedCheck check_random_seeds(const MapParams& p, const AttractorSet& set, std::size_t n_seeds,
                             std::uint64_t rng_seed, double lo, double hi, const OrbitConfig& cfg)
{
    SeedCheck check;
    check.hits.assign(set.attractors.size(), 0);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (std::size_t s = 0; s < n_seeds; ++s) {
        const double x0 = dist(rng);
        ++check.seeds;
        // Short transient first; most orbits settle long before the full one.
        // Orbits still unmatched after the full transient (slow convergence
        // near a neutral multiplier) keep running with a doubling budget.
        std::size_t budget = std::min(cfg.n_transient, std::max<std::size_t>(cfg.n_transient / 10, 1000));
        std::size_t total = budget;
        bool matched = false;
        bool escaped = false;
        OrbitResult orbit = iterate(p, x0, budget, cfg.n_sample);
        for (;;) {
            if (orbit.escaped) {
                escaped = true;
                break;
            }
            if (const auto idx = match_orbit(set, orbit.tail)) {
                ++check.hits[*idx];
                matched = true;
                break;
            }
            budget = total < cfg.n_transient ? cfg.n_transient - total : total;
            if (total + budget > cfg.max_iterations) break;
            total += budget;
            orbit = iterate(p, orbit.tail.back(), budget, cfg.n_sample);
        }
        if (matched) ++check.matched;
        if (escaped) ++check.escaped;
    }
    return check;
}

Period2Orbit find_period2(const MapParams& p)
{
    if (!in_domain_p(p) || fixed_point_stable(p)) {
        throw NotInRegion("period-2 orbit requires (b, k) in P with an unstable fixed point");
    }
    const double x_star = fixed_point(p);
    const double slope = derivative(p, x_star, 1);
    const double q_at_star = slope * slope - 1.0;  // (f^2)'(x*) - 1 > 0

    // q(x) = (f^2(x) - x) / (x - x*) removes the fixed-point root; it is
    // negative far left and equals q_at_star at x*.
    auto q = [&](double x) { return (eval_n(p, x, 2) - x) / (x - x_star); };
    constexpr double x_big = 1e4;
    double lo = -x_big;
    double hi = x_star;
    if (!(q(lo) < 0.0) || !(q_at_star > 0.0)) {
        throw BracketError("no sign change of f^2(x) - x on (-1e4, x*)");
    }
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (q(mid) < 0.0 ? lo : hi) = mid;
    }
    Period2Orbit orb;
    orb.x1 = 0.5 * (lo + hi);
    orb.x2 = eval(p, orb.x1);
    if (orb.x2 < orb.x1) std::swap(orb.x1, orb.x2);
    orb.u1 = logistic_down(orb.x1);
    orb.u2 = logistic_down(orb.x2);
    orb.B = orb.u1 + orb.u2;
    orb.k_reconstructed = 2.0 * (orb.x2 - orb.x1) / (orb.u2 - orb.u1);
    return orb;
}

int period2_uniqueness_check(const MapParams& p, std::size_t mesh)
{
    if (!in_domain_p(p) || fixed_point_stable(p)) {
        throw NotInRegion("period-2 count requires (b, k) in P with an unstable fixed point");
    }
    const AbsorbingInterval iv = absorbing_interval(p);
    const double pad = 0.1 * (iv.hi - iv.lo);
    const double lo = iv.lo - pad;
    const double hi = iv.hi + pad;
    const double x_star = fixed_point(p);
    const double skip = 1e-9 * (1.0 + std::abs(x_star));

    int changes = 0;
    int prev = 0;
    for (std::size_t j = 0; j <= mesh; ++j) {
        const double x = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(mesh);
        if (std::abs(x - x_star) < skip) continue;
        const double v = (eval_n(p, x, 2) - x) / (x - x_star);
        const int sign = (v > 0.0) - (v < 0.0);
        if (sign == 0) continue;
        if (prev != 0 && sign != prev) ++changes;
        prev = sign;
    }
    return changes;
}

double k_of_u(double B, double u)
{
    if (!(B > 0.0 && B < 2.0) || !(u > 0.5 * B && u < std::min(B, 1.0))) {
        throw DomainError("k_of_u needs 0 < B < 2 and B/2 < u < min(B, 1)");
    }
    auto h = [](double v) { return std::log1p(-v) - std::log(v); };
    return 2.0 * (h(u) - h(B - u)) / (2.0 * u - B);
}

double k_of_u_limit(double B)
{
    if (!(B > 0.0 && B < 2.0)) {
        throw DomainError("k_of_u_limit needs 0 < B < 2");
    }
    return 8.0 / (B * (B - 2.0));
}

}  // namespace bimodal
