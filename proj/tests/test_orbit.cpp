#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bimodal/errors.hpp"
#include "bimodal/map_core.hpp"
#include "bimodal/orbit.hpp"
#include "bimodal/regions.hpp"
#include "oracles.hpp"

using namespace bimodal;

namespace {

std::multiset<std::size_t> periods(const AttractorSet& set)
{
    std::multiset<std::size_t> out;
    for (const Attractor& a : set.attractors) out.insert(a.kind == AttractorKind::Chaotic ? 0 : a.period);
    return out;
}

MapParams random_unstable(std::mt19937_64& rng, double k_lo, double k_hi)
{
    std::uniform_real_distribution<double> ks(k_lo, k_hi), frac(0.001, 0.999);
    for (;;) {
        const double k = ks(rng);
        const MapParams p{k * frac(rng), k};
        if (oracle::fixed_point_multiplier(p.b, p.k) < -1.0 - 1e-6) return p;
    }
}

}  // namespace

TEST(Iterate, FixedPointAndEscape)
{
    const MapParams p{-1.0, -3.0};
    const double xs = fixed_point(p);
    const OrbitResult r = iterate(p, xs, 10, 20);
    ASSERT_EQ(r.tail.size(), 20u);
    for (double x : r.tail) EXPECT_NEAR(x, xs, 1e-14);

    // Far right the map drifts by b = 1 per step, so escape past 1e6 takes ~1e6 steps.
    const OrbitResult esc = iterate({1.0, -30.0}, 0.0, 2000000, 100);
    EXPECT_TRUE(esc.escaped);
    EXPECT_LT(esc.tail.size(), 100u);
}

TEST(Iterate, FiveCycleTail)
{
    const MapParams p{-11.9642, -28.8515};
    const auto [x_max, x_min] = critical_abscissae(p.k);
    const OrbitResult r = iterate(p, x_max, 100000, 50);
    std::vector<double> distinct;
    for (double x : r.tail) {
        if (std::none_of(distinct.begin(), distinct.end(), [&](double d) { return std::abs(d - x) < 1e-8; })) {
            distinct.push_back(x);
        }
    }
    EXPECT_EQ(distinct.size(), 5u);
}

TEST(MinimalPeriod, Basics)
{
    const std::vector<double> constant(64, 2.5);
    EXPECT_EQ(minimal_period(constant), 1u);
    std::vector<double> three;
    for (int i = 0; i < 90; ++i) three.push_back(std::array{1.0, 4.0, -2.0}[i % 3]);
    EXPECT_EQ(minimal_period(three), 3u);
    std::vector<double> drift;
    for (int i = 0; i < 90; ++i) drift.push_back(0.001 * i);
    EXPECT_FALSE(minimal_period(drift).has_value());
}

TEST(ClassifyOrbit, ShrimpWindowVerdicts)
{
    auto from = [](MapParams p, bool max_seed) {
        const auto [x_max, x_min] = critical_abscissae(p.k);
        return find_attractor(p, max_seed ? x_max : x_min);
    };
    for (bool seed : {true, false}) {
        const Attractor seven = from({-11.9672, -28.853}, seed);
        EXPECT_EQ(seven.kind, AttractorKind::Cycle);
        EXPECT_EQ(seven.period, 7u);
        EXPECT_LT(seven.lyapunov, 0.0);
        const Attractor chaos = from({-11.9655, -28.85}, seed);
        EXPECT_EQ(chaos.kind, AttractorKind::Chaotic);
        EXPECT_GT(chaos.lyapunov, 1e-3);
    }
    const std::vector<double> constant(1024, 0.4);
    EXPECT_EQ(classify_orbit(constant, {-1.0, -3.0}).kind, AttractorKind::FixedPoint);
}

TEST(ClassifyOrbit, CyclePointsAreExactAndMinimal)
{
    const MapParams p{-11.9708, -28.8695};
    const AttractorSet set = attractor_set(p);
    for (const Attractor& a : set.attractors) {
        ASSERT_TRUE(a.periodic());
        for (double x : a.points) {
            EXPECT_LT(std::abs(oracle::iterate(p.b, p.k, x, static_cast<int>(a.period)) - x), 1e-9);
        }
        for (std::size_t d = 1; d < a.period; ++d) {
            if (a.period % d) continue;
            const double x = a.points.front();
            EXPECT_GT(std::abs(oracle::iterate(p.b, p.k, x, static_cast<int>(d)) - x), 1e-9);
        }
    }
}

TEST(ClassifyOrbit, UnresolvedNearNeutralMultiplier)
{
    // A slowly drifting quasi-neutral tail: no period, Lyapunov ~ 0.
    const MapParams p{-1.0, -3.0};
    std::vector<double> tail;
    for (int i = 0; i < 1024; ++i) tail.push_back(std::log(2.0) + 1e-3 * std::sin(0.1 * i));
    EXPECT_THROW(classify_orbit(tail, p), UnresolvedAttractor);
}

TEST(AttractorSet, ShrimpWindowVerdicts)
{
    const AttractorSet a = attractor_set({-11.9655, -28.854});
    EXPECT_TRUE(a.bistable);
    EXPECT_EQ(periods(a), (std::multiset<std::size_t>{5, 7}));
    EXPECT_EQ(a.seed_owner.size(), 2u);

    const AttractorSet b = attractor_set({-11.9708, -28.8695});
    EXPECT_TRUE(b.bistable);
    EXPECT_EQ(periods(b), (std::multiset<std::size_t>{20, 56}));

    const AttractorSet c = attractor_set({-11.9709, -28.8708});
    ASSERT_TRUE(c.bistable);
    ASSERT_EQ(c.attractors.size(), 2u);
    for (const Attractor& x : c.attractors) EXPECT_EQ(x.kind, AttractorKind::Chaotic);
    for (const Band& x : c.attractors[0].bands) {
        for (const Band& y : c.attractors[1].bands) EXPECT_TRUE(x.hi < y.lo || y.hi < x.lo);
    }
    EXPECT_GT(hausdorff(c.attractors[0].points, c.attractors[1].points), 1e-3);

    const AttractorSet d = attractor_set({-11.9642, -28.8515});
    EXPECT_FALSE(d.bistable);
    EXPECT_EQ(periods(d), (std::multiset<std::size_t>{5}));

    EXPECT_THROW(attractor_set({0.5, -30.0}), DomainError);
    EXPECT_THROW(attractor_set({-1.0, -3.0}), DomainError);
}

TEST(AttractorSet, UnimodalRegionsHaveOneAttractor)
{
    std::mt19937_64 rng(41);
    int seen = 0;
    OrbitConfig cfg;
    cfg.n_transient = 20000;
    while (seen < 60) {
        const MapParams p = random_unstable(rng, -60.0, -4.5);
        const RegionTag t = classify(p);
        if (t != RegionTag::UnimodalLeft && t != RegionTag::UnimodalRight) continue;
        try {
            EXPECT_EQ(attractor_set(p, cfg).attractors.size(), 1u) << p.b << " " << p.k;
        } catch (const UnresolvedAttractor&) {
            continue;
        }
        ++seen;
    }
}

TEST(AttractorSet, MonotoneCoreHasFixedPointOrTwoCycle)
{
    std::mt19937_64 rng(42);
    int seen = 0;
    while (seen < 40) {
        const MapParams p = random_unstable(rng, -10.9, -4.5);
        if (classify(p) != RegionTag::MonotoneCore) continue;
        const AttractorSet set = attractor_set(p);
        ASSERT_EQ(set.attractors.size(), 1u);
        EXPECT_TRUE(set.attractors[0].periodic());
        EXPECT_LE(set.attractors[0].period, 2u);
        ++seen;
    }
}

TEST(AttractorSet, ConjugateParametersGiveMirroredAttractors)
{
    for (const MapParams& p : {MapParams{-11.9655, -28.854}, MapParams{-11.9642, -28.8515}, MapParams{-20.0, -50.0}}) {
        const AttractorSet a = attractor_set(p);
        const AttractorSet b = attractor_set(symmetry_conjugate(p));
        EXPECT_EQ(periods(a), periods(b));
        EXPECT_EQ(a.bistable, b.bistable);
        for (const Attractor& x : a.attractors) {
            if (!x.periodic()) continue;
            std::vector<double> mirrored;
            for (double v : x.points) mirrored.push_back(-v);
            const bool found = std::any_of(b.attractors.begin(), b.attractors.end(), [&](const Attractor& y) {
                return y.periodic() && hausdorff(mirrored, y.points) < 1e-6;
            });
            EXPECT_TRUE(found);
        }
    }
}

TEST(AttractorSet, CycleLyapunovIsNegative)
{
    std::mt19937_64 rng(43);
    int seen = 0;
    OrbitConfig cfg;
    cfg.n_transient = 20000;
    while (seen < 100) {
        const MapParams p = random_unstable(rng, -40.0, -4.5);
        AttractorSet set;
        try {
            set = attractor_set(p, cfg);
        } catch (const UnresolvedAttractor&) {
            continue;
        }
        for (const Attractor& a : set.attractors) {
            if (a.periodic()) {
                EXPECT_LT(a.lyapunov, 0.0);
            }
            if (a.kind == AttractorKind::Chaotic) {
                EXPECT_GT(a.lyapunov, 1e-3);
            }
        }
        ++seen;
    }
}

TEST(MatchOrbit, SeedsLandOnKnownAttractors)
{
    const MapParams p{-11.9655, -28.854};
    const AttractorSet set = attractor_set(p);
    const AbsorbingInterval J = absorbing_interval(p);
    const SeedCheck check = check_random_seeds(p, set, 100, 99, J.lo, J.hi);
    EXPECT_EQ(check.matched, 100u);
    EXPECT_EQ(check.escaped, 0u);
    EXPECT_GT(check.hits[0], 0u);
    EXPECT_GT(check.hits[1], 0u);
    std::vector<double> far{100.0, 101.0};
    EXPECT_FALSE(match_orbit(set, far).has_value());
}

TEST(Period2, ReferencePoint)
{
    const MapParams p{-12.0, -30.0};
    const Period2Orbit o = find_period2(p);
    // 40-digit roots of f(f(x)) = x.
    EXPECT_NEAR(o.x1, -1.386140676939274, 1e-10);
    EXPECT_NEAR(o.x2, 10.613121604982540, 1e-10);
    EXPECT_NEAR(o.B, 0.8, 1e-10);
    EXPECT_NEAR(o.k_reconstructed, -30.0, 1e-10 * 30.0);
    EXPECT_NEAR(o.u1, 1.0 / (1.0 + std::exp(o.x1)), 1e-15);
    EXPECT_LT(o.u2, o.u1);
    EXPECT_GT(o.u2, 0.0);
    EXPECT_LT(o.u1, 1.0);
    auto g = [](double x) { return oracle::iterate(-12, -30, x, 2) - x; };
    EXPECT_EQ(oracle::count_sign_changes(g, -100.0, 100.0, 2000000), 3);
    EXPECT_EQ(period2_uniqueness_check(p), 2);
    EXPECT_EQ(period2_uniqueness_check({-12.0, -40.0}), 2);
}

TEST(Period2, NearTheFlipCurve)
{
    const double b = -5.0;
    const double delta = 1e-4;
    const MapParams p{b, flip_curve_k(b) - delta};
    const Period2Orbit o = find_period2(p);
    const double xs = fixed_point(p);
    EXPECT_LT(std::abs(o.x1 - xs), 30.0 * std::sqrt(delta));
    EXPECT_LT(std::abs(o.x2 - xs), 30.0 * std::sqrt(delta));
    EXPECT_GT(o.x2 - o.x1, 1e-4);
}

TEST(Period2, ConjugateIsNegatedAndReversed)
{
    const MapParams p{-12.0, -30.0};
    const Period2Orbit a = find_period2(p);
    const Period2Orbit b = find_period2(symmetry_conjugate(p));
    EXPECT_NEAR(b.x1, -a.x2, 1e-10);
    EXPECT_NEAR(b.x2, -a.x1, 1e-10);
}

TEST(Period2, Preconditions)
{
    EXPECT_THROW(find_period2({-1.0, -3.0}), NotInRegion);
    EXPECT_THROW(find_period2({0.5, -3.0}), NotInRegion);
    EXPECT_THROW(period2_uniqueness_check({-1.0, -3.0}), NotInRegion);
}

TEST(KOfU, LimitMonotonicityAndRoundTrip)
{
    EXPECT_DOUBLE_EQ(k_of_u_limit(1.0), -8.0);
    EXPECT_NEAR(k_of_u(1.0, 0.5 + 1e-7), -8.0, 1e-5);
    for (double B : {0.4, 0.8, 1.2, 1.6}) {
        const double lo = 0.5 * B, hi = std::min(B, 1.0);
        double prev = k_of_u_limit(B);
        for (int i = 1; i <= 100; ++i) {
            const double u = lo + (hi - lo) * i / 101.0;
            const double k = k_of_u(B, u);
            EXPECT_LT(k, prev);
            prev = k;
        }
    }
    const Period2Orbit o = find_period2({-12.0, -30.0});
    EXPECT_NEAR(k_of_u(o.B, o.u1), -30.0, 1e-8);
    EXPECT_THROW(k_of_u(0.8, 0.3), DomainError);
    EXPECT_THROW(k_of_u(2.5, 0.9), DomainError);
}

TEST(Lyapunov, FixedPointMultiplier)
{
    const MapParams p{-1.0, -3.0};
    const double xs = fixed_point(p);
    const std::vector<double> tail{xs};
    EXPECT_NEAR(lyapunov_estimate(p, tail), std::log(std::abs(oracle::fixed_point_multiplier(-1, -3))), 1e-12);
    EXPECT_THROW(lyapunov_estimate(p, {}), DomainError);
}
