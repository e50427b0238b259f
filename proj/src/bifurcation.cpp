#include "bimodal/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bimodal/config.hpp"
#include "bimodal/errors.hpp"
#include "bimodal/parallel.hpp"
#include "bimodal/regions.hpp"

namespace bimodal {

namespace {

using Vec3 = std::array<double, 3>;

double target_multiplier(BifurcationKind kind) noexcept
{
    return kind == BifurcationKind::Fold ? 1.0 : -1.0;
}

Vec3 cross(const Vec3& a, const Vec3& b) noexcept
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) noexcept
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Scales the tangent so its (b, k) part has unit length; arclength is
// measured in parameter space because cycle points move much faster.
bool normalize_tangent(Vec3& t) noexcept
{
    double norm = std::hypot(t[1], t[2]);
    if (!(norm > 1e-12 * std::sqrt(dot(t, t)))) norm = std::sqrt(dot(t, t));
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    for (double& c : t) c /= norm;
    return true;
}

// Solves a 3x3 system with partial pivoting; false when singular.
bool solve3(std::array<Vec3, 3> a, Vec3 rhs, Vec3& out) noexcept
{
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (!(std::abs(a[piv][col]) > Tolerances::singular_det)) return false;
        std::swap(a[piv], a[col]);
        std::swap(rhs[piv], rhs[col]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 3; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < 3; ++c) s -= a[r][c] * out[c];
        out[r] = s / a[r][r];
    }
    return true;
}

double residual_norm(const CycleJet& jet) noexcept
{
    return std::max(std::abs(jet.g1), std::abs(jet.g2));
}

// Newton converges only linearly onto a collapsed cycle, so x can sit about
// sqrt(residual) away from the shorter cycle; the gap test is loose on purpose.
void check_minimal_period(const MapParams& p, double x, int n, double residual)
{
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        if (std::abs(eval_n(p, x, d) - x) < 1e-4 * (1.0 + std::abs(x))) {
            throw DegenerateCycle("converged onto a cycle of period " + std::to_string(d) + " instead of " +
                                      std::to_string(n),
                                  residual);
        }
    }
}

// Corrector for pseudo-arclength: {G1, G2, t . (u - u_pred)} = 0.
bool correct(Vec3& u, const Vec3& t, const Vec3& u_pred, int n, BifurcationKind kind, int& iterations)
{
    u = u_pred;
    for (iterations = 1; iterations <= 12; ++iterations) {
        const CycleJet jet = cycle_jet({u[1], u[2]}, u[0], n, kind);
        const Vec3 diff{u[0] - u_pred[0], u[1] - u_pred[1], u[2] - u_pred[2]};
        const Vec3 rhs{-jet.g1, -jet.g2, -dot(t, diff)};
        Vec3 delta{};
        if (!solve3({jet.dg1, jet.dg2, t}, rhs, delta)) return false;
        for (int i = 0; i < 3; ++i) u[i] += delta[i];
        if (!std::isfinite(u[0]) || !std::isfinite(u[1]) || !std::isfinite(u[2])) return false;
        const double step = std::max({std::abs(delta[0]), std::abs(delta[1]), std::abs(delta[2])});
        if (step < 1e-13 * (1.0 + std::abs(u[0]))) {
            const CycleJet fin = cycle_jet({u[1], u[2]}, u[0], n, kind);
            return residual_norm(fin) < 1e-10;
        }
    }
    const CycleJet fin = cycle_jet({u[1], u[2]}, u[0], n, kind);
    return residual_norm(fin) < Tolerances::newton_residual;
}

struct BranchResult {
    std::vector<BifurcationPoint> points;
    StopReason stop = StopReason::RangeExhausted;
};

BranchResult trace_branch(const BifurcationPoint& seed, double direction, const ContinuationOptions& opts)
{
    BranchResult out;
    Vec3 u{seed.x, seed.b, seed.k};
    CycleJet jet = cycle_jet(seed.params(), seed.x, seed.n, seed.kind);
    Vec3 t = cross(jet.dg1, jet.dg2);
    if (!normalize_tangent(t)) {
        out.stop = StopReason::NoConvergence;
        return out;
    }
    for (double& c : t) c *= direction;

    double h = opts.step;
    const double h_min = opts.step / opts.min_step_divisor;
    while (out.points.size() < opts.max_points) {
        const Vec3 u_pred{u[0] + h * t[0], u[1] + h * t[1], u[2] + h * t[2]};
        Vec3 u_new{};
        int iterations = 0;
        const bool ok = correct(u_new, t, u_pred, seed.n, seed.kind, iterations);
        // Reject jumps to another branch: the corrected point must stay near
        // the predicted one in parameter space.
        const bool close = ok && std::hypot(u_new[1] - u_pred[1], u_new[2] - u_pred[2]) < 0.5 * h;
        if (!ok || !close) {
            h *= 0.5;
            if (h < h_min) {
                out.stop = StopReason::NoConvergence;
                return out;
            }
            continue;
        }
        const MapParams p{u_new[1], u_new[2]};
        if (p.k < opts.k_lo || p.k > opts.k_hi) {
            out.stop = StopReason::RangeExhausted;
            return out;
        }
        if (!in_domain_p(p) || p.b < opts.b_lo || p.b > opts.b_hi) {
            out.stop = StopReason::LeftDomain;
            return out;
        }
        jet = cycle_jet(p, u_new[0], seed.n, seed.kind);
        Vec3 t_new = cross(jet.dg1, jet.dg2);
        if (!normalize_tangent(t_new)) {
            out.stop = StopReason::NoConvergence;
            return out;
        }
        if (dot(t_new, t) < 0.0) {
            for (double& c : t_new) c = -c;
        }
        t = t_new;
        u = u_new;
        out.points.push_back({p.b, p.k, u[0], seed.n, seed.kind});
        if (iterations <= 3) h = std::min(opts.step, 2.0 * h);
    }
    out.stop = StopReason::MaxPoints;
    return out;
}

double segment_cross(double ax, double ay, double bx, double by) noexcept
{
    return ax * by - ay * bx;
}

// Point on a curve near (b, k, x) with either k or b held fixed.
BifurcationPoint project(const BifurcationCurve& c, double b, double k, double x, FreeParam free)
{
    return locate_cycle_bifurcation({b, k}, x, c.n, c.kind, free);
}

FreeParam free_for_segment(const BifurcationPoint& a, const BifurcationPoint& b) noexcept
{
    // A curve that mostly varies in k is best solved for b at fixed k.
    return std::abs(b.k - a.k) >= std::abs(b.b - a.b) ? FreeParam::B : FreeParam::K;
}

}  // namespace

std::string_view to_string(BifurcationKind kind) noexcept
{
    return kind == BifurcationKind::Fold ? "fold" : "flip";
}

std::string_view to_string(StopReason reason) noexcept
{
    switch (reason) {
    case StopReason::RangeExhausted: return "range_exhausted";
    case StopReason::LeftDomain: return "left_domain";
    case StopReason::NoConvergence: return "no_convergence";
    case StopReason::MaxPoints: return "max_points";
    }
    return "?";
}

CycleJet cycle_jet(const MapParams& p, double x, int n, BifurcationKind kind)
{
    double xi = x;
    Vec3 dxi{1.0, 0.0, 0.0};  // d x_i / d(x, b, k)
    double prod = 1.0;
    Vec3 dprod{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double m = derivative(p, xi, 1);
        const double m2 = derivative(p, xi, 2);
        const double dm_dk = logistic_slope(xi);
        dprod[0] = dprod[0] * m + prod * m2 * dxi[0];
        dprod[1] = dprod[1] * m + prod * m2 * dxi[1];
        dprod[2] = dprod[2] * m + prod * (m2 * dxi[2] + dm_dk);
        prod *= m;
        const double u = logistic_down(xi);
        dxi = {m * dxi[0], m * dxi[1] + 1.0, m * dxi[2] - u};
        xi = eval(p, xi);
    }
    CycleJet jet;
    jet.g1 = xi - x;
    jet.multiplier = prod;
    jet.g2 = prod - target_multiplier(kind);
    jet.dg1 = {dxi[0] - 1.0, dxi[1], dxi[2]};
    jet.dg2 = dprod;
    return jet;
}

BifurcationPoint locate_cycle_bifurcation(const MapParams& p0, double x0, int n, BifurcationKind kind,
                                          FreeParam free)
{
    if (n < 1) {
        throw DomainError("cycle period must be positive");
    }
    MapParams p = p0;
    double x = x0;
    CycleJet jet = cycle_jet(p, x, n, kind);
    if (free == FreeParam::Auto) {
        const double det_b = jet.dg1[0] * jet.dg2[1] - jet.dg1[1] * jet.dg2[0];
        const double det_k = jet.dg1[0] * jet.dg2[2] - jet.dg1[2] * jet.dg2[0];
        free = std::abs(det_b) >= std::abs(det_k) ? FreeParam::B : FreeParam::K;
    }
    const int col = free == FreeParam::B ? 1 : 2;
    for (int iter = 0; iter < 50; ++iter) {
        const double a11 = jet.dg1[0], a12 = jet.dg1[col];
        const double a21 = jet.dg2[0], a22 = jet.dg2[col];
        const double det = a11 * a22 - a12 * a21;
        if (!(std::abs(det) > Tolerances::singular_det) || !std::isfinite(det)) {
            throw SingularJacobian("singular Jacobian in cycle bifurcation Newton", residual_norm(jet));
        }
        double dx = (-jet.g1 * a22 + jet.g2 * a12) / det;
        double dp = (-jet.g2 * a11 + jet.g1 * a21) / det;
        // Cap wild steps; a full Newton step from a poor guess can throw the
        // iterate out of the basin of the map entirely.
        const double cap = std::max(std::abs(dx) / 2.0, std::abs(dp) / 0.5);
        if (cap > 1.0) {
            dx /= cap;
            dp /= cap;
        }
        x += dx;
        (free == FreeParam::B ? p.b : p.k) += dp;
        jet = cycle_jet(p, x, n, kind);
        if (!std::isfinite(jet.g1) || !std::isfinite(jet.g2)) {
            throw NoConvergence("cycle bifurcation Newton diverged", std::numeric_limits<double>::infinity());
        }
        const bool small_step = std::abs(dx) < 1e-14 * (1.0 + std::abs(x)) && std::abs(dp) < 1e-14 * (1.0 + std::abs(p.k));
        if (residual_norm(jet) < Tolerances::newton_residual || (small_step && residual_norm(jet) < 1e-10)) {
            check_minimal_period(p, x, n, residual_norm(jet));
            return {p.b, p.k, x, n, kind};
        }
    }
    throw NoConvergence("cycle bifurcation Newton did not converge in 50 iterations", residual_norm(jet));
}

bool verify_bifurcation_point(const BifurcationPoint& pt, double cycle_tol, double eig_tol)
{
    const MapParams p = pt.params();
    double xi = pt.x;
    double prod = 1.0;
    for (int i = 0; i < pt.n; ++i) {
        prod *= derivative(p, xi, 1);
        xi = eval(p, xi);
    }
    return std::abs(xi - pt.x) < cycle_tol && std::abs(prod - target_multiplier(pt.kind)) < eig_tol;
}

BifurcationCurve continue_curve(const BifurcationPoint& seed, const ContinuationOptions& opts)
{
    if (!(opts.step > 0.0)) {
        throw DomainError("continuation step must be positive");
    }
    BifurcationCurve curve;
    curve.kind = seed.kind;
    curve.n = seed.n;
    BranchResult back = trace_branch(seed, -1.0, opts);
    BranchResult fwd = trace_branch(seed, 1.0, opts);
    curve.points.assign(back.points.rbegin(), back.points.rend());
    curve.points.push_back(seed);
    curve.points.insert(curve.points.end(), fwd.points.begin(), fwd.points.end());
    curve.stop_backward = back.stop;
    curve.stop_forward = fwd.stop;
    return curve;
}

std::array<double, 2> curve_tangent_bk(const BifurcationPoint& pt)
{
    const CycleJet jet = cycle_jet(pt.params(), pt.x, pt.n, pt.kind);
    const Vec3 t = cross(jet.dg1, jet.dg2);
    const double norm = std::hypot(t[1], t[2]);
    if (!(norm > 0.0)) {
        throw SingularJacobian("degenerate curve tangent", residual_norm(jet));
    }
    return {t[1] / norm, t[2] / norm};
}

std::vector<CurveIntersection> intersect_curves(const BifurcationCurve& first, const BifurcationCurve& second)
{
    std::vector<CurveIntersection> out;
    const auto& c1 = first.points;
    const auto& c2 = second.points;
    for (std::size_t i = 0; i + 1 < c1.size(); ++i) {
        const double b1lo = std::min(c1[i].b, c1[i + 1].b), b1hi = std::max(c1[i].b, c1[i + 1].b);
        const double k1lo = std::min(c1[i].k, c1[i + 1].k), k1hi = std::max(c1[i].k, c1[i + 1].k);
        for (std::size_t j = 0; j + 1 < c2.size(); ++j) {
            if (std::max(c2[j].b, c2[j + 1].b) < b1lo || std::min(c2[j].b, c2[j + 1].b) > b1hi) continue;
            if (std::max(c2[j].k, c2[j + 1].k) < k1lo || std::min(c2[j].k, c2[j + 1].k) > k1hi) continue;
            const double rb = c1[i + 1].b - c1[i].b, rk = c1[i + 1].k - c1[i].k;
            const double sb = c2[j + 1].b - c2[j].b, sk = c2[j + 1].k - c2[j].k;
            const double denom = segment_cross(rb, rk, sb, sk);
            if (denom == 0.0) continue;
            const double qb = c2[j].b - c1[i].b, qk = c2[j].k - c1[i].k;
            const double lam = segment_cross(qb, qk, sb, sk) / denom;
            const double mu = segment_cross(qb, qk, rb, rk) / denom;
            if (lam < 0.0 || lam > 1.0 || mu < 0.0 || mu > 1.0) continue;

            // Bisection along the first curve on the signed distance to the
            // second, both evaluated on the exact curves.
            const FreeParam free1 = free_for_segment(c1[i], c1[i + 1]);
            const FreeParam free2 = free_for_segment(c2[j], c2[j + 1]);
            auto on_first = [&](double l) {
                return project(first, c1[i].b + l * rb, c1[i].k + l * rk, c1[i].x + l * (c1[i + 1].x - c1[i].x),
                               free1);
            };
            auto signed_gap = [&](const BifurcationPoint& q, BifurcationPoint& partner) {
                // Where the second curve crosses the line through q along
                // its fixed coordinate.
                const double l2 = free2 == FreeParam::B ? (sk != 0.0 ? (q.k - c2[j].k) / sk : mu)
                                                        : (sb != 0.0 ? (q.b - c2[j].b) / sb : mu);
                const double gx = c2[j].x + l2 * (c2[j + 1].x - c2[j].x);
                if (free2 == FreeParam::B) {
                    partner = project(second, c2[j].b + l2 * sb, q.k, gx, FreeParam::B);
                    return q.b - partner.b;
                }
                partner = project(second, q.b, c2[j].k + l2 * sk, gx, FreeParam::K);
                return q.k - partner.k;
            };
            try {
                double lo = 0.0, hi = 1.0;
                BifurcationPoint p_lo = on_first(lo), p_hi = on_first(hi);
                BifurcationPoint q_lo, q_hi;
                double g_lo = signed_gap(p_lo, q_lo);
                const double g_hi = signed_gap(p_hi, q_hi);
                if (g_lo * g_hi > 0.0) continue;
                BifurcationPoint p_mid = p_lo, q_mid = q_lo;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    p_mid = on_first(mid);
                    const double g_mid = signed_gap(p_mid, q_mid);
                    if (g_mid == 0.0) break;
                    if ((g_mid < 0.0) == (g_lo < 0.0)) {
                        lo = mid;
                        g_lo = g_mid;
                    } else {
                        hi = mid;
                    }
                    if (std::abs(g_mid) < 1e-13) break;
                }
                out.push_back({p_mid.b, p_mid.k, p_mid, q_mid});
            } catch (const Error&) {
                // Segment pair could not be refined; skip it.
            }
        }
    }
    return out;
}

std::optional<BifurcationPoint> harvest_seed(double b_lo, double b_hi, double k_lo, double k_hi, int n,
                                             BifurcationKind kind, int grid, const OrbitConfig& cfg)
{
    struct Candidate {
        double score;
        MapParams p;
        double x;
    };
    std::vector<Candidate> candidates;
    const double target = target_multiplier(kind);
    for (int j = 0; j < grid; ++j) {
        for (int i = 0; i < grid; ++i) {
            const MapParams p{b_lo + (i + 0.5) * (b_hi - b_lo) / grid, k_lo + (j + 0.5) * (k_hi - k_lo) / grid};
            if (!in_domain_p(p) || !(p.k < -4.0)) continue;
            AttractorSet set;
            try {
                set = attractor_set(p, cfg);
            } catch (const UnresolvedAttractor&) {
                continue;
            }
            for (const Attractor& a : set.attractors) {
                if (!a.periodic() || a.period != static_cast<std::size_t>(n)) continue;
                double mult = 1.0;
                for (double x : a.points) mult *= derivative(p, x, 1);
                candidates.push_back({std::abs(mult - target), p, a.points.front()});
            }
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) { return a.score < b.score; });
    const std::size_t tries = std::min<std::size_t>(candidates.size(), 8);
    for (std::size_t c = 0; c < tries; ++c) {
        try {
            BifurcationPoint pt = locate_cycle_bifurcation(candidates[c].p, candidates[c].x, n, kind);
            if (pt.b >= b_lo - (b_hi - b_lo) && pt.b <= b_hi + (b_hi - b_lo) && pt.k >= k_lo - (k_hi - k_lo) &&
                pt.k <= k_hi + (k_hi - k_lo)) {
                return pt;
            }
        } catch (const Error&) {
        }
    }
    return std::nullopt;
}

bool has_family(const AttractorSet& set, int n_family)
{
    for (const Attractor& a : set.attractors) {
        if (a.kind == AttractorKind::Divergent) continue;
        std::size_t m = a.period;
        if (m == 0 || m % static_cast<std::size_t>(n_family) != 0) continue;
        m /= static_cast<std::size_t>(n_family);
        if ((m & (m - 1)) == 0) return true;
    }
    return false;
}

namespace {

enum class FamilyState { Absent, Periodic, Chaotic, Unknown };

FamilyState family_state(const MapParams& p, int n_family, const OrbitConfig& cfg)
{
    if (!in_domain_p(p) || !(p.k < -4.0)) return FamilyState::Absent;
    AttractorSet set;
    try {
        set = attractor_set(p, cfg);
    } catch (const UnresolvedAttractor&) {
        return FamilyState::Unknown;
    }
    FamilyState state = FamilyState::Absent;
    for (const Attractor& a : set.attractors) {
        AttractorSet single;
        single.attractors.push_back(a);
        if (!has_family(single, n_family)) continue;
        if (a.kind == AttractorKind::Chaotic) return FamilyState::Chaotic;
        state = FamilyState::Periodic;
    }
    return state;
}

}  // namespace

std::vector<CrisisBoundarySample> crisis_boundary_scan(double b_lo, double b_hi, double k_lo, double k_hi,
                                                       int n_family, ScanAxis axis, double resolution,
                                                       const OrbitConfig& cfg, int threads)
{
    if (!(resolution > 0.0) || !(b_lo < b_hi) || !(k_lo < k_hi) || n_family < 1) {
        throw DomainError("crisis scan needs a non-empty window, positive resolution and n_family >= 1");
    }
    const bool along_b = axis == ScanAxis::B;
    const double a_lo = along_b ? b_lo : k_lo, a_hi = along_b ? b_hi : k_hi;
    const double c_lo = along_b ? k_lo : b_lo, c_hi = along_b ? k_hi : b_hi;
    const auto n_lines = static_cast<std::size_t>(std::max(1.0, std::floor((c_hi - c_lo) / resolution)));
    const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::floor((a_hi - a_lo) / resolution)));
    auto params = [&](double along, double across) {
        return along_b ? MapParams{along, across} : MapParams{across, along};
    };

    std::vector<std::vector<CrisisBoundarySample>> per_line(n_lines);
    parallel_for(n_lines, threads, [&](std::size_t line) {
        const double across = c_lo + (static_cast<double>(line) + 0.5) * (c_hi - c_lo) / static_cast<double>(n_lines);
        std::vector<FamilyState> states(n_steps + 1);
        for (std::size_t s = 0; s <= n_steps; ++s) {
            states[s] = family_state(params(a_lo + static_cast<double>(s) * resolution, across), n_family, cfg);
        }
        for (std::size_t s = 0; s < n_steps; ++s) {
            const FamilyState l = states[s], r = states[s + 1];
            const bool left_present = l == FamilyState::Chaotic && r == FamilyState::Absent;
            const bool right_present = r == FamilyState::Chaotic && l == FamilyState::Absent;
            if (!left_present && !right_present) continue;
            double present = a_lo + static_cast<double>(left_present ? s : s + 1) * resolution;
            double absent = a_lo + static_cast<double>(left_present ? s + 1 : s) * resolution;
            while (std::abs(present - absent) > resolution / 100.0) {
                const double mid = 0.5 * (present + absent);
                const FamilyState st = family_state(params(mid, across), n_family, cfg);
                if (st == FamilyState::Chaotic || st == FamilyState::Periodic) {
                    present = mid;
                } else if (st == FamilyState::Absent) {
                    absent = mid;
                } else {
                    break;
                }
            }
            const MapParams p = params(present, across);
            per_line[line].push_back({p.b, p.k, n_family});
        }
    });
    std::vector<CrisisBoundarySample> out;
    for (auto& line : per_line) out.insert(out.end(), line.begin(), line.end());
    return out;
}

}  // namespace bimodal
