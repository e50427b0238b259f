#include "bimodal/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bimodal/errors.hpp"

namespace bimodal {

namespace {

struct Vec {
    double y1, y2, s;
};

Vec to_vec(const OdeRates& r) noexcept { return {r.dy1, r.dy2, r.ds}; }

OdeState axpy(const OdeState& st, double h, std::initializer_list<std::pair<double, const Vec*>> terms) noexcept
{
    OdeState out = st;
    for (const auto& [c, v] : terms) {
        out.y1 += h * c * v->y1;
        out.y2 += h * c * v->y2;
        out.s += h * c * v->s;
    }
    return out;
}

// Dormand-Prince 5(4) tableau; the system is autonomous so the nodes c_i
// are not needed.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b* (fifth minus fourth order weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
    OdeState next;
    Vec err;
};

StepResult dp_step_full(const OdeParams& p, const OdeState& st, double h) noexcept
{
    const Vec k1 = to_vec(vector_field(p, st));
    const Vec k2 = to_vec(vector_field(p, axpy(st, h, {{a21, &k1}})));
    const Vec k3 = to_vec(vector_field(p, axpy(st, h, {{a31, &k1}, {a32, &k2}})));
    const Vec k4 = to_vec(vector_field(p, axpy(st, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}})));
    const Vec k5 = to_vec(vector_field(p, axpy(st, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}})));
    const Vec k6 = to_vec(vector_field(p, axpy(st, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}})));
    const OdeState next = axpy(st, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec k7 = to_vec(vector_field(p, next));
    const OdeState zero{0.0, 0.0, 0.0};
    const OdeState e = axpy(zero, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});
    return {next, {e.y1, e.y2, e.s}};
}

// Rounding can leave tiny negative densities; the positive octant is
// invariant for the exact flow.
OdeState clamp_tiny_negatives(OdeState st) noexcept
{
    for (double* v : {&st.y1, &st.y2, &st.s}) {
        if (*v < 0.0 && *v > -1e-12) *v = 0.0;
    }
    return st;
}

}  // namespace

void OdeParams::validate() const
{
    for (double v : {m1, m2, lambda1, lambda2, a1, a2}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError("ODE parameters must be positive and finite");
        }
    }
}

OdeRates vector_field(const OdeParams& p, const OdeState& st) noexcept
{
    const double s = st.s;
    return {p.m1 * (s - p.lambda1) / (s + p.a1) * st.y1,
            p.m2 * (s - p.lambda2) / (s + p.a2) * st.y2,
            (1.0 - s - st.y1 / (s + p.a1) - st.y2 / (s + p.a2)) * s};
}

OdeState dp_step(const OdeParams& p, const OdeState& st, double h) noexcept
{
    return dp_step_full(p, st, h).next;
}

Trajectory integrate(const OdeParams& p, const OdeState& st0, double t_end, const IntegratorOptions& opts)
{
    p.validate();
    if (!(opts.tol >= 1e-12 && opts.tol <= 1e-4)) {
        throw DomainError("integration tolerance must lie in [1e-12, 1e-4]");
    }
    if (!(st0.y1 >= 0.0 && st0.y2 >= 0.0 && st0.s >= 0.0)) {
        throw DomainError("initial state must lie in the closed positive octant");
    }
    Trajectory traj;
    traj.params = p;
    traj.t.push_back(0.0);
    traj.states.push_back(st0);

    double t = 0.0;
    double h = std::clamp(opts.h_init, opts.h_min, opts.h_max);
    OdeState st = st0;
    while (t < t_end) {
        const bool last = t + h >= t_end;
        const double step = last ? t_end - t : h;
        const StepResult r = dp_step_full(p, st, step);
        // Relative error per component with a tiny absolute floor.
        double err = 0.0;
        const double floor = 1e-8 * opts.tol;
        err = std::max(err, std::abs(r.err.y1) / (opts.tol * std::max(std::abs(st.y1), std::abs(r.next.y1)) + floor));
        err = std::max(err, std::abs(r.err.y2) / (opts.tol * std::max(std::abs(st.y2), std::abs(r.next.y2)) + floor));
        err = std::max(err, std::abs(r.err.s) / (opts.tol * std::max(std::abs(st.s), std::abs(r.next.s)) + floor));
        if (!std::isfinite(err)) err = std::numeric_limits<double>::max();

        if (err <= 1.0) {
            t = last ? t_end : t + step;
            st = clamp_tiny_negatives(r.next);
            traj.t.push_back(t);
            traj.states.push_back(st);
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(opts.safety * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(step * factor, opts.h_max);
        if (h < opts.h_min) {
            throw StepUnderflow("step size fell below " + std::to_string(opts.h_min) + " at t = " + std::to_string(t));
        }
    }
    return traj;
}

std::vector<SectionEvent> poincare_section(const Trajectory& traj, double s_level, double t_tol)
{
    if (!(s_level > 0.0)) {
        throw DomainError("section level must be positive");
    }
    std::vector<SectionEvent> events;
    for (std::size_t i = 0; i + 1 < traj.states.size(); ++i) {
        const OdeState& a = traj.states[i];
        const OdeState& b = traj.states[i + 1];
        if (!(a.s > s_level && b.s <= s_level)) continue;
        double lo = 0.0;
        double hi = traj.t[i + 1] - traj.t[i];
        OdeState at = b;
        while (hi - lo > t_tol) {
            const double mid = 0.5 * (lo + hi);
            const OdeState m = dp_step(traj.params, a, mid);
            if (m.s > s_level) {
                lo = mid;
            } else {
                hi = mid;
                at = m;
            }
        }
        at = dp_step(traj.params, a, hi);
        if (!(vector_field(traj.params, at).ds < 0.0)) continue;
        events.push_back({traj.t[i] + hi, std::log(at.y2 / at.y1), at});
    }
    if (events.empty()) {
        throw NoCrossings("trajectory never crosses s = " + std::to_string(s_level) + " downward");
    }
    return events;
}

std::vector<SectionEvent> collect_events(const OdeParams& p, const OdeState& st0, const SectionRun& run)
{
    std::vector<SectionEvent> out;
    OdeState st = st0;
    double t0 = 0.0;
    // Integrate in chunks so memory stays bounded for long runs.
    const double chunk = 200.0;
    while (out.size() < run.n_events && t0 < run.t_max) {
        const Trajectory traj = integrate(p, st, chunk, run.integrator);
        try {
            for (SectionEvent e : poincare_section(traj, run.s_level)) {
                e.t += t0;
                if (e.t < run.t_transient) continue;
                out.push_back(e);
                if (out.size() == run.n_events) break;
            }
        } catch (const NoCrossings&) {
        }
        st = traj.states.back();
        t0 += chunk;
    }
    if (out.empty()) {
        throw NoCrossings("no downward crossings of s = " + std::to_string(run.s_level) + " before t = " +
                          std::to_string(run.t_max));
    }
    return out;
}

std::vector<std::pair<double, double>> return_map_cloud(const std::vector<SectionEvent>& events)
{
    if (events.size() < 2) {
        throw DomainError("return map needs at least two events");
    }
    std::vector<std::pair<double, double>> cloud;
    cloud.reserve(events.size() - 1);
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        cloud.emplace_back(events[i].x, events[i + 1].x);
    }
    return cloud;
}

double cloud_thickness(const std::vector<std::pair<double, double>>& cloud, int bins)
{
    if (cloud.empty() || bins < 1) return 0.0;
    double lo = cloud.front().first, hi = lo;
    for (const auto& [x, y] : cloud) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(hi > lo)) {
        double ymin = cloud.front().second, ymax = ymin;
        for (const auto& pt : cloud) {
            ymin = std::min(ymin, pt.second);
            ymax = std::max(ymax, pt.second);
        }
        return ymax - ymin;
    }
    std::vector<double> bmin(static_cast<std::size_t>(bins), std::numeric_limits<double>::infinity());
    std::vector<double> bmax(static_cast<std::size_t>(bins), -std::numeric_limits<double>::infinity());
    for (const auto& [x, y] : cloud) {
        auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * bins);
        idx = std::min(idx, static_cast<std::size_t>(bins - 1));
        bmin[idx] = std::min(bmin[idx], y);
        bmax[idx] = std::max(bmax[idx], y);
    }
    double thick = 0.0;
    for (std::size_t i = 0; i < bmin.size(); ++i) {
        if (bmax[i] > bmin[i]) thick = std::max(thick, bmax[i] - bmin[i]);
    }
    return thick;
}

std::pair<double, double> reduce_map_parameters(double beta, double u, double k1, double k2) noexcept
{
    return {beta + k2 * u, k1 * u};
}

}  // namespace bimodal
