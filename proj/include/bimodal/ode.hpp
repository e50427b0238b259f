#pragma once

#include <utility>
#include <vector>

namespace bimodal {

/// Parameters of the normalized two-predators-one-prey system
///   y_i' = m_i (s - lambda_i) / (s + a_i) y_i
///   s'   = (1 - s - y1/(s + a1) - y2/(s + a2)) s
struct OdeParams {
    double m1 = 1.0, m2 = 1.0;
    double lambda1 = 0.2, lambda2 = 0.2;
    double a1 = 0.3, a2 = 0.3;

    /// Predator 1 <-> predator 2.
    OdeParams swapped() const noexcept { return {m2, m1, lambda2, lambda1, a2, a1}; }
    void validate() const;
};

struct OdeState {
    double y1 = 0.0;
    double y2 = 0.0;
    double s = 0.0;

    OdeState swapped() const noexcept { return {y2, y1, s}; }
};

struct OdeRates {
    double dy1 = 0.0;
    double dy2 = 0.0;
    double ds = 0.0;
};

OdeRates vector_field(const OdeParams& p, const OdeState& st) noexcept;

struct Trajectory {
    OdeParams params;
    std::vector<double> t;
    std::vector<OdeState> states;
};

struct IntegratorOptions {
    double tol = 1e-9;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 1.0;
    double safety = 0.9;
};

/// Adaptive Dormand-Prince 5(4) integration from t = 0 to t_end. Every
/// accepted step is recorded. Throws StepUnderflow, DomainError for tol
/// outside [1e-12, 1e-4].
Trajectory integrate(const OdeParams& p, const OdeState& st0, double t_end, const IntegratorOptions& opts = {});

/// One explicit step of the fifth-order solution (used to evaluate the
/// flow between recorded steps).
OdeState dp_step(const OdeParams& p, const OdeState& st, double h) noexcept;

struct SectionEvent {
    double t = 0.0;
    double x = 0.0;  // ln(y2 / y1)
    OdeState state;
};

/// Downward crossings of s = s_level, located by bisection in time on the
/// flow between recorded steps. Throws NoCrossings when there are none.
std::vector<SectionEvent> poincare_section(const Trajectory& traj, double s_level, double t_tol = 1e-10);

struct SectionRun {
    double s_level = 0.0;
    std::size_t n_events = 100;
    double t_transient = 0.0;  // events before this time are dropped
    double t_max = 1e6;
    IntegratorOptions integrator{};
};

/// Integrates until n_events downward crossings after the transient.
std::vector<SectionEvent> collect_events(const OdeParams& p, const OdeState& st0, const SectionRun& run);

/// Consecutive event pairs (x_j, x_{j+1}).
std::vector<std::pair<double, double>> return_map_cloud(const std::vector<SectionEvent>& events);

/// Largest per-bin spread of x_{j+1} over `bins` equal bins of x_j; zero
/// for a single-valued cloud.
double cloud_thickness(const std::vector<std::pair<double, double>>& cloud, int bins = 50);

/// b = beta + k2 u, k = k1 u: map coefficients from the two-predator
/// ratio-map parameters.
std::pair<double, double> reduce_map_parameters(double beta, double u, double k1, double k2) noexcept;

}  // namespace bimodal
