#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "bimodal/errors.hpp"
#include "bimodal/map_core.hpp"
#include "bimodal/ode.hpp"
#include "bimodal/orbit.hpp"
#include "bimodal/regions.hpp"

namespace py = pybind11;
using namespace bimodal;

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Bindings for the bimodal map library";

    auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<NoFixedPoint>(m, "NoFixedPoint", base.ptr());
    py::register_exception<NotInRegion>(m, "NotInRegion", base.ptr());
    py::register_exception<CriticalPointError>(m, "CriticalPointError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());

    py::class_<MapParams>(m, "MapParams")
        .def(py::init([](double b, double k) { return MapParams{b, k}; }), py::arg("b"), py::arg("k"))
        .def_readwrite("b", &MapParams::b)
        .def_readwrite("k", &MapParams::k)
        .def("__eq__", [](const MapParams& a, const MapParams& b) { return a == b; })
        .def("__repr__", [](const MapParams& p) {
            return "MapParams(b=" + py::repr(py::float_(p.b)).cast<std::string>() +
                   ", k=" + py::repr(py::float_(p.k)).cast<std::string>() + ")";
        });

    m.def("eval_map", &eval, py::arg("p"), py::arg("x"));
    m.def("eval_n", &eval_n, py::arg("p"), py::arg("x"), py::arg("n"));
    m.def("derivative", &derivative, py::arg("p"), py::arg("x"), py::arg("order") = 1);
    m.def("schwarzian", &schwarzian, py::arg("p"), py::arg("x"));
    m.def("critical_abscissae", &critical_abscissae, py::arg("k"), "(x_max, x_min) for k <= -4.");
    m.def("fixed_point", &fixed_point, py::arg("p"));
    m.def("symmetry_conjugate", &symmetry_conjugate, py::arg("p"));

    m.def("classify", [](const MapParams& p) { return std::string(to_string(classify(p))); }, py::arg("p"));
    m.def("flip_curve_k", &flip_curve_k, py::arg("b"));
    m.def("gamma_boundaries", &gamma_boundaries, py::arg("k"));
    m.def("gamma_intersection_k", &gamma_intersection_k);
    m.def(
        "absorbing_interval",
        [](const MapParams& p) {
            const AbsorbingInterval j = absorbing_interval(p);
            return py::make_tuple(j.lo, j.hi, std::string(to_string(j.kind)));
        },
        py::arg("p"), "(lo, hi, kind)");

    py::class_<Attractor>(m, "Attractor")
        .def_property_readonly("kind", [](const Attractor& a) { return std::string(to_string(a.kind)); })
        .def_readonly("period", &Attractor::period)
        .def_readonly("points", &Attractor::points)
        .def_readonly("lyapunov", &Attractor::lyapunov)
        .def_property_readonly("periodic", &Attractor::periodic);

    py::class_<AttractorSet>(m, "AttractorSet")
        .def_readonly("attractors", &AttractorSet::attractors)
        .def_readonly("seed_owner", &AttractorSet::seed_owner)
        .def_readonly("bistable", &AttractorSet::bistable)
        .def("__len__", [](const AttractorSet& s) { return s.attractors.size(); });

    m.def(
        "attractor_set",
        [](const MapParams& p, std::size_t n_transient, std::size_t n_sample) {
            OrbitConfig cfg;
            cfg.n_transient = n_transient;
            cfg.n_sample = n_sample;
            py::gil_scoped_release release;
            return attractor_set(p, cfg);
        },
        py::arg("p"), py::arg("n_transient") = OrbitConfig{}.n_transient, py::arg("n_sample") = OrbitConfig{}.n_sample);

    py::class_<Period2Orbit>(m, "Period2Orbit")
        .def_readonly("x1", &Period2Orbit::x1)
        .def_readonly("x2", &Period2Orbit::x2)
        .def_readonly("u1", &Period2Orbit::u1)
        .def_readonly("u2", &Period2Orbit::u2)
        .def_readonly("B", &Period2Orbit::B)
        .def_readonly("k_reconstructed", &Period2Orbit::k_reconstructed);
    m.def("find_period2", &find_period2, py::arg("p"));
    m.def("k_of_u", &k_of_u, py::arg("B"), py::arg("u"));

    py::class_<OdeParams>(m, "OdeParams")
        .def(py::init([](double m1, double m2, double l1, double l2, double a1, double a2) {
                 return OdeParams{m1, m2, l1, l2, a1, a2};
             }),
             py::arg("m1"), py::arg("m2"), py::arg("lambda1"), py::arg("lambda2"), py::arg("a1"), py::arg("a2"))
        .def_readwrite("m1", &OdeParams::m1)
        .def_readwrite("m2", &OdeParams::m2)
        .def_readwrite("lambda1", &OdeParams::lambda1)
        .def_readwrite("lambda2", &OdeParams::lambda2)
        .def_readwrite("a1", &OdeParams::a1)
        .def_readwrite("a2", &OdeParams::a2)
        .def("swapped", &OdeParams::swapped);

    py::class_<OdeState>(m, "OdeState")
        .def(py::init([](double y1, double y2, double s) { return OdeState{y1, y2, s}; }), py::arg("y1"),
             py::arg("y2"), py::arg("s"))
        .def_readwrite("y1", &OdeState::y1)
        .def_readwrite("y2", &OdeState::y2)
        .def_readwrite("s", &OdeState::s)
        .def("swapped", &OdeState::swapped);

    py::class_<SectionEvent>(m, "SectionEvent")
        .def_readonly("t", &SectionEvent::t)
        .def_readonly("x", &SectionEvent::x)
        .def_readonly("state", &SectionEvent::state);

    m.def(
        "collect_events",
        [](const OdeParams& p, const OdeState& st0, double s_level, std::size_t n_events, double t_transient,
           double tol) {
            SectionRun run;
            run.s_level = s_level;
            run.n_events = n_events;
            run.t_transient = t_transient;
            run.integrator.tol = tol;
            py::gil_scoped_release release;
            return collect_events(p, st0, run);
        },
        py::arg("p"), py::arg("state"), py::arg("s_level"), py::arg("n_events") = 100, py::arg("t_transient") = 0.0,
        py::arg("tol") = IntegratorOptions{}.tol);
    m.def("return_map_cloud", &return_map_cloud, py::arg("events"));
}
