#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nudgefem/assembly.hpp"
#include "nudgefem/errors.hpp"
#include "nudgefem/harness.hpp"
#include "nudgefem/manufactured.hpp"
#include "nudgefem/verify.hpp"

namespace py = pybind11;
using namespace nudgefem;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

// CSR arrays, ready for scipy.sparse.csr_matrix((data, indices, indptr), shape)
py::dict csr(const SparseMatrix& m) {
    py::dict d;
    d["data"] = as_array(m.values);
    d["indices"] = py::array_t<int>(m.col_indices.size(), m.col_indices.data());
    d["indptr"] = py::array_t<int>(m.row_offsets.size(), m.row_offsets.data());
    d["shape"] = py::make_tuple(m.rows, m.cols);
    return d;
}

py::dict series_dict(const ErrorSeries& s) {
    std::vector<double> t, err, ratio, div;
    for (const auto& x : s.samples) {
        t.push_back(x.t);
        err.push_back(x.l2_error);
        ratio.push_back(x.obs_ratio);
        div.push_back(x.div_residual);
    }
    py::dict d;
    d["t"] = as_array(t);
    d["l2_error"] = as_array(err);
    d["obs_ratio"] = as_array(ratio);
    d["div_residual"] = as_array(div);
    return d;
}

ErrorSeries series_from(const py::dict& d) {
    ErrorSeries s;
    const auto t = d["t"].cast<std::vector<double>>();
    const auto err = d["l2_error"].cast<std::vector<double>>();
    for (std::size_t i = 0; i < t.size(); ++i) s.samples.push_back({t[i], err[i], 0.0, 0.0});
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "P2/P1 nudged Navier-Stokes solver";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidConfigError>(m, "InvalidConfigError", base.ptr());
    py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    py::enum_<InterpolantKind>(m, "InterpolantKind")
        .value("PiecewiseConstantAverage", InterpolantKind::PiecewiseConstantAverage)
        .value("CoarseLagrangeP1", InterpolantKind::CoarseLagrangeP1);
    py::enum_<InitialCondition>(m, "InitialCondition")
        .value("Zero", InitialCondition::Zero)
        .value("ExactAtZero", InitialCondition::ExactAtZero);
    py::enum_<LagrangeMode>(m, "LagrangeMode")
        .value("ProportionalH", LagrangeMode::ProportionalH)
        .value("FixedH", LagrangeMode::FixedH);

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("nu", &SimulationConfig::nu)
        .def_readwrite("beta", &SimulationConfig::beta)
        .def_readwrite("mu", &SimulationConfig::mu)
        .def_readwrite("n", &SimulationConfig::n)
        .def_readwrite("ratio_k", &SimulationConfig::ratio_k)
        .def_readwrite("dt", &SimulationConfig::dt)
        .def_readwrite("t_final", &SimulationConfig::t_final)
        .def_readwrite("interpolant", &SimulationConfig::interpolant)
        .def_readwrite("initial", &SimulationConfig::initial)
        .def_readwrite("assembly_degree", &SimulationConfig::assembly_degree)
        .def_readwrite("error_degree", &SimulationConfig::error_degree)
        .def("validate", &SimulationConfig::validate)
        .def("step_count", &SimulationConfig::step_count)
        .def("effective_dt", &SimulationConfig::effective_dt);

    m.def("eval_u", [](double x, double y, double t) { return manufactured::eval_u(x, y, t); });
    m.def("eval_p", &manufactured::eval_p);
    m.def("eval_f", [](double x, double y, double t, double nu) { return manufactured::eval_f(x, y, t, nu); });

    m.def(
        "assemble_operators",
        [](int n, int ratio_k, InterpolantKind kind) {
            const auto mesh = build_fine_mesh(n);
            const auto dm = build_dofmap(mesh);
            const auto ops = assemble_operators(dm, quadrature_rule(5));
            const auto nudging = assemble_nudging(dm, build_coarse_grid(mesh, ratio_k), kind);
            py::dict d;
            d["mass"] = csr(ops.mass);
            d["stiffness"] = csr(ops.stiffness);
            d["divergence"] = csr(ops.divergence);
            d["graddiv"] = csr(ops.graddiv);
            d["nudging"] = csr(nudging.matrix);
            d["pressure_mean"] = as_array(ops.pressure_mean);
            d["boundary_velocity_dofs"] = dm.boundary_velocity_dofs;
            return d;
        },
        py::arg("n"), py::arg("ratio_k"), py::arg("kind") = InterpolantKind::PiecewiseConstantAverage,
        "Assembled matrices as CSR dicts.");

    m.def(
        "simulate",
        [](const SimulationConfig& c) {
            ErrorSeries s;
            {
                py::gil_scoped_release release;
                s = simulate(c);
            }
            return series_dict(s);
        },
        py::arg("config"), "Run to t_final; returns t, l2_error, obs_ratio, div_residual arrays.");

    m.def("asymptotic_max", [](const py::dict& s, double f) { return asymptotic_max(series_from(s), f); },
          py::arg("series"), py::arg("window_fraction") = 0.25);
    m.def("fit_decay_rate", [](const py::dict& s, double a, double b) { return fit_decay_rate(series_from(s), a, b); });

    m.def(
        "run_convergence",
        [](const SimulationConfig& base, std::vector<int> ns, double dt_per_h, double window) {
            ConvergenceOptions o;
            o.ns = std::move(ns);
            o.dt_per_h = dt_per_h;
            o.window_fraction = window;
            const auto r = run_convergence(base, o);
            py::dict d;
            std::vector<double> h, err;
            for (const auto& row : r.rows) {
                h.push_back(row.h);
                err.push_back(row.max_window_error);
            }
            d["h"] = as_array(h);
            d["max_window_error"] = as_array(err);
            d["slope"] = r.slope;
            return d;
        },
        py::arg("base"), py::arg("ns"), py::arg("dt_per_h") = 0.0, py::arg("window_fraction") = 0.25);

    m.def(
        "fit_slope",
        [](const std::vector<double>& h, const std::vector<double>& err) {
            if (h.size() != err.size()) throw DimensionMismatchError("fit_slope: h and errors differ in length");
            std::vector<ConvergencePoint> pts;
            for (std::size_t i = 0; i < h.size(); ++i) pts.push_back({h[i], err[i]});
            return fit_slope(pts);
        });

    m.def(
        "predict_gamma",
        [](double nu, double H, double beta, double c_I) {
            const auto p = predict_gamma(nu, H, beta, c_I);
            py::dict d;
            d["gamma"] = p.gamma;
            d["viscous_branch"] = p.viscous_branch;
            d["nudging_branch"] = p.nudging_branch;
            d["viscous_branch_active"] = p.viscous_branch_active;
            return d;
        },
        py::arg("nu"), py::arg("H"), py::arg("beta"), py::arg("c_I") = 1.0);

    m.def("run_property_suite", []() {
        py::list out;
        for (const auto& c : run_property_suite()) {
            py::dict d;
            d["name"] = c.name;
            d["measured"] = c.measured;
            d["tolerance"] = c.tolerance;
            d["passed"] = c.passed;
            out.append(d);
        }
        return out;
    });
}
