#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "critsys/algebraic.hpp"
#include "critsys/asymptotics.hpp"
#include "critsys/bubble.hpp"
#include "critsys/cli.hpp"
#include "critsys/errors.hpp"
#include "critsys/params.hpp"
#include "critsys/regime.hpp"
#include "critsys/spectral.hpp"

namespace py = pybind11;
using namespace critsys;

namespace {

py::dict solution_dict(const CouplingSolution& s) {
    py::dict d;
    d["k"] = s.k;
    d["l"] = s.l;
    d["res1"] = s.res1;
    d["res2"] = s.res2;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled critical fractional system: solver and verifier";

    static py::exception<Error> base_exc(m, "CritsysError");
    static py::exception<DomainError> domain_exc(m, "DomainError", PyExc_ValueError);
    static py::exception<NumericalError> numerical_exc(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        auto decorate = [](const py::object& type, const Error& e) {
            py::object exc = type(e.what());
            exc.attr("code") = e.code();
            exc.attr("constraint") = e.constraint();
            exc.attr("value") = e.value();
            PyErr_SetObject(type.ptr(), exc.ptr());
        };
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            decorate(domain_exc, e);
        } catch (const NumericalError& e) {
            decorate(numerical_exc, e);
        } catch (const Error& e) {
            decorate(base_exc, e);
        }
    });

    py::class_<SystemParams>(m, "SystemParams")
        .def_property_readonly("n", &SystemParams::n)
        .def_property_readonly("s", &SystemParams::s)
        .def_property_readonly("alpha", &SystemParams::alpha)
        .def_property_readonly("beta", &SystemParams::beta)
        .def_property_readonly("mu1", &SystemParams::mu1)
        .def_property_readonly("mu2", &SystemParams::mu2)
        .def_property_readonly("gamma", &SystemParams::gamma)
        .def_property_readonly("two_star", &SystemParams::two_star)
        .def("with_gamma", &SystemParams::with_gamma)
        .def("swapped", &SystemParams::swapped)
        .def("__repr__", [](const SystemParams& p) {
            std::ostringstream os;
            os << "SystemParams(n=" << p.n() << ", s=" << p.s() << ", alpha=" << p.alpha() << ", mu1=" << p.mu1()
               << ", mu2=" << p.mu2() << ", gamma=" << p.gamma() << ")";
            return os.str();
        });

    m.def("make_params", &make_params, py::arg("n"), py::arg("s"), py::arg("alpha"), py::arg("mu1"),
          py::arg("mu2"), py::arg("gamma"));
    m.def("critical_exponent", py::overload_cast<int, double>(&critical_exponent), py::arg("n"), py::arg("s"));

    m.def("gamma_threshold_a", &gamma_threshold_a);
    m.def("gamma_threshold_b", &gamma_threshold_b);
    m.def("classify", [](const SystemParams& p) {
        const Regime r = classify(p);
        py::dict d;
        d["label"] = std::string(to_string(r.label));
        d["gamma_threshold_a"] = r.gamma_threshold_a ? py::cast(*r.gamma_threshold_a) : py::none();
        d["gamma_threshold_b"] = r.gamma_threshold_b ? py::cast(*r.gamma_threshold_b) : py::none();
        d["notes"] = r.notes;
        return d;
    });

    m.def("eval_F", [](const SystemParams& p, double k, double l) {
        return py::make_tuple(eval_F1(p, k, l), eval_F2(p, k, l));
    });
    m.def("find_k0_l0", [](const SystemParams& p, double tol) { return solution_dict(find_k0_l0(p, tol)); },
          py::arg("params"), py::arg("tol") = 1e-12);
    m.def("lprime_min_closed_form", &lprime_min_closed_form);
    m.def("lprime_grid_min", &lprime_grid_min, py::arg("params"), py::arg("points") = 10000);

    m.def(
        "least_energy",
        [](const SystemParams& p, std::optional<double> sobolev) {
            std::optional<CouplingSolution> sol;
            const Regime r = classify(p);
            if (r.label == RegimeLabel::attained_a || r.label == RegimeLabel::attained_b) sol = find_k0_l0(p);
            const EnergyReport e = least_energy(p, sol, sobolev);
            py::dict d;
            d["label"] = std::string(to_string(e.label));
            d["dimensionless_A"] = e.dimensionless_A;
            d["absolute_A"] = e.absolute_A ? py::cast(*e.absolute_A) : py::none();
            d["attained"] = e.attained;
            return d;
        },
        py::arg("params"), py::arg("sobolev") = std::nullopt);

    m.def("sobolev_closed_form", [](int n, double s) { return sobolev_constant_closed_form(n, s).value; });
    m.def(
        "sobolev_spectral",
        [](int n, double s, double L, int N, std::optional<double> eps) {
            const SobolevConstant c = sobolev_constant_spectral(n, s, L, N, eps);
            return py::make_tuple(c.value, c.est_error);
        },
        py::arg("n"), py::arg("s"), py::arg("L") = 30.0, py::arg("N") = 64, py::arg("epsilon") = std::nullopt);

    m.def(
        "solve_tR_sR",
        [](const SystemParams& p, double theta, double tol) {
            const PerturbationSolution s = solve_tR_sR(p, theta, tol);
            return py::make_tuple(s.tR, s.sR, s.iterations);
        },
        py::arg("params"), py::arg("theta"), py::arg("tol") = 1e-12);
    m.def("energy_gap_vs_R", [](const SystemParams& p, const std::vector<double>& Rs) {
        py::list rows;
        for (const GapRow& r : energy_gap_vs_R(p, Rs)) {
            py::dict d;
            d["R"] = r.R;
            d["theta1"] = r.theta1;
            d["theta2"] = r.theta2;
            d["tR"] = r.tR;
            d["sR"] = r.sR;
            d["bound"] = r.bound;
            d["limit"] = r.limit;
            d["rel_gap"] = r.rel_gap;
            rows.append(d);
        }
        return rows;
    });
    m.def(
        "continuation_branch",
        [](const SystemParams& base, double gamma_max, double step) {
            const ContinuationPath path = continuation_branch(base, gamma_max, step);
            py::list samples;
            for (const ContinuationSample& s : path.samples) {
                samples.append(py::make_tuple(s.gamma, s.k, s.l, s.ordering_ok));
            }
            py::dict d;
            d["samples"] = samples;
            d["fold_detected"] = path.fold_detected;
            d["gamma1_bracket"] = path.gamma1_bracket ? py::cast(*path.gamma1_bracket) : py::none();
            return d;
        },
        py::arg("base"), py::arg("gamma_max"), py::arg("step") = 0.0);

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    });
}
