#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "imex/error.hpp"
#include "imex/integrator.hpp"
#include "imex/kernels.hpp"
#include "imex/polyring.hpp"
#include "imex/schemes.hpp"
#include "imex/symbolcalc.hpp"
#include "imex/tables.hpp"

namespace py = pybind11;
using namespace imex;

namespace {

Param to_param(const py::object& p) {
    if (p.is_none()) return Param();
    if (py::isinstance<py::str>(p)) return Param::parse(p.cast<std::string>());
    if (py::isinstance<py::int_>(p)) return Param(Rational(p.cast<long long>()));
    return Param(p.cast<double>());
}

py::object from_json(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

SchemeTriad scheme(const std::string& family, int k, const py::object& param) {
    return make_scheme(parse_family(family), k, to_param(param));
}

py::dict scheme_dict(const SchemeTriad& s) {
    py::dict d;
    d["family"] = family_name(s.family);
    d["k"] = s.k;
    d["a"] = s.a;
    d["b"] = s.b;
    d["c"] = s.c;
    d["param"] = s.param ? py::cast(*s.param) : py::none();
    d["warning"] = s.warning;
    d["warning_text"] = s.warning_text;
    return d;
}

}  // namespace

PYBIND11_MODULE(_imexms, m) {
    m.doc() = "Implicit-explicit multistep schemes: construction, stability indicators, Toeplitz checks, integration";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def(
        "make_scheme",
        [](const std::string& family, int k, const py::object& param) { return scheme_dict(scheme(family, k, param)); },
        py::arg("family"), py::arg("k"), py::arg("param") = py::none(),
        "Coefficient triad of a catalog scheme as a dict with keys a, b, c.");

    m.def(
        "indicators",
        [](const std::string& family, int k, const py::object& param, int grid) {
            return from_json(to_json(indicators(scheme(family, k, param), grid)));
        },
        py::arg("family"), py::arg("k"), py::arg("param") = py::none(), py::arg("grid") = 8192);

    m.def(
        "sweep",
        [](const std::string& family, int k, const std::string& grid_spec, int grid, int threads) {
            const SweepResult r = indicator_sweep(parse_family(family), k, parse_param_grid(grid_spec), grid, threads);
            py::list out;
            for (const auto& e : r.entries) {
                py::dict d;
                d["param"] = e.param.value;
                d["report"] = e.report ? from_json(to_json(*e.report)) : py::none();
                d["warning"] = e.warning;
                d["error"] = e.error;
                out.append(d);
            }
            return out;
        },
        py::arg("family"), py::arg("k"), py::arg("grid_spec"), py::arg("grid") = 8192, py::arg("threads") = 0);

    m.def(
        "toeplitz_verify",
        [](const std::string& family, int k, const py::object& param, int n) {
            const SchemeTriad s = scheme(family, k, param);
            return from_json(to_json(toeplitz_verify(s, n, indicators(s))));
        },
        py::arg("family"), py::arg("k"), py::arg("param") = py::none(), py::arg("n") = 64);

    m.def("doc_kernels", [](const std::vector<double>& a, int n) { return doc_kernels(a, n).doc; }, py::arg("a"),
          py::arg("n"));

    m.def(
        "poly_roots", [](const std::vector<double>& coeffs) { return poly_roots(Poly(coeffs)).roots; },
        py::arg("coeffs"), "Roots of sum coeffs[j] x^j.");

    m.def(
        "truncation",
        [](const std::string& family, int k, const py::object& param) {
            const TruncationReport t = truncation_leading(scheme(family, k, param));
            return py::make_tuple(t.order, t.coeff_u, t.coeff_F);
        },
        py::arg("family"), py::arg("k"), py::arg("param") = py::none());

    m.def(
        "closed_forms",
        [](const std::string& family, int k, double param) {
            py::list out;
            for (const auto& cf : closed_forms(parse_family(family), k, param))
                out.append(py::make_tuple(cf.quantity, cf.value, bound_kind_name(cf.kind)));
            return out;
        },
        py::arg("family"), py::arg("k"), py::arg("param"));

    m.def(
        "convergence_study",
        [](const std::string& problem, const std::string& family, int k, const py::object& param,
           const std::vector<double>& taus) {
            const ProblemSpec pb = problem_preset(problem);
            const ConvergenceStudy st = convergence_study(pb, scheme(family, k, param), taus);
            py::dict d;
            py::list rows;
            for (const auto& r : st.rows)
                rows.append(py::make_tuple(r.tau, r.err_max ? py::cast(*r.err_max) : py::none(),
                                           r.err_l2 ? py::cast(*r.err_l2) : py::none()));
            d["rows"] = rows;
            d["slope"] = st.slope ? py::cast(*st.slope) : py::none();
            d["unstable"] = st.unstable;
            d["stability_satisfied"] = st.stability.satisfied;
            d["intensity"] = st.stability.intensity;
            return d;
        },
        py::arg("problem"), py::arg("family"), py::arg("k"), py::arg("param"), py::arg("taus"));
}
