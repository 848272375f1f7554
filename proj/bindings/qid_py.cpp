#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qid/scenario.hpp"
#include "qid/tvbounds.hpp"

namespace py = pybind11;

namespace {

qid::TrigPoly make_poly(int d, const std::vector<std::vector<int>>& exponents,
                        const std::vector<std::complex<double>>& coefs) {
    if (exponents.size() != coefs.size())
        throw std::invalid_argument("exponents and coefficients must align");
    qid::TrigPoly p(d);
    for (size_t i = 0; i < coefs.size(); ++i) p.add_term(exponents[i], coefs[i]);
    return p;
}

}  // namespace

PYBIND11_MODULE(_qid, m) {
    m.doc() = "rational-infinite divisibility toolkit (criteria, spectral triplets, bounds)";

    m.def("version", [] { return std::string(qid::kToolVersion); });

    m.def(
        "run_scenario",
        [](const std::string& config, const std::string& out_dir) {
            auto cfg = qid::parse_scenario_text(config);
            auto report = qid::run_scenario(cfg, out_dir);
            return py::make_tuple(report.doc.dump(2), report.exit_code);
        },
        py::arg("config"), py::arg("out_dir") = "",
        "Run a scenario config (JSON text); returns (report_json, exit_code).");

    m.def("builtin_examples", [] {
        py::dict out;
        for (auto& [name, cfg] : qid::builtin_examples()) out[name.c_str()] = cfg.dump(2);
        return out;
    });

    m.def(
        "eval_cf",
        [](const std::string& mixture_json, double t) {
            nlohmann::json doc = {{"task", "check"},
                                  {"mixture", nlohmann::json::parse(mixture_json)}};
            auto cfg = qid::parse_scenario(doc);
            return qid::eval_cf(*cfg.mixture, t);
        },
        py::arg("mixture"), py::arg("t"),
        "Characteristic function of a mixture block (JSON text) at t.");

    m.def(
        "exact_power_norm",
        [](int d, const std::vector<std::vector<int>>& exponents,
           const std::vector<std::complex<double>>& coefs, int k) {
            return qid::exact_power_norm(make_poly(d, exponents, coefs), k);
        },
        py::arg("d"), py::arg("exponents"), py::arg("coefficients"), py::arg("k"));

    m.def(
        "power_norm_bounds",
        [](int d, const std::vector<std::vector<int>>& exponents,
           const std::vector<std::complex<double>>& coefs, int k) {
            auto p = make_poly(d, exponents, coefs);
            qid::Lemma8Bounds b(p);
            return py::make_tuple(qid::exact_power_norm(p, k), b.refined_bound(k),
                                  b.bound_from_constants(k));
        },
        py::arg("d"), py::arg("exponents"), py::arg("coefficients"), py::arg("k"),
        "Returns (exact, partition_bound, constants_bound) for ||phi^k||.");
}
