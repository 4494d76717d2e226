#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "acr/chain_model.hpp"
#include "acr/errors.hpp"
#include "acr/experiments.hpp"
#include "acr/model_io.hpp"
#include "acr/onemax_chain.hpp"
#include "acr/rate_estimators.hpp"

namespace py = pybind11;
using namespace acr;

namespace {

TransitionModel make_model(std::vector<std::string> labels, const std::vector<std::vector<double>>& q,
                           std::vector<double> b, std::vector<double> fitness, double f_opt,
                           const std::string& direction) {
  return TransitionModel(std::move(labels), SparseMatrix::from_dense(q), std::move(b),
                         std::move(fitness), f_opt, parse_direction(direction));
}

DistributionVector distribution(std::vector<double> mass) {
  DistributionVector d;
  d.mass = std::move(mass);
  return d;
}

MeanFitnessSeries series(std::vector<double> f_bar, std::optional<double> f_opt,
                         const std::string& direction) {
  MeanFitnessSeries s;
  s.f_bar = std::move(f_bar);
  s.f_opt = f_opt;
  s.direction = parse_direction(direction);
  return s;
}

py::dict table_dict(const CsvTable& table) {
  py::dict out;
  for (const auto& name : table.header) out[py::str(name)] = table.column_values(name);
  return out;
}

}  // namespace

PYBIND11_MODULE(_acr, m) {
  m.doc() = "Average convergence rate of evolutionary algorithms";
  m.attr("__version__") = std::string(version());

  auto config_error = py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  (void)config_error;

  py::class_<TransitionModel>(m, "TransitionModel")
      .def(py::init(&make_model), py::arg("labels"), py::arg("Q"), py::arg("B"), py::arg("fitness"),
           py::arg("f_opt"), py::arg("direction") = "maximize")
      .def_property_readonly("labels", &TransitionModel::state_labels)
      .def_property_readonly("Q", [](const TransitionModel& t) { return t.transitions().to_dense(); })
      .def_property_readonly("B", &TransitionModel::escape)
      .def_property_readonly("fitness", &TransitionModel::fitness)
      .def_property_readonly("f_opt", &TransitionModel::f_opt)
      .def_property_readonly("direction",
                             [](const TransitionModel& t) { return std::string(to_string(t.direction())); })
      .def("__len__", &TransitionModel::size)
      .def("validate", [](const TransitionModel& t) { return validate(t); })
      .def("to_json", [](const TransitionModel& t) { return model_to_json(t); })
      .def_static("from_json", [](const std::string& s) { return model_from_json(s); });

  m.def("onemax_lumped", &onemax_chain::build_lumped, py::arg("n"));
  m.def("onemax_full", &onemax_chain::build_full, py::arg("n"));
  m.def("binomial_init",
        [](int n, bool lumped) { return onemax_chain::binomial_init(n, lumped).mass; },
        py::arg("n"), py::arg("lumped") = true);
  m.def("perron_init", [](const TransitionModel& t) { return perron_init(t).mass; });

  m.def("spectral_radius", [](const TransitionModel& t, double tol, std::size_t max_iter) {
    SpectralOptions opts;
    opts.tol = tol;
    opts.max_iter = max_iter;
    const auto est = spectral_radius(t, opts);
    py::dict d;
    d["rho"] = est.rho;
    d["left_eigenvector"] = est.left_eigenvector;
    d["collatz_lower"] = est.collatz_lower;
    d["collatz_upper"] = est.collatz_upper;
    d["iterations"] = est.iterations;
    d["method"] = est.method == SpectralMethod::power_iteration ? "power_iteration" : "bisection";
    return d;
  }, py::arg("model"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100000);
  m.def("asymptotic_rate", [](const TransitionModel& t) { return asymptotic_rate(t); });
  m.def("hitting_times", &hitting_times);
  m.def("g_condition", [](const TransitionModel& t, int delta_t) {
    const auto g = check_g_condition(t, delta_t);
    return py::make_tuple(g.holds, g.g);
  }, py::arg("model"), py::arg("delta_t"));
  m.def("exact_gap_curve",
        [](const TransitionModel& t, std::vector<double> q0, std::size_t t_max) {
          return exact_gap_curve(t, distribution(std::move(q0)), t_max);
        },
        py::arg("model"), py::arg("q0"), py::arg("t_max"));
  m.def("exact_rate_curve",
        [](const TransitionModel& t, std::vector<double> q0, std::size_t t_max) {
          return exact_rate_curve(t, distribution(std::move(q0)), t_max).values;
        },
        py::arg("model"), py::arg("q0"), py::arg("t_max"));

  m.def("geometric_rate",
        [](std::vector<double> f, double f_opt, const std::string& dir) {
          return geometric_rate(series(std::move(f), f_opt, dir)).values;
        },
        py::arg("f_bar"), py::arg("f_opt"), py::arg("direction") = "maximize");
  m.def("logarithmic_rate",
        [](std::vector<double> f, double f_opt, const std::string& dir) {
          return logarithmic_rate(series(std::move(f), f_opt, dir)).values;
        },
        py::arg("f_bar"), py::arg("f_opt"), py::arg("direction") = "maximize");
  m.def("alternative_rate",
        [](std::vector<double> f, int delta_t, double epsilon) {
          return alternative_rate(series(std::move(f), std::nullopt, "maximize"), delta_t, epsilon).values;
        },
        py::arg("f_bar"), py::arg("delta_t") = 10, py::arg("epsilon") = kGapEpsilon);

  m.def("onemax", [](const std::vector<std::uint8_t>& bits) { return onemax(bits); });
  m.def("ackley", [](const std::vector<double>& x) { return ackley(x); });

  m.def("run_traces",
        [](const std::string& config_json, unsigned jobs) {
          const auto cfg = parse_config(config_json);
          std::vector<std::vector<double>> out;
          for (auto& tr : run_batch(cfg.run, cfg.runs, jobs)) out.push_back(std::move(tr.values));
          return out;
        },
        py::arg("config_json"), py::arg("jobs") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("estimate",
        [](const std::string& config_json, unsigned jobs) {
          EstimateResult res;
          {
            py::gil_scoped_release release;
            res = run_estimate(parse_config(config_json), jobs);
          }
          return table_dict(res.table);
        },
        py::arg("config_json"), py::arg("jobs") = 1);
  m.def("analyze",
        [](const TransitionModel& t, std::vector<double> q0, std::size_t t_max, int delta_t) {
          const auto rep = analyze_model(t, distribution(std::move(q0)), t_max, delta_t);
          py::dict d;
          d["report"] = py::module_::import("json").attr("loads")(rep.report_json);
          d["curves"] = table_dict(rep.curves);
          return d;
        },
        py::arg("model"), py::arg("q0"), py::arg("t_max") = 256, py::arg("delta_t") = 10);
}
