#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpp/acceptance.hpp"
#include "fpp/errors.hpp"
#include "fpp/fidi.hpp"
#include "fpp/montecarlo.hpp"
#include "fpp/renewal.hpp"
#include "fpp/special_functions.hpp"
#include "fpp/stable_law.hpp"

namespace py = pybind11;

namespace {

fpp::InterArrivalLaw law_for(double beta) { return fpp::InterArrivalLaw(fpp::FractionalOrder(beta)); }

py::dict evaluation(const fpp::MLEvaluation& e) {
  py::dict d;
  d["value"] = e.value;
  d["method"] = fpp::to_string(e.method);
  d["est_abs_error"] = e.est_abs_error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fpp, m) {
  m.doc() = "Fractional Poisson process numerics";
  m.attr("__version__") = FPP_VERSION;

  static py::exception<fpp::ConvergenceError> convergence(m, "ConvergenceError",
                                                           PyExc_ArithmeticError);
  static py::exception<fpp::InsufficientAcceptance> acceptance(m, "InsufficientAcceptance",
                                                               PyExc_RuntimeError);
  static py::exception<fpp::SupportError> support(m, "SupportError", PyExc_IndexError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const fpp::DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const fpp::ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const fpp::InsufficientAcceptance& e) {
      py::set_error(acceptance, e.what());
    } catch (const fpp::SupportError& e) {
      py::set_error(support, e.what());
    }
  });

  m.def("ml_one_param", [](double beta, double x) {
    return evaluation(fpp::ml_one_param(fpp::FractionalOrder(beta), x));
  }, py::arg("beta"), py::arg("x"));
  m.def("ml_two_param", [](double beta, double x) {
    return evaluation(fpp::ml_two_param(fpp::FractionalOrder(beta), x));
  }, py::arg("beta"), py::arg("x"));
  m.def("ml_derivative_series", [](int n, double beta, double t) {
    return evaluation(fpp::ml_derivative_series(n, fpp::FractionalOrder(beta), t));
  }, py::arg("n"), py::arg("beta"), py::arg("t"));
  m.def("ml_derivative_stable", [](int n, double beta, double t) {
    return evaluation(fpp::ml_derivative_stable(n, fpp::FractionalOrder(beta), t));
  }, py::arg("n"), py::arg("beta"), py::arg("t"));

  m.def("stable_cdf", [](double beta, double scale, double t) {
    return fpp::stable_cdf(fpp::StableSpec(fpp::FractionalOrder(beta), scale), t);
  }, py::arg("beta"), py::arg("scale"), py::arg("t"));

  m.def("interarrival_cdf", [](double beta, double t) { return law_for(beta).cdf(t); },
        py::arg("beta"), py::arg("t"));
  m.def("interarrival_pdf", [](double beta, double t) { return law_for(beta).pdf(t); },
        py::arg("beta"), py::arg("t"));
  m.def("epoch_pdf", [](int n, double beta, double t) { return law_for(beta).epoch_pdf(n, t); },
        py::arg("n"), py::arg("beta"), py::arg("t"));
  m.def("counting_pmf", [](double beta, double t, int n_max) {
    const auto p = fpp::counting_pmf(law_for(beta), t, n_max);
    py::dict d;
    d["probabilities"] = p.probabilities;
    d["tail_mass"] = p.tail_mass;
    d["normalization_defect"] = p.normalization_defect;
    d["max_abs_error"] = p.max_abs_error;
    d["tail_warning"] = p.tail_warning;
    return d;
  }, py::arg("beta"), py::arg("t"), py::arg("n_max"));

  py::class_<fpp::MemoryKernel>(m, "MemoryKernel")
      .def_property_readonly("step", [](const fpp::MemoryKernel& k) { return k.density().step(); })
      .def_property_readonly("values", [](const fpp::MemoryKernel& k) { return k.density().values(); })
      .def_property_readonly("span", &fpp::MemoryKernel::span)
      .def_property_readonly("tail_mass", &fpp::MemoryKernel::tail_mass)
      .def_property_readonly("normalization_defect", &fpp::MemoryKernel::normalization_defect)
      .def("pdf", &fpp::MemoryKernel::pdf, py::arg("y"))
      .def("survival", &fpp::MemoryKernel::survival, py::arg("y"));

  m.def("residual_lifetime_pdf", [](double beta, double t1, int n1) {
    return fpp::residual_lifetime_pdf(law_for(beta), t1, n1);
  }, py::arg("beta"), py::arg("t1"), py::arg("n1"));
  m.def("last_epoch_pdf", [](double beta, double t1, int n1) {
    const auto g = fpp::last_epoch_pdf(law_for(beta), t1, n1);
    return py::make_tuple(g.step(), g.values());
  }, py::arg("beta"), py::arg("t1"), py::arg("n1"),
     "(step, values) of the density tabulated on [0, t1]");
  m.def("joint_pmf", [](double beta, std::vector<double> times, std::vector<int> counts) {
    const auto r = fpp::joint_pmf(fpp::ObservationSchedule(std::move(times), std::move(counts)),
                                  law_for(beta));
    return py::make_tuple(r.value, r.est_abs_error);
  }, py::arg("beta"), py::arg("times"), py::arg("counts"));
  m.def("joint_pmf_oracle", [](double beta, std::vector<double> times, std::vector<int> counts) {
    const auto r = fpp::joint_pmf_oracle(
        fpp::ObservationSchedule(std::move(times), std::move(counts)), law_for(beta));
    return py::make_tuple(r.value, r.est_abs_error);
  }, py::arg("beta"), py::arg("times"), py::arg("counts"));

  m.def("sample_interarrival", [](double beta, std::size_t n, std::uint64_t seed) {
    const auto law = law_for(beta);
    fpp::RandomStream rng(seed, 0);
    std::vector<double> out(n);
    for (auto& x : out) x = fpp::sample_interarrival(law, rng);
    return out;
  }, py::arg("beta"), py::arg("n"), py::arg("seed") = 1);
  m.def("estimate_counting_pmf", [](double beta, double t, std::size_t paths, std::uint64_t seed) {
    fpp::MonteCarloOptions o;
    o.seed = seed;
    const auto h = fpp::estimate_counting_pmf(law_for(beta), t, paths, o);
    std::vector<double> p;
    for (std::size_t i = 0; i < h.bins(); ++i) p.push_back(h.probability(i));
    return p;
  }, py::arg("beta"), py::arg("t"), py::arg("paths"), py::arg("seed") = 1);
  m.def("ks_distance", [](std::vector<double> sample, const std::function<double(double)>& cdf) {
    return fpp::ks_distance(std::move(sample), cdf);
  }, py::arg("sample"), py::arg("cdf"));
  m.def("ks_critical_value", &fpp::ks_critical_value, py::arg("n"), py::arg("alpha") = 0.01);

  m.def("run_acceptance", [](bool quick, std::vector<int> only) {
    fpp::AcceptanceOptions o;
    o.quick = quick;
    o.only = std::move(only);
    py::list out;
    for (const auto& r : fpp::run_acceptance(o)) {
      py::dict d;
      d["id"] = r.id;
      d["name"] = r.name;
      d["passed"] = r.passed;
      d["metric"] = r.metric;
      d["threshold"] = r.threshold;
      d["detail"] = r.detail;
      out.append(d);
    }
    return out;
  }, py::arg("quick") = true, py::arg("only") = std::vector<int>{});
}
