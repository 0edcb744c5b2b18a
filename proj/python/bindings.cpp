#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "toa/cli.hpp"
#include "toa/lower_bounds.hpp"
#include "toa/mc_oracle.hpp"
#include "toa/mse_models.hpp"
#include "toa/pulse_design.hpp"
#include "toa/special_math.hpp"
#include "toa/thresholds.hpp"
#include "toa/units.hpp"

namespace py = pybind11;
using namespace toa;

namespace {

py::dict threshold_dict(const ThresholdSet& t) {
  py::dict d;
  d["rho_pr_db"] = to_db(t.rho_pr);
  d["rho_am1_db"] = to_db(t.rho_am1);
  d["rho_am2_db"] = to_db(t.rho_am2);
  d["rho_as_db"] = to_db(t.rho_as);
  d["provenance"] = t.provenance;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Time-of-arrival MSE, threshold and pulse design routines";

  m.def("q_function", &q_function, py::arg("x"));
  m.def("q_inverse", &q_inverse, py::arg("p"));
  m.def("lambert_w_m1", &lambert_w_m1, py::arg("h"));

  py::class_<AcrModel>(m, "AcrModel")
      .def_static(
          "gaussian",
          [](double width_s, double carrier_hz) {
            const PulseKind kind = carrier_hz > 0.0 ? PulseKind::passband_gaussian : PulseKind::baseband_gaussian;
            return AcrModel::from_pulse({kind, width_s, carrier_hz});
          },
          py::arg("width_s"), py::arg("carrier_hz") = 0.0)
      .def("acr", &AcrModel::acr, py::arg("theta"))
      .def("envelope", &AcrModel::envelope, py::arg("theta"))
      .def_property_readonly("mqbw", &AcrModel::mqbw)
      .def_property_readonly("envelope_mqbw", &AcrModel::envelope_mqbw)
      .def_property_readonly("bandwidth", &AcrModel::bandwidth)
      .def_property_readonly("carrier", &AcrModel::carrier)
      .def_property_readonly("ifbw", &AcrModel::ifbw);

  py::class_<EstimationSetup>(m, "EstimationSetup")
      .def(py::init([](double delay, double lower, double upper) {
             EstimationSetup s{delay, lower, upper};
             s.validate();
             return s;
           }),
           py::arg("delay_s"), py::arg("lower_s"), py::arg("upper_s"))
      .def_readonly("delay_s", &EstimationSetup::delay_s)
      .def_readonly("lower_s", &EstimationSetup::lower_s)
      .def_readonly("upper_s", &EstimationSetup::upper_s);

  m.def("crlb", &crlb, py::arg("acr"), py::arg("rho"));
  m.def("ecrlb", &ecrlb, py::arg("acr"), py::arg("rho"));
  m.def("max_mse", &max_mse, py::arg("setup"));
  m.def("mse_ana", [](const AcrModel& acr, double rho) { return mse_ana(acr, rho); }, py::arg("acr"),
        py::arg("rho"));
  m.def(
      "mse_num",
      [](const AcrModel& acr, const EstimationSetup& setup, double rho, std::uint64_t seed) {
        const PartitionOptions part = acr.oscillating() ? PartitionOptions{} : lobe_partition(acr);
        MseNumOptions opt;
        opt.mvn.seed = seed;
        py::gil_scoped_release release;
        return mse_num(acr, setup, partition_domain(acr, setup, part), rho, opt).mse;
      },
      py::arg("acr"), py::arg("setup"), py::arg("rho"), py::arg("seed") = 1);
  m.def(
      "alb_z",
      [](const AcrModel& acr, const EstimationSetup& setup, double rho) { return alb_z(acr, setup, rho); },
      py::arg("acr"), py::arg("setup"), py::arg("rho"));
  m.def(
      "alb_b",
      [](const AcrModel& acr, const EstimationSetup& setup, double rho) { return alb_b(acr, setup, rho); },
      py::arg("acr"), py::arg("setup"), py::arg("rho"));
  m.def(
      "thresholds_analytic", [](const AcrModel& acr) { return threshold_dict(thresholds_analytic(acr)); },
      py::arg("acr"));
  m.def(
      "simulate_mle_mse",
      [](const AcrModel& acr, const EstimationSetup& setup, double rho, std::size_t trials, std::uint64_t seed) {
        McConfig cfg;
        cfg.trials = trials;
        cfg.seed = seed;
        McResult r;
        {
          py::gil_scoped_release release;
          r = simulate_mle_mse(acr, setup, rho, cfg);
        }
        py::dict d;
        d["mse"] = r.mse;
        d["std_error"] = r.std_error;
        d["mean_estimate"] = r.mean_estimate;
        d["trials"] = r.trials;
        return d;
      },
      py::arg("acr"), py::arg("setup"), py::arg("rho"), py::arg("trials") = 10000, py::arg("seed") = 1);
  m.def(
      "_design_json",
      [](double rho0_db, double f_low_ghz, double f_high_ghz, std::optional<double> bandwidth_ghz) {
        DesignConstraints c;
        c.f_low_hz = f_low_ghz * 1e9;
        c.f_high_hz = f_high_ghz * 1e9;
        if (bandwidth_ghz) c.fixed_bandwidth_hz = *bandwidth_ghz * 1e9;
        c.rho0 = db_to_linear(rho0_db);
        return to_json(design_pulse(c)).dump();
      },
      py::arg("rho0_db"), py::arg("f_low_ghz"), py::arg("f_high_ghz"), py::arg("bandwidth_ghz"));
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"toa"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
