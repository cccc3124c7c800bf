#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "netmimo/enhance.hpp"

namespace py = pybind11;
using namespace netmimo;

namespace {

CovarianceSet to_covariances(const std::vector<ComplexMatrix>& s) {
  CovarianceSet out;
  out.s = s;
  return out;
}

ChannelSet to_channels(const std::vector<ComplexMatrix>& h, std::uint64_t seed) {
  ChannelSet out;
  out.channels = h;
  out.seed = seed;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Linear precoding for downlink cooperative MIMO networks: "
            "zero-interference precoding under per-BS power constraints and its "
            "power-minimization based improvement.";

  py::class_<NetworkConfig>(m, "NetworkConfig")
      .def(py::init(&NetworkConfig::make), py::arg("num_bs"), py::arg("antennas_per_bs"),
           py::arg("num_users"), py::arg("antennas_per_user"), py::arg("bs_power"))
      .def_readonly("num_bs", &NetworkConfig::num_bs)
      .def_readonly("antennas_per_bs", &NetworkConfig::antennas_per_bs)
      .def_readonly("num_users", &NetworkConfig::num_users)
      .def_readonly("antennas_per_user", &NetworkConfig::antennas_per_user)
      .def_readonly("bs_power", &NetworkConfig::bs_power)
      .def_property_readonly("total_antennas", &NetworkConfig::total_antennas)
      .def("__repr__", [](const NetworkConfig& c) {
        return "NetworkConfig([" + std::to_string(c.num_bs) + " " +
               std::to_string(c.antennas_per_bs) + " " + std::to_string(c.num_users) +
               " " + std::to_string(c.antennas_per_user) +
               "], P=" + std::to_string(c.bs_power) + ")";
      });

  py::class_<ChannelSet>(m, "ChannelSet")
      .def_readonly("channels", &ChannelSet::channels)
      .def_readonly("seed", &ChannelSet::seed);

  py::class_<BDSolution>(m, "BDSolution")
      .def_property_readonly("covariances",
                             [](const BDSolution& b) { return b.covariances.s; })
      .def_readonly("rate_targets", &BDSolution::rate_targets)
      .def_readonly("sum_rate_nats", &BDSolution::sum_rate_nats)
      .def_readonly("mu", &BDSolution::mu)
      .def_readonly("iterations", &BDSolution::iterations);

  py::class_<EnhanceSolution>(m, "EnhanceSolution")
      .def_property_readonly("minimized",
                             [](const EnhanceSolution& s) { return s.minimized.s; })
      .def_property_readonly("proposed",
                             [](const EnhanceSolution& s) { return s.proposed.s; })
      .def_readonly("rho", &EnhanceSolution::rho)
      .def_readonly("rates", &EnhanceSolution::rates)
      .def_readonly("sum_rate_nats", &EnhanceSolution::sum_rate_nats)
      .def_readonly("iterations", &EnhanceSolution::iterations)
      .def_property_readonly("trace", [](const EnhanceSolution& s) {
        std::vector<std::tuple<int, std::string, double, double>> rows;
        rows.reserve(s.trace.size());
        for (const EnhanceIterate& e : s.trace) {
          rows.emplace_back(e.iteration,
                            e.kind == CutKind::kObjective ? "objective" : "feasibility",
                            e.rho, e.scaled_sum_rate);
        }
        return rows;
      });

  m.def("sample_channels", &sample_channels, py::arg("config"), py::arg("seed"),
        "Seeded i.i.d. complex Gaussian channels, one matrix per user.");
  m.def("bd_solve", &bd_solve, py::arg("config"), py::arg("channels"),
        "Sum-rate optimal zero-interference covariances under per-BS power limits.");
  m.def(
      "enhance",
      [](const NetworkConfig& cfg, const ChannelSet& ch, const BDSolution& bd) {
        return solve_enhanced(cfg, ch, bd);
      },
      py::arg("config"), py::arg("channels"), py::arg("bd"),
      "Improved covariances: minimize the power factor under the achieved rate "
      "targets, then rescale to spend the full budget.");

  m.def(
      "sum_rate_nats",
      [](const ChannelSet& ch, const std::vector<ComplexMatrix>& s) {
        return sum_rate_nats(ch, to_covariances(s));
      },
      py::arg("channels"), py::arg("covariances"));
  m.def(
      "user_rate",
      [](const ChannelSet& ch, const std::vector<ComplexMatrix>& s, int user) {
        return user_rate(ch, to_covariances(s), user);
      },
      py::arg("channels"), py::arg("covariances"), py::arg("user"));
  m.def(
      "leakage_norm",
      [](const ChannelSet& ch, const std::vector<ComplexMatrix>& s) {
        return leakage_norm(ch, to_covariances(s));
      },
      py::arg("channels"), py::arg("covariances"));
  m.def(
      "per_bs_power",
      [](const NetworkConfig& cfg, const std::vector<ComplexMatrix>& s, int bs) {
        return per_bs_power(cfg, to_covariances(s), bs);
      },
      py::arg("config"), py::arg("covariances"), py::arg("bs"));
  m.def("snr_boost_db", &snr_boost_db, py::arg("rho"));
  m.def("covariance_to_precoder", &covariance_to_precoder, py::arg("covariance"),
        py::arg("max_rank"));
  m.def("make_channel_set", &to_channels, py::arg("channels"), py::arg("seed") = 0,
        "Wrap explicit per-user channel matrices.");

  m.attr("__version__") = "0.1.0";
}
