#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cli.hpp"
#include "mirrax/control.hpp"
#include "mirrax/controllability.hpp"
#include "mirrax/dynamics.hpp"
#include "mirrax/errors.hpp"
#include "mirrax/mass_properties.hpp"
#include "mirrax/params.hpp"
#include "mirrax/trajectory.hpp"

namespace py = pybind11;
using namespace mirrax;

namespace {

RobotParams params_from_text(const std::string& text) {
  return params_from_json(nlohmann::json::parse(text));
}

const WheelCombo& combo_at(int index) {
  const auto& combos = standard_combos();
  if (index < 0 || index >= static_cast<int>(combos.size())) {
    throw InvalidArgument("combo index must be in [0, 5)");
  }
  return combos[static_cast<std::size_t>(index)];
}

}  // namespace

PYBIND11_MODULE(_mirrax, m) {
  m.doc() = "Reconfigurable mecanum robot kinematics, dynamics and controllability";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<RobotParams>(m, "RobotParams")
      .def_static("defaults", &RobotParams::defaults)
      .def_static("load", &load_params, py::arg("path"))
      .def_static("from_json", &params_from_text, py::arg("text"))
      .def("to_json", [](const RobotParams& p) { return params_to_json(p).dump(2); })
      .def("total_mass", &RobotParams::total_mass)
      .def_readwrite("l1", &RobotParams::l1)
      .def_readwrite("l2", &RobotParams::l2)
      .def_readwrite("l3", &RobotParams::l3)
      .def_readwrite("wheel_radius", &RobotParams::wheel_radius)
      .def_readwrite("roller_radius", &RobotParams::roller_radius)
      .def_readwrite("roller_angle", &RobotParams::roller_angle)
      .def_readwrite("joint_limit", &RobotParams::joint_limit)
      .def_readwrite("velocity_limit", &RobotParams::velocity_limit)
      .def_readwrite("payload_mass", &RobotParams::payload_mass);

  py::class_<KinematicMaps>(m, "KinematicMaps")
      .def_readonly("D_w", &KinematicMaps::D_w)
      .def_readonly("D_r", &KinematicMaps::D_r)
      .def_readonly("A", &KinematicMaps::A)
      .def_readonly("A_pinv", &KinematicMaps::A_pinv)
      .def_readonly("rank", &KinematicMaps::rank);

  m.def("stack_maps",
        [](const RobotParams& p, const Vec5& x, bool about_center) {
          return stack_maps(p, x, about_center ? Frame::kGeometricCenter : Frame::kBase);
        },
        py::arg("params"), py::arg("x"), py::arg("about_center") = false);
  m.def("inverse_map", &inverse_map, py::arg("maps"), py::arg("xdot"));
  m.def("forward_map", [](const KinematicMaps& maps, const Vec6& u) { return forward_map(maps, u).xdot; },
        py::arg("maps"), py::arg("u"));

  m.def("gsi", [](const RobotParams& p, const Vec5& x, int combo) { return gsi(p, x, combo_at(combo)); },
        py::arg("params"), py::arg("x"), py::arg("combo") = 4);
  m.def("determinant",
        [](const RobotParams& p, const Vec5& x, int combo) {
          return determinant_criterion(p, x, combo_at(combo));
        },
        py::arg("params"), py::arg("x"), py::arg("combo"));
  m.def("sweep",
        [](const RobotParams& p, const std::string& analysis, const std::string& statistic,
           double step_deg, double range_deg, int workers) {
          const GridSpec grid{step_deg, -range_deg, range_deg};
          const Analysis a = analysis_from_string(analysis);
          const SweepGrid g = a == Analysis::kStlc
                                  ? stlc_sweep(p, grid, workers)
                                  : sweep(p, a, statistic_from_string(statistic), grid, workers);
          return py::make_tuple(g.phi1, g.phi2, Eigen::MatrixXd(g.values));
        },
        py::arg("params"), py::arg("analysis") = "gsi", py::arg("statistic") = "max",
        py::arg("step_deg") = 5.0, py::arg("range_deg") = 180.0, py::arg("workers") = 1);
  m.def("kcm_rank",
        [](const RobotParams& p, const Vec5& x) {
          const Linearization lin = linearize(p, x);
          return controllability_rank(lin.A_L, lin.B_L);
        },
        py::arg("params"), py::arg("x"));

  m.def("mass_matrix", [](const RobotParams& p, const Vec5& x) { return reduced_model(p, x, Vec5::Zero()).M_x; },
        py::arg("params"), py::arg("x"));
  m.def("forward_dynamics",
        [](const RobotParams& p, const Vec5& x, const Vec5& xdot, const Vec6& tau) {
          return forward_dynamics(reduced_model(p, x, xdot), xdot, tau);
        },
        py::arg("params"), py::arg("x"), py::arg("xdot"), py::arg("tau"));
  m.def("kinetic_energy", &kinetic_energy, py::arg("params"), py::arg("x"), py::arg("xdot"));

  m.def("velocity_clamp",
        [](const RobotParams& p, const Vec5& x, const Vec5& xdot) {
          const ClampResult c = velocity_clamp(xdot, stack_maps(p, x), p.velocity_limit);
          return py::make_tuple(c.xdot_f, c.beta, c.u);
        },
        py::arg("params"), py::arg("x"), py::arg("xdot"));

  py::class_<Trajectory5D>(m, "Trajectory")
      .def_readonly("durations", &Trajectory5D::durations)
      .def("total_time", &Trajectory5D::total_time)
      .def("position", [](const Trajectory5D& t, double s) { return evaluate(t, s).position; })
      .def("velocity", [](const Trajectory5D& t, double s) { return evaluate(t, s).velocity; });
  m.def("generate_trajectory",
        [](const std::vector<Vec5>& w, std::optional<std::vector<double>> d) {
          return generate_trajectory(w, d);
        },
        py::arg("waypoints"), py::arg("durations") = py::none());
  m.def("worst_ratio",
        [](const Trajectory5D& t, const RobotParams& p) { return feasibility_check(t, p).worst_ratio; },
        py::arg("trajectory"), py::arg("params"));
  m.def("time_scale",
        [](const Trajectory5D& t, const RobotParams& p) {
          return time_scale_until_feasible(t, p, p.velocity_limit).trajectory;
        },
        py::arg("trajectory"), py::arg("params"));
  m.def("track",
        [](const Trajectory5D& t, const RobotParams& p) {
          TrackOptions o;
          o.limits = p.velocity_limit;
          const TrackMetrics r = track(t, p, o).metrics;
          py::dict d;
          d["ate"] = r.ate;
          d["max_position_error"] = r.max_position_error;
          d["max_heading_error"] = r.max_heading_error;
          d["clamp_activations"] = r.clamp_activations;
          return d;
        },
        py::arg("trajectory"), py::arg("params"));

  m.def("footprint_width", &footprint_width, py::arg("params"), py::arg("phi1"), py::arg("phi2"));
  m.def("counterbalance",
        [](const RobotParams& p, double phi1, double phi2, bool payload) {
          const Counterbalance c = counterbalance(p, phi1, phi2, payload);
          return py::make_tuple(c.per_leg, c.total);
        },
        py::arg("params"), py::arg("phi1") = 0.0, py::arg("phi2") = 0.0, py::arg("payload") = false);

  m.def("cli",
        [](const std::vector<std::string>& args) {
          std::ostringstream out;
          std::ostringstream err;
          const int code = cli::run(args, out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
