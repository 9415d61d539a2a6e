#include "mirrax/params.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "mirrax/errors.hpp"
#include "mirrax/kinematics.hpp"

namespace mirrax {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using nlohmann::json;

double number_or(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number()) {
    throw InvalidArgument(std::string("params: field '") + key + "' must be a number");
  }
  return doc.at(key).get<double>();
}

template <std::size_t N>
std::array<double, N> require_array(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_array() || doc.at(key).size() != N) {
    throw InvalidArgument(std::string("params: field '") + key + "' must be an array of " +
                          std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!doc.at(key)[i].is_number()) {
      throw InvalidArgument(std::string("params: non-numeric entry in '") + key + "'");
    }
    out[i] = doc.at(key)[i].get<double>();
  }
  return out;
}

Vec2 vec2_or(const json& doc, const char* key, const Vec2& fallback) {
  if (!doc.contains(key)) return fallback;
  const auto a = require_array<2>(doc, key);
  return {a[0], a[1]};
}

LinkInertial link_from_json(const json& doc, const LinkInertial& fallback) {
  LinkInertial link = fallback;
  link.mass = number_or(doc, "mass", fallback.mass);
  link.inertia = number_or(doc, "inertia", fallback.inertia);
  link.com = vec2_or(doc, "com", fallback.com);
  return link;
}

json link_to_json(const LinkInertial& link) {
  return json{{"mass", link.mass}, {"inertia", link.inertia}, {"com", {link.com.x(), link.com.y()}}};
}

}  // namespace

RobotParams RobotParams::defaults() {
  RobotParams p;
  p.roller_angle = {45.0 * kDeg, -45.0 * kDeg, 45.0 * kDeg, -45.0 * kDeg};
  p.joint_limit = 95.0 * kDeg;
  p.velocity_limit = {12.0, 12.0, 12.0, 12.0, 3.0, 3.0};
  p.body = {3.1, 0.034, Vec2::Zero()};
  p.leg[0] = {0.7, 0.0113, Vec2(0.0, 0.22)};
  p.leg[1] = {0.8, 0.0129, Vec2(0.0, 0.22)};
  p.joint[0] = {0.3, 2e-4, Vec2::Zero()};
  p.joint[1] = {0.3, 2e-4, Vec2::Zero()};
  p.wheel_mass = 1.15;
  p.wheel_spin_inertia = 0.00243;
  p.wheel_yaw_inertia = 0.00183;
  return p;
}

double RobotParams::total_mass() const {
  return body.mass + leg[0].mass + leg[1].mass + joint[0].mass + joint[1].mass +
         kNumWheels * wheel_mass;
}

double RobotParams::wheel_offset(int wheel) const {
  switch (wheel) {
    case 0:
    case 3:
      return l3;
    case 1:
    case 2:
      return l2;
    default:
      throw InvalidArgument("wheel index " + std::to_string(wheel) + " out of range [0, 3]");
  }
}

void validate_scalars(const RobotParams& p) {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("params: ") + name + " must be positive");
    }
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument(std::string("params: ") + name + " must be non-negative");
    }
  };
  positive(p.l1, "l1");
  positive(p.l2, "l2");
  positive(p.l3, "l3");
  positive(p.wheel_radius, "wheel_radius");
  positive(p.roller_radius, "roller_radius");
  positive(p.wheel_width, "wheel_width");
  positive(p.joint_limit, "joint_limit");
  positive(p.leg_length, "leg_length");
  for (double a : p.roller_angle) {
    if (!(std::abs(a) > 0.0 && std::abs(a) < std::numbers::pi / 2)) {
      throw InvalidArgument("params: roller angles must satisfy 0 < |alpha| < 90 deg");
    }
  }
  for (double u : p.velocity_limit) positive(u, "velocity_limit");
  non_negative(p.body.mass, "body.mass");
  non_negative(p.body.inertia, "body.inertia");
  for (int k = 0; k < 2; ++k) {
    non_negative(p.leg[k].mass, "leg.mass");
    non_negative(p.leg[k].inertia, "leg.inertia");
    non_negative(p.joint[k].mass, "joint.mass");
    non_negative(p.joint[k].inertia, "joint.inertia");
  }
  positive(p.wheel_mass, "wheel_mass");
  positive(p.wheel_spin_inertia, "wheel_spin_inertia");
  positive(p.wheel_yaw_inertia, "wheel_yaw_inertia");
  positive(p.roller_inertia, "roller_inertia");
  non_negative(p.payload_mass, "payload_mass");
  non_negative(p.friction.wheel, "friction.wheel");
  non_negative(p.friction.roller, "friction.roller");
  non_negative(p.friction.joint, "friction.joint");
  positive(p.total_mass(), "total mass");
}

void validate(const RobotParams& p) {
  validate_scalars(p);
  const KinematicMaps maps = stack_maps(p, Vec5::Zero(), Frame::kBase);
  if (!maps.full_rank) {
    throw InvalidArgument(
        "params: roller-angle pattern leaves the inverse map rank deficient at phi = (0, 0)");
  }
}

RobotParams params_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("params: document must be a JSON object");
  if (!doc.contains("schema") || doc.at("schema") != 1) {
    throw InvalidArgument("params: unsupported or missing schema (expected 1)");
  }
  const RobotParams d = RobotParams::defaults();
  RobotParams p = d;

  const json& g = doc.contains("geometry") ? doc.at("geometry") : json::object();
  p.l1 = number_or(g, "l1", d.l1);
  p.l2 = number_or(g, "l2", d.l2);
  p.l3 = number_or(g, "l3", d.l3);
  p.wheel_radius = number_or(g, "wheel_radius", d.wheel_radius);
  p.roller_radius = number_or(g, "roller_radius", d.roller_radius);
  p.wheel_width = number_or(g, "wheel_width", d.wheel_width);
  p.leg_length = number_or(g, "leg_length", d.leg_length);
  if (g.contains("roller_angles_deg")) {
    const auto a = require_array<4>(g, "roller_angles_deg");
    for (int i = 0; i < 4; ++i) p.roller_angle[i] = a[i] * kDeg;
  }
  p.joint_limit = number_or(g, "joint_limit_deg", d.joint_limit / kDeg) * kDeg;

  if (doc.contains("actuators")) {
    const json& a = doc.at("actuators");
    if (a.contains("velocity_limits_rad_per_s")) {
      p.velocity_limit = require_array<6>(a, "velocity_limits_rad_per_s");
    }
  }

  if (doc.contains("inertial")) {
    const json& m = doc.at("inertial");
    if (m.contains("body")) p.body = link_from_json(m.at("body"), d.body);
    if (m.contains("legs")) {
      if (!m.at("legs").is_array() || m.at("legs").size() != 2) {
        throw InvalidArgument("params: inertial.legs must hold two entries");
      }
      for (int k = 0; k < 2; ++k) p.leg[k] = link_from_json(m.at("legs")[k], d.leg[k]);
    }
    if (m.contains("joints")) {
      if (!m.at("joints").is_array() || m.at("joints").size() != 2) {
        throw InvalidArgument("params: inertial.joints must hold two entries");
      }
      for (int k = 0; k < 2; ++k) p.joint[k] = link_from_json(m.at("joints")[k], d.joint[k]);
    }
    if (m.contains("wheel")) {
      const json& w = m.at("wheel");
      p.wheel_mass = number_or(w, "mass", d.wheel_mass);
      p.wheel_spin_inertia = number_or(w, "spin_inertia", d.wheel_spin_inertia);
      p.wheel_yaw_inertia = number_or(w, "yaw_inertia", d.wheel_yaw_inertia);
    }
    p.roller_inertia = number_or(m, "roller_inertia", d.roller_inertia);
    if (m.contains("payload")) {
      p.payload_mass = number_or(m.at("payload"), "mass", 0.0);
      p.payload_com = vec2_or(m.at("payload"), "com", Vec2::Zero());
    }
  }

  if (doc.contains("friction")) {
    const json& f = doc.at("friction");
    p.friction.wheel = number_or(f, "wheel", 0.0);
    p.friction.roller = number_or(f, "roller", 0.0);
    p.friction.joint = number_or(f, "joint", 0.0);
  }

  validate(p);
  return p;
}

json params_to_json(const RobotParams& p) {
  json doc;
  doc["schema"] = 1;
  doc["geometry"] = {
      {"l1", p.l1},
      {"l2", p.l2},
      {"l3", p.l3},
      {"wheel_radius", p.wheel_radius},
      {"roller_radius", p.roller_radius},
      {"wheel_width", p.wheel_width},
      {"leg_length", p.leg_length},
      {"roller_angles_deg",
       {p.roller_angle[0] / kDeg, p.roller_angle[1] / kDeg, p.roller_angle[2] / kDeg,
        p.roller_angle[3] / kDeg}},
      {"joint_limit_deg", p.joint_limit / kDeg},
  };
  doc["actuators"] = {{"velocity_limits_rad_per_s", p.velocity_limit}};
  doc["inertial"] = {
      {"body", link_to_json(p.body)},
      {"legs", {link_to_json(p.leg[0]), link_to_json(p.leg[1])}},
      {"joints", {link_to_json(p.joint[0]), link_to_json(p.joint[1])}},
      {"wheel",
       {{"mass", p.wheel_mass},
        {"spin_inertia", p.wheel_spin_inertia},
        {"yaw_inertia", p.wheel_yaw_inertia}}},
      {"roller_inertia", p.roller_inertia},
      {"payload", {{"mass", p.payload_mass}, {"com", {p.payload_com.x(), p.payload_com.y()}}}},
  };
  doc["friction"] = {
      {"wheel", p.friction.wheel}, {"roller", p.friction.roller}, {"joint", p.friction.joint}};
  return doc;
}

RobotParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open params file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw InvalidArgument("params file '" + path + "': " + e.what());
  }
  return params_from_json(doc);
}

}  // namespace mirrax
