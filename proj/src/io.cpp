#include "mirrax/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "mirrax/errors.hpp"

namespace mirrax {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

using nlohmann::json;

double to_deg(double rad) { return rad / kDeg; }

std::vector<double> number_array(const json& doc, const char* key, std::size_t expected) {
  if (!doc.contains(key) || !doc.at(key).is_array()) {
    throw InvalidArgument(std::string("missing array '") + key + "'");
  }
  const json& arr = doc.at(key);
  if (expected != 0 && arr.size() != expected) {
    throw InvalidArgument(fmt::format("'{}' must hold {} numbers", key, expected));
  }
  std::vector<double> out;
  for (const json& v : arr) {
    if (!v.is_number()) throw InvalidArgument(std::string("'") + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Vec5 waypoint_from_json(const json& w) {
  if (!w.is_array() || w.size() != 5) {
    throw InvalidArgument("each waypoint must be [px, py, theta_deg, phi1_deg, phi2_deg]");
  }
  Vec5 x;
  for (int i = 0; i < 5; ++i) {
    if (!w[i].is_number()) throw InvalidArgument("waypoint entries must be numbers");
    x(i) = w[i].get<double>();
  }
  x.tail<3>() *= kDeg;
  return x;
}

double positive_or(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) return fallback;
  if (!doc.at(key).is_number() || !(doc.at(key).get<double>() > 0.0)) {
    throw InvalidArgument(std::string("'") + key + "' must be a positive number");
  }
  return doc.at(key).get<double>();
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", hash);
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string sweep_csv(const SweepGrid& grid) {
  std::string out = "phi1\\phi2_deg";
  for (double p2 : grid.phi2) out += "," + format_number(std::round(to_deg(p2) * 1e9) / 1e9);
  out += '\n';
  for (std::size_t r = 0; r < grid.phi1.size(); ++r) {
    out += format_number(std::round(to_deg(grid.phi1[r]) * 1e9) / 1e9);
    for (std::size_t c = 0; c < grid.phi2.size(); ++c) {
      out += "," + format_number(grid.values(static_cast<Eigen::Index>(r),
                                             static_cast<Eigen::Index>(c)));
    }
    out += '\n';
  }
  return out;
}

json sweep_sidecar(const SweepGrid& grid, const std::string& params_hash) {
  json doc;
  doc["analysis"] = to_string(grid.analysis);
  doc["statistic"] = to_string(grid.statistic);
  doc["threshold"] = grid.threshold;
  doc["params_hash"] = params_hash;
  doc["combos"] = grid.combos;
  doc["rows"] = "phi1";
  doc["columns"] = "phi2";
  doc["units"] = "deg";
  doc["shape"] = {grid.phi1.size(), grid.phi2.size()};
  if (!grid.phi1.empty()) {
    doc["range_deg"] = {std::round(to_deg(grid.phi1.front()) * 1e9) / 1e9,
                        std::round(to_deg(grid.phi1.back()) * 1e9) / 1e9};
  }
  return doc;
}

std::string sweep_plot_script(const std::string& csv_name, const std::string& title) {
  return fmt::format(R"(#!/usr/bin/env python3
import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = pathlib.Path(__file__).resolve().parent
path = here / "{csv}"
raw = np.genfromtxt(path, delimiter=",")
phi2 = raw[0, 1:]
phi1 = raw[1:, 0]
values = raw[1:, 1:]

fig, ax = plt.subplots(figsize=(6, 5))
mesh = ax.imshow(
    values,
    origin="lower",
    extent=[phi2[0], phi2[-1], phi1[0], phi1[-1]],
    aspect="auto",
    cmap="viridis",
)
fig.colorbar(mesh, ax=ax)
ax.set_xlabel("phi2 [deg]")
ax.set_ylabel("phi1 [deg]")
ax.set_title("{title}")
out = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else path.with_suffix(".png")
fig.savefig(out, dpi=150, bbox_inches="tight")
)",
                     fmt::arg("csv", csv_name), fmt::arg("title", title));
}

Scenario scenario_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("scenario: document must be an object");
  Scenario s;
  if (!doc.contains("waypoints") || !doc.at("waypoints").is_array() ||
      doc.at("waypoints").empty()) {
    throw InvalidArgument("scenario: 'waypoints' must be a non-empty list");
  }
  for (const json& w : doc.at("waypoints")) s.waypoints.push_back(waypoint_from_json(w));
  if (s.waypoints.size() < 2) throw InvalidArgument("scenario: need at least two waypoints");

  if (doc.contains("durations")) {
    s.durations = number_array(doc, "durations", s.waypoints.size() - 1);
  }
  if (doc.contains("gains")) {
    const auto g = number_array(doc, "gains", 5);
    for (int i = 0; i < 5; ++i) s.gains.K_p(i) = g[static_cast<std::size_t>(i)];
    s.gains.validate();
  }
  s.dt = positive_or(doc, "dt", s.dt);
  s.dt_check = positive_or(doc, "dt_check", s.dt_check);
  if (doc.contains("mode")) {
    if (!doc.at("mode").is_string()) throw InvalidArgument("scenario: 'mode' must be a string");
    s.mode = input_mode_from_string(doc.at("mode").get<std::string>());
  }
  if (doc.contains("limits_override")) {
    const auto l = number_array(doc, "limits_override", 6);
    std::array<double, 6> limits{};
    for (std::size_t i = 0; i < 6; ++i) {
      if (!(l[i] > 0.0)) throw InvalidArgument("scenario: limits must be positive");
      limits[i] = l[i];
    }
    s.limits_override = limits;
  }
  s.trajectory.nominal_speed = positive_or(doc, "nominal_speed", s.trajectory.nominal_speed);
  s.trajectory.nominal_angular_rate =
      positive_or(doc, "nominal_angular_rate_deg", s.trajectory.nominal_angular_rate / kDeg) * kDeg;
  s.trajectory.min_duration = positive_or(doc, "min_duration", s.trajectory.min_duration);
  return s;
}

Scenario load_scenario(const std::string& path) {
  try {
    return scenario_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw InvalidArgument("scenario '" + path + "': " + e.what());
  }
}

Vec6 InputProfile::input_at(double t) const {
  Vec6 u = Vec6::Zero();
  for (const InputSegment& seg : segments) {
    if (t >= seg.t_start && t < seg.t_end) u += seg.u;
  }
  return u;
}

InputProfile profile_from_json(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("profile: document must be an object");
  InputProfile p;
  if (doc.contains("mode")) p.mode = input_mode_from_string(doc.at("mode").get<std::string>());
  p.dt = positive_or(doc, "dt", p.dt);
  p.duration = positive_or(doc, "duration", p.duration);
  if (doc.contains("decimation")) {
    if (!doc.at("decimation").is_number_integer() || doc.at("decimation").get<int>() < 1) {
      throw InvalidArgument("profile: 'decimation' must be an integer >= 1");
    }
    p.decimation = doc.at("decimation").get<int>();
  }
  if (doc.contains("initial")) {
    const json& init = doc.at("initial");
    if (init.contains("x")) {
      const auto x = number_array(init, "x", 5);
      for (int i = 0; i < 5; ++i) p.initial.x(i) = x[static_cast<std::size_t>(i)];
      p.initial.x.tail<3>() *= kDeg;
    }
    if (init.contains("xdot")) {
      const auto xd = number_array(init, "xdot", 5);
      for (int i = 0; i < 5; ++i) p.initial.xdot(i) = xd[static_cast<std::size_t>(i)];
    }
  }
  if (doc.contains("segments")) {
    if (!doc.at("segments").is_array()) throw InvalidArgument("profile: 'segments' must be a list");
    for (const json& seg : doc.at("segments")) {
      InputSegment s;
      if (!seg.contains("t_start") || !seg.contains("t_end")) {
        throw InvalidArgument("profile: every segment needs t_start and t_end");
      }
      s.t_start = seg.at("t_start").get<double>();
      s.t_end = seg.at("t_end").get<double>();
      if (!(s.t_end > s.t_start)) throw InvalidArgument("profile: segment end must follow start");
      const auto u = number_array(seg, "u", 6);
      for (int i = 0; i < 6; ++i) s.u(i) = u[static_cast<std::size_t>(i)];
      p.segments.push_back(s);
    }
  }
  return p;
}

InputProfile load_profile(const std::string& path) {
  try {
    return profile_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw InvalidArgument("profile '" + path + "': " + e.what());
  }
}

json RunManifest::to_json() const {
  json doc;
  doc["command"] = command;
  doc["params_hash"] = params_hash;
  doc["scenario_hash"] = scenario_hash;
  doc["seed"] = seed;
  doc["versions"] = {{"mirrax", kArtifactVersion},
                     {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                           EIGEN_MINOR_VERSION)},
                     {"fmt", FMT_VERSION}};
  doc["outputs"] = outputs;
  doc["wall_time_s"] = wall_time;
  return doc;
}

}  // namespace mirrax
