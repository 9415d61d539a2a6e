#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mirrax/control.hpp"
#include "mirrax/controllability.hpp"
#include "mirrax/params.hpp"
#include "mirrax/simulation.hpp"
#include "mirrax/trajectory.hpp"

namespace mirrax {

/// Writes to `<path>.tmp` and renames over `path`. Throws IoError.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// 64-bit FNV-1a, lower-case hex.
std::string fnv1a_hex(const std::string& data);

/// Shortest round-trip decimal text.
std::string format_number(double value);

/// Header "phi1\phi2_deg,<phi2 axis>", then one row per phi1 value.
std::string sweep_csv(const SweepGrid& grid);
nlohmann::json sweep_sidecar(const SweepGrid& grid, const std::string& params_hash);
/// Matplotlib script that renders `csv_name` (next to the script) as a heatmap.
std::string sweep_plot_script(const std::string& csv_name, const std::string& title);

struct Scenario {
  std::vector<Vec5> waypoints;  // radians in memory
  std::optional<std::vector<double>> durations;
  GainSet gains;
  double dt = 0.01;
  InputMode mode = InputMode::kVelocity;
  std::optional<std::array<double, 6>> limits_override;
  TrajectoryOptions trajectory;
  double dt_check = 0.01;
};

/// Waypoints are [px, py, theta_deg, phi1_deg, phi2_deg]. Throws
/// InvalidArgument on a malformed document (including an empty waypoint list).
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

struct InputSegment {
  double t_start = 0.0;
  double t_end = 0.0;
  Vec6 u = Vec6::Zero();
};

/// Open-loop input profile for `simulate`: piecewise-constant u, zero
/// outside every segment.
struct InputProfile {
  InputMode mode = InputMode::kTorque;
  double dt = 1e-3;
  double duration = 1.0;
  int decimation = 1;
  RobotState initial;
  std::vector<InputSegment> segments;

  Vec6 input_at(double t) const;
};

InputProfile profile_from_json(const nlohmann::json& doc);
InputProfile load_profile(const std::string& path);

/// Tracks the files one command writes, for the run manifest.
struct RunManifest {
  std::string command;
  std::string params_hash;
  std::string scenario_hash;
  long long seed = 0;
  std::vector<std::string> outputs;
  double wall_time = 0.0;

  nlohmann::json to_json() const;
};

inline constexpr const char* kArtifactVersion = "1.0.0";

}  // namespace mirrax
