#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "mirrax/control.hpp"
#include "mirrax/controllability.hpp"
#include "mirrax/errors.hpp"
#include "mirrax/io.hpp"
#include "mirrax/mass_properties.hpp"
#include "mirrax/params.hpp"
#include "mirrax/simulation.hpp"
#include "mirrax/trajectory.hpp"

namespace mirrax::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kEnergyDriftTolerance = 1e-3;

struct Common {
  std::string params_path;
  std::string out_dir = ".";
  long long seed = 0;
};

struct LoadedParams {
  RobotParams params;
  std::string hash;
};

LoadedParams load(const Common& common) {
  LoadedParams lp;
  lp.params = common.params_path.empty() ? RobotParams::defaults() : load_params(common.params_path);
  lp.hash = fnv1a_hex(params_to_json(lp.params).dump());
  return lp;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

std::string write_output(const fs::path& dir, const std::string& name, const std::string& content,
                         RunManifest& manifest) {
  const fs::path path = dir / name;
  atomic_write(path.string(), content);
  manifest.outputs.push_back(name);
  return path.string();
}

void finish_manifest(const fs::path& dir, RunManifest& manifest,
                     std::chrono::steady_clock::time_point start) {
  manifest.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest.outputs.push_back("manifest.json");
  atomic_write((dir / "manifest.json").string(), manifest.to_json().dump(2) + "\n");
}

std::string csv_stream(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream ss;
  writer(ss);
  return ss.str();
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::string analysis = "gsi";
  std::string statistic = "max";
  double grid_deg = 5.0;
  std::optional<double> range_deg;
  int workers = 1;
};

int cmd_sweep(const Common& common, const SweepArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const LoadedParams lp = load(common);
  const Analysis analysis = analysis_from_string(args.analysis);
  const Statistic statistic = statistic_from_string(args.statistic);
  if (args.workers < 1) throw InvalidArgument("--workers must be >= 1");

  GridSpec grid;
  grid.step_deg = args.grid_deg;
  const double range =
      args.range_deg.value_or(analysis == Analysis::kStlc ? lp.params.joint_limit / kDeg : 180.0);
  if (!(range > 0.0)) throw InvalidArgument("--range-deg must be positive");
  grid.lo_deg = -range;
  grid.hi_deg = range;

  const SweepGrid result = sweep(lp.params, analysis, statistic, grid, args.workers);

  const fs::path dir = prepare_out(common.out_dir);
  RunManifest manifest;
  manifest.command = "sweep";
  manifest.params_hash = lp.hash;
  manifest.seed = common.seed;
  const std::string stem =
      analysis == Analysis::kStlc
          ? std::string("sweep_stlc")
          : fmt::format("sweep_{}_{}", to_string(analysis), to_string(statistic));
  write_output(dir, stem + ".csv", sweep_csv(result), manifest);
  write_output(dir, stem + ".json", sweep_sidecar(result, lp.hash).dump(2) + "\n", manifest);
  write_output(dir, "plot_" + stem + ".py",
               sweep_plot_script(stem + ".csv",
                                 analysis == Analysis::kStlc
                                     ? std::string("KCM rank")
                                     : fmt::format("{} ({})", to_string(analysis),
                                                   to_string(statistic))),
               manifest);
  finish_manifest(dir, manifest, start);

  out << fmt::format("{}: {}x{} cells, min {}, max {}\n", stem, result.phi1.size(),
                     result.phi2.size(), result.values.minCoeff(), result.values.maxCoeff());
  return kExitOk;
}

// ---------------------------------------------------------------- track

int cmd_track(const Common& common, const std::string& scenario_path, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (scenario_path.empty()) throw InvalidArgument("track: --scenario is required");
  const LoadedParams lp = load(common);
  const std::string scenario_text = read_file(scenario_path);
  Scenario scenario;
  try {
    scenario = scenario_from_json(json::parse(scenario_text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }

  const Trajectory5D raw =
      generate_trajectory(scenario.waypoints, scenario.durations, scenario.trajectory);
  const TimeScalingResult scaled =
      time_scale_until_feasible(raw, lp.params, lp.params.velocity_limit, scenario.dt_check);

  TrackOptions options;
  options.gains = scenario.gains;
  options.dt = scenario.dt;
  options.mode = scenario.mode;
  options.limits = scenario.limits_override.value_or(lp.params.velocity_limit);
  const TrackResult result = track(scaled.trajectory, lp.params, options);

  const fs::path dir = prepare_out(common.out_dir);
  RunManifest manifest;
  manifest.command = "track";
  manifest.params_hash = lp.hash;
  manifest.scenario_hash = fnv1a_hex(scenario_text);
  manifest.seed = common.seed;
  write_output(dir, "track_trace.csv",
               csv_stream([&](std::ostream& s) { write_track_csv(result.trace, s); }), manifest);

  const TrackMetrics& m = result.metrics;
  json metrics;
  metrics["ate_m"] = m.ate;
  metrics["max_position_error_m"] = m.max_position_error;
  metrics["max_heading_error_deg"] = m.max_heading_error / kDeg;
  metrics["max_joint_error_deg"] = m.max_joint_error / kDeg;
  metrics["clamp_activations"] = m.clamp_activations;
  metrics["min_beta"] = m.min_beta;
  metrics["steps"] = m.steps;
  metrics["duration_s"] = m.duration;
  metrics["joint_limit_violations"] = m.joint_limit_violations;
  metrics["mode"] = to_string(options.mode);
  metrics["time_scaling"] = {{"iterations", scaled.iterations},
                             {"scale_factors", scaled.scale_factors},
                             {"initial_worst_ratio",
                              feasibility_check(raw, lp.params, scenario.dt_check).worst_ratio},
                             {"final_worst_ratio", scaled.report.worst_ratio},
                             {"total_time_s", scaled.trajectory.total_time()}};
  write_output(dir, "track_metrics.json", metrics.dump(2) + "\n", manifest);
  finish_manifest(dir, manifest, start);

  out << fmt::format(
      "track: {} steps, ATE {} m, max position error {} m, max heading error {} deg, "
      "clamp activations {}\n",
      m.steps, m.ate, m.max_position_error, m.max_heading_error / kDeg, m.clamp_activations);
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const Common& common, const std::string& profile_path,
                 const std::string& mode_override, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (profile_path.empty()) throw InvalidArgument("simulate: --profile is required");
  const LoadedParams lp = load(common);
  const std::string profile_text = read_file(profile_path);
  InputProfile profile;
  try {
    profile = profile_from_json(json::parse(profile_text));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("profile: ") + e.what());
  }
  if (!mode_override.empty()) profile.mode = input_mode_from_string(mode_override);

  Simulator sim(lp.params, profile.initial, profile.dt, profile.decimation);
  const auto steps = static_cast<long>(std::llround(profile.duration / profile.dt));
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * profile.dt;
    sim.advance({profile.mode, profile.input_at(t)});
  }

  const fs::path dir = prepare_out(common.out_dir);
  RunManifest manifest;
  manifest.command = "simulate";
  manifest.params_hash = lp.hash;
  manifest.scenario_hash = fnv1a_hex(profile_text);
  manifest.seed = common.seed;
  write_output(dir, "simulate_trace.csv", csv_stream([&](std::ostream& s) { sim.write_csv(s); }),
               manifest);

  const double e0 = sim.trace().front().energy;
  const double e1 = kinetic_energy(lp.params, sim.state().x, sim.state().xdot);
  const bool coast = profile.mode == InputMode::kTorque && profile.segments.empty() &&
                     lp.params.friction.wheel == 0.0 && lp.params.friction.roller == 0.0 &&
                     lp.params.friction.joint == 0.0;
  json summary;
  summary["mode"] = to_string(profile.mode);
  summary["steps"] = steps;
  summary["final_time_s"] = sim.time();
  summary["final_x"] = std::vector<double>(sim.state().x.data(), sim.state().x.data() + 5);
  summary["final_xdot"] =
      std::vector<double>(sim.state().xdot.data(), sim.state().xdot.data() + 5);
  summary["initial_energy_J"] = e0;
  summary["final_energy_J"] = e1;
  summary["max_constraint_residual"] = sim.max_constraint_residual();
  summary["joint_limit_violations"] = sim.joint_limit_violations();
  if (coast) {
    const double drift = e0 > 0.0 ? std::abs(e1 - e0) / e0 : std::abs(e1 - e0);
    summary["energy_drift"] = drift;
    summary["energy_check"] = drift < kEnergyDriftTolerance ? "PASS" : "FAIL";
  }
  write_output(dir, "simulate_summary.json", summary.dump(2) + "\n", manifest);
  finish_manifest(dir, manifest, start);

  out << fmt::format("simulate: {} steps in {} mode, max constraint residual {}", steps,
                     to_string(profile.mode), sim.max_constraint_residual());
  if (coast) out << ", energy check " << summary["energy_check"].get<std::string>();
  out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- geometry

struct GeometryArgs {
  double phi1_deg = 0.0;
  double phi2_deg = 0.0;
  std::optional<double> payload;
  bool write = false;
};

int cmd_geometry(const Common& common, const GeometryArgs& args, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  LoadedParams lp = load(common);
  if (args.payload) {
    if (!(*args.payload >= 0.0)) throw InvalidArgument("--payload must be >= 0");
    lp.params.payload_mass = *args.payload;
  }
  const double phi1 = args.phi1_deg * kDeg;
  const double phi2 = args.phi2_deg * kDeg;
  const MassSummary mass = center_of_mass(lp.params, phi1, phi2, false);
  const Counterbalance bare = counterbalance(lp.params, phi1, phi2, false);
  const Counterbalance loaded = counterbalance(lp.params, phi1, phi2, true);

  auto cb_json = [](const Counterbalance& cb) {
    return json{{"per_leg_kg", cb.per_leg},
                {"total_kg", cb.total},
                {"com_before", {cb.com_before.x(), cb.com_before.y()}},
                {"com_after", {cb.com_after.x(), cb.com_after.y()}},
                {"residual_m", cb.residual}};
  };
  json report;
  report["phi_deg"] = {args.phi1_deg, args.phi2_deg};
  report["footprint_width_m"] = footprint_width(lp.params, phi1, phi2);
  report["mass_kg"] = mass.mass;
  report["com"] = {mass.com.x(), mass.com.y()};
  report["geometric_center"] = {bare.target.x(), bare.target.y()};
  report["counterbalance"] = cb_json(bare);
  report["payload_kg"] = lp.params.payload_mass;
  report["counterbalance_with_payload"] = cb_json(loaded);

  if (args.write) {
    const fs::path dir = prepare_out(common.out_dir);
    RunManifest manifest;
    manifest.command = "geometry";
    manifest.params_hash = lp.hash;
    manifest.seed = common.seed;
    write_output(dir, "geometry.json", report.dump(2) + "\n", manifest);
    finish_manifest(dir, manifest, start);
  }
  out << report.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- clamp-demo

int cmd_clamp_demo(const Common& common, int count, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  if (count < 1) throw InvalidArgument("--count must be >= 1");
  const LoadedParams lp = load(common);
  std::mt19937_64 rng(static_cast<std::uint64_t>(common.seed));
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };

  std::string csv = "case,phi1,phi2,vx_c,vy_c,omega_c,phi1_dot_c,phi2_dot_c,beta,max_ratio\n";
  int clamped = 0;
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    Vec5 x = Vec5::Zero();
    x(kTheta) = uniform(-std::numbers::pi, std::numbers::pi);
    x(kPhi1) = uniform(-lp.params.joint_limit, lp.params.joint_limit);
    x(kPhi2) = uniform(-lp.params.joint_limit, lp.params.joint_limit);
    Vec5 xdot;
    xdot << uniform(-2, 2), uniform(-2, 2), uniform(-4, 4), uniform(-6, 6), uniform(-6, 6);
    const KinematicMaps maps = stack_maps(lp.params, x, Frame::kBase);
    const ClampResult c = velocity_clamp(xdot, maps, lp.params.velocity_limit);
    double ratio = 0.0;
    for (int i = 0; i < 6; ++i) {
      ratio = std::max(ratio, std::abs(c.u(i)) / lp.params.velocity_limit[static_cast<std::size_t>(i)]);
    }
    worst = std::max(worst, ratio);
    if (c.beta < 1.0) ++clamped;
    csv += fmt::format("{},{},{}", k, x(kPhi1), x(kPhi2));
    for (int i = 0; i < 5; ++i) csv += fmt::format(",{}", xdot(i));
    csv += fmt::format(",{},{}\n", c.beta, ratio);
  }

  const fs::path dir = prepare_out(common.out_dir);
  RunManifest manifest;
  manifest.command = "clamp-demo";
  manifest.params_hash = lp.hash;
  manifest.seed = common.seed;
  write_output(dir, "clamp_demo.csv", csv, manifest);
  finish_manifest(dir, manifest, start);
  out << fmt::format("clamp-demo: {} cases, {} clamped, worst post-clamp ratio {} ({})\n", count,
                     clamped, worst, worst <= 1.0 ? "SAFE" : "VIOLATED");
  return worst <= 1.0 ? kExitOk : kExitInfeasible;
}

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--params", common.params_path, "Parameter JSON (defaults when omitted)");
  sub->add_option("--out", common.out_dir, "Output directory");
  sub->add_option("--seed", common.seed, "Seed recorded in the manifest");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and analysis engine for the MIRRAX reconfigurable mecanum robot",
               "mirrax"};
  app.require_subcommand(1);

  Common common;
  SweepArgs sweep_args;
  std::string scenario_path;
  std::string profile_path;
  std::string mode_override;
  GeometryArgs geometry_args;
  double payload = 0.0;
  int clamp_count = 1000;

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Controllability sweep over (phi1, phi2)");
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--analysis", sweep_args.analysis, "gsi | det | stlc")
      ->check(CLI::IsMember({"gsi", "det", "stlc"}));
  sweep_cmd->add_option("--statistic", sweep_args.statistic, "min | max")
      ->check(CLI::IsMember({"min", "max"}));
  sweep_cmd->add_option("--grid-deg", sweep_args.grid_deg, "Grid spacing in degrees");
  sweep_cmd->add_option("--range-deg", sweep_args.range_deg,
                        "Half range in degrees (180 for gsi/det, joint limit for stlc)");
  sweep_cmd->add_option("--workers", sweep_args.workers, "Worker threads");

  CLI::App* track_cmd = app.add_subcommand("track", "Generate, scale and track a scenario");
  add_common(track_cmd, common);
  track_cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Open-loop simulation of an input profile");
  add_common(sim_cmd, common);
  sim_cmd->add_option("--profile,--scenario", profile_path, "Input profile JSON")->required();
  sim_cmd->add_option("--mode", mode_override, "velocity | torque (overrides the profile)")
      ->check(CLI::IsMember({"velocity", "torque"}));

  CLI::App* geo_cmd = app.add_subcommand("geometry", "Footprint, CoM and counterbalance report");
  add_common(geo_cmd, common);
  geo_cmd->add_option("--phi1", geometry_args.phi1_deg, "Leg 1 angle in degrees");
  geo_cmd->add_option("--phi2", geometry_args.phi2_deg, "Leg 2 angle in degrees");
  CLI::Option* payload_opt =
      geo_cmd->add_option("--payload", payload, "Payload mass in kg (overrides the params)");

  CLI::App* clamp_cmd = app.add_subcommand("clamp-demo", "Random velocity-clamp safety check");
  add_common(clamp_cmd, common);
  clamp_cmd->add_option("--count", clamp_count, "Number of random cases");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sweep_cmd) return cmd_sweep(common, sweep_args, out);
    if (*track_cmd) return cmd_track(common, scenario_path, out);
    if (*sim_cmd) return cmd_simulate(common, profile_path, mode_override, out);
    if (*geo_cmd) {
      if (payload_opt->count() > 0) geometry_args.payload = payload;
      geometry_args.write = geo_cmd->count("--out") > 0;
      return cmd_geometry(common, geometry_args, out);
    }
    if (*clamp_cmd) return cmd_clamp_demo(common, clamp_count, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IntegrationDiverged& e) {
    err << "error: " << e.what() << " (last valid time " << e.last_valid_time() << " s)\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  err << "error: no command\n";
  return kExitUsage;
}

}  // namespace mirrax::cli
