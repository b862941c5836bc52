// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

// capow: run capillary robot power scenarios, the design matrix, and the
// quick verification suite.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "capow/analytic.hpp"
#include "capow/kernels.hpp"
#include "capow/kinetics.hpp"
#include "capow/linsolve.hpp"
#include "capow/mesh.hpp"
#include "capow/power.hpp"
#include "capow/table.hpp"
#include "capow/thermal.hpp"

namespace fs = std::filesystem;
using namespace capow;

namespace {

constexpr const char* kOutEnv = "CAPOW_OUT_DIR";

struct CommonArgs {
  std::string preset;
  std::string config;
  std::vector<std::string> sets;
  std::string design;
  int rings = -1;
  std::string pump_mode;
  double shell = -1;
  std::string out;
  int workers = 1;
};

void add_common(CLI::App* app, CommonArgs& a) {
  app->add_option("--preset", a.preset, "Base scenario: low_demand or high_demand");
  app->add_option("--config", a.config, "Scenario file of 'key = value' lines");
  app->add_option("--set", a.sets, "Override one key, e.g. --set robot.rings=1");
  app->add_option("--design", a.design, "Robot design {pumps|nopumps}-{high|low}");
  app->add_option("--rings", a.rings, "Number of robot rings (0 for a bare vessel)");
  app->add_option("--pump-mode", a.pump_mode, "Pump strategy: full, uniform or duty");
  app->add_option("--shell", a.shell, "Fraction of robot volume holding the reaction sites");
  app->add_option("--out", a.out, std::string("Output directory (default $") + kOutEnv +
                                      " or ./capow_out)");
  app->add_option("--workers", a.workers, "Threads for matrix runs")->check(CLI::PositiveNumber);
}

std::string key_of(const std::string& line) {
  auto s = line.substr(0, line.find('#'));
  const auto eq = s.find('=');
  if (eq == std::string::npos) return {};
  s = s.substr(0, eq);
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  return s;
}

// Config file text with command-line overrides replacing any lines that set
// the same key, so gaps and mesh defaults are re-derived once.
ScenarioConfig build_config(const CommonArgs& a) {
  std::vector<std::pair<std::string, std::string>> over;
  for (const auto& s : a.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ScenarioError(s, "--set expects key=value, got '" + s + "'");
    over.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (!a.preset.empty()) over.emplace_back("preset", a.preset);
  if (!a.design.empty()) {
    const auto dash = a.design.find('-');
    const std::string pumps = a.design.substr(0, dash);
    const std::string cap = dash == std::string::npos ? "" : a.design.substr(dash + 1);
    if ((pumps != "pumps" && pumps != "nopumps") || (cap != "high" && cap != "low")) {
      throw ScenarioError("design", "--design must be {pumps|nopumps}-{high|low}, got '" +
                                        a.design + "'");
    }
    over.emplace_back("robot.pumps", pumps == "pumps" ? "true" : "false");
    over.emplace_back("robot.site_density", cap == "high" ? "3e21" : "6e19");
  }
  if (a.rings >= 0) over.emplace_back("robot.rings", std::to_string(a.rings));
  if (!a.pump_mode.empty()) {
    static const std::map<std::string, std::string> modes = {
        {"full", "full_absorb"}, {"uniform", "uniform_flux"}, {"duty", "duty_cycle"}};
    const auto it = modes.find(a.pump_mode);
    if (it == modes.end()) {
      throw ScenarioError("pump_mode", "--pump-mode must be full, uniform or duty");
    }
    over.emplace_back("robot.pump_mode", it->second);
  }
  if (a.shell >= 0) {
    std::ostringstream s;
    s.precision(17);
    s << a.shell;
    over.emplace_back("robot.shell_fraction", s.str());
  }

  std::string text;
  if (!a.config.empty()) {
    std::ifstream f(a.config);
    if (!f) throw ScenarioError("", "cannot open scenario file '" + a.config + "'");
    bool any = false;
    std::string line;
    while (std::getline(f, line)) {
      const auto k = key_of(line);
      if (k.empty()) continue;
      any = true;
      const bool replaced =
          std::any_of(over.begin(), over.end(), [&](const auto& o) { return o.first == k; });
      if (!replaced) text += line + "\n";
    }
    if (!any) throw ScenarioError("", "scenario file '" + a.config + "' sets nothing");
  }
  for (const auto& [k, v] : over) text += k + " = " + v + "\n";
  return load_scenario(text);
}

fs::path output_dir(const CommonArgs& a) {
  if (!a.out.empty()) return a.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return "capow_out";
}

void note(const char* stage, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", stage, msg.c_str());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(dir_ / name);
    if (!f) throw std::runtime_error("cannot write " + (dir_ / name).string());
    body(f);
    names_.push_back(name);
  }
  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

const char* mode_name(const ScenarioConfig& cfg) {
  if (!cfg.robot.pumps) return "none";
  switch (cfg.robot.pump_mode) {
    case PumpMode::full_absorb: return "full";
    case PumpMode::uniform_flux: return "uniform";
    case PumpMode::duty_cycle: return "duty";
  }
  return "?";
}

int run_single(const ScenarioConfig& cfg, const fs::path& dir) {
  Artifacts out(dir);
  out.write("config.txt", [&](std::ostream& o) { o << to_text(cfg); });

  note("mesh", "building");
  ScenarioModel model;
  try {
    model.mesh = build_mesh(cfg);
  } catch (const std::exception& e) {
    note("mesh", std::string("failed: ") + e.what());
    return 1;
  }
  note("mesh", std::to_string(model.mesh.nr()) + " x " + std::to_string(model.mesh.nz()) +
                   " cells");
  out.write("mesh.csv", [&](std::ostream& o) { write_mesh_csv(model.mesh, o); });

  try {
    model.flow = solve_flow(model.mesh, cfg);
    model.core = trace_core_boundary(model.flow, model.mesh, cfg);
  } catch (const std::exception& e) {
    note("flow", std::string("failed: ") + e.what());
    return 1;
  }
  const auto pois = analytic::poiseuille(cfg);
  note("flow", "Q = " + fmt(model.flow.flow_rate) + " m^3/s, mass imbalance " +
                   fmt(model.flow.max_mass_imbalance));
  out.write("flow.csv", [&](std::ostream& o) { write_flow_csv(model.flow, model.mesh, o); });

  note("oxygen", std::string("coupled solve, pump mode ") + mode_name(cfg));
  PowerRun run;
  double uniform_flux = cfg.robot.uniform_flux;
  try {
    if (cfg.robot.rings > 0 && cfg.robot.pumps && cfg.robot.pump_mode == PumpMode::uniform_flux &&
        uniform_flux <= 0) {
      auto u = uniform_flux_search(model, cfg);
      uniform_flux = u.flux;
      run = std::move(u.run);
    } else {
      run = run_design(model, cfg);
    }
  } catch (const std::exception& e) {
    note("oxygen", std::string("failed: ") + e.what());
    return 1;
  }
  const auto& sol = run.solution;
  const auto& cs = sol.coupling;
  note("oxygen", std::to_string(cs.iterations) + " iterations, change C " + fmt(cs.change_c) +
                     ", S " + fmt(cs.change_s) + (cs.converged ? "" : " (NOT converged)"));
  out.write("concentration.csv",
            [&](std::ostream& o) { write_concentration_csv(sol, model.mesh, o); });
  out.write("saturation.csv", [&](std::ostream& o) { write_saturation_csv(sol, o); });
  const double z_mid = model.mesh.rings.empty()
                           ? 0.5 * cfg.geometry.vessel_length
                           : 0.5 * (model.mesh.rings.front().z_begin + model.mesh.rings.back().z_end);
  out.write("radial_section.csv",
            [&](std::ostream& o) { write_radial_section_csv(sol, model.mesh, z_mid, o); });

  const auto& rep = run.report;
  if (cfg.robot.rings > 0) {
    out.write("rings.csv", [&](std::ostream& o) {
      o << "ring,z_begin_m,z_end_m,uptake_per_s,ring_power_pW,robot_power_pW,capped\n";
      o.precision(9);
      for (std::size_t q = 0; q < rep.ring_uptake.size(); ++q) {
        o << q + 1 << ',' << model.mesh.rings[q].z_begin << ',' << model.mesh.rings[q].z_end << ','
          << rep.ring_uptake[q] << ',' << rep.ring_power[q] * 1e12 << ','
          << rep.robot_power[q] * 1e12 << ',' << (rep.capped[q] ? 1 : 0) << '\n';
      }
    });
  } else {
    const int j = model.mesh.z.locate(z_mid);
    const double c_axis = sol.field.c[model.mesh.index(0, j)];
    out.write("krogh.csv", [&](std::ostream& o) {
      o << "r_m,C_model_molecule_per_m3,C_krogh_molecule_per_m3\n";
      o.precision(9);
      for (int i = model.mesh.i_wall; i < model.mesh.nr(); ++i) {
        const double r = model.mesh.r.center(i);
        o << r << ',' << sol.field.c[model.mesh.index(i, j)] << ','
          << analytic::krogh_profile(r, c_axis, cfg) << '\n';
      }
    });
  }

  const auto heat_source = robot_heat_source(model.mesh, sol, cfg);
  const auto heat = solve_heat(model.mesh, model.flow, heat_source, cfg);
  out.write("temperature.csv", [&](std::ostream& o) { write_temperature_csv(heat, model.mesh, o); });
  note("heat", "max dT = " + fmt(heat.max_rise) + " K");

  double min_s = 1, max_dis = 0;
  for (std::size_t k = 0; k < sol.saturation.s.size(); ++k) {
    min_s = std::min(min_s, sol.saturation.s[k]);
    max_dis = std::max(max_dis, std::abs(sol.saturation.s[k] - sol.saturation.s_eq[k]));
  }
  const auto force = wall_force(model.flow, model.mesh, cfg);
  const auto& bal = sol.balance;

  out.write("summary.txt", [&](std::ostream& o) {
    auto kv = [&](const char* k, const std::string& v) { o << k << " = " << v << '\n'; };
    kv("scenario", cfg.name);
    kv("rings", std::to_string(cfg.robot.rings));
    kv("pumps", cfg.robot.pumps ? "true" : "false");
    kv("pump_mode", mode_name(cfg));
    kv("site_density_per_m3", fmt(cfg.robot.site_density));
    kv("shell_fraction", fmt(cfg.robot.shell_fraction));
    kv("simd", kernels::isa_name(kernels::active_isa()));
    kv("mesh_cells", std::to_string(model.mesh.cells()));
    kv("flow_rate_m3_per_s", fmt(model.flow.flow_rate));
    kv("mean_speed_m_per_s", fmt(model.flow.mean_speed));
    kv("flow_reduction", fmt(1 - model.flow.flow_rate / pois.flow_rate));
    kv("core_hematocrit", fmt(sol.core_hematocrit));
    kv("wall_force_total_N", fmt(force.total));
    kv("wall_force_per_robot_N", fmt(force.per_robot));
    kv("wall_force_coefficient_m3", fmt(force.coefficient));
    kv("iterations", std::to_string(cs.iterations));
    kv("converged", cs.converged ? "true" : "false");
    kv("robot_power_avg_pW", fmt(rep.average_robot_power * 1e12));
    kv("robot_power_min_pW", fmt(rep.min_robot_power * 1e12));
    kv("aggregate_power_pW", fmt(rep.aggregate_power * 1e12));
    kv("robot_uptake_per_s", fmt(rep.uptake));
    kv("pump_power_pW", fmt(rep.pump_power * 1e12));
    if (cfg.robot.pumps && cfg.robot.pump_mode == PumpMode::uniform_flux) {
      kv("uniform_flux_per_m2_s", fmt(uniform_flux));
    }
    kv("tissue_uptake_per_s", fmt(sol.field.tissue_uptake));
    kv("saturation_inlet", fmt(sol.saturation.inlet));
    kv("saturation_outlet", fmt(sol.saturation.s.back()));
    kv("saturation_min", fmt(min_s));
    kv("saturation_max_disequilibrium", fmt(max_dis));
    kv("max_temperature_rise_K", fmt(heat.max_rise));
    kv("species_balance_residual", fmt(bal.relative_residual));
    kv("heat_balance_residual", fmt(heat.relative_residual));
  });
  out.write("manifest.txt", [&](std::ostream& o) {
    for (const auto& n : out.names()) o << n << '\n';
    o << "manifest.txt\n";
  });
  note("done", "per-robot power " + fmt(rep.average_robot_power * 1e12) + " pW; outputs in " +
                   out.dir().string());
  return cs.converged ? 0 : 1;
}

int run_matrix(const ScenarioConfig& base, int workers, const fs::path& dir) {
  Artifacts out(dir);
  note("matrix", "solving " + std::to_string(table4_rows().size() * table4_columns().size()) +
                     " cells on " + std::to_string(workers) + " workers");
  const auto m = run_power_matrix(base, table4_rows(), table4_columns(), workers);
  out.write("table4.csv", [&](std::ostream& o) { write_matrix_csv(m, o); });
  out.write("table4_grid.csv", [&](std::ostream& o) {
    o << "design";
    for (const auto& c : m.columns) {
      o << ',' << (c.high_capacity ? "high" : "low") << "_C" << fmt(c.inlet_concentration) << "_dP"
        << fmt(c.pressure_gradient) << "_Q" << fmt(c.tissue_power);
    }
    o << '\n';
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
      o << m.rows[r].label;
      for (std::size_t c = 0; c < m.columns.size(); ++c) {
        o << ',' << fmt(m.at(static_cast<int>(r), static_cast<int>(c)).robot_power * 1e12);
      }
      o << '\n';
    }
  });
  bool ok = true;
  for (const auto& c : m.cells) ok = ok && c.converged;
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    std::string line = m.rows[r].label + ":";
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %5.1f", m.at(static_cast<int>(r), static_cast<int>(c)).robot_power * 1e12);
      line += buf;
    }
    note("matrix", line);
  }
  return ok ? 0 : 1;
}

struct Check {
  std::string id;
  bool pass;
  std::string detail;
};

std::vector<Check> verify_checks(const ScenarioConfig& cfg) {
  std::vector<Check> out;
  auto within = [](double v, double target, double rel) {
    return std::abs(v - target) <= rel * std::abs(target);
  };
  const auto d = derived_quantities(cfg);
  for (const auto& [c, target] : {std::pair{3e22, 320e-12}, std::pair{7e22, 750e-12}}) {
    const double p = analytic::sphere_absorption_power(d.sphere_radius, c, cfg);
    out.push_back({"sphere_power_C" + fmt(c), within(p, target, 0.02),
                   fmt(p * 1e12) + " pW, expected " + fmt(target * 1e12)});
  }
  {
    ScenarioConfig hi = cfg, lo = cfg;
    hi.robot.site_density = 3e21;
    lo.robot.site_density = 6e19;
    const auto bh = analytic::pump_benefit(hi, 3e22);
    const auto bl = analytic::pump_benefit(lo, 3e22);
    out.push_back({"pump_gain_high", within(bh.gain, 2.0, 0.05), fmt(bh.gain)});
    out.push_back({"pump_gain_low", within(bl.gain, 42, 0.05), fmt(bl.gain)});
    out.push_back({"pump_gain_low_capped", within(bl.capped_gain, 34, 0.05), fmt(bl.capped_gain)});
  }
  {
    double best = 0, at = 0;
    for (double x = 0.5; x <= 10; x += 0.005) {
      const double b = analytic::thin_shell_benefit(x);
      if (b > best) best = b, at = x;
    }
    out.push_back({"thin_shell_optimum", std::abs(best - 1.12) <= 0.03 && std::abs(at - 3.5) <= 0.5,
                   fmt(best) + " at a/mu " + fmt(at)});
  }
  for (const auto& [dp, target] : {std::pair{1e5, 2e-4}, std::pair{5e5, 1e-3}}) {
    ScenarioConfig c = cfg;
    c.fluid.pressure_gradient = dp;
    const double v = analytic::poiseuille(c).mean_speed;
    out.push_back({"poiseuille_speed_dP" + fmt(dp), within(v, target, 0.005),
                   fmt(v) + " m/s, expected " + fmt(target)});
  }
  {
    double worst = 0;
    bool sign_ok = true;
    for (int k = 1; k <= 100; ++k) {
      const double a = 3.0 * k / 101;
      worst = std::max(worst, std::abs(unloading_function(a, hill_equilibrium(a, cfg.rbc.hill_n),
                                                          cfg.rbc.hill_n)));
      const double c = a * cfg.rbc.p_half / cfg.oxygen.henry;
      for (double s : {0.1, 0.5, 0.9}) {
        const double rate = unloading_rate(partial_pressure_ratio(c, cfg), s, cfg);
        const double gap = hill_equilibrium(a, cfg.rbc.hill_n) - s;
        if (gap != 0 && (rate > 0) != (gap > 0)) sign_ok = false;
      }
    }
    const bool hill = std::abs(hill_equilibrium(1, cfg.rbc.hill_n) - 0.5) < 1e-15 &&
                      hill_equilibrium(0, cfg.rbc.hill_n) == 0;
    out.push_back({"kinetics_identities", worst < 1e-9 && sign_ok && hill,
                   "max |s(a,S_eq)| " + fmt(worst) + (sign_ok ? ", signs ok" : ", sign mismatch")});
  }
  {
    ScenarioConfig c = cfg;
    c.robot.rings = 0;
    c.robot.ring_starts.clear();
    validate(c);
    const auto model = prepare_model(c);
    const double l2 = poiseuille_l2_error(model.flow, model.mesh, c);
    out.push_back({"pde_poiseuille_profile", l2 < 0.005, "L2 " + fmt(l2)});
    const auto sol = solve_coupled(model.mesh, model.flow, model.core, c, {});
    out.push_back({"species_balance", sol.coupling.converged && std::abs(sol.balance.relative_residual) < 0.01,
                   "residual " + fmt(sol.balance.relative_residual)});
  }
  return out;
}

int run_verify(const ScenarioConfig& cfg, const CommonArgs& a) {
  const auto checks = verify_checks(cfg);
  bool ok = true;
  for (const auto& c : checks) {
    std::printf("%s %-26s %s\n", c.pass ? "PASS" : "FAIL", c.id.c_str(), c.detail.c_str());
    ok = ok && c.pass;
  }
  if (!a.out.empty() || std::getenv(kOutEnv)) {
    Artifacts out(output_dir(a));
    out.write("verify.csv", [&](std::ostream& o) {
      o << "check,pass,detail\n";
      for (const auto& c : checks) o << c.id << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
    });
  }
  return ok ? 0 : 1;
}

int run_analytic(const ScenarioConfig& cfg) {
  const auto d = derived_quantities(cfg);
  std::printf("sphere radius %.4g m (robot volume %.4g m^3)\n", d.sphere_radius, cfg.robot.volume);
  std::printf("%-10s %10s %10s %10s %10s %10s %12s\n", "capacity", "n_d", "gamma", "mu", "f_mu",
              "G", "G_capped");
  for (const auto& [name, nd] : {std::pair{"high", 3e21}, std::pair{"low", 6e19}}) {
    ScenarioConfig c = cfg;
    c.robot.site_density = nd;
    const auto b = analytic::pump_benefit(c, 3e22);
    std::printf("%-10s %10.4g %10.4g %10.4g %10.4g %10.4g %12.4g\n", name, nd, b.gamma, b.mu, b.f,
                b.gain, b.capped_gain);
  }
  std::printf("sphere power at C=3e22: %.4g pW, at C=7e22: %.4g pW\n",
              analytic::sphere_absorption_power(d.sphere_radius, 3e22, cfg) * 1e12,
              analytic::sphere_absorption_power(d.sphere_radius, 7e22, cfg) * 1e12);
  for (const auto& [name, nd] : {std::pair{"high", 3e21}, std::pair{"low", 6e19}}) {
    ScenarioConfig c = cfg;
    c.robot.site_density = nd;
    const auto b = analytic::pump_benefit(c, 3e22);
    std::printf("thin-shell benefit (%s): %.4f\n", name, analytic::thin_shell_benefit(b.a / b.mu));
  }
  const auto p = analytic::poiseuille(cfg);
  std::printf("Poiseuille mean speed %.4g m/s, flow %.4g m^3/s\n", p.mean_speed, p.flow_rate);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oxygen-limited power for robot rings on a capillary wall"};
  app.require_subcommand(1);
  CommonArgs run_args, verify_args, analytic_args;
  std::string matrix;
  auto* run = app.add_subcommand("run", "Solve one scenario, or a design matrix");
  add_common(run, run_args);
  run->add_option("--matrix", matrix, "Design matrix to run (table4)")
      ->check(CLI::IsMember({"table4"}));
  auto* verify = app.add_subcommand("verify", "Analytic oracles and conservation audits");
  add_common(verify, verify_args);
  auto* analytic_cmd = app.add_subcommand("analytic", "Print the isolated-sphere estimates");
  add_common(analytic_cmd, analytic_args);
  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = build_config(run_args);
      const auto dir = output_dir(run_args);
      if (!matrix.empty()) return run_matrix(cfg, run_args.workers, dir);
      return run_single(cfg, dir);
    }
    if (verify->parsed()) return run_verify(build_config(verify_args), verify_args);
    return run_analytic(build_config(analytic_args));
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "capow: %s%s%s\n", e.key().empty() ? "" : e.key().c_str(),
                 e.key().empty() ? "" : ": ", e.what());
    std::fprintf(stderr, "Run with --help for usage.\n");
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "capow: %s\n", e.what());
    return 1;
  }
}
