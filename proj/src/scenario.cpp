// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "capow/kinetics.hpp"

namespace capow {
namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw ScenarioError(std::string(key), std::string(key) + ": not a number: '" +
                                              std::string(text) + "'");
  }
  return v;
}

int parse_int(std::string_view key, std::string_view text) {
  text = trim(text);
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ScenarioError(std::string(key), std::string(key) + ": not an integer: '" +
                                              std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ScenarioError(std::string(key),
                      std::string(key) + ": not a boolean: '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_double(key, text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = trim(text.substr(comma + 1));
  }
  return out;
}

const char* pump_mode_name(PumpMode m) {
  switch (m) {
    case PumpMode::full_absorb: return "full_absorb";
    case PumpMode::uniform_flux: return "uniform_flux";
    case PumpMode::duty_cycle: return "duty_cycle";
  }
  return "full_absorb";
}

PumpMode parse_pump_mode(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "full_absorb" || text == "full") return PumpMode::full_absorb;
  if (text == "uniform_flux" || text == "uniform") return PumpMode::uniform_flux;
  if (text == "duty_cycle" || text == "duty") return PumpMode::duty_cycle;
  throw ScenarioError(std::string(key),
                      std::string(key) + ": unknown pump mode '" + std::string(text) + "'");
}

DutyPhase parse_duty_phase(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "odd") return DutyPhase::odd_active;
  if (text == "even") return DutyPhase::even_active;
  throw ScenarioError(std::string(key),
                      std::string(key) + ": expected odd or even, got '" + std::string(text) + "'");
}

// One entry per config key. The visitor receives (key, field reference) and
// is instantiated for both const and mutable configs.
template <class Config, class Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("geometry.vessel_radius", c.geometry.vessel_radius);
  v("geometry.tissue_radius", c.geometry.tissue_radius);
  v("geometry.vessel_length", c.geometry.vessel_length);
  v("flow.pressure_gradient", c.fluid.pressure_gradient);
  v("blood.hematocrit", c.fluid.hematocrit);
  v("fluid.density", c.fluid.density);
  v("fluid.viscosity", c.fluid.viscosity);
  v("fluid.heat_capacity", c.fluid.heat_capacity);
  v("fluid.thermal_conductivity", c.fluid.thermal_conductivity);
  v("fluid.ambient_temperature", c.fluid.ambient_temperature);
  v("oxygen.diffusivity", c.oxygen.diffusivity);
  v("oxygen.inlet_concentration", c.oxygen.inlet_concentration);
  v("oxygen.henry", c.oxygen.henry);
  v("oxygen.robot_diffusivity", c.oxygen.robot_diffusivity);
  v("oxygen.core_diffusivity", c.oxygen.core_diffusivity);
  v("rbc.p_half", c.rbc.p_half);
  v("rbc.hill_n", c.rbc.hill_n);
  v("rbc.unload_time", c.rbc.unload_time);
  v("rbc.c_max", c.rbc.c_max);
  v("rbc.heme_diffusivity", c.rbc.heme_diffusivity);
  v("rbc.inlet_gap", c.rbc.inlet_gap);
  v("rbc.narrow_gap", c.rbc.narrow_gap);
  v("tissue.max_power", c.tissue.max_power);
  v("tissue.k_half", c.tissue.k_half);
  v("tissue.reaction_energy", c.tissue.reaction_energy);
  v("robot.size", c.robot.size);
  v("robot.per_ring", c.robot.per_ring);
  v("robot.rings", c.robot.rings);
  v("robot.volume", c.robot.volume);
  v("robot.site_density", c.robot.site_density);
  v("robot.site_rate", c.robot.site_rate);
  v("robot.k_half", c.robot.k_half);
  v("robot.pumps", c.robot.pumps);
  v("robot.pump_mode", c.robot.pump_mode);
  v("robot.uniform_flux", c.robot.uniform_flux);
  v("robot.duty_phase", c.robot.duty_phase);
  v("robot.shell_fraction", c.robot.shell_fraction);
  v("robot.pump_energy", c.robot.pump_energy);
  v("robot.ring_starts", c.robot.ring_starts);
  v("solver.relaxation", c.solver.relaxation);
  v("solver.tolerance", c.solver.tolerance);
  v("solver.max_iterations", c.solver.max_iterations);
  v("mesh.refine", c.mesh.refine);
  v("mesh.face_spacing", c.mesh.face_spacing);
  v("mesh.normal_spacing", c.mesh.normal_spacing);
  v("mesh.lumen_spacing", c.mesh.lumen_spacing);
  v("mesh.axial_spacing", c.mesh.axial_spacing);
  v("mesh.wall_spacing", c.mesh.wall_spacing);
  v("mesh.tissue_spacing", c.mesh.tissue_spacing);
  v("mesh.growth", c.mesh.growth);
  v("mesh.max_cells", c.mesh.max_cells);
  v("mesh.saturation_points", c.mesh.saturation_points);
}

struct Setter {
  std::string_view key;
  std::string_view value;
  bool found = false;

  void assign(std::string_view k, double& f) { f = parse_double(k, value); }
  void assign(std::string_view k, int& f) { f = parse_int(k, value); }
  void assign(std::string_view k, bool& f) { f = parse_bool(k, value); }
  void assign(std::string_view k, PumpMode& f) { f = parse_pump_mode(k, value); }
  void assign(std::string_view k, DutyPhase& f) { f = parse_duty_phase(k, value); }
  void assign(std::string_view k, std::vector<double>& f) { f = parse_list(k, value); }

  template <class T>
  void operator()(std::string_view k, T& field) {
    if (found || k != key) return;
    assign(k, field);
    found = true;
  }
};

struct Writer {
  std::ostringstream& os;
  void operator()(std::string_view k, double v) { os << k << " = " << format_double(v) << '\n'; }
  void operator()(std::string_view k, int v) { os << k << " = " << v << '\n'; }
  void operator()(std::string_view k, bool v) { os << k << " = " << (v ? "true" : "false") << '\n'; }
  void operator()(std::string_view k, PumpMode v) { os << k << " = " << pump_mode_name(v) << '\n'; }
  void operator()(std::string_view k, DutyPhase v) {
    os << k << " = " << (v == DutyPhase::odd_active ? "odd" : "even") << '\n';
  }
  void operator()(std::string_view k, const std::vector<double>& v) {
    os << k << " =";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : " ") << format_double(v[i]);
    os << '\n';
  }
};

[[noreturn]] void fail(const std::string& key, const std::string& what, double value) {
  throw ScenarioError(key, key + " " + what + " (got " + format_double(value) + ")");
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0) || !std::isfinite(v)) fail(key, "must be strictly positive", v);
}

void require_non_negative(const std::string& key, double v) {
  if (!(v >= 0) || !std::isfinite(v)) fail(key, "must be non-negative", v);
}

}  // namespace

double interpolated_inlet_gap(double pressure_gradient) {
  constexpr double dp_lo = 1e5, gap_lo = 0.98e-6;
  constexpr double dp_hi = 5e5, gap_hi = 1.27e-6;
  const double t = std::clamp((pressure_gradient - dp_lo) / (dp_hi - dp_lo), 0.0, 1.0);
  return gap_lo + t * (gap_hi - gap_lo);
}

double geometric_robot_volume(const ScenarioConfig& cfg) {
  const double r = cfg.geometry.vessel_radius;
  const double s = cfg.robot.size;
  return std::numbers::pi * (r * r - (r - s) * (r - s)) * s / cfg.robot.per_ring;
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  if (name == "low_demand") {
    cfg.fluid.pressure_gradient = 1e5;
    cfg.tissue.max_power = 4e3;
  } else if (name == "high_demand") {
    cfg.fluid.pressure_gradient = 5e5;
    cfg.tissue.max_power = 6e4;
  } else {
    throw ScenarioError("preset", "preset: unknown name '" + std::string(name) + "'");
  }
  cfg.name = std::string(name);
  cfg.oxygen.inlet_concentration = 7e22;
  validate(cfg);
  return cfg;
}

std::vector<std::string> preset_names() { return {"low_demand", "high_demand"}; }

void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "name") {
    cfg.name = std::string(trim(value));
    return;
  }
  Setter s{key, value};
  visit_fields(cfg, s);
  if (!s.found) throw ScenarioError(std::string(key), "unknown key '" + std::string(key) + "'");
}

ScenarioConfig load_scenario(std::string_view text) {
  struct Line {
    std::string key, value;
    int number;
  };
  std::vector<Line> lines;
  std::string base = "low_demand";
  std::set<std::string> seen;
  int number = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++number;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ScenarioError("", "line " + std::to_string(number) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ScenarioError("", "line " + std::to_string(number) + ": empty key");
    if (!seen.insert(key).second) throw ScenarioError(key, "duplicate key '" + key + "'");
    if (key == "preset") {
      base = value;
    } else {
      lines.push_back({std::move(key), std::move(value), number});
    }
  }
  ScenarioConfig cfg = preset(base);
  // Gaps resolved for the preset's gradient are re-derived after overrides.
  cfg.rbc.inlet_gap = 0;
  cfg.rbc.narrow_gap = 0;
  for (const auto& l : lines) set_value(cfg, l.key, l.value);
  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("", "cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return load_scenario(ss.str());
}

std::string to_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "# capow scenario\n";
  os << "name = " << cfg.name << '\n';
  visit_fields(cfg, Writer{os});
  return os.str();
}

void validate(ScenarioConfig& cfg) {
  const auto& g = cfg.geometry;
  require_positive("geometry.vessel_radius", g.vessel_radius);
  require_positive("geometry.tissue_radius", g.tissue_radius);
  require_positive("geometry.vessel_length", g.vessel_length);
  if (!(g.vessel_radius < g.tissue_radius)) {
    fail("geometry.tissue_radius", "must exceed geometry.vessel_radius", g.tissue_radius);
  }

  const auto& f = cfg.fluid;
  require_non_negative("flow.pressure_gradient", f.pressure_gradient);
  if (!(f.hematocrit > 0 && f.hematocrit < 1)) {
    fail("blood.hematocrit", "hematocrit must be in (0,1)", f.hematocrit);
  }
  require_positive("fluid.density", f.density);
  require_positive("fluid.viscosity", f.viscosity);
  require_positive("fluid.heat_capacity", f.heat_capacity);
  require_positive("fluid.thermal_conductivity", f.thermal_conductivity);
  require_positive("fluid.ambient_temperature", f.ambient_temperature);

  require_positive("oxygen.diffusivity", cfg.oxygen.diffusivity);
  require_positive("oxygen.inlet_concentration", cfg.oxygen.inlet_concentration);
  require_positive("oxygen.henry", cfg.oxygen.henry);
  require_non_negative("oxygen.robot_diffusivity", cfg.oxygen.robot_diffusivity);
  require_non_negative("oxygen.core_diffusivity", cfg.oxygen.core_diffusivity);

  require_positive("rbc.p_half", cfg.rbc.p_half);
  require_positive("rbc.hill_n", cfg.rbc.hill_n);
  require_positive("rbc.unload_time", cfg.rbc.unload_time);
  require_positive("rbc.c_max", cfg.rbc.c_max);
  require_positive("rbc.heme_diffusivity", cfg.rbc.heme_diffusivity);
  require_non_negative("rbc.inlet_gap", cfg.rbc.inlet_gap);
  require_non_negative("rbc.narrow_gap", cfg.rbc.narrow_gap);

  require_non_negative("tissue.max_power", cfg.tissue.max_power);
  require_positive("tissue.k_half", cfg.tissue.k_half);
  require_positive("tissue.reaction_energy", cfg.tissue.reaction_energy);

  auto& r = cfg.robot;
  require_positive("robot.size", r.size);
  if (r.per_ring < 1) fail("robot.per_ring", "must be at least 1", r.per_ring);
  if (r.rings < 0) fail("robot.rings", "must be non-negative", r.rings);
  require_positive("robot.volume", r.volume);
  require_positive("robot.site_density", r.site_density);
  require_positive("robot.site_rate", r.site_rate);
  require_positive("robot.k_half", r.k_half);
  require_non_negative("robot.uniform_flux", r.uniform_flux);
  require_non_negative("robot.pump_energy", r.pump_energy);
  if (!(r.shell_fraction >= 0 && r.shell_fraction <= 1)) {
    fail("robot.shell_fraction", "must be in [0,1]", r.shell_fraction);
  }
  if (!r.pumps && r.pump_mode != PumpMode::full_absorb) {
    throw ScenarioError("robot.pump_mode", "robot.pump_mode requires robot.pumps = true");
  }
  if (!(r.size < g.vessel_radius)) fail("robot.size", "must be below geometry.vessel_radius", r.size);
  if (r.rings * r.size > g.vessel_length) {
    fail("robot.rings", "times robot.size exceeds geometry.vessel_length", r.rings);
  }
  const double vgeo = geometric_robot_volume(cfg);
  if (std::abs(r.volume - vgeo) > 0.01 * vgeo) {
    fail("robot.volume", "must match the annular segment volume " + format_double(vgeo) + " within 1%",
         r.volume);
  }
  if (!r.ring_starts.empty()) {
    if (static_cast<int>(r.ring_starts.size()) != r.rings) {
      fail("robot.ring_starts", "must list one start per ring", static_cast<double>(r.ring_starts.size()));
    }
    std::vector<double> s = r.ring_starts;
    std::sort(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] + r.size > g.vessel_length) {
        fail("robot.ring_starts", "ring must lie inside the vessel", s[i]);
      }
      if (i > 0 && s[i] < s[i - 1] + r.size * (1 - 1e-9)) {
        fail("robot.ring_starts", "rings overlap", s[i]);
      }
    }
  }

  if (cfg.rbc.inlet_gap == 0) cfg.rbc.inlet_gap = interpolated_inlet_gap(f.pressure_gradient);
  if (cfg.rbc.narrow_gap == 0) {
    cfg.rbc.narrow_gap = cfg.rbc.inlet_gap * (g.vessel_radius - r.size) / g.vessel_radius;
  }
  if (!(cfg.rbc.inlet_gap < g.vessel_radius - (r.rings > 0 ? r.size : 0.0))) {
    fail("rbc.inlet_gap", "leaves no cell core beside the robots", cfg.rbc.inlet_gap);
  }

  const auto& s = cfg.solver;
  if (!(s.relaxation > 0 && s.relaxation <= 1)) fail("solver.relaxation", "must be in (0,1]", s.relaxation);
  require_positive("solver.tolerance", s.tolerance);
  if (s.max_iterations < 1) fail("solver.max_iterations", "must be at least 1", s.max_iterations);

  const auto& m = cfg.mesh;
  if (m.refine < 1) fail("mesh.refine", "must be at least 1", m.refine);
  require_non_negative("mesh.face_spacing", m.face_spacing);
  require_non_negative("mesh.normal_spacing", m.normal_spacing);
  require_positive("mesh.lumen_spacing", m.lumen_spacing);
  require_positive("mesh.axial_spacing", m.axial_spacing);
  require_positive("mesh.wall_spacing", m.wall_spacing);
  require_positive("mesh.tissue_spacing", m.tissue_spacing);
  if (!(m.growth > 1 && m.growth < 2)) fail("mesh.growth", "must be in (1,2)", m.growth);
  if (m.max_cells < 1) fail("mesh.max_cells", "must be positive", m.max_cells);
  if (m.saturation_points < 2) fail("mesh.saturation_points", "must be at least 2", m.saturation_points);
}

DerivedParams derived_quantities(const ScenarioConfig& cfg) {
  DerivedParams d;
  const double R = cfg.geometry.vessel_radius;
  d.mean_speed = cfg.fluid.pressure_gradient * R * R / (8 * cfg.fluid.viscosity);
  d.sites_per_robot = cfg.robot.site_density * cfg.robot.volume;
  d.site_power = cfg.tissue.reaction_energy * cfg.robot.site_rate;
  d.max_robot_power = d.sites_per_robot * d.site_power;
  d.max_robot_uptake = 6 * d.sites_per_robot * cfg.robot.site_rate;
  d.linear_rate = 6 * cfg.robot.site_density * cfg.robot.site_rate / cfg.robot.k_half;
  d.penetration_length = std::sqrt(cfg.oxygen.diffusivity / d.linear_rate);
  d.sphere_radius = std::cbrt(3 * cfg.robot.volume / (4 * std::numbers::pi));
  d.inlet_pressure_ratio = partial_pressure_ratio(cfg.oxygen.inlet_concentration, cfg);
  d.inlet_saturation = hill_equilibrium(d.inlet_pressure_ratio, cfg.rbc.hill_n);
  d.reynolds = cfg.fluid.density * d.mean_speed * R / cfg.fluid.viscosity;
  return d;
}

}  // namespace capow
