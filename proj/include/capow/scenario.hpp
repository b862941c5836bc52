// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace capow {

/// Error raised while parsing or validating a scenario. Carries the offending
/// key so callers can report it without string matching.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class PumpMode { full_absorb, uniform_flux, duty_cycle };

/// Which half of the ringset absorbs in a duty-cycle state. Ring 1 is odd.
enum class DutyPhase { odd_active, even_active };

struct GeometryParams {
  double vessel_radius = 4e-6;
  double tissue_radius = 4e-5;
  double vessel_length = 1e-4;
};

struct FluidParams {
  double pressure_gradient = 1e5;  // Pa/m
  double hematocrit = 0.25;
  double density = 1e3;
  double viscosity = 1e-3;
  double heat_capacity = 4200.0;
  double thermal_conductivity = 0.6;
  double ambient_temperature = 310.0;
};

struct OxygenParams {
  double diffusivity = 2e-9;
  double inlet_concentration = 7e22;  // molecule/m^3
  double henry = 1.6e-19;             // Pa per (molecule/m^3)
  // Free O2 diffusivity inside robots and inside the cell-carrying core.
  // Zero means "same as plasma".
  double robot_diffusivity = 0.0;
  double core_diffusivity = 0.0;
};

struct RbcParams {
  double p_half = 3500.0;
  double hill_n = 2.7;
  double unload_time = 0.076;
  double c_max = 1e25;
  double heme_diffusivity = 1.4e-11;
  // Cell-free gap at the inlet. Zero means interpolate from the pressure
  // gradient between the two tabulated gap/speed points.
  double inlet_gap = 0.0;
  // Reference gap for a vessel of radius R - robot size, used only as a
  // diagnostic against the traced streamline. Zero means scale inlet_gap
  // by the radius ratio.
  double narrow_gap = 0.0;
};

struct TissueParams {
  double max_power = 4000.0;  // W/m^3
  double k_half = 1e21;
  double reaction_energy = 4e-18;  // J per glucose oxidation
};

struct RobotParams {
  double size = 1e-6;
  int per_ring = 20;
  int rings = 10;
  double volume = 1.1e-18;
  double site_density = 3e21;
  double site_rate = 1e6;
  double k_half = 1e24;
  bool pumps = true;
  PumpMode pump_mode = PumpMode::full_absorb;
  double uniform_flux = 0.0;  // molecule/m^2/s, for PumpMode::uniform_flux
  DutyPhase duty_phase = DutyPhase::odd_active;
  double shell_fraction = 0.0;  // 0 = sites spread through the volume
  double pump_energy = 1e-20;   // J per pumped molecule
  // Upstream edge of each ring. Empty means adjacent rings centred at L/2.
  std::vector<double> ring_starts;
};

struct SolverParams {
  double relaxation = 0.5;
  double tolerance = 1e-6;
  int max_iterations = 200;
};

struct MeshParams {
  int refine = 1;             // divides every spacing below
  double face_spacing = 0.0;  // tangential spacing along robot faces; 0 = auto
  double normal_spacing = 0.0;  // first spacing off robot faces; 0 = auto
  double lumen_spacing = 0.2e-6;
  double axial_spacing = 1.0e-6;
  double wall_spacing = 0.05e-6;
  double tissue_spacing = 2.0e-6;
  double growth = 1.15;
  int max_cells = 600000;
  int saturation_points = 900;
};

/// Every physical and numerical parameter of a run, in SI units with
/// concentrations in molecule/m^3. Immutable once validated.
struct ScenarioConfig {
  std::string name = "low_demand";
  GeometryParams geometry;
  FluidParams fluid;
  OxygenParams oxygen;
  RbcParams rbc;
  TissueParams tissue;
  RobotParams robot;
  SolverParams solver;
  MeshParams mesh;

  double robot_diffusivity() const {
    return oxygen.robot_diffusivity > 0 ? oxygen.robot_diffusivity : oxygen.diffusivity;
  }
  double core_diffusivity() const {
    return oxygen.core_diffusivity > 0 ? oxygen.core_diffusivity : oxygen.diffusivity;
  }
};

/// Named scenario presets: "low_demand" (basal tissue rate, slow flow) and
/// "high_demand". Throws ScenarioError for unknown names.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Parse `key = value` text. A `preset = <name>` line selects the base; all
/// other keys override it. Unknown keys are errors. The result is validated.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::string& path);

/// Apply one `key = value` override to an existing config (no validation).
void set_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Serialise every field with round-trip precision.
std::string to_text(const ScenarioConfig& cfg);

/// Fill in auto defaults (gap interpolation, mesh spacings) and check every
/// invariant; throws ScenarioError naming the key.
void validate(ScenarioConfig& cfg);

/// Cell-free gap interpolated linearly in pressure gradient between the two
/// tabulated points (clamped outside them).
double interpolated_inlet_gap(double pressure_gradient);

/// Geometric volume of one robot: its share of the wall annulus.
double geometric_robot_volume(const ScenarioConfig& cfg);

struct DerivedParams {
  double mean_speed = 0;          // Poiseuille mean speed, m/s
  double sites_per_robot = 0;     // N
  double site_power = 0;          // e*r, W
  double max_robot_power = 0;     // N*r*e, W
  double max_robot_uptake = 0;    // 6*N*r, molecule/s
  double linear_rate = 0;         // gamma, 1/s
  double penetration_length = 0;  // mu, m
  double sphere_radius = 0;       // radius of the sphere with the robot volume
  double inlet_pressure_ratio = 0;
  double inlet_saturation = 0;
  double reynolds = 0;
};

DerivedParams derived_quantities(const ScenarioConfig& cfg);

}  // namespace capow
