// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "capow/core_boundary.hpp"
#include "capow/flow.hpp"
#include "capow/mesh.hpp"
#include "capow/scenario.hpp"
#include "capow/transport.hpp"

namespace capow {

/// Mesh, flow and core boundary for one geometry and pressure gradient.
/// Everything downstream of the oxygen field reuses these.
struct ScenarioModel {
  AxiMesh mesh;
  FlowField flow;
  CoreBoundary core;
};

ScenarioModel prepare_model(const ScenarioConfig& cfg);

/// Plasma-facing pump area of each ring, m^2.
std::vector<double> ring_face_area(const AxiMesh& mesh);

/// Powers in W, uptakes in molecule/s. Index 0 is the upstream ring.
struct PowerReport {
  std::vector<double> ring_uptake;
  std::vector<double> ring_power;   // whole ring
  std::vector<double> robot_power;  // one robot of each ring
  std::vector<bool> capped;         // capacity limit reached
  double uptake = 0;
  double aggregate_power = 0;
  double average_robot_power = 0;
  double min_robot_power = 0;
  double pump_power = 0;  // parasitic cost of pumping, all robots
  double balance_residual = 0;  // relative species residual of the solve
};

/// Power from a converged solution: e/6 per oxygen molecule consumed.
/// Throws SolverError if the solution did not converge.
PowerReport power_report(const TransportSolution& sol, const ScenarioConfig& cfg);

struct PowerRun {
  TransportSolution solution;
  PowerReport report;
};

/// Solve for the given ring conditions. Pumping rings whose uptake exceeds
/// the site capacity are switched to the capped uniform flux and re-solved.
PowerRun solve_power(const ScenarioModel& model, const ScenarioConfig& cfg,
                     std::vector<RingCondition> conditions,
                     const TransportSolution* start = nullptr);

struct UniformFluxResult {
  double flux = 0;  // molecule/m^2/s
  PowerRun run;
  int solves = 0;
};

/// Largest uniform pump flux on every ring that keeps the face concentration
/// non-negative, by bisection to relative width 1e-3.
UniformFluxResult uniform_flux_search(const ScenarioModel& model, const ScenarioConfig& cfg,
                                      const TransportSolution* full = nullptr);

/// Counterphased 50% duty cycle: the mean of the two half-active states.
struct DutyCycleResult {
  PowerReport average;
  PowerRun odd_active;
  PowerRun even_active;
};

DutyCycleResult duty_cycle_average(const ScenarioModel& model, const ScenarioConfig& cfg);

/// Dispatch on the configured pump mode. Duty-cycle runs return the odd-active
/// solution with the averaged report.
PowerRun run_design(const ScenarioModel& model, const ScenarioConfig& cfg);

struct RingProfile {
  std::vector<double> robot_power;  // W, index 0 = ring 1
  int max_ring = 0;                 // 1-based
  int interior_min_ring = 0;        // 1-based, 0 for fewer than 3 rings
  bool leading_max = false;
  bool trailing_above_interior_min = false;
};

RingProfile ring_position_profile(const PowerReport& report);

struct BurstEstimate {
  double stored_molecules = 0;  // whole aggregate
  double per_robot_molecules = 0;
  double burst_seconds = 0;     // at the per-robot uptake capacity
  double burst_power = 0;       // W per robot during the burst
  double supply_seconds = 0;    // time to refill the store at the given uptake
};

/// Ideal-gas O2 storage in a fraction of every robot's volume.
BurstEstimate burst_storage_estimate(const ScenarioConfig& cfg, double uptake,
                                     double store_fraction, double pressure_atm, int robots);

}  // namespace capow
