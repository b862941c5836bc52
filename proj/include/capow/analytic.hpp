// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

// Closed-form and one-dimensional reference models that do not touch the
// axisymmetric solver.

#pragma once

#include <vector>

#include "capow/scenario.hpp"

namespace capow::analytic {

/// Power from a fully absorbing sphere of radius a in still fluid at
/// concentration c: 4 pi D a c molecules/s at e/6 each.
double sphere_absorption_power(double a, double c, const ScenarioConfig& cfg);

/// Fraction of the fully absorbing rate reached by a sphere with linear
/// internal consumption and penetration length mu.
double f_mu(double a, double mu);

struct PumpBenefit {
  double a = 0;           // sphere radius, m
  double gamma = 0;       // linearised consumption rate, 1/s
  double mu = 0;          // penetration length, m
  double f = 0;           // f_mu
  double gain = 0;        // 1 / f
  double capped_gain = 0;  // gain with pumped uptake limited by the site capacity
};

/// Pump benefit for a sphere with the robot volume at ambient concentration c.
PumpBenefit pump_benefit(const ScenarioConfig& cfg, double c);

/// Uptake of a sphere whose sites are all in an outer shell of the given
/// thickness, relative to the same sites spread uniformly. Both cases are
/// solved with the same 200-cell radial finite-volume model.
double shell_benefit(double a, double mu, double shell_thickness);

/// Uptake of a sphere with linear consumption gamma(r) on a radial grid,
/// molecule/s per unit far-field concentration and diffusivity.
/// Exposed for tests; shell_benefit is the ratio of two of these.
double radial_sphere_uptake(double a, double mu_uniform, double shell_thickness, int cells);

/// Thin-shell limit of shell_benefit as a function of a / mu.
double thin_shell_benefit(double a_over_mu);

/// Krogh cylinder: constant consumption 6 P_max / e in R <= r <= R_tissue,
/// no flux at R_tissue, and the well-mixed vessel concentration c_vessel at
/// r = R. Clipped at zero.
double krogh_profile(double r, double c_vessel, const ScenarioConfig& cfg);

/// Distance from the vessel wall where the unclipped Krogh profile reaches
/// zero, or a negative value if it stays positive out to R_tissue.
double krogh_zero_distance(double c_vessel, const ScenarioConfig& cfg);

struct Poiseuille {
  double mean_speed = 0;  // m/s
  double max_speed = 0;
  double flow_rate = 0;   // m^3/s
  double speed(double r) const;
  double radius = 0;
};

Poiseuille poiseuille(const ScenarioConfig& cfg);

}  // namespace capow::analytic
