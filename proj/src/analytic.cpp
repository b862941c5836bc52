// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace capow::analytic {
namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

double sphere_absorption_power(double a, double c, const ScenarioConfig& cfg) {
  return 4 * kPi * cfg.oxygen.diffusivity * a * c * cfg.tissue.reaction_energy / 6;
}

double f_mu(double a, double mu) {
  const double x = a / mu;
  if (x < 1e-3) return x * x / 3 - 2 * x * x * x * x / 15;
  return 1 - std::tanh(x) / x;
}

PumpBenefit pump_benefit(const ScenarioConfig& cfg, double c) {
  const auto d = derived_quantities(cfg);
  PumpBenefit b;
  b.a = d.sphere_radius;
  b.gamma = d.linear_rate;
  b.mu = d.penetration_length;
  b.f = f_mu(b.a, b.mu);
  b.gain = 1 / b.f;
  const double pumped = sphere_absorption_power(b.a, c, cfg);
  b.capped_gain = std::min(pumped, d.max_robot_power) / (b.f * pumped);
  return b;
}

double radial_sphere_uptake(double a, double mu_uniform, double shell_thickness, int cells) {
  if (!(a > 0) || !(mu_uniform > 0) || !(shell_thickness > 0) || shell_thickness > a) {
    throw std::invalid_argument("radial_sphere_uptake: need 0 < shell_thickness <= a");
  }
  // Unit diffusivity and far-field concentration. Site count is conserved, so
  // gamma in the shell scales with the inverse volume fraction.
  const double inner = a - shell_thickness;
  const double frac = 1 - std::pow(inner / a, 3);
  const double gamma = 1 / (mu_uniform * mu_uniform * frac);

  std::vector<double> nodes;
  if (inner > 0) {
    const int n_core = cells / 2;
    for (int k = 0; k < n_core; ++k) nodes.push_back(inner * k / n_core);
  }
  const int n_shell = inner > 0 ? cells - cells / 2 : cells;
  for (int k = 0; k <= n_shell; ++k) nodes.push_back(inner + shell_thickness * k / n_shell);

  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<double> centre(n), vol(n), rate(n);
  for (int i = 0; i < n; ++i) {
    centre[i] = 0.5 * (nodes[i] + nodes[i + 1]);
    vol[i] = 4 * kPi / 3 * (std::pow(nodes[i + 1], 3) - std::pow(nodes[i], 3));
    rate[i] = nodes[i] >= inner * (1 - 1e-12) ? gamma : 0.0;
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) m(i, i) += rate[i] * vol[i];
  for (int i = 1; i < n; ++i) {
    const double g = 4 * kPi * nodes[i] * nodes[i] / (centre[i] - centre[i - 1]);
    m(i - 1, i - 1) += g;
    m(i, i) += g;
    m(i - 1, i) -= g;
    m(i, i - 1) -= g;
  }
  // Surface half cell in series with the exterior 4 pi a (C_inf - C_a).
  const double g_half = 4 * kPi * a * a / (a - centre[n - 1]);
  const double g_out = 4 * kPi * a;
  const double g = g_half * g_out / (g_half + g_out);
  m(n - 1, n - 1) += g;
  rhs[n - 1] = g;
  const Eigen::VectorXd c = m.partialPivLu().solve(rhs);
  double uptake = 0;
  for (int i = 0; i < n; ++i) uptake += rate[i] * vol[i] * c[i];
  return uptake;
}

double shell_benefit(double a, double mu, double shell_thickness) {
  constexpr int kCells = 200;
  return radial_sphere_uptake(a, mu, shell_thickness, kCells) /
         radial_sphere_uptake(a, mu, a, kCells);
}

double thin_shell_benefit(double a_over_mu) {
  // Surface reaction with rate constant gamma a / 3 against the uniform sphere.
  const double k = a_over_mu * a_over_mu / 3;
  return k / (1 + k) / f_mu(a_over_mu, 1.0);
}

double krogh_profile(double r, double c_vessel, const ScenarioConfig& cfg) {
  const double R = cfg.geometry.vessel_radius;
  const double Rt = cfg.geometry.tissue_radius;
  const double q = 6 * cfg.tissue.max_power / cfg.tissue.reaction_energy;
  const double c = c_vessel + q / (4 * cfg.oxygen.diffusivity) *
                                (r * r - R * R - 2 * Rt * Rt * std::log(r / R));
  return std::max(c, 0.0);
}

double krogh_zero_distance(double c_vessel, const ScenarioConfig& cfg) {
  const double R = cfg.geometry.vessel_radius;
  const double Rt = cfg.geometry.tissue_radius;
  const double q = 6 * cfg.tissue.max_power / cfg.tissue.reaction_energy;
  auto f = [&](double r) {
    return c_vessel + q / (4 * cfg.oxygen.diffusivity) *
                        (r * r - R * R - 2 * Rt * Rt * std::log(r / R));
  };
  // The profile decreases monotonically out to R_tissue.
  if (f(Rt) > 0) return -1;
  double lo = R, hi = Rt;
  for (int k = 0; k < 200 && hi - lo > 1e-12 * Rt; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) - R;
}

double Poiseuille::speed(double r) const {
  return r >= radius ? 0.0 : max_speed * (1 - (r / radius) * (r / radius));
}

Poiseuille poiseuille(const ScenarioConfig& cfg) {
  Poiseuille p;
  p.radius = cfg.geometry.vessel_radius;
  p.max_speed = cfg.fluid.pressure_gradient * p.radius * p.radius / (4 * cfg.fluid.viscosity);
  p.mean_speed = 0.5 * p.max_speed;
  p.flow_rate = p.mean_speed * kPi * p.radius * p.radius;
  return p;
}

}  // namespace capow::analytic
