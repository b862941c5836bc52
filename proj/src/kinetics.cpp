// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/kinetics.hpp"

#include <algorithm>
#include <cmath>

namespace capow {
namespace {

// x^m - m x + (m - 1) = sum_{k>=2} binom(m, k) d^k with d = x - 1. Returns
// the sum divided by d^2, which stays accurate as d -> 0 where the direct
// formula cancels catastrophically.
double poly_over_d2(double x, double m) {
  const double d = x - 1;
  if (std::abs(d) > 0.5) return (std::pow(x, m) - m * x + (m - 1)) / (d * d);
  double term = m * (m - 1) / 2;  // binom(m, 2)
  double sum = term;
  double dk = 1;
  for (int k = 3; k < 200; ++k) {
    term *= (m - (k - 1)) / k;
    dk *= d;
    const double add = term * dk;
    sum += add;
    if (std::abs(add) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace

double clamp_saturation(double s) { return std::clamp(s, kSaturationFloor, kSaturationCeil); }

double hill_equilibrium(double a, double n) {
  if (a <= 0) return 0;
  // a^n / (1 + a^n) written to avoid overflow for large a.
  return 1.0 / (1.0 + std::pow(a, -n));
}

double equilibrium_pressure_ratio(double s, double n) {
  s = clamp_saturation(s);
  return std::pow(s / (1 - s), 1.0 / n);
}

double partial_pressure_ratio(double concentration, const ScenarioConfig& cfg) {
  return cfg.oxygen.henry * std::max(concentration, 0.0) / cfg.rbc.p_half;
}

double unloading_function(double a, double s, double n) {
  s = clamp_saturation(s);
  return 2 * (1 - s) / (n + 1) * std::pow(a, n + 1) - 2 * s * a +
         2 * n / (n + 1) * std::pow(s, 1 + 1 / n) / std::pow(1 - s, 1 / n);
}

UnloadingTerms unloading_terms(double a, double s, double n) {
  s = clamp_saturation(s);
  UnloadingTerms t;
  t.a_star = equilibrium_pressure_ratio(s, n);
  t.amplitude = 2 * (1 - s) / (n + 1) * std::pow(t.a_star, n + 1);
  const double x = std::max(a, 0.0) / t.a_star;
  const double d = x - 1;
  t.curvature = poly_over_d2(x, n + 1);
  t.poly = t.curvature * d * d;
  return t;
}

double unloading_rate(double a, double s, const ScenarioConfig& cfg) {
  const double n = cfg.rbc.hill_n;
  const auto t = unloading_terms(a, s, n);
  const double x = std::max(a, 0.0) / t.a_star;
  // sqrt(amplitude * curvature) * (x - 1) == sign(x - 1) * sqrt(s(a, S)).
  return std::sqrt(std::max(t.amplitude * t.curvature, 0.0)) * (x - 1) / cfg.rbc.unload_time;
}

double equilibrium_concentration(double s, const ScenarioConfig& cfg) {
  return equilibrium_pressure_ratio(s, cfg.rbc.hill_n) * cfg.rbc.p_half / cfg.oxygen.henry;
}

double release_coefficient(double concentration, double s, double core_hematocrit,
                           const ScenarioConfig& cfg) {
  const double n = cfg.rbc.hill_n;
  const auto t = unloading_terms(partial_pressure_ratio(concentration, cfg), s, n);
  const double c_star = equilibrium_concentration(s, cfg);
  // release = -h C_max dS/dt = h C_max / t_u * sqrt(A g) * (1 - x)
  //         = [h C_max sqrt(A g) / (t_u C*)] * (C* - C)
  return core_hematocrit * cfg.rbc.c_max * std::sqrt(std::max(t.amplitude * t.curvature, 0.0)) /
         (cfg.rbc.unload_time * c_star);
}

}  // namespace capow
