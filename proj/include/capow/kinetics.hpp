// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "capow/scenario.hpp"

namespace capow {

/// Saturation is clamped into this open interval before any kinetics
/// evaluation; the unloading function diverges at S = 1.
inline constexpr double kSaturationFloor = 1e-9;
inline constexpr double kSaturationCeil = 1.0 - 1e-9;

double clamp_saturation(double s);

/// Hill equilibrium S_eq = a^n / (1 + a^n).
double hill_equilibrium(double a, double n);

/// Inverse of hill_equilibrium: the pressure ratio in equilibrium with S.
double equilibrium_pressure_ratio(double s, double n);

/// a = H_O2 * C / P_half.
double partial_pressure_ratio(double concentration, const ScenarioConfig& cfg);

/// Unloading function s(a, S) in its textbook form. Loses precision near
/// equilibrium; kinetic rates use the factored form below.
double unloading_function(double a, double s, double n);

/// Factored kinetics around the equilibrium ratio a* of the given S.
/// With x = a/a*, the textbook s(a,S) equals amplitude * x_poly where
/// x_poly = x^(n+1) - (n+1) x + n >= 0 and amplitude = 2(1-S)/(n+1) a*^(n+1).
struct UnloadingTerms {
  double a_star = 0;     // equilibrium pressure ratio of S
  double amplitude = 0;  // 2(1-S)/(n+1) * a*^(n+1)
  double poly = 0;       // x^(n+1) - (n+1) x + n, evaluated stably
  double curvature = 0;  // poly / (x - 1)^2, finite at x = 1
  double value() const { return amplitude * poly; }
};

UnloadingTerms unloading_terms(double a, double s, double n);

/// dS/dt with the stability sign rule: negative (unloading) when the plasma
/// is below cell equilibrium, positive (loading) above it.
double unloading_rate(double a, double s, const ScenarioConfig& cfg);

/// Linear release coefficient k >= 0 such that the oxygen release density is
/// k * (C_eq(S) - C), where C_eq(S) is the plasma concentration in
/// equilibrium with S. Equals h * C_max * |dS/dt| / |C_eq - C| and stays
/// finite at equilibrium.
double release_coefficient(double concentration, double s, double core_hematocrit,
                           const ScenarioConfig& cfg);

/// Plasma concentration in equilibrium with saturation S.
double equilibrium_concentration(double s, const ScenarioConfig& cfg);

}  // namespace capow
