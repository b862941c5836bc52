// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

// Patankar power-law face coefficients shared by the oxygen and heat solvers.

#pragma once

#include <algorithm>
#include <cmath>

namespace capow::detail {

inline double power_law(double pe) {
  const double t = 1 - 0.1 * std::abs(pe);
  return t > 0 ? t * t * t * t * t : 0.0;
}

// Flux coefficients across a face with conductance g and volumetric flux f
// (positive from P to E): J = a_pe C_P - a_ep C_E.
struct FaceCoeff {
  double a_pe, a_ep;
};

inline FaceCoeff face_coeff(double g, double f) {
  const double d = g > 0 ? g * power_law(f / g) : 0.0;
  return {d + std::max(f, 0.0), d + std::max(-f, 0.0)};
}

}  // namespace capow::detail
