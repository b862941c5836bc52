// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include "capow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace capow::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs(const double* a, std::size_t n) {
  double m = 0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

void relax(double* x, const double* y, double w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] += w * (y[i] - x[i]);
}

void saturating_coefficient(const double* c, double rate, double k, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = rate / (k + std::max(c[i], 0.0));
}

}  // namespace scalar

namespace {

Isa detect() {
  if (const char* env = std::getenv("CAPOW_FORCE_SCALAR"); env && *env && *env != '0') {
    return Isa::scalar;
  }
  return avx2::available() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::max_abs_diff(a, b, n) : scalar::max_abs_diff(a, b, n);
}

double max_abs(const double* a, std::size_t n) {
  return active_isa() == Isa::avx2 ? avx2::max_abs(a, n) : scalar::max_abs(a, n);
}

void relax(double* x, const double* y, double w, std::size_t n) {
  if (active_isa() == Isa::avx2) {
    avx2::relax(x, y, w, n);
  } else {
    scalar::relax(x, y, w, n);
  }
}

void saturating_coefficient(const double* c, double rate, double k, double* out, std::size_t n) {
  if (active_isa() == Isa::avx2) {
    avx2::saturating_coefficient(c, rate, k, out, n);
  } else {
    scalar::saturating_coefficient(c, rate, k, out, n);
  }
}

}  // namespace capow::kernels
