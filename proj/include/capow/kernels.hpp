// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace capow::kernels {

enum class Isa { scalar, avx2 };

/// Instruction set used by the dispatched entry points. AVX2+FMA is chosen
/// when the CPU supports it unless CAPOW_FORCE_SCALAR is set.
Isa active_isa();
const char* isa_name(Isa isa);

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
/// x = (1 - w) x + w y
void relax(double* x, const double* y, double w, std::size_t n);
/// out = rate / (k + max(c, 0)): Picard coefficient of a saturating sink.
void saturating_coefficient(const double* c, double rate, double k, double* out, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
void relax(double* x, const double* y, double w, std::size_t n);
void saturating_coefficient(const double* c, double rate, double k, double* out, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool available();
double dot(const double* a, const double* b, std::size_t n);
double max_abs_diff(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
void relax(double* x, const double* y, double w, std::size_t n);
void saturating_coefficient(const double* c, double rate, double k, double* out, std::size_t n);
}  // namespace avx2

}  // namespace capow::kernels
