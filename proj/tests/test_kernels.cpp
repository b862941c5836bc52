// Copyright 2026 The capillary-power authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "capow/kernels.hpp"
#include "doctest.h"

namespace k = capow::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
  const std::vector<double> a = {1, -2, 3, -4, 5};
  const std::vector<double> b = {2, 2, 2, 2, 2};
  CHECK(k::scalar::dot(a.data(), b.data(), 5) == 6);
  CHECK(k::scalar::max_abs(a.data(), 5) == 5);
  CHECK(k::scalar::max_abs_diff(a.data(), b.data(), 5) == 6);
  std::vector<double> x = a;
  k::scalar::relax(x.data(), b.data(), 0.25, 5);
  for (int i = 0; i < 5; ++i) CHECK(x[i] == doctest::Approx(0.75 * a[i] + 0.5));
  std::vector<double> out(5);
  k::scalar::saturating_coefficient(a.data(), 3.0, 1.0, out.data(), 5);
  CHECK(out[0] == doctest::Approx(1.5));
  CHECK(out[1] == doctest::Approx(3.0));  // negative concentrations count as zero
}

TEST_CASE("avx2 kernels match scalar kernels") {
  if (!k::avx2::available()) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  std::mt19937_64 rng(7);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 1000, 1003}) {
    CAPTURE(n);
    const auto a = random_vector(rng, n, -1e22, 1e22);
    const auto b = random_vector(rng, n, -1e22, 1e22);
    const double ds = k::scalar::dot(a.data(), b.data(), n);
    const double dv = k::avx2::dot(a.data(), b.data(), n);
    double mag = 0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
    CHECK(std::abs(ds - dv) <= 1e-14 * mag);
    CHECK(k::avx2::max_abs(a.data(), n) == k::scalar::max_abs(a.data(), n));
    CHECK(k::avx2::max_abs_diff(a.data(), b.data(), n) == k::scalar::max_abs_diff(a.data(), b.data(), n));

    auto xs = a, xv = a;
    k::scalar::relax(xs.data(), b.data(), 0.3, n);
    k::avx2::relax(xv.data(), b.data(), 0.3, n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(xv[i] - xs[i]) <= 1e-15 * std::max(std::abs(a[i]), std::abs(b[i])));
    }

    std::vector<double> os(n), ov(n);
    k::scalar::saturating_coefficient(a.data(), 2.5, 1e21, os.data(), n);
    k::avx2::saturating_coefficient(a.data(), 2.5, 1e21, ov.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ov[i] == os[i]);
  }
}

TEST_CASE("dispatch reports a known instruction set") {
  const auto isa = k::active_isa();
  CHECK((isa == k::Isa::scalar || isa == k::Isa::avx2));
  if (isa == k::Isa::avx2) CHECK(k::avx2::available());
  CHECK(std::string(k::isa_name(isa)).size() > 0);
}
