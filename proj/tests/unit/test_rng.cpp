// Copyright 2026 The sbse Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "sbse/parallel.hpp"
#include "sbse/rng.hpp"

namespace sbse {
namespace {

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t m = 0; m < 4; ++m)
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(m, i));
  EXPECT_EQ(seen.size(), 4000u);
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Rng, UniformRangeAndIndex) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.index(7), 7u);
  }
}

TEST(Rng, StateRoundTripIncludesCachedDeviate) {
  Rng a(99);
  a.normal();  // leaves the second Box-Muller deviate cached
  const std::string st = a.state();
  Rng b(0);
  b.set_state(st);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
  EXPECT_EQ(a.uniform(), b.uniform());
  EXPECT_THROW(b.set_state("garbage"), std::exception);
}

TEST(Rng, ComplexGaussianMoments) {
  ComplexGaussianSampler g(5);
  const int n = 200000;
  double re2 = 0.0, im2 = 0.0, cross = 0.0, mean_re = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = g();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
    mean_re += z.real();
  }
  // Standard errors: var(x^2) = 2 (1/2)^2 = 1/2, so se = sqrt(0.5 / n).
  const double se = std::sqrt(0.5 / n);
  EXPECT_NEAR(re2 / n, 0.5, 4 * se);
  EXPECT_NEAR(im2 / n, 0.5, 4 * se);
  EXPECT_NEAR(cross / n, 0.0, 4 * 0.5 / std::sqrt(n));
  EXPECT_NEAR(mean_re / n, 0.0, 4 * std::sqrt(0.5 / n));
}

TEST(Parallel, RunsEveryIndexOnceAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 5) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace sbse
