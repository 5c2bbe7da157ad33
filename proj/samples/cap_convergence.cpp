// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

// Geometry factor of a growing spherical cap at the magic angle, Monte Carlo
// next to the closed form.

#include <cstdio>

#include "nvgeom/nvgeom.hpp"

int main() {
  using namespace nvgeom;
  const SensorFrame frame = SensorFrame(kMagicAngle);
  McConfig cfg;
  cfg.n_sample_points = 200'000;
  cfg.n_repetitions = 8;
  cfg.seed = 1;

  const double radii[] = {2.0, 5.0, 10.0, 20.0};
  const auto points = sweep(
      radii, [&](double R) { return std::pair{SphericalCap{R}, frame}; }, cfg);

  std::printf("%6s %10s %10s %10s\n", "R", "mc", "stderr", "exact");
  for (const auto& p : points) {
    std::printf("%6.1f %10.5f %10.5f %10.5f\n", p.parameter, p.result.g_mean, p.result.g_stderr,
                g_cap(p.parameter, frame));
  }
  std::printf("limit  %10.5f\n", g_infinity(frame));
}
