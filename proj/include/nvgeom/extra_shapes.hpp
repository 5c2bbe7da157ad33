// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file extra_shapes.hpp
/// Auxiliary regions for property checks of the estimator. They are not
/// physical samples (the shell surrounds the NV inside the diamond) and are
/// not part of SampleShape.

#pragma once

#include <cmath>
#include <numbers>

#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/geometry.hpp"
#include "nvgeom/rng.hpp"

namespace nvgeom {

/// Full spherical shell r_inner < |p| < r_outer around the NV.
struct SphericalShell {
  double r_inner = 1.0;
  double r_outer = 2.0;

  void validate(const SensorFrame&) const {
    if (!(r_inner > 0.0) || !(r_outer > r_inner)) throw DomainError("invalid shell radii");
  }
  double volume(const SensorFrame&) const {
    return 4.0 / 3.0 * std::numbers::pi * (r_outer * r_outer * r_outer - r_inner * r_inner * r_inner);
  }
  bool contains(const Vec3& p, const SensorFrame&) const {
    const double r2 = norm2(p);
    return r2 > r_inner * r_inner && r2 < r_outer * r_outer;
  }
  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double R = r_outer;
    return detail::rejection_sample(
        rng, {-R, -R, -R}, {R, R, R}, [&](const Vec3& p) { return contains(p, f); }, "shell");
  }
};

/// Part of the half-space z > d_nv with r_inner < |p| < r_outer; the
/// difference of two spherical caps.
struct CapShell {
  double r_inner = 2.0;
  double r_outer = 4.0;

  void validate(const SensorFrame& f) const {
    if (!(r_inner > f.d_nv()) || !(r_outer > r_inner)) throw DomainError("invalid cap shell radii");
  }
  double volume(const SensorFrame& f) const {
    return SphericalCap{r_outer}.volume(f) - SphericalCap{r_inner}.volume(f);
  }
  bool contains(const Vec3& p, const SensorFrame& f) const {
    const double r2 = norm2(p);
    return p.z > f.d_nv() && r2 > r_inner * r_inner && r2 < r_outer * r_outer;
  }
  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double a = std::sqrt(r_outer * r_outer - f.d_nv() * f.d_nv());
    return detail::rejection_sample(
        rng, {-a, -a, f.d_nv()}, {a, a, r_outer}, [&](const Vec3& p) { return contains(p, f); },
        "cap shell");
  }
};

/// Union of two disjoint regions; a point comes from `a` with probability
/// V_a / (V_a + V_b). Disjointness is the caller's responsibility.
template <SampleRegion A, SampleRegion B>
struct DisjointUnion {
  A a;
  B b;

  void validate(const SensorFrame& f) const {
    a.validate(f);
    b.validate(f);
  }
  double volume(const SensorFrame& f) const { return a.volume(f) + b.volume(f); }
  bool contains(const Vec3& p, const SensorFrame& f) const {
    return a.contains(p, f) || b.contains(p, f);
  }
  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double va = a.volume(f);
    return rng.uniform() * volume(f) < va ? a.sample(rng, f) : b.sample(rng, f);
  }
};

template <SampleRegion A, SampleRegion B>
DisjointUnion(A, B) -> DisjointUnion<A, B>;

}  // namespace nvgeom
