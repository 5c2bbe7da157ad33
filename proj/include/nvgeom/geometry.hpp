// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file geometry.hpp
/// Sample volumes above the diamond surface.
///
/// Every shape stores absolute lengths in the same unit as SensorFrame::d_nv
/// and is validated against the frame it is used with. A shape is anything
/// modelling SampleRegion: exact volume, membership, and a uniform sampler
/// that draws from an explicit RngStream.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/rng.hpp"
#include "nvgeom/vec3.hpp"

namespace nvgeom {

template <class S>
concept SampleRegion = requires(const S& s, const Vec3& p, const SensorFrame& f, RngStream& rng) {
  { s.validate(f) } -> std::same_as<void>;
  { s.volume(f) } -> std::convertible_to<double>;
  { s.contains(p, f) } -> std::convertible_to<bool>;
  { s.sample(rng, f) } -> std::convertible_to<Vec3>;
};

/// Draws per point before a rejection sampler gives up.
inline constexpr std::uint64_t kMaxRejectionDraws = 1'000'000;

namespace detail {

constexpr double kPi = std::numbers::pi;

inline void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw DomainError(std::string(what) + " must be positive, got " + std::to_string(v));
  }
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

// Uniform point in the box [lo, hi) filtered by `accept`.
template <class Accept>
Vec3 rejection_sample(RngStream& rng, const Vec3& lo, const Vec3& hi, Accept&& accept,
                      const char* shape) {
  for (std::uint64_t i = 0; i < kMaxRejectionDraws; ++i) {
    const Vec3 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
    if (accept(p)) return p;
  }
  throw SamplingError(std::string("rejection sampler for ") + shape + " exceeded " +
                      std::to_string(kMaxRejectionDraws) + " draws");
}

// Uniform point in a disk of radius R around (cx, 0).
inline std::pair<double, double> sample_disk(RngStream& rng, double R, double cx) {
  const double rho = R * std::sqrt(rng.uniform());
  const double phi = 2.0 * kPi * rng.uniform();
  return {cx + rho * std::cos(phi), rho * std::sin(phi)};
}

}  // namespace detail

/// Sphere of radius R about the NV, truncated to z > d_nv (the planar-chip
/// baseline). Sampled by rejection from [-a, a]^2 x [d, R], a = sqrt(R^2 - d^2);
/// acceptance = volume / box volume, about 0.52 for R >> d and 0.39 for R = 2 d.
struct SphericalCap {
  double R = 0.0;

  void validate(const SensorFrame& f) const {
    detail::require_positive(R, "cap radius");
    if (!(R > f.d_nv())) throw DomainError("cap radius must exceed d_nv");
  }

  double volume(const SensorFrame& f) const {
    const double d = f.d_nv();
    return detail::kPi / 3.0 * (2.0 * R * R * R - 3.0 * d * R * R + d * d * d);
  }

  bool contains(const Vec3& p, const SensorFrame& f) const {
    return p.z > f.d_nv() && norm2(p) < R * R;
  }

  double bounding_box_volume(const SensorFrame& f) const {
    const double d = f.d_nv();
    return 4.0 * (R * R - d * d) * (R - d);
  }

  double expected_acceptance(const SensorFrame& f) const {
    return volume(f) / bounding_box_volume(f);
  }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double d = f.d_nv();
    const double a = std::sqrt(R * R - d * d);
    const double R2 = R * R;
    return detail::rejection_sample(
        rng, {-a, -a, d}, {a, a, R}, [R2](const Vec3& p) { return norm2(p) < R2; },
        "spherical cap");
  }
};

/// Cone with apex at the NV, axis +z, half-angle theta_max, spherical radial
/// bounds d <= r <= R. With clip_to_surface (the default) the region is also
/// cut at z > d so nothing lies inside the diamond; without it the pure
/// spherical-bounds segment is used and dips below the surface near the apex.
///
/// Rejection from [-R sin t, R sin t]^2 x [z_lo, R] where z_lo = d (clipped)
/// or d cos t. For t = 45 deg and R >> d the acceptance is about 0.31.
struct Cone {
  double R = 0.0;
  double theta_max = 0.0;
  bool clip_to_surface = true;

  void validate(const SensorFrame& f) const {
    detail::require_positive(R, "cone radius");
    if (!std::isfinite(theta_max) || theta_max <= 0.0 || theta_max >= detail::kPi / 2) {
      throw DomainError("cone half-angle must lie in (0, pi/2)");
    }
    if (!(R > f.d_nv() / std::cos(theta_max))) {
      throw DomainError("cone radius must exceed d_nv / cos(theta_max)");
    }
  }

  double volume(const SensorFrame& f) const {
    const double d = f.d_nv();
    const double c = std::cos(theta_max);
    if (clip_to_surface) {
      // spherical sector minus the flat-topped apex cone below z = d
      const double t = std::tan(theta_max);
      return 2.0 * detail::kPi / 3.0 * (1.0 - c) * R * R * R - detail::kPi / 3.0 * d * d * d * t * t;
    }
    return 2.0 * detail::kPi / 3.0 * (1.0 - c) * (R * R * R - d * d * d);
  }

  bool contains(const Vec3& p, const SensorFrame& f) const {
    const double r2 = norm2(p);
    const double d = f.d_nv();
    if (!(r2 < R * R) || p.z <= 0.0) return false;
    if (p.z * p.z <= r2 * cos2()) return false;  // outside the half-angle
    return clip_to_surface ? p.z > d : r2 > d * d;
  }

  double bounding_box_volume(const SensorFrame& f) const {
    const double s = std::sin(theta_max);
    return 4.0 * R * R * s * s * (R - z_lo(f));
  }

  double expected_acceptance(const SensorFrame& f) const {
    return volume(f) / bounding_box_volume(f);
  }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double h = R * std::sin(theta_max);
    return detail::rejection_sample(
        rng, {-h, -h, z_lo(f)}, {h, h, R}, [&](const Vec3& p) { return contains(p, f); }, "cone");
  }

 private:
  double cos2() const {
    const double c = std::cos(theta_max);
    return c * c;
  }
  double z_lo(const SensorFrame& f) const {
    return clip_to_surface ? f.d_nv() : f.d_nv() * std::cos(theta_max);
  }
};

/// Full sphere resting on the surface: center (lateral_offset, 0, d + radius).
/// Sampled directly (cube-root radius, uniform direction).
struct Sphere {
  double radius = 0.0;
  double lateral_offset = 0.0;

  void validate(const SensorFrame&) const {
    detail::require_positive(radius, "sphere radius");
    detail::require_finite(lateral_offset, "sphere lateral offset");
  }

  Vec3 center(const SensorFrame& f) const { return {lateral_offset, 0.0, f.d_nv() + radius}; }

  double volume(const SensorFrame&) const {
    return 4.0 / 3.0 * detail::kPi * radius * radius * radius;
  }

  bool contains(const Vec3& p, const SensorFrame& f) const {
    return norm2(p - center(f)) < radius * radius;
  }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double r = radius * std::cbrt(rng.uniform());
    const double cos_t = 2.0 * rng.uniform() - 1.0;
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    const double phi = 2.0 * detail::kPi * rng.uniform();
    return center(f) + Vec3{r * sin_t * std::cos(phi), r * sin_t * std::sin(phi), r * cos_t};
  }
};

/// Upright cylinder standing on the surface, base centered at (lateral_offset, 0, d).
struct Cylinder {
  double R = 0.0;
  double H = 0.0;
  double lateral_offset = 0.0;

  /// Cylinder of radius R and fixed volume V: H = V / (pi R^2).
  static Cylinder with_volume(double R, double V, double lateral_offset = 0.0) {
    detail::require_positive(R, "cylinder radius");
    detail::require_positive(V, "cylinder volume");
    return {R, V / (detail::kPi * R * R), lateral_offset};
  }

  void validate(const SensorFrame&) const {
    detail::require_positive(R, "cylinder radius");
    detail::require_positive(H, "cylinder height");
    detail::require_finite(lateral_offset, "cylinder lateral offset");
  }

  double volume(const SensorFrame&) const { return detail::kPi * R * R * H; }

  bool contains(const Vec3& p, const SensorFrame& f) const {
    const double dx = p.x - lateral_offset;
    return p.z > f.d_nv() && p.z < f.d_nv() + H && dx * dx + p.y * p.y < R * R;
  }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const auto [x, y] = detail::sample_disk(rng, R, lateral_offset);
    return {x, y, f.d_nv() + H * rng.uniform()};
  }
};

/// Thin disk of polarized spins on the surface, centered above the NV.
/// The surface plane itself counts as inside.
struct Sheet {
  double R = 0.0;
  double thickness = 0.1;

  void validate(const SensorFrame&) const {
    detail::require_positive(R, "sheet radius");
    detail::require_positive(thickness, "sheet thickness");
  }

  double volume(const SensorFrame&) const { return detail::kPi * R * R * thickness; }

  bool contains(const Vec3& p, const SensorFrame& f) const {
    return p.z >= f.d_nv() && p.z < f.d_nv() + thickness && p.x * p.x + p.y * p.y < R * R;
  }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const auto [x, y] = detail::sample_disk(rng, R, 0.0);
    return {x, y, f.d_nv() + thickness * rng.uniform()};
  }
};

static_assert(SampleRegion<SphericalCap>);
static_assert(SampleRegion<Cone>);
static_assert(SampleRegion<Sphere>);
static_assert(SampleRegion<Cylinder>);
static_assert(SampleRegion<Sheet>);

/// Any of the five sample geometries.
class SampleShape {
 public:
  using Variant = std::variant<SphericalCap, Cone, Sphere, Cylinder, Sheet>;

  template <class S>
    requires std::is_constructible_v<Variant, S>
  SampleShape(S shape) : shape_(std::move(shape)) {}  // NOLINT: implicit by design of the sum type

  const Variant& variant() const { return shape_; }

  template <class S>
  const S* get_if() const {
    return std::get_if<S>(&shape_);
  }

  /// "cap", "cone", "sphere", "cylinder" or "sheet".
  std::string_view kind() const {
    static constexpr std::string_view names[] = {"cap", "cone", "sphere", "cylinder", "sheet"};
    return names[shape_.index()];
  }

  void validate(const SensorFrame& f) const {
    std::visit([&](const auto& s) { s.validate(f); }, shape_);
  }
  double volume(const SensorFrame& f) const {
    return std::visit([&](const auto& s) { return s.volume(f); }, shape_);
  }
  bool contains(const Vec3& p, const SensorFrame& f) const {
    return std::visit([&](const auto& s) { return s.contains(p, f); }, shape_);
  }
  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    return std::visit([&](const auto& s) { return s.sample(rng, f); }, shape_);
  }

 private:
  Variant shape_;
};

static_assert(SampleRegion<SampleShape>);

template <SampleRegion S>
double volume(const S& shape, const SensorFrame& frame) {
  shape.validate(frame);
  return shape.volume(frame);
}

template <SampleRegion S>
bool contains(const S& shape, const Vec3& p, const SensorFrame& frame) {
  return shape.contains(p, frame);
}

template <SampleRegion S>
Vec3 sample_uniform(const S& shape, RngStream& rng, const SensorFrame& frame) {
  return shape.sample(rng, frame);
}

}  // namespace nvgeom
