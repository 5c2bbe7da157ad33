// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file core.hpp
/// Coordinate conventions and the dipole-projection kernel.
///
/// The NV center sits at the origin. The diamond surface is the plane
/// z = d_nv with outward normal +z, so every sample lives in z > d_nv.
/// B0 (and the NV axis) lies in the x-z plane at angle gamma from the normal.

#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "nvgeom/errors.hpp"
#include "nvgeom/vec3.hpp"

namespace nvgeom {

/// atan(sqrt(2)): angle between a <111> NV axis and the normal of a <100> face.
inline const double kMagicAngle = std::atan(std::numbers::sqrt2);

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Tolerance for unit-length and orthogonality checks at frame construction.
inline constexpr double kUnitTolerance = 1e-12;

/// NV orientation and depth. Immutable after construction.
///
/// b0_hat = (sin g, 0, cos g). The maximal-signal spin orientation m_max_hat
/// is the unit vector orthogonal to b0_hat in the x-z plane chosen so that the
/// spherical-cap geometry factor is positive: m_max_hat = (-cos g, 0, sin g).
class SensorFrame {
 public:
  /// Throws DomainError unless 0 <= gamma <= pi/2 and d_nv > 0 (both finite).
  explicit SensorFrame(double gamma, double d_nv = 1.0) : gamma_(gamma), d_nv_(d_nv) {
    if (!std::isfinite(gamma) || gamma < 0.0 || gamma > std::numbers::pi / 2) {
      throw DomainError("gamma must lie in [0, pi/2], got " + std::to_string(gamma));
    }
    if (!std::isfinite(d_nv) || d_nv <= 0.0) {
      throw DomainError("d_nv must be positive, got " + std::to_string(d_nv));
    }
    const double s = std::sin(gamma);
    const double c = std::cos(gamma);
    b0_hat_ = {s, 0.0, c};
    m_max_hat_ = {-c, 0.0, s};
  }

  static SensorFrame from_degrees(double gamma_deg, double d_nv = 1.0) {
    return SensorFrame(deg_to_rad(gamma_deg), d_nv);
  }

  double gamma() const { return gamma_; }
  double d_nv() const { return d_nv_; }
  const Vec3& b0_hat() const { return b0_hat_; }
  const Vec3& m_max_hat() const { return m_max_hat_; }

  /// sin(gamma) cos(gamma); every closed-form geometry factor carries it.
  double sin_cos() const { return b0_hat_.x * b0_hat_.z; }

  /// Same orientation, NV depth multiplied by `factor`.
  SensorFrame scaled(double factor) const { return SensorFrame(gamma_, d_nv_ * factor); }

 private:
  double gamma_;
  double d_nv_;
  Vec3 b0_hat_;
  Vec3 m_max_hat_;
};

/// Per-spin contribution to G: 3 (r.b0)(r.m) / r^5, i.e.
/// 3 (rhat.b0)(rhat.m_max) / r^3 with r the vector from the NV to the spin.
/// Throws DomainError if r_vec is the zero vector.
inline double kernel(const Vec3& r_vec, const SensorFrame& frame) {
  const double r2 = norm2(r_vec);
  if (!(r2 > 0.0)) throw DomainError("kernel evaluated at the NV position");
  const double pb = dot(r_vec, frame.b0_hat());
  const double pm = dot(r_vec, frame.m_max_hat());
  return 3.0 * pb * pm / (r2 * r2 * std::sqrt(r2));
}

/// Unchecked kernel for the Monte-Carlo inner loop; the caller guarantees r2 > 0.
inline double kernel_unchecked(const Vec3& r_vec, const Vec3& b0_hat, const Vec3& m_hat) {
  const double r2 = norm2(r_vec);
  return 3.0 * dot(r_vec, b0_hat) * dot(r_vec, m_hat) / (r2 * r2 * std::sqrt(r2));
}

/// Dipole field of an arbitrarily oriented unit moment m_hat, projected on b0:
/// [3 rhat (rhat.m) - m].b0 / r^3. Equals kernel() when m_hat = m_max_hat.
inline double kernel_unreduced(const Vec3& r_vec, const Vec3& m_hat, const SensorFrame& frame) {
  const double r = norm(r_vec);
  if (!(r > 0.0)) throw DomainError("kernel evaluated at the NV position");
  if (std::abs(norm(m_hat) - 1.0) > kUnitTolerance) {
    throw DomainError("m_hat must be a unit vector");
  }
  const Vec3 rhat = r_vec * (1.0 / r);
  const Vec3 field = 3.0 * dot(rhat, m_hat) * rhat - m_hat;
  return dot(field, frame.b0_hat()) / (r * r * r);
}

}  // namespace nvgeom
