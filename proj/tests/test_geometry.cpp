// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include <gtest/gtest.h>

#include "nvgeom/extra_shapes.hpp"
#include "nvgeom/geometry.hpp"

namespace nvgeom {
namespace {

constexpr double kPi = std::numbers::pi;
const SensorFrame kFrame(kMagicAngle);

// 7 degrees of freedom, p = 0.001
constexpr double kChi2Critical7 = 24.32;

int quadrant(double x, double y) { return (x >= 0 ? 0 : 1) + (y >= 0 ? 0 : 2); }

template <class S>
double chi_square(const S& shape, std::function<int(const Vec3&)> cell, const std::array<double, 8>& prob,
                  int n = 200'000) {
  RngStream rng(99);
  std::array<double, 8> counts{};
  for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(cell(shape.sample(rng, kFrame)))] += 1;
  double chi2 = 0;
  for (std::size_t k = 0; k < 8; ++k) {
    const double e = n * prob[k];
    chi2 += (counts[k] - e) * (counts[k] - e) / e;
  }
  return chi2;
}

std::array<double, 8> split(double lower) {
  std::array<double, 8> p{};
  for (int q = 0; q < 4; ++q) {
    p[static_cast<std::size_t>(q)] = lower / 4;
    p[static_cast<std::size_t>(q + 4)] = (1 - lower) / 4;
  }
  return p;
}

// Fraction of points in the box [lo, hi] that `shape` contains, times the box volume.
template <class S>
std::pair<double, double> hit_or_miss(const S& shape, Vec3 lo, Vec3 hi, int n = 400'000) {
  RngStream rng(7);
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y), rng.uniform(lo.z, hi.z)};
    hits += shape.contains(p, kFrame) ? 1 : 0;
  }
  const double box = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  const double f = static_cast<double>(hits) / n;
  return {box * f, box * std::sqrt(f * (1 - f) / n)};
}

TEST(Volume, ClosedForms) {
  EXPECT_NEAR(SphericalCap{2}.volume(kFrame), 5 * kPi / 3, 1e-12);
  EXPECT_NEAR((Sphere{3, 1}.volume(kFrame)), 36 * kPi, 1e-12);
  EXPECT_NEAR((Cylinder{2, 0.5}.volume(kFrame)), 2 * kPi, 1e-12);
  EXPECT_NEAR((Sheet{2, 0.1}.volume(kFrame)), 0.4 * kPi, 1e-12);
  // unclipped cone: spherical sector shell between d and R
  EXPECT_NEAR((Cone{3, kPi / 3, false}.volume(kFrame)), 2 * kPi / 3 * 0.5 * 26, 1e-12);
  const auto cyl = Cylinder::with_volume(0.5, kPi);
  EXPECT_NEAR(cyl.H, 4.0, 1e-12);
}

TEST(Volume, MatchesHitOrMiss) {
  const auto check = [](const auto& shape, Vec3 lo, Vec3 hi) {
    const auto [v, se] = hit_or_miss(shape, lo, hi);
    EXPECT_NEAR(v, shape.volume(kFrame), 5 * se) << "bounding box " << lo.x << ".." << hi.x;
  };
  check(SphericalCap{4}, {-4, -4, 1}, {4, 4, 4});
  check(Cone{5, kPi / 4, true}, {-5, -5, 0}, {5, 5, 5});
  check(Cone{5, kPi / 4, false}, {-5, -5, 0}, {5, 5, 5});
  check(Sphere{2, -1.5}, {-3.5, -2, 1}, {0.5, 2, 5});
  check(Cylinder{1.5, 2, 0.5}, {-1, -1.5, 1}, {2, 1.5, 3});
  check(Sheet{2, 0.1}, {-2, -2, 1}, {2, 2, 1.1});
  check(CapShell{2, 3}, {-3, -3, 1}, {3, 3, 3});
  check(SphericalShell{1, 2}, {-2, -2, -2}, {2, 2, 2});
}

TEST(Sampling, PointsLieInsideTheShape) {
  const auto check = [](const auto& shape) {
    RngStream rng(11);
    for (int i = 0; i < 20'000; ++i) {
      const Vec3 p = shape.sample(rng, kFrame);
      ASSERT_TRUE(shape.contains(p, kFrame)) << p.x << ' ' << p.y << ' ' << p.z;
      ASSERT_GE(p.z, kFrame.d_nv());
    }
  };
  check(SphericalCap{1.5});
  check(SphericalCap{40});
  check(Cone{3, 0.3, true});
  check(Sphere{0.5, 2});
  check(Cylinder{0.3, 5, -1});
  check(Sheet{3, 0.01});
  check(SampleShape{Cone{10, 1.2, true}});
}

TEST(Sampling, UnclippedConeReachesBelowTheSurface) {
  const Cone cone{3, kPi / 3, false};
  RngStream rng(12);
  int below = 0;
  for (int i = 0; i < 20'000; ++i) {
    const Vec3 p = cone.sample(rng, kFrame);
    ASSERT_TRUE(cone.contains(p, kFrame));
    below += p.z < 1.0 ? 1 : 0;
  }
  EXPECT_GT(below, 0);
}

TEST(Sampling, UniformCylinderAndSheet) {
  const Cylinder cyl{1.5, 2, 0.7};
  EXPECT_LT(chi_square(cyl, [&](const Vec3& p) { return quadrant(p.x - 0.7, p.y) + (p.z < 2 ? 0 : 4); }, split(0.5)),
            kChi2Critical7);
  const Sheet sheet{2, 0.1};
  EXPECT_LT(chi_square(sheet, [](const Vec3& p) { return quadrant(p.x, p.y) + (p.z < 1.05 ? 0 : 4); }, split(0.5)),
            kChi2Critical7);
}

TEST(Sampling, UniformSphereOctants) {
  const Sphere s{2, -1};
  const Vec3 c = s.center(kFrame);
  EXPECT_LT(chi_square(s, [&](const Vec3& p) { return quadrant(p.x - c.x, p.y - c.y) + (p.z < c.z ? 0 : 4); },
                       split(0.5)),
            kChi2Critical7);
}

TEST(Sampling, UniformCapSlabs) {
  const double R = 4, d = 1, z0 = 2;
  const double slab = kPi * (R * R * (z0 - d) - (z0 * z0 * z0 - d * d * d) / 3);
  const double lower = slab / SphericalCap{R}.volume(kFrame);
  EXPECT_LT(chi_square(SphericalCap{R}, [&](const Vec3& p) { return quadrant(p.x, p.y) + (p.z < z0 ? 0 : 4); },
                       split(lower)),
            kChi2Critical7);
}

TEST(Sampling, UniformConeShells) {
  const double th = kPi / 4, r0 = 3, d = 1;
  const double t2 = std::tan(th) * std::tan(th);
  const auto clipped_volume = [&](double r) { return 2 * kPi / 3 * (1 - std::cos(th)) * r * r * r - kPi / 3 * d * d * d * t2; };
  const double lower = clipped_volume(r0) / clipped_volume(5);
  EXPECT_LT(chi_square(Cone{5, th, true}, [&](const Vec3& p) { return quadrant(p.x, p.y) + (norm(p) < r0 ? 0 : 4); },
                       split(lower)),
            kChi2Critical7);
}

TEST(Sampling, DeterministicForAKey) {
  RngStream a(5, 1, 2), b(5, 1, 2);
  const SampleShape s = SphericalCap{3};
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = s.sample(a, kFrame);
    const Vec3 q = s.sample(b, kFrame);
    EXPECT_EQ(p.x, q.x);
    EXPECT_EQ(p.y, q.y);
    EXPECT_EQ(p.z, q.z);
  }
}

TEST(Sampling, AcceptanceRatesAreDocumented) {
  EXPECT_NEAR(SphericalCap{2}.expected_acceptance(kFrame), 0.436, 0.01);
  EXPECT_NEAR(SphericalCap{1000}.expected_acceptance(kFrame), kPi / 6, 0.01);
  EXPECT_NEAR((Cone{1000, kPi / 4, true}.expected_acceptance(kFrame)), 0.307, 0.005);
}

TEST(Validation, RejectsDegenerateShapes) {
  EXPECT_THROW(SphericalCap{1}.validate(kFrame), DomainError);
  EXPECT_THROW(SphericalCap{-2}.validate(kFrame), DomainError);
  EXPECT_THROW(volume(SphericalCap{0.5}, kFrame), DomainError);
  EXPECT_THROW((Cone{1.3, kPi / 4, true}.validate(kFrame)), DomainError);
  EXPECT_THROW((Cone{5, kPi / 2, true}.validate(kFrame)), DomainError);
  EXPECT_THROW((Cone{5, 0.0, true}.validate(kFrame)), DomainError);
  EXPECT_THROW((Sphere{0, 0}.validate(kFrame)), DomainError);
  EXPECT_THROW((Sphere{1, std::nan("")}.validate(kFrame)), DomainError);
  EXPECT_THROW((Cylinder{1, -1}.validate(kFrame)), DomainError);
  EXPECT_THROW(Cylinder::with_volume(1, 0), DomainError);
  EXPECT_THROW((Sheet{1, 0}.validate(kFrame)), DomainError);
  EXPECT_THROW((CapShell{3, 2}.validate(kFrame)), DomainError);
}

TEST(Validation, RejectionSamplerGivesUp) {
  RngStream rng(1);
  EXPECT_THROW(detail::rejection_sample(rng, {0, 0, 0}, {1, 1, 1}, [](const Vec3&) { return false; }, "empty"),
               SamplingError);
}

TEST(SampleShape, KindAndForwarding) {
  const SampleShape s = Sphere{2, 0};
  EXPECT_EQ(s.kind(), "sphere");
  EXPECT_NE(s.get_if<Sphere>(), nullptr);
  EXPECT_EQ(s.get_if<SphericalCap>(), nullptr);
  EXPECT_DOUBLE_EQ(volume(s, kFrame), 32 * kPi / 3);
  EXPECT_TRUE(contains(s, {0, 0, 3}, kFrame));
  EXPECT_FALSE(contains(s, {0, 0, 0.5}, kFrame));
  EXPECT_EQ(SampleShape{SphericalCap{2}}.kind(), "cap");
  EXPECT_EQ((SampleShape{Cone{2, 0.5, true}}.kind()), "cone");
  EXPECT_EQ((SampleShape{Cylinder{2, 1}}.kind()), "cylinder");
  EXPECT_EQ((SampleShape{Sheet{2, 0.1}}.kind()), "sheet");
}

TEST(Scaling, VolumesScaleWithTheCube) {
  const double lambda = 10;
  const SensorFrame big = kFrame.scaled(lambda);
  EXPECT_NEAR(SphericalCap{30}.volume(big), SphericalCap{3}.volume(kFrame) * 1000, 1e-9 * 1000);
  EXPECT_NEAR((Cone{30, 0.6, true}.volume(big)), (Cone{3, 0.6, true}.volume(kFrame)) * 1000, 1e-9 * 1000);
}

}  // namespace
}  // namespace nvgeom
