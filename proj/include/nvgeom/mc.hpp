// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file mc.hpp
/// Monte-Carlo estimator of the geometry factor.
///
///   G = 1/K sum_k [ V / (M N) sum_m sum_n kernel(p_n - q_m) ]
///
/// with N uniform sample points p_n, M NV positions q_m and K repetitions.
/// Work is split into fixed-size blocks of sample points; every block owns an
/// RngStream keyed by (seed, repetition, block) and block sums are reduced in
/// block order, so results never depend on the number of worker threads.

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/geometry.hpp"
#include "nvgeom/rng.hpp"
#include "nvgeom/statistics.hpp"

namespace nvgeom {

/// Sample points per RNG block. Part of the reproducibility contract: changing
/// it changes every estimate.
inline constexpr std::uint64_t kBlockSize = 1u << 14;

/// Substream id reserved for NV positions of a repetition.
inline constexpr std::uint64_t kNvSubstream = std::uint64_t{1} << 63;

/// Cylinder of NV centers under the surface, axis through the origin.
///
/// NVs are uniform in the disk of `radius` and in z in [0, z_top] with
/// z_top = min(height, d_nv - min_depth): the layer hangs from depth d_nv
/// upwards and stops `min_depth` short of the surface. For height = d_nv this
/// is the full near-surface layer; as radius and height shrink it collapses
/// onto the single NV at the origin.
struct NvLayer {
  double radius = 1.0;
  double height = 1.0;
  double min_depth = 0.01;

  /// Full-size layer for the given frame: radius = height = d_nv, cutoff 0.01 d_nv.
  static NvLayer full(const SensorFrame& f) { return {f.d_nv(), f.d_nv(), 0.01 * f.d_nv()}; }

  void validate(const SensorFrame& f) const {
    if (!(radius > 0.0) || !(height > 0.0) || !std::isfinite(radius) || !std::isfinite(height)) {
      throw ConfigError("NV layer radius and height must be positive");
    }
    if (!(min_depth >= 0.0) || !(min_depth < f.d_nv())) {
      throw ConfigError("NV layer min_depth must lie in [0, d_nv)");
    }
  }

  double z_top(const SensorFrame& f) const { return std::min(height, f.d_nv() - min_depth); }

  Vec3 sample(RngStream& rng, const SensorFrame& f) const {
    const double rho = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {rho * std::cos(phi), rho * std::sin(phi), z_top(f) * rng.uniform()};
  }
};

struct McConfig {
  std::uint64_t n_sample_points = 1'000'000;  // N per repetition
  std::uint64_t n_nv_points = 1;              // M; must be 1 without an ensemble
  std::uint64_t n_repetitions = 16;           // K
  std::uint64_t seed = 0;
  std::optional<NvLayer> ensemble;
  /// Pairs closer than r_min_factor * d_nv are skipped and counted.
  double r_min_factor = 1e-6;
  /// Fraction of skipped pairs above which the run fails with ProximityError.
  double max_skipped_fraction = 1e-4;

  void validate(const SensorFrame& f) const {
    if (n_sample_points < 1 || n_nv_points < 1 || n_repetitions < 1) {
      throw ConfigError("N, M and K must all be at least 1");
    }
    if (!ensemble && n_nv_points != 1) {
      throw ConfigError("M > 1 requires an NV ensemble layer");
    }
    if (ensemble) ensemble->validate(f);
    if (!(r_min_factor >= 0.0) || !(max_skipped_fraction >= 0.0)) {
      throw ConfigError("proximity settings must be non-negative");
    }
  }
};

struct McResult {
  double g_mean = 0.0;
  /// sample_stddev(per_repetition) / sqrt(K); 0 when K = 1.
  double g_stderr = 0.0;
  std::vector<double> per_repetition;
  /// Sample/NV pairs that entered the sums.
  std::uint64_t n_effective = 0;
  std::uint64_t skipped_pairs = 0;
  double wall_time = 0.0;  // seconds
};

namespace detail {

struct BlockSum {
  CompensatedSum sum;
  std::uint64_t skipped = 0;
};

inline unsigned resolve_threads(unsigned threads) {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs task(i) for i in [0, count) on `threads` workers. The first exception
// thrown by any task stops further scheduling and is rethrown here.
template <class Task>
void parallel_for(std::size_t count, unsigned threads, Task&& task) {
  threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

template <SampleRegion S>
BlockSum run_block(const S& shape, const SensorFrame& frame, std::span<const Vec3> nvs,
                   std::uint64_t seed, std::uint64_t rep, std::uint64_t block,
                   std::uint64_t count, double r_min2) {
  RngStream rng(seed, rep, block);
  const Vec3 b = frame.b0_hat();
  const Vec3 m = frame.m_max_hat();
  BlockSum out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const Vec3 p = shape.sample(rng, frame);
    for (const Vec3& q : nvs) {
      const Vec3 r = p - q;
      const double r2 = norm2(r);
      if (!(r2 >= r_min2) || r2 == 0.0) {
        ++out.skipped;
        continue;
      }
      out.sum.add(3.0 * dot(r, b) * dot(r, m) / (r2 * r2 * std::sqrt(r2)));
    }
  }
  return out;
}

template <SampleRegion S>
McResult estimate_g_impl(const S& shape, const SensorFrame& frame, const McConfig& cfg,
                         unsigned threads) {
  const auto t0 = std::chrono::steady_clock::now();
  shape.validate(frame);
  cfg.validate(frame);

  const std::uint64_t N = cfg.n_sample_points;
  const std::uint64_t M = cfg.n_nv_points;
  const std::uint64_t K = cfg.n_repetitions;
  const std::uint64_t blocks = (N + kBlockSize - 1) / kBlockSize;
  const double r_min = cfg.r_min_factor * frame.d_nv();
  const double V = shape.volume(frame);

  // NV positions: the origin, or M draws per repetition from the layer.
  std::vector<Vec3> nv_points(K * M);
  if (cfg.ensemble) {
    for (std::uint64_t k = 0; k < K; ++k) {
      RngStream rng(cfg.seed, k, kNvSubstream);
      for (std::uint64_t j = 0; j < M; ++j) nv_points[k * M + j] = cfg.ensemble->sample(rng, frame);
    }
  }

  std::vector<BlockSum> partial(K * blocks);
  parallel_for(K * blocks, threads, [&](std::size_t task) {
    const std::uint64_t k = task / blocks;
    const std::uint64_t b = task % blocks;
    const std::uint64_t count = std::min(kBlockSize, N - b * kBlockSize);
    const std::span<const Vec3> nvs(nv_points.data() + k * M, M);
    partial[task] = run_block(shape, frame, nvs, cfg.seed, k, b, count, r_min * r_min);
  });

  McResult result;
  result.per_repetition.resize(K);
  std::uint64_t skipped = 0;
  for (std::uint64_t k = 0; k < K; ++k) {
    CompensatedSum rep;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      rep.add(partial[k * blocks + b].sum);
      skipped += partial[k * blocks + b].skipped;
    }
    result.per_repetition[k] = V / static_cast<double>(M * N) * rep.value();
  }

  const std::uint64_t total_pairs = K * M * N;
  if (static_cast<double>(skipped) > cfg.max_skipped_fraction * static_cast<double>(total_pairs)) {
    throw ProximityError(skipped, total_pairs);
  }

  result.g_mean = mean(result.per_repetition);
  result.g_stderr = sample_stddev(result.per_repetition) / std::sqrt(static_cast<double>(K));
  result.skipped_pairs = skipped;
  result.n_effective = total_pairs - skipped;
  result.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace detail

/// Monte-Carlo estimate of G for `shape` seen from `frame`.
///
/// `threads` = 0 uses every hardware thread. The returned per_repetition list
/// is bitwise identical for any thread count.
template <SampleRegion S>
McResult estimate_g(const S& shape, const SensorFrame& frame, const McConfig& cfg,
                    unsigned threads = 0) {
  if constexpr (std::is_same_v<S, SampleShape>) {
    // resolve the alternative once, outside the sampling loop
    return std::visit(
        [&](const auto& s) { return detail::estimate_g_impl(s, frame, cfg, threads); },
        shape.variant());
  } else {
    return detail::estimate_g_impl(shape, frame, cfg, threads);
  }
}

struct SweepPoint {
  double parameter = 0.0;
  std::uint64_t seed = 0;
  McResult result;
};

/// One estimate per grid value. `family(value)` returns the (shape, frame)
/// pair for that value; grid point i runs with seed derive_seed(cfg.seed, i).
/// The grid must be strictly monotone.
template <class Family>
std::vector<SweepPoint> sweep(std::span<const double> grid, Family&& family, const McConfig& cfg,
                              unsigned threads = 0) {
  const bool up = grid.size() < 2 || grid[1] > grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1])) {
      throw ConfigError("sweep grid must be strictly monotone");
    }
  }
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto [shape, frame] = family(grid[i]);
    McConfig point_cfg = cfg;
    point_cfg.seed = derive_seed(cfg.seed, i);
    out.push_back({grid[i], point_cfg.seed, estimate_g(shape, frame, point_cfg, threads)});
  }
  return out;
}

/// `count` evenly spaced values from `first` to `last` inclusive.
inline std::vector<double> linspace(double first, double last, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {first};
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = first + (last - first) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = last;
  return out;
}

}  // namespace nvgeom
