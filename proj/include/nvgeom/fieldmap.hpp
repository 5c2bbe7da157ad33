// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file fieldmap.hpp
/// Signed kernel contributions rasterized on an axis-aligned plane.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/vec3.hpp"

namespace nvgeom {

enum class Axis { X, Y, Z };

inline char axis_name(Axis a) { return a == Axis::X ? 'x' : a == Axis::Y ? 'y' : 'z'; }

/// Plane {normal = offset}. Grid axes are the two remaining coordinates in
/// order: y-plane -> (x, z), x-plane -> (y, z), z-plane -> (x, y).
struct PlaneSpec {
  Axis normal = Axis::Y;
  double offset = 0.0;

  Axis horizontal() const { return normal == Axis::X ? Axis::Y : Axis::X; }
  Axis vertical() const { return normal == Axis::Z ? Axis::Y : Axis::Z; }

  Vec3 point(double h, double v) const {
    switch (normal) {
      case Axis::X:
        return {offset, h, v};
      case Axis::Y:
        return {h, offset, v};
      case Axis::Z:
        break;
    }
    return {h, v, offset};
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

enum class CellState : std::uint8_t {
  Valid = 0,
  Diamond = 1,   // cell center below the surface; value kept
  Singular = 2,  // cell center at the NV; value is NaN
};

/// Kernel values at the cell centers of a uniform grid.
struct FieldMap {
  PlaneSpec plane;
  Interval h_range;
  Interval v_range;
  std::size_t nh = 0;
  std::size_t nv = 0;
  double gamma = 0.0;
  double d_nv = 1.0;
  std::vector<double> values;  // index ih * nv + iv
  std::vector<CellState> state;

  double dh() const { return h_range.width() / static_cast<double>(nh); }
  double dv() const { return v_range.width() / static_cast<double>(nv); }
  double h_center(std::size_t ih) const { return h_range.lo + (static_cast<double>(ih) + 0.5) * dh(); }
  double v_center(std::size_t iv) const { return v_range.lo + (static_cast<double>(iv) + 0.5) * dv(); }
  Vec3 center(std::size_t ih, std::size_t iv) const { return plane.point(h_center(ih), v_center(iv)); }

  double value(std::size_t ih, std::size_t iv) const { return values[ih * nv + iv]; }
  CellState cell_state(std::size_t ih, std::size_t iv) const { return state[ih * nv + iv]; }
  bool masked(std::size_t ih, std::size_t iv) const { return cell_state(ih, iv) != CellState::Valid; }

  /// Magnitude used to clamp the color scale: the given percentile of |value|
  /// over valid cells. The stored values are never clamped.
  double color_clamp(double percentile = 99.5) const {
    std::vector<double> mags;
    mags.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (state[i] == CellState::Valid) mags.push_back(std::abs(values[i]));
    }
    if (mags.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(mags.size())));
    const std::size_t idx = std::min(mags.size() - 1, rank == 0 ? 0 : rank - 1);
    std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(idx), mags.end());
    return mags[idx];
  }
};

/// Evaluates kernel() at every cell center. Cells below the surface are
/// flagged Diamond (value still computed); the cell whose center is the NV
/// itself is flagged Singular and holds NaN.
inline FieldMap render(const SensorFrame& frame, const PlaneSpec& plane, Interval h_range,
                       Interval v_range, std::size_t nh, std::size_t nv) {
  if (nh < 2 || nv < 2) throw DomainError("field map needs at least 2 cells per axis");
  if (!(h_range.width() > 0.0) || !(v_range.width() > 0.0)) {
    throw DomainError("field map ranges must have positive width");
  }
  FieldMap map{plane, h_range, v_range, nh, nv, frame.gamma(), frame.d_nv(), {}, {}};
  map.values.resize(nh * nv);
  map.state.resize(nh * nv);
  for (std::size_t ih = 0; ih < nh; ++ih) {
    for (std::size_t iv = 0; iv < nv; ++iv) {
      const Vec3 p = map.center(ih, iv);
      const std::size_t i = ih * nv + iv;
      if (norm2(p) == 0.0) {
        map.values[i] = std::numeric_limits<double>::quiet_NaN();
        map.state[i] = CellState::Singular;
        continue;
      }
      map.values[i] = kernel(p, frame);
      map.state[i] = p.z < frame.d_nv() ? CellState::Diamond : CellState::Valid;
    }
  }
  return map;
}

/// Default map: the x-z plane (y = 0) containing B0 and the surface normal.
inline FieldMap render(const SensorFrame& frame, Interval x_range, Interval z_range,
                       std::size_t nx, std::size_t nz) {
  return render(frame, PlaneSpec{}, x_range, z_range, nx, nz);
}

/// One connected same-sign region of a map.
struct SignRegion {
  int sign = 0;  // +1 or -1
  std::size_t cells = 0;
  /// Angular extent around the NV in the map plane, degrees, measured from the
  /// +vertical axis towards +horizontal and normalized to [0, 360).
  double angle_begin = 0.0;
  double angle_end = 0.0;
  double angular_width = 0.0;
};

struct QuadrantSignature {
  std::vector<SignRegion> regions;
  std::size_t positive_regions = 0;
  std::size_t negative_regions = 0;
  /// True when the map holds a single sign (or none).
  bool degenerate = false;
};

/// Connected regions of equal sign (4-connectivity) over all cells of the map,
/// diamond cells included. Cells with |value| <= zero_tolerance, the NV cell,
/// and cells within `core_radius` of the NV (defaults to two cell diagonals)
/// are left unassigned: near the NV the sector boundaries are narrower than a
/// cell and would otherwise bridge opposite sectors.
inline QuadrantSignature quadrant_signature(const FieldMap& map, double zero_tolerance = 1e-12,
                                            double core_radius = -1.0) {
  const std::size_t nh = map.nh;
  const std::size_t nv = map.nv;
  if (core_radius < 0.0) core_radius = 2.0 * std::hypot(map.dh(), map.dv());
  const Vec3 origin_in_plane = map.plane.point(0.0, 0.0);

  std::vector<int> sign(nh * nv, 0);
  for (std::size_t ih = 0; ih < nh; ++ih) {
    for (std::size_t iv = 0; iv < nv; ++iv) {
      const std::size_t i = ih * nv + iv;
      if (map.state[i] == CellState::Singular) continue;
      const double h = map.h_center(ih);
      const double v = map.v_center(iv);
      if (std::hypot(h, v) <= core_radius && norm2(origin_in_plane) == 0.0) continue;
      const double x = map.values[i];
      if (std::abs(x) <= zero_tolerance) continue;
      sign[i] = x > 0.0 ? 1 : -1;
    }
  }

  QuadrantSignature out;
  std::vector<char> seen(nh * nv, 0);
  std::vector<std::size_t> stack;
  std::vector<double> angles;
  for (std::size_t start = 0; start < nh * nv; ++start) {
    if (sign[start] == 0 || seen[start]) continue;
    SignRegion region;
    region.sign = sign[start];
    angles.clear();
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      ++region.cells;
      const std::size_t ih = i / nv;
      const std::size_t iv = i % nv;
      double a = rad_to_deg(std::atan2(map.h_center(ih), map.v_center(iv)));
      if (a < 0.0) a += 360.0;
      angles.push_back(a);
      const auto visit = [&](std::size_t j) {
        if (!seen[j] && sign[j] == region.sign) {
          seen[j] = 1;
          stack.push_back(j);
        }
      };
      if (ih > 0) visit(i - nv);
      if (ih + 1 < nh) visit(i + nv);
      if (iv > 0) visit(i - 1);
      if (iv + 1 < nv) visit(i + 1);
    }
    // extent = complement of the largest angular gap between member cells
    std::sort(angles.begin(), angles.end());
    double gap = angles.front() + 360.0 - angles.back();
    std::size_t gap_end = 0;
    for (std::size_t k = 1; k < angles.size(); ++k) {
      if (angles[k] - angles[k - 1] > gap) {
        gap = angles[k] - angles[k - 1];
        gap_end = k;
      }
    }
    region.angle_begin = angles[gap_end];
    region.angle_end = angles[(gap_end + angles.size() - 1) % angles.size()];
    region.angular_width = 360.0 - gap;
    (region.sign > 0 ? out.positive_regions : out.negative_regions) += 1;
    out.regions.push_back(region);
  }
  out.degenerate = out.positive_regions == 0 || out.negative_regions == 0;
  return out;
}

/// Midpoint-rule integral of the kernel over a region symmetric about the z axis,
/// using an x-z map (plane y = 0) and a y-z map (plane x = 0) with identical,
/// horizontally symmetric grids. Because the kernel is a quadratic form in the
/// direction with no odd-y terms, its integral over the azimuth at (rho, z) is
///   pi * [ (k(rho, 0, z) + k(-rho, 0, z)) / 2 + k(0, rho, z) ],
/// which the two maps provide exactly. `inside(rho, z)` selects the region.
template <class Inside>
double revolve_integral(const FieldMap& xz, const FieldMap& yz, Inside&& inside) {
  if (xz.plane.normal != Axis::Y || yz.plane.normal != Axis::X || xz.plane.offset != 0.0 ||
      yz.plane.offset != 0.0 || xz.nh != yz.nh || xz.nv != yz.nv ||
      xz.h_range.lo != yz.h_range.lo || xz.h_range.hi != yz.h_range.hi ||
      xz.v_range.lo != yz.v_range.lo || xz.v_range.hi != yz.v_range.hi ||
      xz.h_range.lo != -xz.h_range.hi || xz.nh % 2 != 0) {
    throw DomainError("revolve_integral needs matching x-z and y-z maps symmetric in h");
  }
  const std::size_t half = xz.nh / 2;
  const double cell = xz.dh() * xz.dv();
  double total = 0.0;
  for (std::size_t iv = 0; iv < xz.nv; ++iv) {
    const double z = xz.v_center(iv);
    double row = 0.0;
    for (std::size_t ih = half; ih < xz.nh; ++ih) {
      const double rho = xz.h_center(ih);
      if (!inside(rho, z)) continue;
      const std::size_t mirror = xz.nh - 1 - ih;
      const double ring = std::numbers::pi * (0.5 * (xz.value(ih, iv) + xz.value(mirror, iv)) +
                                              yz.value(ih, iv));
      row += ring * rho;
    }
    total += row * cell;
  }
  return total;
}

/// Writes the JSON header line and the (h, v, value, masked) rows. Values are
/// printed with 17 significant digits.
inline void write_csv(std::ostream& os, const FieldMap& map, const std::string& header_json) {
  os << "# " << header_json << '\n';
  os << axis_name(map.plane.horizontal()) << ',' << axis_name(map.plane.vertical())
     << ",value,masked\n";
  const auto old_precision = os.precision(17);
  for (std::size_t ih = 0; ih < map.nh; ++ih) {
    for (std::size_t iv = 0; iv < map.nv; ++iv) {
      os << map.h_center(ih) << ',' << map.v_center(iv) << ',';
      const double v = map.value(ih, iv);
      if (std::isnan(v)) {
        os << "nan";
      } else {
        os << v;
      }
      os << ',' << (map.masked(ih, iv) ? 1 : 0) << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace nvgeom
