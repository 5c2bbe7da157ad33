// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

// Kernel on the x-z plane at 45 degrees, written as CSV, plus its sign regions.

#include <iostream>

#include "nvgeom/nvgeom.hpp"

int main() {
  using namespace nvgeom;
  const SensorFrame frame = SensorFrame::from_degrees(45.0);
  const FieldMap map = render(frame, Interval{-5.0, 5.0}, Interval{-3.0, 7.0}, 100, 100);
  const QuadrantSignature sig = quadrant_signature(map);
  std::cerr << sig.regions.size() << " sign regions\n";
  write_csv(std::cout, map, R"({"gamma_deg":45})");
}
