// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file nvgeom.hpp
/// Umbrella header for the library (without the CLI plumbing in runner.hpp,
/// which pulls in nlohmann/json).

#pragma once

#include "nvgeom/analytic.hpp"
#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/fieldmap.hpp"
#include "nvgeom/geometry.hpp"
#include "nvgeom/mc.hpp"
#include "nvgeom/rng.hpp"
#include "nvgeom/statistics.hpp"
#include "nvgeom/vec3.hpp"
