// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace nvgeom {

/// Arguments outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or inconsistent run configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A rejection sampler failed to produce a point; the shape is malformed.
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too many sample/NV pairs fell inside the proximity cutoff.
class ProximityError : public std::runtime_error {
 public:
  ProximityError(std::uint64_t skipped, std::uint64_t total)
      : std::runtime_error("proximity cutoff hit for " + std::to_string(skipped) + " of " +
                           std::to_string(total) + " sample/NV pairs"),
        skipped_pairs(skipped),
        total_pairs(total) {}

  std::uint64_t skipped_pairs;
  std::uint64_t total_pairs;
};

}  // namespace nvgeom
