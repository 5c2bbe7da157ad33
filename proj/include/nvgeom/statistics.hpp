// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace nvgeom {

/// Neumaier-compensated running sum. Order-dependent, so callers that need
/// reproducibility must add terms in a fixed order.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
inline double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return std::sqrt(s.value() / static_cast<double>(xs.size() - 1));
}

/// Population skewness g1 = m3 / m2^1.5.
inline double skewness(std::span<const double> xs) {
  const double m = mean(xs);
  CompensatedSum m2, m3;
  for (double x : xs) {
    const double d = x - m;
    m2.add(d * d);
    m3.add(d * d * d);
  }
  const double n = static_cast<double>(xs.size());
  const double v = m2.value() / n;
  return (m3.value() / n) / std::pow(v, 1.5);
}

/// Population excess kurtosis g2 = m4 / m2^2 - 3.
inline double excess_kurtosis(std::span<const double> xs) {
  const double m = mean(xs);
  CompensatedSum m2, m4;
  for (double x : xs) {
    const double d = x - m;
    m2.add(d * d);
    m4.add(d * d * d * d);
  }
  const double n = static_cast<double>(xs.size());
  const double v = m2.value() / n;
  return (m4.value() / n) / (v * v) - 3.0;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fit_line needs two equally sized series of length >= 2");
  }
  const double mx = mean(x);
  const double my = mean(y);
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add((x[i] - mx) * (y[i] - my));
    sxx.add((x[i] - mx) * (x[i] - mx));
  }
  const double slope = sxy.value() / sxx.value();
  return {slope, my - slope * mx};
}

/// Least-squares amplitude A for y = A * x (line through the origin).
inline double fit_proportional(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("fit_proportional needs two equally sized non-empty series");
  }
  CompensatedSum sxy, sxx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy.add(x[i] * y[i]);
    sxx.add(x[i] * x[i]);
  }
  return sxy.value() / sxx.value();
}

}  // namespace nvgeom
