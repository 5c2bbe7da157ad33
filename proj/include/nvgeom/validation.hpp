// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file validation.hpp
/// Desk-scale acceptance suite: twelve criteria, each returning pass/fail and
/// a one-line detail. Used by `nvgeom validate` and the acceptance test binary.
/// Every criterion seeds its runs from derive_seed(options.seed, id).

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "nvgeom/analytic.hpp"
#include "nvgeom/core.hpp"
#include "nvgeom/extra_shapes.hpp"
#include "nvgeom/fieldmap.hpp"
#include "nvgeom/geometry.hpp"
#include "nvgeom/mc.hpp"
#include "nvgeom/runner.hpp"
#include "nvgeom/statistics.hpp"

namespace nvgeom::validation {

struct Options {
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Reference value of G for the infinite planar chip at the magic angle.
inline constexpr double kGInfinityRef = 2.9619;

namespace detail {

class Report {
 public:
  Report() { os_.precision(6); }
  template <class T>
  Report& operator<<(const T& v) {
    os_ << v;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

inline McConfig mc(std::uint64_t n, std::uint64_t k, std::uint64_t seed) {
  McConfig c;
  c.n_sample_points = n;
  c.n_repetitions = k;
  c.seed = seed;
  return c;
}

inline SensorFrame magic() { return SensorFrame(kMagicAngle); }

inline std::uint64_t seed_for(const Options& o, int id) {
  return derive_seed(o.seed, static_cast<std::uint64_t>(id));
}

// index of the largest value
inline std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// True when g rises up to `peak` and falls after it, allowing each step to go
// the wrong way by at most `sigmas` combined standard errors.
inline bool unimodal(const std::vector<double>& g, const std::vector<double>& se, std::size_t peak,
                     double sigmas) {
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double tol = sigmas * std::hypot(se[i], se[i - 1]);
    const double step = g[i] - g[i - 1];
    if (i <= peak ? step < -tol : step > tol) return false;
  }
  return true;
}

}  // namespace detail

// 1. cap, R = 10, magic angle, N = 1e6, K = 16
inline CriterionResult cap_oracle(const Options& o) {
  const auto frame = detail::magic();
  const auto r = estimate_g(SphericalCap{10.0}, frame, detail::mc(1'000'000, 16, detail::seed_for(o, 1)),
                            o.threads);
  const double target = 2.5191;
  const bool ok = std::abs(r.g_mean - target) <= 4.0 * r.g_stderr && r.g_stderr <= 0.02 &&
                  r.wall_time < 60.0;
  detail::Report d;
  d << "g_mean=" << r.g_mean << " stderr=" << r.g_stderr << " |dev|/stderr="
    << std::abs(r.g_mean - target) / r.g_stderr << " (<=4) g_cap=" << g_cap(10.0, frame)
    << " runtime=" << r.wall_time << "s (<60, " << nvgeom::detail::resolve_threads(o.threads)
    << " threads)";
  return {1, "cap analytic oracle", ok, d.str()};
}

// 2. cap sweep R = 2..50 converging monotonically to G_inf
inline CriterionResult cap_convergence(const Options& o) {
  const auto frame = detail::magic();
  const std::vector<double> radii = {2, 3, 4, 6, 8, 12, 16, 20, 25, 30, 40, 50};
  const auto pts = sweep(
      radii, [&](double R) { return std::pair{SphericalCap{R}, frame}; },
      detail::mc(1'000'000, 16, detail::seed_for(o, 2)), o.threads);
  bool analytic_monotone = true;
  bool mc_monotone = true;
  for (std::size_t i = 1; i < radii.size(); ++i) {
    analytic_monotone &= g_cap(radii[i], frame) > g_cap(radii[i - 1], frame);
    const auto& a = pts[i - 1].result;
    const auto& b = pts[i].result;
    mc_monotone &= b.g_mean - a.g_mean >= -3.0 * std::hypot(a.g_stderr, b.g_stderr);
  }
  const double mc50 = pts.back().result.g_mean;
  const double an50 = g_cap(50.0, frame);
  const bool ok = analytic_monotone && mc_monotone && std::abs(mc50 - kGInfinityRef) <= 0.06 &&
                  std::abs(an50 - kGInfinityRef) <= 0.06;
  detail::Report d;
  d << "monotone analytic=" << analytic_monotone << " mc(3sigma)=" << mc_monotone
    << "; G(50): mc=" << mc50 << "+-" << pts.back().result.g_stderr << " analytic=" << an50
    << " |analytic-2.9619|=" << std::abs(an50 - kGInfinityRef) << " (<=0.06)";
  return {2, "cap convergence to G_inf", ok, d.str()};
}

// 3. G(gamma) at R = 20 follows A sin(gamma) cos(gamma)
inline CriterionResult angular_law(const Options& o) {
  const std::vector<double> deg = {0, 15, 30, 45, 60, 75, 90};
  std::vector<double> sc, g, se;
  const auto pts = sweep(
      deg, [](double a) { return std::pair{SphericalCap{20.0}, SensorFrame::from_degrees(a)}; },
      detail::mc(1'000'000, 32, detail::seed_for(o, 3)), o.threads);
  for (std::size_t i = 0; i < deg.size(); ++i) {
    const double a = deg_to_rad(deg[i]);
    sc.push_back(std::sin(a) * std::cos(a));
    g.push_back(pts[i].result.g_mean);
    se.push_back(pts[i].result.g_stderr);
  }
  const double A = fit_proportional(sc, g);
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < deg.size(); ++i) {
    worst = std::max(worst, std::abs(g[i] - A * sc[i]) / (A * sc[i]));
  }
  const bool ends = std::abs(g.front()) <= 3.0 * se.front() && std::abs(g.back()) <= 3.0 * se.back();
  const std::size_t peak = detail::argmax(g);
  const bool ok = worst < 0.03 && ends && deg[peak] == 45.0;
  detail::Report d;
  d << "A=" << A << " (2*g_cap(20)=" << 2.0 * g_cap(20.0, SensorFrame::from_degrees(45)) << ")"
    << " max rel residual=" << worst << " (<0.03); G(0)=" << g.front() << "+-" << se.front()
    << " G(90)=" << g.back() << "+-" << se.back() << "; argmax=" << deg[peak] << "deg";
  return {3, "angular law", ok, d.str()};
}

// 4. cone: slope of G against ln R at theta = 45 deg
inline CriterionResult cone_divergence(const Options& o) {
  const auto frame = detail::magic();
  const double theta = std::numbers::pi / 4.0;
  const std::vector<double> radii = {2, 4, 8, 16, 32};
  const auto pts = sweep(
      radii, [&](double R) { return std::pair{Cone{R, theta, true}, frame}; },
      detail::mc(1'000'000, 16, detail::seed_for(o, 4)), o.threads);
  std::vector<double> lnR, g, ga;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    lnR.push_back(std::log(radii[i]));
    g.push_back(pts[i].result.g_mean);
    ga.push_back(g_cone(radii[i], theta, frame));
  }
  const double target = std::numbers::pi / 6.0;
  const double slope = fit_line(lnR, g).slope;
  const double closed_slope = fit_line(lnR, ga).slope;
  const bool ok = std::abs(slope - target) <= 0.05 * target;
  detail::Report d;
  d << "MC slope=" << slope << " target pi/6=" << target << " rel dev=" << std::abs(slope - target) / target
    << " (<=0.05); closed-form curve slope=" << closed_slope << "; MC/closed=" << slope / closed_slope;
  return {4, "cone logarithmic divergence", ok, d.str()};
}

// 5. sphere resting on the surface: best G over radius and lateral offset.
//    The maximum of a noisy scan is biased upwards, so the scan only picks the
//    candidate and an independent, longer run supplies the reported value.
inline CriterionResult sphere_optimum(const Options& o) {
  const auto frame = detail::magic();
  const std::vector<double> radii = {1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 20};
  const std::vector<double> offsets = {-2, -1, 0, 1, 2};
  const std::uint64_t seed = detail::seed_for(o, 5);
  double scan_best = -1e300;
  Sphere best{};
  std::uint64_t index = 0;
  for (double off : offsets) {
    for (double a : radii) {
      const auto r = estimate_g(Sphere{a, off}, frame, detail::mc(250'000, 8, derive_seed(seed, index++)),
                                o.threads);
      if (r.g_mean > scan_best) {
        scan_best = r.g_mean;
        best = Sphere{a, off};
      }
    }
  }
  const auto confirm = estimate_g(best, frame, detail::mc(2'000'000, 16, derive_seed(seed, index)), o.threads);
  const double ratio = confirm.g_mean / kGInfinityRef;
  const bool ok = std::abs(ratio - 1.6) <= 0.2;
  detail::Report d;
  d << "scan max G=" << scan_best << " at radius=" << best.radius << " offset=" << best.lateral_offset
    << "; confirmed G=" << confirm.g_mean << "+-" << confirm.g_stderr << " ratio=" << ratio
    << " (1.6+-0.2); radius grid 1..20 d_nv";
  return {5, "sphere optimum", ok, d.str()};
}

// 6. thin sheet (thickness 0.1 d_nv): best G over disk radius
inline CriterionResult sheet_ceiling(const Options& o) {
  const auto frame = detail::magic();
  const auto radii = linspace(0.25, 5.0, 20);
  const auto pts = sweep(
      radii, [&](double R) { return std::pair{Sheet{R, 0.1}, frame}; },
      detail::mc(1'000'000, 8, detail::seed_for(o, 6)), o.threads);
  std::vector<double> g;
  for (const auto& p : pts) g.push_back(p.result.g_mean);
  const std::size_t i = detail::argmax(g);
  const double ratio = g[i] / kGInfinityRef;
  const bool ok = std::abs(ratio - 0.10) <= 0.03;
  detail::Report d;
  d << "max G=" << g[i] << "+-" << pts[i].result.g_stderr << " at R=" << radii[i] << "; ratio=" << ratio
    << " (0.10+-0.03)";
  return {6, "sheet ceiling", ok, d.str()};
}

// 7. cylinder of fixed volume pi d^3: interior maximum in G(R)
inline CriterionResult cylinder_sweep(const Options& o) {
  const auto frame = detail::magic();
  std::vector<double> radii;
  for (int i = 0; i < 16; ++i) radii.push_back(0.25 * std::pow(16.0, i / 15.0));
  const double V = std::numbers::pi;
  const auto pts = sweep(
      radii, [&](double R) { return std::pair{Cylinder::with_volume(R, V), frame}; },
      detail::mc(1'000'000, 8, detail::seed_for(o, 7)), o.threads);
  std::vector<double> g, se;
  for (const auto& p : pts) {
    g.push_back(p.result.g_mean);
    se.push_back(p.result.g_stderr);
  }
  const std::size_t peak = detail::argmax(g);
  const bool interior = peak > 0 && peak + 1 < g.size();
  const bool single = detail::unimodal(g, se, peak, 3.0);
  const auto best = Cylinder::with_volume(radii[peak], V);
  detail::Report d;
  d << "V=pi; argmax R*=" << best.R << " H*=" << best.H << " G*=" << g[peak] << "+-" << se[peak]
    << " interior=" << interior << " unimodal(3sigma)=" << single
    << "; H*/sqrt(R*)=" << best.H / std::sqrt(best.R) << " (reported only)";
  return {7, "cylinder fixed-volume sweep", interior && single, d.str()};
}

// 8. per-repetition distribution and 1/sqrt(N) scaling, cap R = 10
inline CriterionResult statistics_check(const Options& o) {
  const auto frame = detail::magic();
  const SphericalCap cap{10.0};
  const auto big = estimate_g(cap, frame, detail::mc(350'000, 1000, detail::seed_for(o, 8)), o.threads);
  const auto small = estimate_g(cap, frame, detail::mc(35'000, 1000, derive_seed(detail::seed_for(o, 8), 1)),
                                o.threads);
  const double s = skewness(big.per_repetition);
  const double k = excess_kurtosis(big.per_repetition);
  const double ratio = small.g_stderr / big.g_stderr;
  const double sigma_rel = sample_stddev(big.per_repetition) / big.g_mean;
  const bool ok = std::abs(s) < 0.1 && std::abs(k) < 0.2 &&
                  std::abs(ratio - std::sqrt(10.0)) <= 0.15 * std::sqrt(10.0);
  detail::Report d;
  d << "K=1000 N=3.5e5: skew=" << s << " (|s|<0.1) excess kurtosis=" << k << " (|k|<0.2)"
    << " sigma/G=" << sigma_rel << "; stderr(3.5e4)/stderr(3.5e5)=" << ratio << " (sqrt10=3.16228 +-15%)";
  return {8, "statistical behaviour", ok, d.str()};
}

// 9. property suite
inline CriterionResult property_suite(const Options& o) {
  const auto frame = detail::magic();
  const std::uint64_t seed = detail::seed_for(o, 9);
  detail::Report d;

  // angular null: full shell around the NV
  const auto shell = estimate_g(SphericalShell{1.0, 2.0}, frame, detail::mc(1'000'000, 16, seed), o.threads);
  const bool null_ok = std::abs(shell.g_mean) <= 3.0 * shell.g_stderr;
  d << "shell G=" << shell.g_mean << "+-" << shell.g_stderr << " ok=" << null_ok;

  // scale invariance with the same seed
  const auto base = estimate_g(SphericalCap{10.0}, frame, detail::mc(500'000, 16, seed + 1), o.threads);
  bool scale_ok = true;
  for (double lambda : {0.1, 10.0}) {
    const auto r = estimate_g(SphericalCap{10.0 * lambda}, frame.scaled(lambda),
                              detail::mc(500'000, 16, seed + 1), o.threads);
    scale_ok &= std::abs(r.g_mean - base.g_mean) <= base.g_stderr;
    d << "; lambda=" << lambda << " dG=" << r.g_mean - base.g_mean;
  }
  d << " (<=" << base.g_stderr << ") ok=" << scale_ok;

  // superposition of two disjoint cap regions
  const SphericalCap inner{3.0};
  const CapShell outer{3.0, 6.0};
  const auto ga = estimate_g(inner, frame, detail::mc(500'000, 16, seed + 2), o.threads);
  const auto gb = estimate_g(outer, frame, detail::mc(500'000, 16, seed + 3), o.threads);
  const auto gu = estimate_g(DisjointUnion{inner, outer}, frame, detail::mc(500'000, 16, seed + 4), o.threads);
  const double combined = std::sqrt(ga.g_stderr * ga.g_stderr + gb.g_stderr * gb.g_stderr +
                                    gu.g_stderr * gu.g_stderr);
  const double gap = gu.g_mean - (ga.g_mean + gb.g_mean);
  const bool super_ok = std::abs(gap) <= combined;
  d << "; union-sum=" << gap << " combined stderr=" << combined << " ok=" << super_ok;

  // reduced kernel against the full dipole projection
  RngStream rng(seed, 5);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const SensorFrame f(rng.uniform(0.0, std::numbers::pi / 2));
    const double r = std::exp(rng.uniform(std::log(0.1), std::log(100.0)));
    const double ct = rng.uniform(-1.0, 1.0);
    const double st = std::sqrt(1.0 - ct * ct);
    const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const Vec3 p{r * st * std::cos(ph), r * st * std::sin(ph), r * ct};
    const double a = kernel(p, f);
    const double b = kernel_unreduced(p, f.m_max_hat(), f);
    worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  const bool kernel_ok = worst <= 1e-12;
  d << "; kernel max rel diff=" << worst << " ok=" << kernel_ok;

  // Riemann sum of the rendered map against MC, cap R = 5
  const Interval h{-5.0, 5.0};
  const Interval v{1.0, 5.0};
  const auto xz = render(frame, PlaneSpec{Axis::Y, 0.0}, h, v, 2000, 2000);
  const auto yz = render(frame, PlaneSpec{Axis::X, 0.0}, h, v, 2000, 2000);
  const double riemann =
      revolve_integral(xz, yz, [](double rho, double z) { return z > 1.0 && rho * rho + z * z < 25.0; });
  const auto mc5 = estimate_g(SphericalCap{5.0}, frame, detail::mc(1'000'000, 16, seed + 6), o.threads);
  const bool riemann_ok = std::abs(riemann - mc5.g_mean) <= 0.02 * std::abs(mc5.g_mean);
  d << "; riemann(2000^2)=" << riemann << " mc=" << mc5.g_mean << " g_cap(5)=" << g_cap(5.0, frame)
    << " ok=" << riemann_ok;

  return {9, "property suite", null_ok && scale_ok && super_ok && kernel_ok && riemann_ok, d.str()};
}

// 10. the CSV of a sweep is bitwise identical at 1, 4 and 16 threads
inline CriterionResult determinism(const Options& o) {
  cli::RunConfig c;
  c.command = cli::Command::Sweep;
  c.shape = "cap";
  c.params["R"] = {2.0, 5.0, 10.0};
  c.n = 100'000;
  c.k = 4;
  c.seed = detail::seed_for(o, 10);
  c.physical = PhysicalParams::water();
  const std::string one = cli::run(c, 1).csv;
  const bool four = cli::run(c, 4).csv == one;
  const bool sixteen = cli::run(c, 16).csv == one;
  detail::Report d;
  d << "sweep csv " << one.size() << " bytes; 4 threads identical=" << four << " 16 threads identical=" << sixteen;
  return {10, "determinism across threads", four && sixteen, d.str()};
}

// 11. physical prefactor
inline CriterionResult prefactor(const Options&) {
  const auto water = PhysicalParams::water();
  const double K = k_prefactor(water);
  const double G = g_infinity(detail::magic());
  const double ratio = K / constants::kReportedWaterK;
  const bool exact = total_signal(K, G) == K * G;
  const bool ok = ratio >= 0.5 && ratio <= 2.0 && exact;
  detail::Report d;
  d << "computed K=" << K * 1e12 << " pT vs reported 80 pT (ratio " << ratio
    << ", factor-2 tolerance: the displayed product evaluates to about half the reported value)"
    << "; S_inf=K*G_inf=" << total_signal(K, G) * 1e12 << " pT exact=" << exact;
  return {11, "physical prefactor", ok, d.str()};
}

// 12. NV ensemble: shrinking layer recovers the single-NV cap curve; full
//     layer changes the cylinder most
inline CriterionResult ensemble(const Options& o) {
  const auto frame = detail::magic();
  const std::uint64_t seed = detail::seed_for(o, 12);
  const std::vector<double> radii = {2, 5, 10, 20};
  detail::Report d;
  bool converge = true;
  std::uint64_t index = 0;
  // the bias is linear in the layer size (about 0.5 eps at R = 2), so the
  // limit is checked at the end of the ladder
  const std::vector<double> ladder = {0.1, 0.01, 1e-3, 1e-4};
  for (double eps : ladder) {
    double worst = 0.0;
    for (double R : radii) {
      McConfig c = detail::mc(200'000, 16, derive_seed(seed, index++));
      c.n_nv_points = 16;
      c.ensemble = NvLayer{eps, eps, 0.01};
      const auto r = estimate_g(SphericalCap{R}, frame, c, o.threads);
      const double z = std::abs(r.g_mean - g_cap(R, frame)) / r.g_stderr;
      worst = std::max(worst, z);
      if (eps == ladder.back()) converge &= z <= 3.0;
    }
    d << "eps=" << eps << " max|dev|/stderr=" << worst << "; ";
  }

  struct Entry {
    std::string name;
    SampleShape shape;
  };
  const std::vector<Entry> shapes = {{"cap R=10", SphericalCap{10.0}},
                                     {"cone R=10", Cone{10.0, std::numbers::pi / 4, true}},
                                     {"sphere a=10", Sphere{10.0, 0.0}},
                                     {"cylinder R=H=1", Cylinder{1.0, 1.0, 0.0}},
                                     {"sheet R=1.5", Sheet{1.5, 0.1}}};
  std::size_t most = 0;
  double most_change = -1.0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    McConfig single = detail::mc(200'000, 16, derive_seed(seed, 100 + i));
    McConfig layer = single;
    layer.ensemble = NvLayer::full(frame);
    layer.n_nv_points = 64;
    const auto a = estimate_g(shapes[i].shape, frame, single, o.threads);
    const auto b = estimate_g(shapes[i].shape, frame, layer, o.threads);
    const double change = std::abs(b.g_mean - a.g_mean) / std::abs(a.g_mean);
    d << shapes[i].name << " " << a.g_mean << "->" << b.g_mean << " (" << change * 100.0 << "%); ";
    if (change > most_change) {
      most_change = change;
      most = i;
    }
  }
  const bool ordering = shapes[most].shape.kind() == "cylinder";
  d << "most sensitive: " << shapes[most].name;
  return {12, "NV ensemble", converge && ordering, d.str()};
}

using CriterionFn = std::function<CriterionResult(const Options&)>;

inline const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all = {cap_oracle,     cap_convergence, angular_law,
                                               cone_divergence, sphere_optimum, sheet_ceiling,
                                               cylinder_sweep, statistics_check, property_suite,
                                               determinism,    prefactor,       ensemble};
  return all;
}

inline CriterionResult run_criterion(int id, const Options& o) {
  if (id < 1 || id > static_cast<int>(criteria().size())) {
    throw ConfigError("no criterion " + std::to_string(id));
  }
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r = criteria()[static_cast<std::size_t>(id - 1)](o);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::string format(const CriterionResult& r) {
  std::ostringstream os;
  os.precision(3);
  os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << " (" << std::fixed << r.seconds
     << " s): " << r.detail;
  return os.str();
}

/// Runs every criterion, printing one line each as it finishes.
inline std::vector<CriterionResult> run_all(const Options& o, std::ostream& out) {
  std::vector<CriterionResult> results;
  for (int id = 1; id <= static_cast<int>(criteria().size()); ++id) {
    results.push_back(run_criterion(id, o));
    out << format(results.back()) << '\n' << std::flush;
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  out << passed << '/' << results.size() << " criteria passed\n";
  return results;
}

}  // namespace nvgeom::validation
