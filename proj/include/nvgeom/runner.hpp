// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

/// @file runner.hpp
/// Resolved run configuration and the commands behind the `nvgeom` tool.
///
/// A RunConfig holds everything that determines a result, in natural units
/// (lengths in d_nv, angles in degrees). It round-trips through JSON: the CSV
/// written by a run starts with a `# {...}` line echoing that JSON, and feeding
/// the echoed config back in reproduces the CSV byte for byte. Thread count and
/// output paths are deliberately not part of it.

#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvgeom/analytic.hpp"
#include "nvgeom/core.hpp"
#include "nvgeom/errors.hpp"
#include "nvgeom/fieldmap.hpp"
#include "nvgeom/geometry.hpp"
#include "nvgeom/mc.hpp"

namespace nvgeom::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr int kCsvSchemaVersion = 1;

enum class Command { Analytic, Mc, Map, Sweep, Validate };

inline std::string_view command_name(Command c) {
  switch (c) {
    case Command::Analytic:
      return "analytic";
    case Command::Mc:
      return "mc";
    case Command::Map:
      return "map";
    case Command::Sweep:
      return "sweep";
    case Command::Validate:
      break;
  }
  return "validate";
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::Analytic, Command::Mc, Command::Map, Command::Sweep, Command::Validate}) {
    if (command_name(c) == s) return c;
  }
  throw ConfigError("unknown command '" + std::string(s) + "'");
}

/// Sweepable parameters in CSV column order. Lengths are in units of d_nv,
/// angles in degrees.
inline const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = {"gamma", "R",      "theta",     "radius",
                                                 "offset", "H",     "volume",    "thickness"};
  return names;
}

inline bool is_length_param(std::string_view name) {
  return name != "gamma" && name != "theta";
}

struct LayerSpec {
  double radius = 1.0;
  double height = 1.0;
  double min_depth = 0.01;
};

struct MapSpec {
  PlaneSpec plane{};
  Interval h_range{-5.0, 5.0};
  Interval v_range{-3.0, 7.0};
  std::size_t nh = 200;
  std::size_t nv = 200;
};

/// A length as written: mantissa and a power-of-ten unit (nm = -9, ..., m = 0).
/// Kept apart so that 20um / 10um is exactly 2, which meters would not give.
struct Length {
  double value = 1.0;
  int exp10 = 0;

  double meters() const;
};

inline double pow10(int e) {
  double p = 1.0;
  for (int i = 0; i < e; ++i) p *= 10.0;
  return p;
}

inline double Length::meters() const { return exp10 >= 0 ? value * pow10(exp10) : value / pow10(-exp10); }

struct RunConfig {
  Command command = Command::Mc;
  std::string shape = "cap";
  bool gamma_magic = true;
  /// name -> values; a parameter with more than one value is a sweep axis.
  std::map<std::string, std::vector<double>> params;
  bool cone_clip = true;
  /// Physical NV depth, if known. Only used for unit conversion.
  std::optional<Length> d_nv;
  std::uint64_t n = 1'000'000;
  std::uint64_t m = 1;
  std::uint64_t k = 16;
  std::uint64_t seed = 0;
  double r_min_factor = 1e-6;  // proximity cutoff in units of d_nv
  std::optional<LayerSpec> ensemble;
  std::optional<PhysicalParams> physical;
  std::vector<std::string> analytic;  // requested closed-form quantities
  MapSpec map;

  bool has(const std::string& name) const { return params.count(name) != 0; }

  double scalar(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end() || it->second.empty()) {
      throw ConfigError("missing parameter --" + name);
    }
    if (it->second.size() != 1) throw ConfigError("parameter " + name + " must be a single value");
    return it->second.front();
  }

  double scalar_or(const std::string& name, double fallback) const {
    return has(name) ? scalar(name) : fallback;
  }

  /// Parameters with more than one value, in column order.
  std::vector<std::string> grid_axes() const {
    std::vector<std::string> axes;
    for (const auto& name : param_names()) {
      const auto it = params.find(name);
      if (it != params.end() && it->second.size() > 1) axes.push_back(name);
    }
    return axes;
  }
};

// ---------------------------------------------------------------------------
// parsing helpers

namespace detail {

inline double parse_double(std::string_view s) {
  std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + str + "'");
  }
  if (used != str.size() || !std::isfinite(v)) throw ConfigError("not a number: '" + str + "'");
  return v;
}

inline std::uint64_t parse_count(std::string_view s) {
  const double v = parse_double(s);
  if (v < 0.0 || v != std::floor(v) || v > 9.007199254740992e15) {
    throw ConfigError("not a non-negative integer: '" + std::string(s) + "'");
  }
  return static_cast<std::uint64_t>(v);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<Length> split_length_unit(std::string_view token) {
  static const std::pair<std::string_view, int> units[] = {{"nm", -9}, {"um", -6}, {"mm", -3}, {"m", 0}};
  for (const auto& [suffix, exp10] : units) {
    if (token.size() > suffix.size() && token.ends_with(suffix)) {
      const auto number = token.substr(0, token.size() - suffix.size());
      if (number.back() == 'e' || number.back() == 'E') continue;
      return Length{parse_double(number), exp10};
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Parses "1e-5m", "10um", "150nm".
inline Length parse_length(std::string_view token) {
  const auto parsed = detail::split_length_unit(token);
  if (!parsed) throw ConfigError("length needs a unit (nm, um, mm, m): '" + std::string(token) + "'");
  if (!(parsed->value > 0.0) || !std::isfinite(parsed->value)) {
    throw ConfigError("length must be positive: '" + std::string(token) + "'");
  }
  return *parsed;
}

/// Same, in meters.
inline double parse_physical_length(std::string_view token) { return parse_length(token).meters(); }

/// Shortest text that parses back to the same length.
inline std::string length_string(const Length& l) {
  char buf[32];
  const auto end = std::to_chars(buf, buf + sizeof buf, l.value).ptr;
  const char* unit = l.exp10 == -9 ? "nm" : l.exp10 == -6 ? "um" : l.exp10 == -3 ? "mm" : "m";
  return std::string(buf, end) + unit;
}

/// x in units of d.
inline double length_ratio(const Length& x, const Length& d) {
  const double q = x.value / d.value;
  const int e = x.exp10 - d.exp10;
  return e >= 0 ? q * pow10(e) : q / pow10(-e);
}

/// One numeric token of a parameter. Lengths may carry a unit, in which case
/// they are converted to units of d_nv (which then must be physical).
inline double parse_param_token(std::string_view token, bool is_length, std::optional<Length> d_nv) {
  if (is_length) {
    if (const auto parsed = detail::split_length_unit(token)) {
      if (!d_nv) {
        throw ConfigError("length '" + std::string(token) + "' has a unit but --d-nv is natural");
      }
      return length_ratio(*parsed, *d_nv);
    }
  }
  return detail::parse_double(token);
}

/// "v", "a,b,c" (explicit list) or "start:stop:count" (inclusive linear grid).
inline std::vector<double> parse_param(std::string_view text, bool is_length,
                                       std::optional<Length> d_nv) {
  if (text.empty()) throw ConfigError("empty parameter value");
  if (text.find(':') != std::string_view::npos) {
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:stop:count, got '" + std::string(text) + "'");
    const double first = parse_param_token(parts[0], is_length, d_nv);
    const double last = parse_param_token(parts[1], is_length, d_nv);
    const std::uint64_t count = detail::parse_count(parts[2]);
    if (count < 1) throw ConfigError("range count must be at least 1");
    return linspace(first, last, count);
  }
  std::vector<double> values;
  for (auto part : detail::split(text, ',')) values.push_back(parse_param_token(part, is_length, d_nv));
  return values;
}

/// "water-300K-0.2T" style preset: water protons at temperature T and field B0.
inline PhysicalParams parse_physical_preset(const std::string& text) {
  static const std::regex re(R"(water(?:-([0-9.eE+-]+)K)?(?:-([0-9.eE+-]+)T)?)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    throw ConfigError("unknown physical preset '" + text + "' (expected e.g. water-300K-0.2T)");
  }
  PhysicalParams p = PhysicalParams::water();
  if (m[1].matched) p.temperature = detail::parse_double(m[1].str());
  if (m[2].matched) p.b0 = detail::parse_double(m[2].str());
  p.validate();
  return p;
}

inline PlaneSpec parse_plane(std::string_view text) {
  const auto eq = text.find('=');
  if (eq != 1 || text.size() < 3) throw ConfigError("plane must look like y=0");
  PlaneSpec plane;
  switch (text[0]) {
    case 'x':
      plane.normal = Axis::X;
      break;
    case 'y':
      plane.normal = Axis::Y;
      break;
    case 'z':
      plane.normal = Axis::Z;
      break;
    default:
      throw ConfigError("plane axis must be x, y or z");
  }
  plane.offset = detail::parse_double(text.substr(2));
  return plane;
}

inline std::string plane_string(const PlaneSpec& plane) {
  std::ostringstream os;
  os.precision(17);
  os << axis_name(plane.normal) << '=' << plane.offset;
  return os.str();
}

inline Interval parse_interval(std::string_view text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 2) throw ConfigError("interval must be lo:hi");
  Interval iv{detail::parse_double(parts[0]), detail::parse_double(parts[1])};
  if (!(iv.hi > iv.lo)) throw ConfigError("interval must satisfy lo < hi");
  return iv;
}

// ---------------------------------------------------------------------------
// JSON round trip

inline Json physical_to_json(const PhysicalParams& p) {
  return Json{{"temperature", p.temperature},
              {"b0", p.b0},
              {"spin_density", p.spin_density},
              {"gyromagnetic_ratio", p.gyromagnetic_ratio},
              {"mean_moment_amplitude", p.mean_moment_amplitude}};
}

inline PhysicalParams physical_from_json(const Json& j) {
  if (j.is_string()) return parse_physical_preset(j.get<std::string>());
  PhysicalParams p;
  p.temperature = j.value("temperature", p.temperature);
  p.b0 = j.value("b0", p.b0);
  p.spin_density = j.value("spin_density", p.spin_density);
  p.gyromagnetic_ratio = j.value("gyromagnetic_ratio", p.gyromagnetic_ratio);
  p.mean_moment_amplitude = j.value("mean_moment_amplitude", p.mean_moment_amplitude);
  p.validate();
  return p;
}

/// Fully resolved form; the inverse of config_from_json.
inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = command_name(c.command);
  j["shape"] = c.shape;
  j["gamma"] = c.gamma_magic ? Json("magic") : Json(c.params.at("gamma"));
  Json params = Json::object();
  for (const auto& name : param_names()) {
    if (name == "gamma") continue;
    if (const auto it = c.params.find(name); it != c.params.end()) params[name] = it->second;
  }
  j["params"] = params;
  j["cone_clip"] = c.cone_clip;
  j["d_nv"] = c.d_nv ? Json(length_string(*c.d_nv)) : Json(nullptr);
  Json mc{{"N", c.n}, {"M", c.m}, {"K", c.k}, {"seed", c.seed}, {"r_min_factor", c.r_min_factor}};
  mc["ensemble"] = c.ensemble ? Json{{"radius", c.ensemble->radius},
                                     {"height", c.ensemble->height},
                                     {"min_depth", c.ensemble->min_depth}}
                              : Json(nullptr);
  j["mc"] = mc;
  j["physical"] = c.physical ? physical_to_json(*c.physical) : Json(nullptr);
  j["analytic"] = c.analytic;
  j["map"] = Json{{"plane", plane_string(c.map.plane)},
                  {"h_range", {c.map.h_range.lo, c.map.h_range.hi}},
                  {"v_range", {c.map.v_range.lo, c.map.v_range.hi}},
                  {"nh", c.map.nh},
                  {"nv", c.map.nv}};
  return j;
}

namespace detail {

inline std::vector<double> json_param(const Json& v, bool is_length, std::optional<Length> d_nv) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      out.push_back(e.is_string() ? parse_param_token(e.get<std::string>(), is_length, d_nv)
                                  : e.get<double>());
    }
    return out;
  }
  if (v.is_string()) return parse_param(v.get<std::string>(), is_length, d_nv);
  throw ConfigError("parameter must be a number, array or string");
}

inline std::uint64_t json_count(const Json& v) {
  if (v.is_string()) return parse_count(v.get<std::string>());
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  return parse_count(std::to_string(v.get<double>()));
}

}  // namespace detail

/// Reads a config document. Missing keys keep the values already in `base`,
/// so a file can be layered under command-line flags.
inline RunConfig config_from_json(const Json& j, RunConfig base = {}) {
  RunConfig c = std::move(base);
  try {
    if (j.contains("command")) c.command = parse_command(j["command"].get<std::string>());
    if (j.contains("shape")) c.shape = j["shape"].get<std::string>();
    if (j.contains("d_nv_m") && !j["d_nv_m"].is_null()) c.d_nv = Length{j["d_nv_m"].get<double>(), 0};
    if (j.contains("d_nv") && !j["d_nv"].is_null()) {
      const auto s = j["d_nv"].is_string() ? j["d_nv"].get<std::string>() : j["d_nv"].dump();
      if (s == "1" || s == "natural") {
        c.d_nv.reset();
      } else {
        c.d_nv = parse_length(s);
      }
    }
    if (j.contains("gamma")) {
      const Json& g = j["gamma"];
      if (g.is_string() && g.get<std::string>() == "magic") {
        c.gamma_magic = true;
        c.params.erase("gamma");
      } else {
        c.gamma_magic = false;
        c.params["gamma"] = detail::json_param(g, false, c.d_nv);
      }
    }
    if (j.contains("params")) {
      for (const auto& [name, value] : j["params"].items()) {
        if (std::find(param_names().begin(), param_names().end(), name) == param_names().end() ||
            name == "gamma") {
          throw ConfigError("unknown parameter '" + name + "'");
        }
        c.params[name] = detail::json_param(value, is_length_param(name), c.d_nv);
      }
    }
    if (j.contains("cone_clip")) c.cone_clip = j["cone_clip"].get<bool>();
    if (j.contains("mc")) {
      const Json& mc = j["mc"];
      if (mc.contains("N")) c.n = detail::json_count(mc["N"]);
      if (mc.contains("M")) c.m = detail::json_count(mc["M"]);
      if (mc.contains("K")) c.k = detail::json_count(mc["K"]);
      if (mc.contains("seed")) c.seed = detail::json_count(mc["seed"]);
      if (mc.contains("r_min_factor")) c.r_min_factor = mc["r_min_factor"].get<double>();
      if (mc.contains("ensemble")) {
        if (mc["ensemble"].is_null()) {
          c.ensemble.reset();
        } else {
          LayerSpec layer;
          layer.radius = mc["ensemble"].value("radius", layer.radius);
          layer.height = mc["ensemble"].value("height", layer.height);
          layer.min_depth = mc["ensemble"].value("min_depth", layer.min_depth);
          c.ensemble = layer;
        }
      }
    }
    if (j.contains("physical")) {
      if (j["physical"].is_null()) {
        c.physical.reset();
      } else {
        c.physical = physical_from_json(j["physical"]);
      }
    }
    if (j.contains("analytic")) c.analytic = j["analytic"].get<std::vector<std::string>>();
    if (j.contains("map")) {
      const Json& m = j["map"];
      if (m.contains("plane")) c.map.plane = parse_plane(m["plane"].get<std::string>());
      if (m.contains("h_range")) c.map.h_range = {m["h_range"][0].get<double>(), m["h_range"][1].get<double>()};
      if (m.contains("v_range")) c.map.v_range = {m["v_range"][0].get<double>(), m["v_range"][1].get<double>()};
      if (m.contains("nh")) c.map.nh = m["nh"].get<std::size_t>();
      if (m.contains("nv")) c.map.nv = m["nv"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return c;
}

/// Loads a JSON config file, or the echoed config from the first line of a
/// CSV written by a previous run.
inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  Json j;
  try {
    if (text.starts_with("# ")) {
      const auto header = Json::parse(text.substr(2, text.find('\n') - 2));
      j = header.at("config");
    } else {
      j = Json::parse(text);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse config file '" + path + "': " + e.what());
  }
  return config_from_json(j, std::move(base));
}

// ---------------------------------------------------------------------------
// execution

struct RunOutput {
  std::string csv;  // deterministic: depends only on the RunConfig
  Json meta;        // includes wall time and thread count
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_header_line(const RunConfig& c, std::string_view schema) {
  Json h{{"schema", schema},
         {"schema_version", kCsvSchemaVersion},
         {"version", kVersion},
         {"seed", c.seed},
         {"config", to_json(c)}};
  return "# " + h.dump() + "\n";
}

inline double gamma_rad(const RunConfig& c, const std::map<std::string, double>& point) {
  if (c.gamma_magic) return kMagicAngle;
  return deg_to_rad(point.at("gamma"));
}

inline double value_or(const std::map<std::string, double>& point, const std::string& name,
                       double fallback) {
  const auto it = point.find(name);
  return it == point.end() ? fallback : it->second;
}

inline double require(const std::map<std::string, double>& point, const std::string& name,
                      const std::string& shape) {
  const auto it = point.find(name);
  if (it == point.end()) throw ConfigError("shape " + shape + " needs --" + name);
  return it->second;
}

}  // namespace detail

/// Builds the shape for one grid point (natural units, d_nv = 1).
inline SampleShape make_shape(const RunConfig& c, const std::map<std::string, double>& point) {
  using detail::require;
  using detail::value_or;
  if (c.shape == "cap") return SphericalCap{require(point, "R", c.shape)};
  if (c.shape == "cone") {
    return Cone{require(point, "R", c.shape), deg_to_rad(value_or(point, "theta", 45.0)), c.cone_clip};
  }
  if (c.shape == "sphere") {
    return Sphere{require(point, "radius", c.shape), value_or(point, "offset", 0.0)};
  }
  if (c.shape == "cylinder") {
    const double R = require(point, "R", c.shape);
    const double offset = value_or(point, "offset", 0.0);
    if (point.count("H") && point.count("volume")) {
      throw ConfigError("cylinder takes either --H or --volume, not both");
    }
    if (point.count("H")) return Cylinder{R, point.at("H"), offset};
    return Cylinder::with_volume(R, value_or(point, "volume", std::numbers::pi), offset);
  }
  if (c.shape == "sheet") {
    return Sheet{require(point, "R", c.shape), value_or(point, "thickness", 0.1)};
  }
  throw ConfigError("unknown shape '" + c.shape + "' (cap, cone, sphere, cylinder, sheet)");
}

/// Closed form for the shape if one exists.
inline std::optional<double> analytic_g(const SampleShape& shape, const SensorFrame& frame) {
  if (const auto* cap = shape.get_if<SphericalCap>()) return g_cap(cap->R, frame);
  if (const auto* cone = shape.get_if<Cone>()) return g_cone(cone->R, cone->theta_max, frame);
  return std::nullopt;
}

/// Cartesian product of the grid axes, first axis slowest.
inline std::vector<std::map<std::string, double>> grid_points(const RunConfig& c) {
  std::map<std::string, double> fixed;
  for (const auto& [name, values] : c.params) {
    if (values.size() == 1) fixed[name] = values.front();
  }
  std::vector<std::map<std::string, double>> points{fixed};
  for (const auto& axis : c.grid_axes()) {
    const auto& values = c.params.at(axis);
    const bool up = values[1] > values[0];
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (up ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) {
        throw ConfigError("grid for " + axis + " must be strictly monotone");
      }
    }
    std::vector<std::map<std::string, double>> next;
    for (const auto& p : points) {
      for (double v : values) {
        auto q = p;
        q[axis] = v;
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  return points;
}

inline McConfig mc_config(const RunConfig& c, const SensorFrame& frame) {
  McConfig mc;
  mc.n_sample_points = c.n;
  mc.n_nv_points = c.m;
  mc.n_repetitions = c.k;
  mc.seed = c.seed;
  mc.r_min_factor = c.r_min_factor;
  if (c.ensemble) mc.ensemble = NvLayer{c.ensemble->radius, c.ensemble->height, c.ensemble->min_depth};
  mc.validate(frame);
  return mc;
}

/// `mc` and `sweep`: one CSV row per grid point with columns
/// (axes..., g_mean, g_stderr, g_analytic, K, S). `mc` uses the seed as given
/// and refuses grids; `sweep` seeds grid point i with derive_seed(seed, i).
inline RunOutput run_estimates(const RunConfig& c, unsigned threads, bool keep_repetitions = false) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto axes = c.grid_axes();
  if (c.command == Command::Mc && !axes.empty()) {
    throw ConfigError("mc takes single values; use sweep for ranges");
  }
  if (!c.gamma_magic && !c.has("gamma")) throw ConfigError("missing --gamma");
  const auto points = grid_points(c);
  const std::optional<double> K = c.physical ? std::optional(k_prefactor(*c.physical)) : std::nullopt;

  std::ostringstream csv;
  csv << detail::csv_header_line(c, "nvgeom-estimates");
  for (const auto& axis : axes) csv << axis << ',';
  csv << "g_mean,g_stderr,g_analytic,K,S\n";

  Json repetitions = Json::array();
  std::uint64_t skipped = 0;
  std::size_t best = 0;
  double best_g = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& point = points[i];
    const SensorFrame frame(detail::gamma_rad(c, point), 1.0);
    const SampleShape shape = make_shape(c, point);
    shape.validate(frame);
    McConfig mc = mc_config(c, frame);
    if (c.command == Command::Sweep) mc.seed = derive_seed(c.seed, i);
    const McResult r = estimate_g(shape, frame, mc, threads);
    skipped += r.skipped_pairs;
    if (keep_repetitions) repetitions.push_back(r.per_repetition);
    if (r.g_mean > best_g) {
      best_g = r.g_mean;
      best = i;
    }
    for (const auto& axis : axes) csv << detail::format_double(point.at(axis)) << ',';
    csv << detail::format_double(r.g_mean) << ',' << detail::format_double(r.g_stderr) << ',';
    if (const auto ga = analytic_g(shape, frame)) csv << detail::format_double(*ga);
    csv << ',';
    if (K) csv << detail::format_double(*K) << ',' << detail::format_double(total_signal(*K, r.g_mean));
    else csv << ',';
    csv << '\n';
  }

  RunOutput out;
  out.csv = csv.str();
  Json meta{{"schema", "nvgeom-meta"},
            {"version", kVersion},
            {"command", command_name(c.command)},
            {"seed", c.seed},
            {"config", to_json(c)},
            {"rows", points.size()},
            {"skipped_pairs", skipped},
            {"threads", nvgeom::detail::resolve_threads(threads)}};
  if (!points.empty()) {
    Json argmax{{"g_mean", best_g}};
    for (const auto& axis : axes) argmax[axis] = points[best].at(axis);
    meta["argmax"] = argmax;
    // fixed-volume cylinder: report where the optimum sits relative to H = sqrt(R)
    if (c.shape == "cylinder" && !c.has("H")) {
      const auto* cyl = make_shape(c, points[best]).get_if<Cylinder>();
      meta["cylinder_optimum"] = Json{{"R_star", cyl->R},
                                      {"H_star", cyl->H},
                                      {"H_over_sqrt_R", cyl->H / std::sqrt(cyl->R)}};
    }
  }
  if (K) {
    meta["K_tesla"] = *K;
    meta["K_reported_tesla"] = constants::kReportedWaterK;
  }
  if (c.d_nv) meta["d_nv_m"] = c.d_nv->meters();
  if (keep_repetitions) meta["per_repetition"] = repetitions;
  meta["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.meta = std::move(meta);
  return out;
}

/// `analytic`: rows of (quantity, value).
inline RunOutput run_analytic(const RunConfig& c) {
  if (!c.grid_axes().empty()) throw ConfigError("analytic takes single values; use sweep for curves");
  if (!c.gamma_magic && !c.has("gamma")) throw ConfigError("missing --gamma");
  std::map<std::string, double> point;
  for (const auto& [name, values] : c.params) point[name] = values.front();
  const SensorFrame frame(detail::gamma_rad(c, point), 1.0);

  std::vector<std::string> wanted = c.analytic;
  if (wanted.empty()) {
    wanted.push_back("g-infinity");
    if (c.shape == "cap" && c.has("R")) wanted.push_back("g-cap");
    if (c.shape == "cone" && c.has("R")) wanted.push_back("g-cone");
    if (c.physical) wanted.push_back("k-prefactor");
  }
  std::ostringstream csv;
  csv << detail::csv_header_line(c, "nvgeom-analytic");
  csv << "quantity,value\n";
  const auto row = [&](std::string_view name, double v) {
    csv << name << ',' << detail::format_double(v) << '\n';
  };
  for (const auto& q : wanted) {
    if (q == "g-infinity") {
      row("g_infinity", g_infinity(frame));
    } else if (q == "g-cap") {
      row("g_cap", g_cap(c.scalar("R"), frame));
    } else if (q == "g-cone") {
      row("g_cone", g_cone(c.scalar("R"), deg_to_rad(c.scalar_or("theta", 45.0)), frame));
    } else if (q == "k-prefactor") {
      const PhysicalParams p = c.physical.value_or(PhysicalParams::water());
      const double K = k_prefactor(p);
      row("k_prefactor", K);
      row("k_reported", constants::kReportedWaterK);
      row("s_infinity", total_signal(K, g_infinity(frame)));
    } else {
      throw ConfigError("unknown analytic quantity '" + q + "'");
    }
  }
  RunOutput out;
  out.csv = csv.str();
  out.meta = Json{{"schema", "nvgeom-meta"},
                  {"version", kVersion},
                  {"command", "analytic"},
                  {"config", to_json(c)},
                  {"wall_time_s", 0.0}};
  return out;
}

/// `map`: kernel values on a plane, CSV (h, v, value, masked).
inline RunOutput run_map(const RunConfig& c) {
  if (!c.gamma_magic && !c.has("gamma")) throw ConfigError("missing --gamma");
  if (!c.grid_axes().empty()) throw ConfigError("map takes a single gamma");
  std::map<std::string, double> point;
  if (c.has("gamma")) point["gamma"] = c.scalar("gamma");
  const SensorFrame frame(detail::gamma_rad(c, point), 1.0);
  const FieldMap map = render(frame, c.map.plane, c.map.h_range, c.map.v_range, c.map.nh, c.map.nv);
  const QuadrantSignature sig = quadrant_signature(map);

  Json header{{"schema", "nvgeom-map"},
              {"schema_version", kCsvSchemaVersion},
              {"version", kVersion},
              {"config", to_json(c)},
              {"gamma_rad", frame.gamma()},
              {"d_nv", frame.d_nv()},
              {"b0_hat", {frame.b0_hat().x, frame.b0_hat().y, frame.b0_hat().z}},
              {"m_max_hat", {frame.m_max_hat().x, frame.m_max_hat().y, frame.m_max_hat().z}},
              {"color_clamp_p99_5", map.color_clamp(99.5)},
              {"positive_regions", sig.positive_regions},
              {"negative_regions", sig.negative_regions}};
  std::ostringstream csv;
  write_csv(csv, map, header.dump());
  RunOutput out;
  out.csv = csv.str();
  out.meta = Json{{"schema", "nvgeom-meta"}, {"version", kVersion}, {"command", "map"}, {"config", to_json(c)}};
  Json regions = Json::array();
  for (const auto& r : sig.regions) {
    regions.push_back(Json{{"sign", r.sign},
                           {"cells", r.cells},
                           {"angle_begin_deg", r.angle_begin},
                           {"angle_end_deg", r.angle_end},
                           {"angular_width_deg", r.angular_width}});
  }
  out.meta["regions"] = regions;
  return out;
}

/// Dispatches analytic, mc, map and sweep. `validate` lives in validation.hpp.
/// `keep_repetitions` adds every per-repetition estimate to the metadata.
inline RunOutput run(const RunConfig& c, unsigned threads = 0, bool keep_repetitions = false) {
  switch (c.command) {
    case Command::Analytic:
      return run_analytic(c);
    case Command::Mc:
    case Command::Sweep:
      return run_estimates(c, threads, keep_repetitions);
    case Command::Map:
      return run_map(c);
    case Command::Validate:
      break;
  }
  throw ConfigError("validate is not a data command");
}

}  // namespace nvgeom::cli
