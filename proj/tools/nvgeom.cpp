// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

// nvgeom: geometry factors of NV-center sensing volumes from the command line.
//
//   nvgeom analytic --g-infinity --gamma 45
//   nvgeom mc --shape cap --R 10 --gamma magic --physical water-300K-0.2T
//   nvgeom sweep --shape cap --gamma 54.7356 --R 2:20:19 --N 1e6 --K 16 --seed 7 -o cap.csv
//   nvgeom map --gamma magic --plane y=0 --h-range -5:5 --v-range -3:7 --nh 400 --nv 400
//   nvgeom validate
//
// Exit codes: 0 success, 1 failed validation or runtime error, 2 invalid
// configuration, 3 too many NV/sample pairs inside the proximity cutoff.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nvgeom/runner.hpp"
#include "nvgeom/validation.hpp"

namespace {

using nvgeom::cli::RunConfig;

struct Flags {
  std::string config_path;
  std::string output;
  std::string shape;
  std::string gamma;
  std::string d_nv;
  std::map<std::string, std::string> params;
  std::string n, m, k, seed;
  double r_min_factor = -1.0;
  bool ensemble = false;
  double layer_radius = 1.0, layer_height = 1.0, layer_min_depth = 0.01;
  bool no_clip = false;
  std::string physical;
  std::vector<std::string> analytic;
  std::string plane, h_range, v_range;
  std::size_t nh = 0, nv = 0;
  unsigned threads = 0;
  bool dump_repetitions = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path,
                  "JSON config file, or a CSV written by an earlier run (its header is reused)");
  app->add_option("--gamma", f.gamma, "angle between B0 and the surface normal in degrees, or 'magic'");
  app->add_option("--d-nv", f.d_nv, "physical NV depth with unit (e.g. 10nm); lengths with units are converted");
  app->add_option("-o,--output", f.output, "output CSV path (default: stdout); metadata goes to <output>.json");
  app->add_option("--threads", f.threads, "worker threads (0 = all cores); never changes results");
}

void add_shape(CLI::App* app, Flags& f) {
  app->add_option("--shape", f.shape, "cap | cone | sphere | cylinder | sheet");
  for (const auto& name : nvgeom::cli::param_names()) {
    if (name == "gamma") continue;
    app->add_option("--" + name, f.params[name], "value, list a,b,c or range start:stop:count");
  }
  app->add_flag("--no-clip", f.no_clip, "cone: keep the part below the surface near the apex");
  app->add_option("--physical", f.physical, "physical preset for K and S, e.g. water-300K-0.2T");
}

void add_mc(CLI::App* app, Flags& f) {
  app->add_option("--N", f.n, "sample points per repetition");
  app->add_option("--M", f.m, "NV positions per repetition (needs --ensemble)");
  app->add_option("--K", f.k, "repetitions");
  app->add_option("--seed", f.seed, "64-bit seed");
  app->add_option("--r-min-factor", f.r_min_factor, "skip NV/sample pairs closer than this many d_nv (default 1e-6)");
  app->add_flag("--ensemble", f.ensemble, "average over an NV layer instead of a single NV");
  app->add_option("--layer-radius", f.layer_radius, "NV layer radius (d_nv)");
  app->add_option("--layer-height", f.layer_height, "NV layer height (d_nv)");
  app->add_option("--layer-min-depth", f.layer_min_depth, "shallowest NV depth (d_nv)");
  app->add_flag("--dump-repetitions", f.dump_repetitions, "add per-repetition estimates to the metadata");
}

RunConfig resolve(nvgeom::cli::Command command, const Flags& f, const CLI::App& app) {
  using namespace nvgeom::cli;
  RunConfig c;
  if (!f.config_path.empty()) c = load_config_file(f.config_path);
  c.command = command;
  if (!f.d_nv.empty()) {
    if (f.d_nv == "1" || f.d_nv == "natural") {
      c.d_nv.reset();
    } else {
      c.d_nv = parse_length(f.d_nv);
    }
  }
  if (!f.shape.empty()) c.shape = f.shape;
  if (!f.gamma.empty()) {
    if (f.gamma == "magic") {
      c.gamma_magic = true;
      c.params.erase("gamma");
    } else {
      c.gamma_magic = false;
      c.params["gamma"] = parse_param(f.gamma, false, c.d_nv);
    }
  }
  for (const auto& [name, text] : f.params) {
    if (!text.empty()) c.params[name] = parse_param(text, is_length_param(name), c.d_nv);
  }
  if (f.no_clip) c.cone_clip = false;
  if (!f.n.empty()) c.n = detail::parse_count(f.n);
  if (!f.m.empty()) c.m = detail::parse_count(f.m);
  if (!f.k.empty()) c.k = detail::parse_count(f.k);
  if (!f.seed.empty()) c.seed = detail::parse_count(f.seed);
  if (f.r_min_factor >= 0.0) c.r_min_factor = f.r_min_factor;
  const auto given = [&app](const char* name) {
    const CLI::Option* opt = app.get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (f.ensemble || given("--layer-radius") || given("--layer-height") || given("--layer-min-depth")) {
    c.ensemble = LayerSpec{f.layer_radius, f.layer_height, f.layer_min_depth};
  }
  if (!f.physical.empty()) c.physical = parse_physical_preset(f.physical);
  if (!f.analytic.empty()) c.analytic = f.analytic;
  if (!f.plane.empty()) c.map.plane = parse_plane(f.plane);
  if (!f.h_range.empty()) c.map.h_range = parse_interval(f.h_range);
  if (!f.v_range.empty()) c.map.v_range = parse_interval(f.v_range);
  if (f.nh) c.map.nh = f.nh;
  if (f.nv) c.map.nv = f.nv;
  return c;
}

void write_output(const nvgeom::cli::RunOutput& out, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << out.csv;
    std::cerr << out.meta.dump() << '\n';
    return;
  }
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw nvgeom::ConfigError("cannot write '" + path + "'");
  csv << out.csv;
  std::ofstream meta(path + ".json", std::ios::binary);
  meta << out.meta.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry factors of NV-center sensing volumes"};
  app.require_subcommand(1);
  Flags f;

  auto* analytic = app.add_subcommand("analytic", "closed-form values");
  add_common(analytic, f);
  add_shape(analytic, f);
  for (const char* q : {"g-infinity", "g-cap", "g-cone", "k-prefactor"}) {
    analytic->add_flag_callback(std::string("--") + q, [&f, q] { f.analytic.emplace_back(q); });
  }

  auto* mc = app.add_subcommand("mc", "Monte-Carlo estimate for one shape");
  add_common(mc, f);
  add_shape(mc, f);
  add_mc(mc, f);

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo estimates over a parameter grid");
  add_common(sweep, f);
  add_shape(sweep, f);
  add_mc(sweep, f);

  auto* map = app.add_subcommand("map", "kernel values on a plane");
  add_common(map, f);
  map->add_option("--plane", f.plane, "x=a, y=a or z=a (default y=0)");
  map->add_option("--h-range", f.h_range, "horizontal range lo:hi (d_nv)");
  map->add_option("--v-range", f.v_range, "vertical range lo:hi (d_nv)");
  map->add_option("--nh", f.nh, "horizontal cells");
  map->add_option("--nv", f.nv, "vertical cells");

  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  std::uint64_t validate_seed = 0;
  int only = 0;
  validate->add_option("--seed", validate_seed, "root seed");
  validate->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  validate->add_option("--criterion", only, "run a single criterion (1-12)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      const nvgeom::validation::Options opts{validate_seed, f.threads};
      if (only != 0) {
        const auto r = nvgeom::validation::run_criterion(only, opts);
        std::cout << nvgeom::validation::format(r) << '\n';
        return r.passed ? 0 : 1;
      }
      const auto results = nvgeom::validation::run_all(opts, std::cout);
      for (const auto& r : results) {
        if (!r.passed) return 1;
      }
      return 0;
    }
    using nvgeom::cli::Command;
    const Command command = analytic->parsed() ? Command::Analytic
                            : mc->parsed()     ? Command::Mc
                            : sweep->parsed()  ? Command::Sweep
                                               : Command::Map;
    CLI::App* sub = app.get_subcommands().front();
    const RunConfig config = resolve(command, f, *sub);
    const auto out = nvgeom::cli::run(config, f.threads, f.dump_repetitions);
    write_output(out, f.output);
    return 0;
  } catch (const nvgeom::ProximityError& e) {
    std::cerr << "nvgeom: " << e.what() << '\n';
    return 3;
  } catch (const nvgeom::ConfigError& e) {
    std::cerr << "nvgeom: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const nvgeom::DomainError& e) {
    std::cerr << "nvgeom: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "nvgeom: " << e.what() << '\n';
    return 1;
  }
}
