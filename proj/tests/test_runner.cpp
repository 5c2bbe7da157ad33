// Copyright 2026 The nvgeom Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "nvgeom/runner.hpp"

namespace nvgeom::cli {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

RunConfig small_sweep() {
  RunConfig c;
  c.command = Command::Sweep;
  c.shape = "cap";
  c.params["R"] = linspace(2, 6, 3);
  c.n = 20'000;
  c.k = 4;
  c.seed = 7;
  return c;
}

TEST(Parse, ScalarsListsAndRanges) {
  EXPECT_EQ(parse_param("10", true, std::nullopt), std::vector<double>{10});
  EXPECT_EQ(parse_param("1,2.5,4", true, std::nullopt), (std::vector<double>{1, 2.5, 4}));
  const auto r = parse_param("2:20:19", true, std::nullopt);
  ASSERT_EQ(r.size(), 19u);
  EXPECT_EQ(r.front(), 2.0);
  EXPECT_EQ(r.back(), 20.0);
  EXPECT_THROW(parse_param("2:20", true, std::nullopt), ConfigError);
  EXPECT_THROW(parse_param("abc", true, std::nullopt), ConfigError);
  EXPECT_THROW(parse_param("1:2:0", true, std::nullopt), ConfigError);
  EXPECT_EQ(detail::parse_count("1e6"), 1'000'000u);
  EXPECT_THROW(detail::parse_count("1.5"), ConfigError);
}

TEST(Parse, LengthUnits) {
  EXPECT_DOUBLE_EQ(parse_physical_length("10um"), 1e-5);
  EXPECT_DOUBLE_EQ(parse_physical_length("150nm"), 1.5e-7);
  EXPECT_THROW(parse_physical_length("10"), ConfigError);
  const Length d = parse_length("10um");
  EXPECT_DOUBLE_EQ(parse_param("100um", true, d).front(), 10.0);
  EXPECT_DOUBLE_EQ(parse_param("1e-4m", true, d).front(), 10.0);
  EXPECT_DOUBLE_EQ(parse_param("20000nm", true, d).front(), 2.0);
  // same unit as d_nv: exact, so G never moves by an ulp
  EXPECT_EQ(parse_param("20um,40um,60um", true, d), (std::vector<double>{2.0, 4.0, 6.0}));
  EXPECT_EQ(length_string(parse_length("150nm")), "150nm");
  EXPECT_THROW(parse_param("100um", true, std::nullopt), ConfigError);
  // angles never take length units
  EXPECT_THROW(parse_param("45um", false, d), ConfigError);
}

TEST(Parse, PhysicalPresetsAndPlanes) {
  const auto p = parse_physical_preset("water-300K-0.2T");
  EXPECT_DOUBLE_EQ(p.temperature, 300);
  EXPECT_DOUBLE_EQ(p.b0, 0.2);
  EXPECT_DOUBLE_EQ(parse_physical_preset("water-77K-1T").b0, 1.0);
  EXPECT_THROW(parse_physical_preset("oil-300K"), ConfigError);
  const auto plane = parse_plane("x=0.5");
  EXPECT_EQ(plane.normal, Axis::X);
  EXPECT_DOUBLE_EQ(plane.offset, 0.5);
  EXPECT_THROW(parse_plane("w=1"), ConfigError);
  EXPECT_THROW(parse_interval("3:1"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c = small_sweep();
  c.gamma_magic = false;
  c.params["gamma"] = {30};
  c.ensemble = LayerSpec{0.5, 0.5, 0.02};
  c.m = 3;
  c.physical = PhysicalParams::water();
  c.d_nv = parse_length("20nm");
  const Json j = to_json(c);
  const RunConfig back = config_from_json(j);
  EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Config, EchoedHeaderReproducesOutput) {
  const auto first = run(small_sweep(), 1);
  const auto path = std::filesystem::temp_directory_path() / "nvgeom_echo_test.csv";
  std::ofstream(path) << first.csv;
  const RunConfig again = load_config_file(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(run(again, 3).csv, first.csv);
}

TEST(Config, UnknownKeysAndValuesAreErrors) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"params":{"Q":1}})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"command":"plot"})")), ConfigError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"mc":{"N":"many"}})")), ConfigError);
}

TEST(Run, SweepCsvLayout) {
  const auto out = run(small_sweep(), 1);
  const auto rows = lines(out.csv);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].rfind("# {", 0), 0u);
  const auto header = Json::parse(rows[0].substr(2));
  EXPECT_EQ(header["schema_version"], kCsvSchemaVersion);
  EXPECT_EQ(header["seed"], 7);
  EXPECT_EQ(rows[1], "R,g_mean,g_stderr,g_analytic,K,S");
  EXPECT_EQ(rows[2].rfind("2,", 0), 0u);
  EXPECT_TRUE(out.meta.contains("wall_time_s"));
  EXPECT_TRUE(out.meta.contains("argmax"));
}

TEST(Run, SweepUsesDerivedSeeds) {
  const RunConfig c = small_sweep();
  const auto rows = lines(run(c, 1).csv);
  McConfig mc;
  mc.n_sample_points = c.n;
  mc.n_repetitions = c.k;
  mc.seed = derive_seed(c.seed, 1);
  const auto r = estimate_g(SphericalCap{4}, SensorFrame(kMagicAngle), mc);
  EXPECT_EQ(rows[3].rfind("4," + detail::format_double(r.g_mean) + ",", 0), 0u);
}

TEST(Run, ThreadCountNeverChangesCsv) {
  const auto one = run(small_sweep(), 1).csv;
  EXPECT_EQ(run(small_sweep(), 4).csv, one);
  EXPECT_EQ(run(small_sweep(), 16).csv, one);
}

TEST(Run, PhysicalUnitsOnlyChangeTheHeader) {
  RunConfig natural = small_sweep();
  RunConfig physical = small_sweep();
  physical.d_nv = parse_length("10um");
  physical.params["R"] = parse_param("20um:60um:3", true, physical.d_nv);
  const auto a = lines(run(natural, 1).csv);
  const auto b = lines(run(physical, 1).csv);
  ASSERT_EQ(a.size(), b.size());
  EXPECT_NE(a[0], b[0]);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Run, SignalColumns) {
  RunConfig c = small_sweep();
  c.physical = PhysicalParams::water();
  const auto rows = lines(run(c, 1).csv);
  std::istringstream row(rows[4]);
  std::vector<double> v;
  for (std::string cell; std::getline(row, cell, ',');) v.push_back(std::stod(cell));
  ASSERT_EQ(v.size(), 6u);
  EXPECT_EQ(v[4], k_prefactor(PhysicalParams::water()));
  EXPECT_DOUBLE_EQ(v[5], v[4] * v[1]);
}

TEST(Run, McRefusesGrids) {
  RunConfig c = small_sweep();
  c.command = Command::Mc;
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Run, ShapeParameterErrors) {
  RunConfig c;
  c.shape = "cap";
  EXPECT_THROW(run(c), ConfigError);  // no R
  c.params["R"] = {0.5};
  EXPECT_THROW(run(c), DomainError);
  c.shape = "cylinder";
  c.params["R"] = {1};
  c.params["H"] = {1};
  c.params["volume"] = {3};
  EXPECT_THROW(run(c), ConfigError);
}

TEST(Run, AnalyticQuantities) {
  RunConfig c;
  c.command = Command::Analytic;
  c.gamma_magic = false;
  c.params["gamma"] = {45};
  c.analytic = {"g-infinity"};
  const auto rows = lines(run(c).csv);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2], "g_infinity,3.1415926535897931");
}

TEST(Run, MapHeaderCarriesFrame) {
  RunConfig c;
  c.command = Command::Map;
  c.map.nh = 20;
  c.map.nv = 20;
  const auto out = run(c);
  const auto rows = lines(out.csv);
  EXPECT_EQ(rows.size(), 2u + 400u);
  const auto header = Json::parse(rows[0].substr(2));
  EXPECT_EQ(header["positive_regions"], 2);
  EXPECT_EQ(header["negative_regions"], 2);
  EXPECT_TRUE(header.contains("color_clamp_p99_5"));
}

}  // namespace
}  // namespace nvgeom::cli
