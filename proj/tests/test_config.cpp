#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lipflow/config.hpp"
#include "lipflow/io.hpp"

using namespace lipflow;
namespace fs = std::filesystem;

TEST_CASE("config parsing: keys, comments, numbers, lists", "[config]") {
  std::stringstream in(
      "# a comment\n"
      "domain.name = disk\n"
      "domain.radius = 1.5\n"
      "\n"
      "solver.L = 4\n"
      "barrier.trace_times = 0.0, 0.5, 1.25\n"
      "checks.energy = false\n");
  auto cfg = Config::parse(in);
  CHECK(cfg.require("domain.name") == "disk");
  CHECK(cfg.require_num("domain.radius") == 1.5);
  CHECK(cfg.num("solver.h", 0.25) == 0.25);
  CHECK_FALSE(cfg.flag("checks.energy", true));
  auto times = cfg.num_list("barrier.trace_times");
  REQUIRE(times.size() == 3);
  CHECK(times[2] == 1.25);

  CHECK_THROWS_AS(cfg.require("nope"), ConfigError);
  CHECK_THROWS_AS(cfg.require_num("domain.name"), ConfigError);
  std::stringstream bad("key value\n");
  CHECK_THROWS_AS(Config::parse(bad), ConfigError);
}

TEST_CASE("scenario construction from a config", "[config]") {
  std::stringstream in(
      "domain.name = disk\n"
      "domain.radius = 1.0\n"
      "integrand.name = quadratic\n"
      "datum.name = rotating\n"
      "datum.T = 1.5707963267948966\n"
      "mesh.target_edge = 0.3\n"
      "solver.h = 0.19634954084936207\n"
      "solver.L = 4.0\n"
      "barrier.x_o_theta = 3.14159265358979312\n");
  auto cfg = Config::parse(in);
  auto s = build_scenario(cfg);
  CHECK(s->mesh.n_vertices() > 10);
  CHECK(s->solver.steps() == 8);
  CHECK(norm(s->x_o - Vec2{-1.0, 0.0}) <= 1e-9);
  auto traj = solve(s->solver);
  CHECK(traj.last_index() == 8);

  std::stringstream bad(
      "domain.name = dodecahedron\n"
      "integrand.name = quadratic\n"
      "datum.name = constant\n");
  auto bad_cfg = Config::parse(bad);
  CHECK_THROWS_AS(build_scenario(bad_cfg), ConfigError);
}

TEST_CASE("tables round-trip at 17 significant digits", "[config]") {
  fs::path dir = fs::temp_directory_path() / "lipflow_io_test";
  fs::create_directories(dir);
  double x = M_PI * 1e-3;
  write_table(dir / "t.dat", "a b", {{x, 1.0 / 3.0}, {-x, 2.0}});
  std::ifstream in(dir / "t.dat");
  std::string header;
  std::getline(in, header);
  CHECK(header == "# a b");
  double a, b;
  in >> a >> b;
  CHECK(a == x);  // bitwise round trip
  CHECK(b == 1.0 / 3.0);
}

TEST_CASE("identical configs give byte-identical tables", "[config]") {
  std::stringstream in(
      "domain.name = disk\n"
      "domain.radius = 1.0\n"
      "integrand.name = quadratic\n"
      "datum.name = rotating\n"
      "datum.T = 0.78539816339744828\n"
      "mesh.target_edge = 0.3\n"
      "solver.h = 0.19634954084936207\n"
      "solver.L = 4.0\n");
  auto cfg = Config::parse(in);

  auto dump = [&](const fs::path& dir) {
    fs::create_directories(dir);
    auto s = build_scenario(cfg, 7);
    auto traj = solve(s->solver);
    std::vector<std::vector<double>> rows;
    for (int k = 0; k < s->mesh.n_vertices(); ++k)
      rows.push_back({s->mesh.vertices[k].x, s->mesh.vertices[k].y, traj.steps.back()[k]});
    write_table(dir / "final.dat", "x1 x2 u", rows);
  };
  fs::path d1 = fs::temp_directory_path() / "lipflow_det_a";
  fs::path d2 = fs::temp_directory_path() / "lipflow_det_b";
  dump(d1);
  dump(d2);
  std::ifstream f1(d1 / "final.dat"), f2(d2 / "final.dat");
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().size() > 100);
}

TEST_CASE("manifest lists every artifact with parameters", "[config]") {
  fs::path dir = fs::temp_directory_path() / "lipflow_manifest_test";
  fs::create_directories(dir);
  Manifest m;
  m.params["solver.L"] = "4.0";
  m.add_file("a.dat", "table a");
  m.add_file("b.csv", "table b");
  m.write(dir / "manifest.txt");
  std::ifstream in(dir / "manifest.txt");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("param solver.L = 4.0") != std::string::npos);
  CHECK(ss.str().find("file a.dat : table a") != std::string::npos);
  CHECK(ss.str().find("file b.csv : table b") != std::string::npos);
}
