#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <sys/wait.h>

#include "geoxray/cli.hpp"
#include "geoxray/io.hpp"

using namespace geoxray;
namespace fs = std::filesystem;

namespace {

RunConfig tiny(const std::string& dir) {
  RunConfig c;
  c.grid_n = 25;
  c.boundary_n = 24;
  c.n_theta = 24;
  c.h_step = 1e-2;
  c.metric = "euclidean";
  c.attenuation = "smooth";
  c.output_dir = dir;
  return c;
}

fs::path fresh(const std::string& name) {
  fs::path p = fs::temp_directory_path() / "geoxray_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("phantom, forward and invert") {
  RunConfig c = tiny(fresh("pipeline").string());
  std::ostringstream log;
  CHECK(cmd_phantom(c, log) == kExitOk);
  CHECK(cmd_forward(c, log) == kExitOk);
  CHECK(cmd_invert(c, log) == kExitOk);
  for (const char* f : {"f.bin", "a.bin", "c.bin", "data.bin", "data.json", "data.pgm", "estimate.bin", "error.bin",
                        "iterations.csv", "manifest.json"})
    CHECK(fs::exists(fs::path(c.output_dir) / f));
  auto m = Manifest::read((fs::path(c.output_dir) / "manifest.json").string());
  CHECK(m["verb"] == "invert");
}

TEST_CASE("forward data is deterministic") {
  RunConfig a = tiny(fresh("det_a").string());
  RunConfig b = tiny(fresh("det_b").string());
  std::ostringstream log;
  for (RunConfig* c : {&a, &b}) {
    REQUIRE(cmd_phantom(*c, log) == kExitOk);
    REQUIRE(cmd_forward(*c, log) == kExitOk);
  }
  CHECK(file_hash((fs::path(a.output_dir) / "data.bin").string()) ==
        file_hash((fs::path(b.output_dir) / "data.bin").string()));
}

TEST_CASE("invert errors") {
  RunConfig c = tiny(fresh("errors").string());
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_invert(c, log), IoError);
  REQUIRE(cmd_phantom(c, log) == kExitOk);
  REQUIRE(cmd_forward(c, log) == kExitOk);
  c.method = "doppler";
  CHECK_THROWS_AS(cmd_invert(c, log), ConfigError);
  c.method = "neumann";
  c.boundary_n = 32;
  CHECK_THROWS_AS(cmd_invert(c, log), ConfigError);
}

TEST_CASE("command-line exit codes") {
  const std::string exe = GEOXRAY_CLI_PATH;
  fs::path dir = fresh("exe");
  auto run = [&](const std::string& args) {
    std::string cmd = exe + " " + args + " > " + (dir / "out.txt").string() + " 2>&1";
    int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(run("phantom --set output_dir=" + dir.string() + " --set grid_n=17") == kExitOk);
  CHECK(run("phantom --set bogus=1") == kExitError);
  CHECK(run("phantom --config " + (dir / "missing.json").string()) == kExitError);
  CHECK(run("invert --set output_dir=" + (dir / "empty").string()) == kExitError);
  CHECK(run("") != kExitOk);
}
