#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoxray/fredholm.hpp"
#include "geoxray/geometry.hpp"
#include "geoxray/types.hpp"

namespace geoxray {

// Flat run configuration. Every key has a default; unknown keys are rejected.
struct RunConfig {
  int grid_n = 300;
  int boundary_n = 300;
  int n_theta = 64;
  double h_step = 1e-3;
  double h_interior = 0.02;
  double t_max = 10.0;
  double tol_exit = 1e-10;

  std::string metric = "paper";  // "paper" (bump pair) or "euclidean"
  double metric_amplitude = 0.2;
  double metric_center_x = 0.3;
  double metric_center_y = 0.3;
  double metric_width = 0.25;

  std::string phantom = "smooth-gaussians";
  std::string attenuation = "jumpy";
  double attenuation_scale = 1.0;
  std::string method = "neumann";  // neumann | oneshot | doppler

  int neumann_max_iters = 8;
  double neumann_rel_tol = 1e-6;
  double neumann_divergence_guard = 10.0;
  int fredholm_max_iters = 8;
  double fredholm_rel_tol = 1e-6;
  double fredholm_divergence_guard = 10.0;

  std::uint64_t seed = 0;
  std::string input_dir;   // defaults to output_dir
  std::string output_dir = ".";

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
  // key=value override, value parsed with the type of the key.
  void set(const std::string& assignment);
  void validate() const;

  ConformalMetric make_metric() const;
  NeumannConfig outer() const { return {neumann_max_iters, neumann_rel_tol, neumann_divergence_guard}; }
  NeumannConfig inner() const { return {fredholm_max_iters, fredholm_rel_tol, fredholm_divergence_guard}; }
  std::string source_dir() const { return input_dir.empty() ? output_dir : input_dir; }
};

// Flat little-endian f64 array (`dtype` float64, or complex128 stored as
// interleaved re/im) at base + ".bin" with a JSON sidecar at base + ".json".
struct ArrayHeader {
  std::vector<std::size_t> shape;
  bool complex = false;
  nlohmann::json meta;
};

void write_array(const std::string& base, const std::vector<cplx>& values, const ArrayHeader& header);
std::vector<cplx> read_array(const std::string& base, ArrayHeader* header = nullptr);

void write_field(const std::string& base, const ScalarField& f, bool complex = false, nlohmann::json meta = {});
ScalarField read_field(const std::string& base);
void write_influx(const std::string& base, const InfluxData& d, bool complex = false, nlohmann::json meta = {});
InfluxData read_influx(const std::string& base);

// 16-bit binary PGM of a rows x cols image, linearly windowed to [lo, hi].
void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols, double lo, double hi);
// Image of the field on the disk grid (rows top to bottom = decreasing y),
// masked nodes outside the disk set to the window minimum.
void write_field_pgm(const std::string& path, const ScalarField& f, double lo, double hi);
void write_field_pgm(const std::string& path, const ScalarField& f);

// FNV-1a of a whole file, as 16 hex digits.
std::string file_hash(const std::string& path);

// Records output files with their hashes.
class Manifest {
 public:
  void add(const std::string& role, const std::string& path);
  nlohmann::json& extra() { return extra_; }
  void write(const std::string& path) const;
  static nlohmann::json read(const std::string& path);

 private:
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json extra_ = nlohmann::json::object();
};

}  // namespace geoxray
