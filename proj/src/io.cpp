#include "geoxray/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "geoxray/binary_io.hpp"

namespace geoxray {

using nlohmann::json;

namespace {

template <class Config, class Fn>
void for_each_key(Config& c, Fn&& fn) {
  fn("grid_n", c.grid_n);
  fn("boundary_n", c.boundary_n);
  fn("n_theta", c.n_theta);
  fn("h_step", c.h_step);
  fn("h_interior", c.h_interior);
  fn("t_max", c.t_max);
  fn("tol_exit", c.tol_exit);
  fn("metric", c.metric);
  fn("metric_amplitude", c.metric_amplitude);
  fn("metric_center_x", c.metric_center_x);
  fn("metric_center_y", c.metric_center_y);
  fn("metric_width", c.metric_width);
  fn("phantom", c.phantom);
  fn("attenuation", c.attenuation);
  fn("attenuation_scale", c.attenuation_scale);
  fn("method", c.method);
  fn("neumann_max_iters", c.neumann_max_iters);
  fn("neumann_rel_tol", c.neumann_rel_tol);
  fn("neumann_divergence_guard", c.neumann_divergence_guard);
  fn("fredholm_max_iters", c.fredholm_max_iters);
  fn("fredholm_rel_tol", c.fredholm_rel_tol);
  fn("fredholm_divergence_guard", c.fredholm_divergence_guard);
  fn("seed", c.seed);
  fn("input_dir", c.input_dir);
  fn("output_dir", c.output_dir);
}

template <class T>
void assign(T& field, const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("");
      field = v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("");
      field = v.get<T>();
    } else {
      if (!v.is_number()) throw ConfigError("");
      field = v.get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  RunConfig c;
  std::set<std::string> seen;
  for_each_key(c, [&](const char* key, auto& field) {
    auto it = j.find(key);
    if (it != j.end()) {
      assign(field, *it, key);
      seen.insert(key);
    }
  });
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!seen.count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j = json::object();
  for_each_key(*this, [&](const char* key, const auto& field) { j[key] = field; });
  return j;
}

void RunConfig::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override must be key=value: " + assignment);
  std::string key = assignment.substr(0, eq);
  std::string value = assignment.substr(eq + 1);
  bool found = false;
  for_each_key(*this, [&](const char* k, auto& field) {
    if (key != k) return;
    found = true;
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, std::string>) {
      field = value;
    } else {
      json v;
      try {
        v = json::parse(value);
      } catch (const json::exception&) {
        throw ConfigError("cannot parse value for '" + key + "': " + value);
      }
      assign(field, v, key);
    }
  });
  if (!found) throw ConfigError("unknown config key '" + key + "'");
  validate();
}

void RunConfig::validate() const {
  if (grid_n < 3) throw ConfigError("grid_n must be >= 3");
  if (boundary_n < 16 || boundary_n % 2) throw ConfigError("boundary_n must be even and >= 16");
  if (n_theta < 2 || n_theta % 2) throw ConfigError("n_theta must be even");
  if (!(h_step > 0.0) || !(h_interior > 0.0) || !(t_max > 0.0) || !(tol_exit > 0.0))
    throw ConfigError("step sizes and tolerances must be positive");
  if (metric != "paper" && metric != "euclidean") throw ConfigError("metric must be 'paper' or 'euclidean'");
  if (!(metric_width > 0.0)) throw ConfigError("metric_width must be positive");
  if (method != "neumann" && method != "oneshot" && method != "doppler")
    throw ConfigError("method must be neumann, oneshot or doppler");
  outer().validate();
  inner().validate();
}

ConformalMetric RunConfig::make_metric() const {
  if (metric == "euclidean") return ConformalMetric::euclidean();
  return ConformalMetric::bump_pair(metric_amplitude, {metric_center_x, metric_center_y}, metric_width);
}

// ---- arrays ----------------------------------------------------------------

void write_array(const std::string& base, const std::vector<cplx>& values, const ArrayHeader& header) {
  std::size_t count = 1;
  for (auto s : header.shape) count *= s;
  if (count != values.size()) throw ShapeError("array shape does not match the value count");
  {
    std::ofstream out(base + ".bin", std::ios::binary);
    if (!out) throw IoError("cannot write " + base + ".bin");
    for (const auto& v : values) {
      write_le<double>(out, v.real());
      if (header.complex) write_le<double>(out, v.imag());
    }
    if (!out) throw IoError("short write on " + base + ".bin");
  }
  json side = {{"shape", header.shape},
               {"dtype", header.complex ? "complex128" : "float64"},
               {"byte_order", "little"},
               {"file", std::filesystem::path(base + ".bin").filename().string()},
               {"hash", file_hash(base + ".bin")},
               {"meta", header.meta.is_null() ? json::object() : header.meta}};
  std::ofstream js(base + ".json");
  if (!js) throw IoError("cannot write " + base + ".json");
  js << std::setw(2) << side << '\n';
}

std::vector<cplx> read_array(const std::string& base, ArrayHeader* header) {
  std::ifstream js(base + ".json");
  if (!js) throw IoError("missing sidecar " + base + ".json");
  json side;
  try {
    js >> side;
  } catch (const json::exception& e) {
    throw IoError("malformed sidecar " + base + ".json: " + e.what());
  }
  ArrayHeader h;
  h.shape = side.at("shape").get<std::vector<std::size_t>>();
  std::string dtype = side.at("dtype").get<std::string>();
  if (dtype != "float64" && dtype != "complex128") throw IoError("unsupported dtype " + dtype);
  h.complex = dtype == "complex128";
  h.meta = side.value("meta", json::object());
  std::size_t count = 1;
  for (auto s : h.shape) count *= s;
  std::ifstream in(base + ".bin", std::ios::binary);
  if (!in) throw IoError("cannot open " + base + ".bin");
  std::vector<cplx> v(count);
  for (auto& x : v) {
    double re = read_le<double>(in);
    double im = h.complex ? read_le<double>(in) : 0.0;
    x = {re, im};
  }
  if (!in) throw IoError("truncated array " + base + ".bin");
  if (header) *header = h;
  return v;
}

void write_field(const std::string& base, const ScalarField& f, bool complex, json meta) {
  if (meta.is_null()) meta = json::object();
  meta["grid"] = "disk";
  meta["grid_n"] = f.grid.n();
  write_array(base, f.values, {{static_cast<std::size_t>(f.grid.n()), static_cast<std::size_t>(f.grid.n())}, complex, meta});
}

ScalarField read_field(const std::string& base) {
  ArrayHeader h;
  auto v = read_array(base, &h);
  if (h.shape.size() != 2 || h.shape[0] != h.shape[1]) throw ShapeError(base + " is not a square disk-grid field");
  ScalarField f{DiskGrid(static_cast<int>(h.shape[0]))};
  f.values = std::move(v);
  return f;
}

void write_influx(const std::string& base, const InfluxData& d, bool complex, json meta) {
  if (meta.is_null()) meta = json::object();
  meta["grid"] = "influx";
  meta["boundary_n"] = d.grid.nb();
  write_array(base, d.values,
              {{static_cast<std::size_t>(d.grid.n_beta()), static_cast<std::size_t>(d.grid.nb())}, complex, meta});
}

InfluxData read_influx(const std::string& base) {
  ArrayHeader h;
  auto v = read_array(base, &h);
  if (h.shape.size() != 2 || h.shape[0] != 2 * h.shape[1]) throw ShapeError(base + " is not influx data");
  InfluxData d{BoundaryGrid(static_cast<int>(h.shape[1]))};
  d.values = std::move(v);
  return d;
}

// ---- images ----------------------------------------------------------------

void write_pgm(const std::string& path, const std::vector<double>& values, int rows, int cols, double lo, double hi) {
  if (values.size() != static_cast<std::size_t>(rows) * cols) throw ShapeError("image size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << cols << ' ' << rows << "\n65535\n";
  double span = hi > lo ? hi - lo : 1.0;
  for (double v : values) {
    double t = std::clamp((v - lo) / span, 0.0, 1.0);
    auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    unsigned char b[2] = {static_cast<unsigned char>(q >> 8), static_cast<unsigned char>(q & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 2);
  }
  if (!out) throw IoError("short write on " + path);
}

void write_field_pgm(const std::string& path, const ScalarField& f, double lo, double hi) {
  const DiskGrid& g = f.grid;
  const int n = g.n();
  std::vector<double> img(static_cast<std::size_t>(n) * n, lo);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (g.inside(ix, iy)) img[static_cast<std::size_t>(n - 1 - iy) * n + ix] = f.at(ix, iy).real();
  write_pgm(path, img, n, n, lo, hi);
}

void write_field_pgm(const std::string& path, const ScalarField& f) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int idx : f.grid.mask_nodes()) {
    double v = f.values[idx].real();
    if (first) { lo = hi = v; first = false; }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  write_field_pgm(path, f, lo, hi);
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash " + path);
  std::vector<char> buf(1 << 16);
  std::uint64_t h = fnv1a(nullptr, 0);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(buf.data(), static_cast<std::size_t>(in.gcount()), h);
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

void Manifest::add(const std::string& role, const std::string& path) {
  files_.push_back({{"role", role}, {"path", std::filesystem::path(path).filename().string()}, {"hash", file_hash(path)}});
}

void Manifest::write(const std::string& path) const {
  json j = extra_;
  j["files"] = files_;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << std::setw(2) << j << '\n';
}

json Manifest::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + path + ": " + e.what());
  }
  return j;
}

}  // namespace geoxray
