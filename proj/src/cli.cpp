#include "geoxray/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>

#include "geoxray/diagnostics.hpp"
#include "geoxray/fiber.hpp"
#include "geoxray/fredholm.hpp"
#include "geoxray/inversion.hpp"
#include "geoxray/phantoms.hpp"

namespace geoxray {

namespace fs = std::filesystem;
using nlohmann::json;

ScanConfig scan_config(const RunConfig& cfg) {
  ScanConfig s;
  s.grid_n = cfg.grid_n;
  s.boundary_n = cfg.boundary_n;
  s.n_theta = cfg.n_theta;
  s.trace.h_step = cfg.h_step;
  s.trace.t_max = cfg.t_max;
  s.trace.tol_exit = cfg.tol_exit;
  s.h_interior = cfg.h_interior;
  return s;
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

json run_meta(const RunConfig& cfg) {
  json j;
  j["config"] = cfg.to_json();
  j["metric_hash"] = hex64(cfg.make_metric().hash());
  return j;
}

void window_of(const ScalarField& f, double& lo, double& hi) {
  lo = hi = 0.0;
  bool first = true;
  for (int idx : f.grid.mask_nodes()) {
    double v = f.values[idx].real();
    if (first) {
      lo = hi = v;
      first = false;
    }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

// Field with its image; the image window goes into the sidecar.
void emit_field(Manifest& man, const std::string& dir, const std::string& name, const ScalarField& f) {
  double lo, hi;
  window_of(f, lo, hi);
  json meta = {{"pgm_window", {lo, hi}}};
  std::string base = in_dir(dir, name);
  write_field(base, f, false, meta);
  write_field_pgm(base + ".pgm", f, lo, hi);
  man.add(name, base + ".bin");
  man.add(name + "-sidecar", base + ".json");
  man.add(name + "-image", base + ".pgm");
}

AttenuationProfile load_attenuation(const RunConfig& cfg, const ScalarField& stored) {
  ScalarPhantom a = make_attenuation(cfg.attenuation, cfg.attenuation_scale);
  ScalarField s = a.sample(stored.grid);
  bool same = true;
  for (std::size_t i = 0; i < s.values.size() && same; ++i) same = s.values[i] == stored.values[i];
  if (same && stored.max_abs() > 0.0) return AttenuationProfile(stored, a.fn);
  return AttenuationProfile(stored);
}

void require(const std::string& base) {
  if (!fs::exists(base + ".bin") || !fs::exists(base + ".json")) throw IoError("missing input " + base + ".bin");
}

}  // namespace

int cmd_phantom(const RunConfig& cfg, std::ostream& log) {
  const std::string dir = cfg.output_dir;
  fs::create_directories(dir);
  DiskGrid disk(cfg.grid_n);
  ConformalMetric metric = cfg.make_metric();
  Manifest man;
  man.extra() = run_meta(cfg);
  man.extra()["verb"] = "phantom";

  if (is_vector_phantom(cfg.phantom)) {
    auto [f1, f2] = make_vector_phantom(cfg.phantom).sample(disk);
    emit_field(man, dir, "f1", f1);
    emit_field(man, dir, "f2", f2);
  } else {
    ScalarPhantom p = make_phantom(cfg.phantom);
    emit_field(man, dir, "f", p.sample(disk));
    man.extra()["phantom_bounds"] = {p.lower, p.upper};
  }
  ScalarPhantom a = make_attenuation(cfg.attenuation, cfg.attenuation_scale);
  emit_field(man, dir, "a", a.sample(disk));
  emit_field(man, dir, "c", ScalarField::from_function(disk, [&](Vec2 p) { return metric.sound_speed(p); }));
  man.write(in_dir(dir, "manifest.json"));
  log << "phantom '" << cfg.phantom << "' written to " << dir << '\n';
  return kExitOk;
}

int cmd_forward(const RunConfig& cfg, std::ostream& log) {
  const std::string src = cfg.source_dir();
  const std::string dir = cfg.output_dir;
  const bool vector = is_vector_phantom(cfg.phantom);
  require(in_dir(src, "a"));
  ScalarField a_field = read_field(in_dir(src, "a"));
  if (a_field.grid.n() != cfg.grid_n) throw ConfigError("stored fields do not match grid_n");

  ScanGeometry g(cfg.make_metric(), scan_config(cfg));
  AttenuationProfile a = load_attenuation(cfg, a_field);
  InfluxData data;
  if (vector) {
    require(in_dir(src, "f1"));
    require(in_dir(src, "f2"));
    data = forward_doppler(read_field(in_dir(src, "f1")), read_field(in_dir(src, "f2")), a, g);
  } else {
    require(in_dir(src, "f"));
    data = forward_Ia(read_field(in_dir(src, "f")), a, g);
  }

  fs::create_directories(dir);
  Manifest man;
  man.extra() = run_meta(cfg);
  man.extra()["verb"] = "forward";
  man.extra()["endpoint_key"] = hex64(endpoint_key(g.metric(), g.trace()));
  man.extra()["influx_shape"] = {g.boundary().n_beta(), g.boundary().nb()};

  std::vector<double> img(data.values.size());
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < img.size(); ++i) {
    img[i] = data.values[i].real();
    lo = std::min(lo, img[i]);
    hi = std::max(hi, img[i]);
  }
  std::string base = in_dir(dir, "data");
  write_influx(base, data, false, {{"pgm_window", {lo, hi}}});
  write_pgm(base + ".pgm", img, g.boundary().n_beta(), g.boundary().nb(), lo, hi);
  man.add("data", base + ".bin");
  man.add("data-sidecar", base + ".json");
  man.add("data-image", base + ".pgm");
  man.write(in_dir(dir, "manifest.json"));
  log << "forward data " << g.boundary().n_beta() << "x" << g.boundary().nb() << " written to " << dir << '\n';
  return kExitOk;
}

int cmd_invert(const RunConfig& cfg, std::ostream& log) {
  const std::string src = cfg.source_dir();
  const std::string dir = cfg.output_dir;
  const bool vector = is_vector_phantom(cfg.phantom);
  if (vector != (cfg.method == "doppler"))
    throw ConfigError("method '" + cfg.method + "' does not apply to phantom '" + cfg.phantom + "'");
  require(in_dir(src, "data"));
  require(in_dir(src, "a"));
  InfluxData data = read_influx(in_dir(src, "data"));
  if (data.grid.nb() != cfg.boundary_n) throw ConfigError("stored data do not match boundary_n");
  ScalarField a_field = read_field(in_dir(src, "a"));

  ScanGeometry g(cfg.make_metric(), scan_config(cfg));
  AttenuationProfile a = load_attenuation(cfg, a_field);

  std::optional<ScalarField> t1, t2;
  if (vector) {
    if (fs::exists(in_dir(src, "f1.bin")) && fs::exists(in_dir(src, "f2.bin"))) {
      t1 = read_field(in_dir(src, "f1"));
      t2 = read_field(in_dir(src, "f2"));
    }
  } else if (fs::exists(in_dir(src, "f.bin"))) {
    t1 = read_field(in_dir(src, "f"));
  }

  ReconstructionOptions opt;
  opt.outer = cfg.outer();
  opt.inner = cfg.inner();
  if (t1) opt.truth = &*t1;
  if (t2) opt.truth2 = &*t2;

  auto start = std::chrono::steady_clock::now();
  ReconstructionReport rep;
  if (cfg.method == "neumann")
    rep = neumann_reconstruct(data, a, g, opt);
  else if (cfg.method == "oneshot")
    rep = oneshot_reconstruct(data, a, g, opt);
  else
    rep = doppler_reconstruct(data, a, g, opt);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  fs::create_directories(dir);
  Manifest man;
  man.extra() = run_meta(cfg);
  man.extra()["verb"] = "invert";
  man.extra()["status"] = to_string(rep.status);
  man.extra()["imag_residue"] = rep.imag_residue;
  man.extra()["seconds"] = seconds;
  if (vector) {
    emit_field(man, dir, "estimate1", rep.estimate);
    emit_field(man, dir, "estimate2", *rep.estimate2);
    man.extra()["supported_fraction"] = rep.supported_fraction;
  } else {
    emit_field(man, dir, "estimate", rep.estimate);
  }
  if (t1) {
    ScalarField err(g.disk());
    for (int idx : g.disk().mask_nodes()) {
      double e = std::norm(rep.estimate.values[idx] - t1->values[idx]);
      if (t2) e += std::norm(rep.estimate2->values[idx] - t2->values[idx]);
      err.values[idx] = std::sqrt(e);
    }
    emit_field(man, dir, "error", err);
  }
  std::string csv = in_dir(dir, "iterations.csv");
  {
    std::ofstream out(csv);
    if (!out) throw IoError("cannot write " + csv);
    out << std::setprecision(17);
    write_iterates_csv(out, rep.iterates);
  }
  man.add("iterations", csv);
  man.write(in_dir(dir, "manifest.json"));

  for (const auto& r : rep.iterates)
    log << "iterate " << r.iteration << "  error " << r.error << "  residual " << r.residual << "  step "
        << r.step_change << '\n';
  log << "status " << to_string(rep.status) << " (" << seconds << " s)\n";
  return rep.status == NeumannStatus::diverged ? kExitDiverged : kExitOk;
}

// ---- selftest --------------------------------------------------------------

namespace {

struct Row {
  std::string suite, name;
  double value, tol;
  bool pass() const { return value <= tol; }
};

class Table {
 public:
  explicit Table(std::ostream& log) : log_(log) {}

  void add(const std::string& suite, const std::string& name, double value, double tol) {
    Row r{suite, name, value, tol};
    log_ << std::left << std::setw(10) << suite << std::setw(40) << name << std::right << std::setw(13)
         << std::scientific << std::setprecision(3) << value << "  <= " << std::setw(10) << tol << "  "
         << (r.pass() ? "PASS" : "FAIL") << std::defaultfloat << '\n';
    failures_ += r.pass() ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  std::ostream& log_;
  int failures_ = 0;
};

void adjoint_rows(Table& t, const std::string& suite, const ScanGeometry& g, std::mt19937_64& rng) {
  ScalarField f = random_smooth_field(g.disk(), rng);
  InfluxData d = random_smooth_data(g.boundary(), rng);
  t.add(suite, "<I0 f, d> vs <f, I0* d>", relative_mismatch(inner_mu(forward_I0(f, g), d, g), inner_M(f, adjoint_I0(d, g), g)),
        0.02);
  t.add(suite, "<Iperp h, d> vs <h, Iperp* d>",
        relative_mismatch(inner_mu(forward_Iperp(f, g), d, g), inner_M(f, adjoint_Iperp(d, g), g)), 0.02);
  t.add(suite, "Range I0 in V+", vpm_leak(forward_I0(f, g), g, +1), 0.02);
  t.add(suite, "Range Iperp in V-", vpm_leak(forward_Iperp(f, g), g, -1), 0.02);
}

}  // namespace

int cmd_selftest(const RunConfig& cfg, std::ostream& log) {
  std::mt19937_64 rng(cfg.seed);
  Table t(log);
  ScanConfig sc = scan_config(cfg);
  sc.grid_n = 65;
  sc.boundary_n = 64;

  t.add("fiber", "H^2 = -Id + pi_0", hilbert_square_error(64, cfg.n_theta, rng), 1e-12);

  {
    ScanGeometry g(ConformalMetric::euclidean(), sc);
    t.add("euclid", "tau = 2 cos alpha", chord_tau_error(g), 1e-4);
    t.add("euclid", "alpha_1 chord map", chord_alpha1_error(g), 1e-4);
    t.add("euclid", "I0 1 = 2 cos alpha", unit_chord_error(g), 1e-4);
    ScalarField f = random_smooth_field(g.disk(), rng, 0.7);
    t.add("euclid", "FredW = Id", relative_error(op_FredW(f, g), f, g), 0.03);
    adjoint_rows(t, "euclid", g, rng);
  }
  {
    ScanGeometry g(ConformalMetric::bump_pair(cfg.metric_amplitude, {cfg.metric_center_x, cfg.metric_center_y},
                                              cfg.metric_width),
                   sc);
    adjoint_rows(t, "paper", g, rng);
  }
  {
    fs::path bad = fs::temp_directory_path() / ("geoxray_selftest_" + std::to_string(cfg.seed) + ".gxet");
    {
      std::ofstream out(bad, std::ios::binary);
      out << "XXXX-not-an-endpoint-table";
    }
    double surfaced = 1.0;
    try {
      (void)GeodesicEndpointTable::load(bad.string());
    } catch (const IoError&) {
      surfaced = 0.0;
    }
    fs::remove(bad);
    t.add("cache", "bad magic raises IoError", surfaced, 0.0);
  }
  log << (t.failures() == 0 ? "all checks passed" : std::to_string(t.failures()) + " check(s) failed") << '\n';
  return t.failures() == 0 ? kExitOk : kExitError;
}

}  // namespace geoxray
