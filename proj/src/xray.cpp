#include "geoxray/xray.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <sstream>

#include "geoxray/binary_io.hpp"

namespace geoxray {

// ---- interior endpoints --------------------------------------------------

std::uint64_t interior_key(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                           const TraceOptions& opt) {
  std::uint64_t h = endpoint_key(m, opt);
  std::int64_t sizes[2] = {disk.n(), fiber.n()};
  return fnv1a(sizes, sizeof(sizes), h);
}

InteriorEndpoints InteriorEndpoints::build(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                                           const TraceOptions& opt) {
  InteriorEndpoints t;
  t.disk_ = disk;
  t.fiber_ = fiber;
  t.key_ = interior_key(m, disk, fiber, opt);
  const auto& nodes = disk.mask_nodes();
  const int nt = fiber.n();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(nodes.size());
  t.beta_.assign(nodes.size() * nt, 0.0);
  t.alpha_.assign(nodes.size() * nt, 0.0);
  std::vector<std::uint8_t> ok(nodes.size() * nt, 1);

#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t mi = 0; mi < count; ++mi) {
    Vec2 x = disk.point(nodes[mi]);
    for (int k = 0; k < nt; ++k) {
      std::size_t idx = static_cast<std::size_t>(mi) * nt + k;
      try {
        auto [c, time] = trace_to_influx(m, PhasePoint{x, fiber.theta(k)}, opt);
        (void)time;
        t.beta_[idx] = c.beta;
        t.alpha_[idx] = c.alpha;
      } catch (const Error&) {
        ok[idx] = 0;
      }
    }
  }

  for (std::size_t mi = 0; mi < nodes.size(); ++mi) {
    for (int k = 0; k < nt; ++k) {
      std::size_t idx = mi * nt + k;
      if (ok[idx]) continue;
      Vec2 x = disk.point(nodes[mi]);
      double best = 1e300;
      std::size_t src = idx;
      for (std::size_t mj = 0; mj < nodes.size(); ++mj) {
        std::size_t jdx = mj * nt + k;
        if (!ok[jdx]) continue;
        double d2 = (disk.point(nodes[mj]) - x).norm2();
        if (d2 < best) { best = d2; src = jdx; }
      }
      if (src == idx) throw NonTrappingError("no interior trace succeeded");
      t.beta_[idx] = t.beta_[src];
      t.alpha_[idx] = t.alpha_[src];
      ++t.flagged_;
    }
  }
  return t;
}

namespace {
constexpr char kInteriorMagic[4] = {'G', 'X', 'E', 'I'};
constexpr std::uint32_t kInteriorVersion = 1;
}  // namespace

void InteriorEndpoints::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write interior endpoints " + path);
  out.write(kInteriorMagic, 4);
  write_le<std::uint32_t>(out, kInteriorVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(disk_.n()));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(fiber_.n()));
  write_le<std::uint64_t>(out, key_);
  write_le<std::uint64_t>(out, flagged_);
  for (double v : beta_) write_le<double>(out, v);
  for (double v : alpha_) write_le<double>(out, v);
  if (!out) throw IoError("short write on interior endpoints " + path);
}

InteriorEndpoints InteriorEndpoints::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open interior endpoints " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kInteriorMagic, 4) != 0) throw IoError("bad magic in interior endpoints " + path);
  if (read_le<std::uint32_t>(in) != kInteriorVersion) throw IoError("unsupported interior endpoints version");
  auto n = read_le<std::uint32_t>(in);
  auto nt = read_le<std::uint32_t>(in);
  if (n < 3 || n > 100000 || nt < 2 || nt % 2 || nt > 100000) throw IoError("invalid sizes in " + path);
  InteriorEndpoints t;
  t.disk_ = DiskGrid(static_cast<int>(n));
  t.fiber_ = FiberGrid(static_cast<int>(nt));
  t.key_ = read_le<std::uint64_t>(in);
  t.flagged_ = read_le<std::uint64_t>(in);
  const std::size_t total = t.disk_.mask_nodes().size() * nt;
  t.beta_.resize(total);
  t.alpha_.resize(total);
  for (auto& v : t.beta_) v = read_le<double>(in);
  for (auto& v : t.alpha_) v = read_le<double>(in);
  if (!in) throw IoError("truncated interior endpoints " + path);
  return t;
}

InteriorEndpoints load_or_build_interior(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                                         const TraceOptions& opt) {
  const char* dir = std::getenv("GEOXRAY_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return InteriorEndpoints::build(m, disk, fiber, opt);
  std::uint64_t key = interior_key(m, disk, fiber, opt);
  std::ostringstream name;
  name << "interior_" << std::hex << key << std::dec << ".gxei";
  std::filesystem::path path = std::filesystem::path(dir) / name.str();
  if (std::filesystem::exists(path)) {
    try {
      auto t = InteriorEndpoints::load(path.string());
      if (t.key() == key && t.disk() == disk && t.fiber() == fiber) return t;
    } catch (const IoError& e) {
      std::cerr << "geoxray: rebuilding interior cache " << path.string() << ": " << e.what() << '\n';
    }
  }
  auto t = InteriorEndpoints::build(m, disk, fiber, opt);
  std::filesystem::create_directories(dir);
  t.save(path.string());
  return t;
}

// ---- scan geometry -------------------------------------------------------

ScanGeometry::ScanGeometry(ConformalMetric metric, const ScanConfig& cfg)
    : metric_(std::move(metric)),
      cfg_(cfg),
      disk_(cfg.grid_n),
      boundary_(cfg.boundary_n),
      fiber_(cfg.n_theta),
      lazy_(std::make_shared<Lazy>()) {
  if (cfg.h_interior <= 0.0) throw ConfigError("h_interior must be positive");
  table_ = std::make_shared<const GeodesicEndpointTable>(load_or_build_table(metric_, boundary_, cfg_.trace));
  auto lam = std::make_shared<std::vector<double>>(disk_.size());
  for (std::size_t i = 0; i < disk_.size(); ++i) (*lam)[i] = metric_.lambda(disk_.point(static_cast<int>(i)));
  lambda_ = lam;
  auto lb = std::make_shared<std::vector<double>>(boundary_.n_beta());
  for (int i = 0; i < boundary_.n_beta(); ++i) {
    double b = boundary_.beta(i);
    (*lb)[i] = metric_.lambda({std::cos(b), std::sin(b)});
  }
  lambda_bdry_ = lb;
}

const InteriorEndpoints& ScanGeometry::interior() const {
  std::call_once(lazy_->once, [this] {
    TraceOptions opt = cfg_.trace;
    opt.h_step = cfg_.h_interior;
    lazy_->interior.emplace(load_or_build_interior(metric_, disk_, fiber_, opt));
  });
  return *lazy_->interior;
}

double AttenuationProfile::max_abs() const {
  double m = 0.0;
  for (int idx : a.grid.mask_nodes()) m = std::max(m, std::abs(a.values[idx]));
  return m;
}

// ---- grid calculus -------------------------------------------------------

void extend_exterior(ScalarField& f) {
  const DiskGrid& g = f.grid;
  const int n = g.n();
  std::vector<std::uint8_t> filled(g.size(), 0);
  for (int idx : g.mask_nodes()) filled[idx] = 1;
  std::vector<std::pair<int, cplx>> ring;
  for (;;) {
    ring.clear();
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        int idx = g.index(ix, iy);
        if (filled[idx]) continue;
        cplx s{};
        int c = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            int jx = ix + dx, jy = iy + dy;
            if ((dx || dy) && jx >= 0 && jy >= 0 && jx < n && jy < n && filled[g.index(jx, jy)]) {
              s += f.values[g.index(jx, jy)];
              ++c;
            }
          }
        if (c) ring.emplace_back(idx, s / static_cast<double>(c));
      }
    if (ring.empty()) break;
    for (auto& [idx, v] : ring) {
      f.values[idx] = v;
      filled[idx] = 1;
    }
  }
}

namespace {

// Derivative along one axis at (ix, iy) using mask nodes only.
cplx axis_derivative(const ScalarField& f, int ix, int iy, int ax, int ay, double h) {
  const DiskGrid& g = f.grid;
  bool p1 = g.inside(ix + ax, iy + ay);
  bool m1 = g.inside(ix - ax, iy - ay);
  auto v = [&](int k) { return f.at(ix + k * ax, iy + k * ay); };
  if (p1 && m1) return (v(1) - v(-1)) / (2.0 * h);
  if (p1) {
    if (g.inside(ix + 2 * ax, iy + 2 * ay)) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    return (v(1) - v(0)) / h;
  }
  if (m1) {
    if (g.inside(ix - 2 * ax, iy - 2 * ay)) return (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
    return (v(0) - v(-1)) / h;
  }
  return 0.0;
}

}  // namespace

Gradient gradient(const ScalarField& f) {
  const DiskGrid& g = f.grid;
  Gradient out{ScalarField(g), ScalarField(g)};
  const double h = g.spacing();
  const auto& nodes = g.mask_nodes();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    int idx = nodes[m];
    int ix = idx % g.n(), iy = idx / g.n();
    out.dx.values[idx] = axis_derivative(f, ix, iy, 1, 0, h);
    out.dy.values[idx] = axis_derivative(f, ix, iy, 0, 1, h);
  }
  extend_exterior(out.dx);
  extend_exterior(out.dy);
  return out;
}

ScalarField dbar(const ScalarField& f) {
  Gradient gr = gradient(f);
  ScalarField out(f.grid);
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = 0.5 * (gr.dx.values[i] + cplx(0.0, 1.0) * gr.dy.values[i]);
  return out;
}

namespace {

double det3(const double m[3][3]) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

ScalarField dbar_fit(const ScalarField& f, double sigma_cells, const std::vector<std::uint8_t>* use) {
  if (!(sigma_cells > 0.0)) throw DomainError("fit width must be positive");
  const DiskGrid& disk = f.grid;
  const int n = disk.n();
  const int reach = static_cast<int>(std::ceil(2.5 * sigma_cells));
  const double h = disk.spacing();
  auto usable = [&](int idx) { return disk.inside(idx) && (!use || (*use)[idx]); };
  ScalarField out(disk);
  const auto& nodes = disk.mask_nodes();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t m = 0; m < count; ++m) {
    const int idx = nodes[m];
    if (!usable(idx)) continue;
    const int ix = idx % n, iy = idx / n;
    // Normal equations for f ~ c + bx (x - x0) + by (y - y0).
    double s[3][3] = {};
    cplx r[3] = {};
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const int jx = ix + dx, jy = iy + dy;
        if (jx < 0 || jy < 0 || jx >= n || jy >= n) continue;
        const int j = disk.index(jx, jy);
        if (!usable(j)) continue;
        const double w = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_cells * sigma_cells));
        const double b[3] = {1.0, dx * h, dy * h};
        for (int p = 0; p < 3; ++p) {
          r[p] += w * b[p] * f.values[j];
          for (int q = 0; q < 3; ++q) s[p][q] += w * b[p] * b[q];
        }
      }
    const double d = det3(s);
    if (std::abs(d) < 1e-300) continue;
    cplx grad[2];
    for (int col = 1; col <= 2; ++col) {
      double re[3][3], im[3][3];
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) {
          re[p][q] = q == col ? r[p].real() : s[p][q];
          im[p][q] = q == col ? r[p].imag() : s[p][q];
        }
      grad[col - 1] = cplx(det3(re), det3(im)) / d;
    }
    out.values[idx] = 0.5 * (grad[0] + cplx(0.0, 1.0) * grad[1]);
  }
  return out;
}

ScalarField exp_lambda(const ScanGeometry& g, double s) {
  ScalarField out(g.disk());
  const auto& lam = g.lambda_nodes();
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = std::exp(s * lam[i]);
  return out;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
  if (!a.same_grid(b)) throw ShapeError("scalar field grid mismatch");
  ScalarField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] *= b.values[i];
  return r;
}

cplx inner_M(const ScalarField& f1, const ScalarField& f2, const ScanGeometry& g) {
  if (!(f1.grid == g.disk()) || !(f2.grid == g.disk())) throw ShapeError("field does not match the scan grid");
  const auto& lam = g.lambda_nodes();
  const double h2 = g.disk().spacing() * g.disk().spacing();
  cplx s{};
  for (int idx : g.disk().mask_nodes()) s += f1.values[idx] * std::conj(f2.values[idx]) * std::exp(2.0 * lam[idx]);
  return s * h2;
}

double norm_M(const ScalarField& f, const ScanGeometry& g) { return std::sqrt(std::abs(inner_M(f, f, g))); }

cplx inner_mu(const InfluxData& d1, const InfluxData& d2, const ScanGeometry& g) {
  const BoundaryGrid& bg = g.boundary();
  if (!(d1.grid == bg) || !(d2.grid == bg)) throw ShapeError("data does not match the boundary grid");
  const double w = bg.delta() * bg.delta();
  cplx s{};
  for (int i = 0; i < bg.n_beta(); ++i) {
    cplx row{};
    for (int j = 0; j < bg.nb(); ++j) row += d1.at(i, j) * std::conj(d2.at(i, j)) * std::cos(bg.alpha(j));
    s += row * std::exp(g.lambda_boundary(i));
  }
  return s * w;
}

double norm_mu(const InfluxData& d, const ScanGeometry& g) { return std::sqrt(std::abs(inner_mu(d, d, g))); }

double norm_interior(const ScalarField& f, const ScanGeometry& g, double ring) {
  const auto& lam = g.lambda_nodes();
  double s = 0.0;
  for (int idx : g.disk().mask_nodes())
    if (g.disk().interior(idx, ring)) s += std::norm(f.values[idx]) * std::exp(2.0 * lam[idx]);
  return std::sqrt(s) * g.disk().spacing();
}

double relative_error(const ScalarField& estimate, const ScalarField& truth, const ScanGeometry& g, double ring) {
  double t = norm_interior(truth, g, ring);
  if (t == 0.0) throw DomainError("relative error against a zero reference");
  return norm_interior(estimate - truth, g, ring) / t;
}

// ---- forward transforms --------------------------------------------------

InfluxData forward_Ia(const ScalarField& f, const AttenuationProfile& a, const ScanGeometry& g) {
  if (!(f.grid == g.disk())) throw ShapeError("f does not match the scan grid");
  if (!(a.a.grid == g.disk())) throw ShapeError("attenuation does not match the scan grid");
  return integrate_rays(g, [&](const PhasePoint& p) { return std::pair<cplx, double>(f.sample(p.x), a(p.x)); });
}

InfluxData forward_I0(const ScalarField& f, const ScanGeometry& g) {
  if (!(f.grid == g.disk())) throw ShapeError("f does not match the scan grid");
  return integrate_rays(g, [&](const PhasePoint& p) { return std::pair<cplx, double>(f.sample(p.x), 0.0); });
}

InfluxData forward_Iperp(const ScalarField& h, const ScanGeometry& g) {
  if (!(h.grid == g.disk())) throw ShapeError("h does not match the scan grid");
  Gradient gr = gradient(h);
  const ConformalMetric& m = g.metric();
  return integrate_rays(g, [&](const PhasePoint& p) {
    double e = std::exp(-m.lambda(p.x));
    cplx v = -e * (-std::sin(p.theta) * gr.dx.sample(p.x) + std::cos(p.theta) * gr.dy.sample(p.x));
    return std::pair<cplx, double>(v, 0.0);
  });
}

namespace {

// Fourier coefficients c_k, c_{-k} (0 <= k < n/2) of samples at the beta nodes.
void trace_modes(const std::vector<cplx>& trace, const BoundaryGrid& bg, std::vector<cplx>& pos,
                 std::vector<cplx>& neg) {
  const int n = bg.n_beta();
  if (static_cast<int>(trace.size()) != n) throw ShapeError("boundary trace does not match the beta grid");
  const int kmax = n / 2 - 1;
  pos.assign(kmax + 1, 0.0);
  neg.assign(kmax + 1, 0.0);
  for (int k = 0; k <= kmax; ++k)
    for (int i = 0; i < n; ++i) {
      pos[k] += trace[i] * std::polar(1.0, -k * bg.beta(i)) / static_cast<double>(n);
      if (k > 0) neg[k] += trace[i] * std::polar(1.0, k * bg.beta(i)) / static_cast<double>(n);
    }
}

// sum_{k >= 1} c[k] z^k by Horner.
cplx power_series(const std::vector<cplx>& c, cplx z) {
  cplx s = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) s = (s + c[k]) * z;
  return s;
}

}  // namespace

ScalarField harmonic_extension(const std::vector<cplx>& trace, const BoundaryGrid& bg, const DiskGrid& disk) {
  std::vector<cplx> pos, neg;
  trace_modes(trace, bg, pos, neg);
  return ScalarField::from_function(disk, [&](Vec2 p) {
    cplx z(p.x, p.y);
    return pos[0] + power_series(pos, z) + power_series(neg, std::conj(z));
  });
}

std::pair<std::vector<cplx>, std::vector<cplx>> split_boundary_trace(const std::vector<cplx>& trace,
                                                                     const BoundaryGrid& bg) {
  std::vector<cplx> pos, neg;
  trace_modes(trace, bg, pos, neg);
  std::vector<cplx> hol(trace.size()), anti(trace.size());
  for (int i = 0; i < bg.n_beta(); ++i) {
    cplx z = std::polar(1.0, bg.beta(i));
    hol[i] = pos[0] + power_series(pos, z);
    anti[i] = power_series(neg, std::conj(z));
  }
  return {hol, anti};
}

InfluxData forward_doppler(const ScalarField& f1, const ScalarField& f2, const AttenuationProfile& a,
                           const ScanGeometry& g) {
  if (!(f1.grid == g.disk()) || !(f2.grid == g.disk())) throw ShapeError("vector field does not match the scan grid");
  const ConformalMetric& m = g.metric();
  return integrate_rays(g, [&](const PhasePoint& p) {
    double e = std::exp(-m.lambda(p.x));
    cplx v = e * (std::cos(p.theta) * f1.sample(p.x) + std::sin(p.theta) * f2.sample(p.x));
    return std::pair<cplx, double>(v, a(p.x));
  });
}

// ---- transport extension and backprojection ------------------------------

FiberField transport_extend(const InfluxData& d, const ScanGeometry& g, InterpStats* stats) {
  if (!(d.grid == g.boundary())) throw ShapeError("data does not match the boundary grid");
  const InteriorEndpoints& ie = g.interior();
  FiberField u(g.disk(), g.fiber());
  const int nt = g.fiber().n();
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(u.fiber_count());
  std::size_t clamped = 0;
#pragma omp parallel for schedule(static) reduction(+ : clamped)
  for (std::ptrdiff_t m = 0; m < count; ++m)
    for (int k = 0; k < nt; ++k)
      if (d.sample(ie.beta(m, k), ie.alpha(m, k), u.at(m, k))) ++clamped;
  if (stats) stats->clamped += clamped;
  return u;
}

std::vector<cplx> transport_fiber_at(const InfluxData& d, const ScanGeometry& g, Vec2 x) {
  return transport_fiber_at(d, g, x, 0.5 * g.fiber().delta(), g.fiber().n());
}

std::vector<cplx> transport_fiber_at(const InfluxData& d, const ScanGeometry& g, Vec2 x, double theta0, int nt) {
  TraceOptions opt = g.trace();
  opt.h_step = g.config().h_interior;
  std::vector<cplx> out(nt);
  for (int k = 0; k < nt; ++k) {
    auto [c, time] = trace_to_influx(g.metric(), PhasePoint{x, theta0 + k * kTwoPi / nt}, opt);
    (void)time;
    d.sample(c.beta, c.alpha, out[k]);
  }
  return out;
}

ScalarField fiber_average(const FiberField& u, double scale) {
  ScalarField out(u.disk);
  std::vector<cplx> avg = pi0(u);
  const auto& nodes = u.disk.mask_nodes();
  for (std::size_t m = 0; m < nodes.size(); ++m) out.values[nodes[m]] = scale * avg[m];
  extend_exterior(out);
  return out;
}

ScalarField adjoint_I0(const InfluxData& d, const ScanGeometry& g) {
  return fiber_average(transport_extend(d, g), kTwoPi);
}

ScalarField adjoint_Iperp(const InfluxData& d, const ScanGeometry& g) {
  FiberField u = transport_extend(d, g);
  const DiskGrid& disk = g.disk();
  const int nt = g.fiber().n();
  const double dth = g.fiber().delta();
  std::vector<double> s(nt), c(nt);
  for (int k = 0; k < nt; ++k) {
    s[k] = std::sin(g.fiber().theta(k));
    c[k] = std::cos(g.fiber().theta(k));
  }
  const auto& lam = g.lambda_nodes();
  ScalarField mx(disk), my(disk);
  const auto& nodes = disk.mask_nodes();
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    cplx ax{}, ay{};
    for (int k = 0; k < nt; ++k) {
      ax -= s[k] * u.at(m, k);
      ay += c[k] * u.at(m, k);
    }
    double el = std::exp(lam[nodes[m]]);
    mx.values[nodes[m]] = el * dth * ax;
    my.values[nodes[m]] = el * dth * ay;
  }
  Gradient gx = gradient(mx);
  Gradient gy = gradient(my);
  ScalarField out(disk);
  for (int idx : nodes) out.values[idx] = std::exp(-2.0 * lam[idx]) * (gx.dx.values[idx] + gy.dy.values[idx]);
  extend_exterior(out);
  return out;
}

ScalarField adjoint_Iperp_fiber(const InfluxData& d, const ScanGeometry& g) {
  FiberField u = transport_extend(d, g);
  FiberField du = fiber_multiplier(u, fiberops::Multiplier::derivative);
  const DiskGrid& disk = g.disk();
  const int nt = g.fiber().n();
  const auto& nodes = disk.mask_nodes();
  const auto& lam = g.lambda_nodes();
  Gradient glam;
  {
    ScalarField l(disk);
    for (std::size_t i = 0; i < l.values.size(); ++i) l.values[i] = lam[i];
    glam = gradient(l);
  }
  std::vector<cplx> acc(nodes.size(), cplx{});
  ScalarField slice(disk);
  for (int k = 0; k < nt; ++k) {
    double th = g.fiber().theta(k);
    double s = std::sin(th), c = std::cos(th);
    for (std::size_t m = 0; m < nodes.size(); ++m) slice.values[nodes[m]] = u.at(m, k);
    Gradient gs = gradient(slice);
    for (std::size_t m = 0; m < nodes.size(); ++m) {
      int idx = nodes[m];
      cplx lx = glam.dx.values[idx], ly = glam.dy.values[idx];
      cplx xperp = -std::exp(-lam[idx]) *
                   (-s * gs.dx.values[idx] + c * gs.dy.values[idx] - (c * lx + s * ly) * du.at(m, k));
      acc[m] += xperp;
    }
  }
  ScalarField out(disk);
  for (std::size_t m = 0; m < nodes.size(); ++m) out.values[nodes[m]] = -kTwoPi * acc[m] / static_cast<double>(nt);
  extend_exterior(out);
  return out;
}

}  // namespace geoxray
