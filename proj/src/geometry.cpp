#include "geoxray/geometry.hpp"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <sstream>

#include "geoxray/binary_io.hpp"

namespace geoxray {

ConformalMetric ConformalMetric::bump_pair(double amplitude, Vec2 center, double width) {
  return ConformalMetric({{amplitude, center, width}, {-amplitude, -center, width}});
}

ConformalMetric ConformalMetric::default_pair() { return bump_pair(0.2, {0.3, 0.3}, 0.25); }

MetricSample ConformalMetric::eval(Vec2 p) const {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || p.norm2() > 1.0 + 1e-12)
    throw DomainError("metric evaluated outside the closed unit disk");
  MetricSample s;
  for (const auto& b : bumps_) {
    Vec2 d = p - b.center;
    double s2 = b.width * b.width;
    double r2 = d.norm2();
    double e = b.amplitude * std::exp(-r2 / (2.0 * s2));
    s.lambda += e;
    s.grad -= (e / s2) * d;
    s.laplacian += e * (r2 / (s2 * s2) - 2.0 / s2);
  }
  s.curvature = -std::exp(-2.0 * s.lambda) * s.laplacian;
  return s;
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t ConformalMetric::hash() const {
  std::uint64_t h = fnv1a("conformal-metric", 16);
  for (const auto& b : bumps_) {
    double v[4] = {b.amplitude, b.center.x, b.center.y, b.width};
    h = fnv1a(v, sizeof(v), h);
  }
  return h;
}

double refine_exit_step(const ConformalMetric& m, const FlowState& s, double h, double direction, double tol,
                        bool from_boundary) {
  auto g = [&](double d) {
    FlowState e = rk4_step(m, s, d, direction);
    return e.x * e.x + e.y * e.y - 1.0;
  };
  double lo = 0.0;
  double g_lo = s.x * s.x + s.y * s.y - 1.0;
  double hi = h;
  double g_hi = g(h);
  if (from_boundary) {
    // Leaving the circle inward: find a step that is strictly inside.
    double d = 0.5 * h;
    int tries = 0;
    for (; tries < 200; ++tries, d *= 0.5) {
      double gd = g(d);
      if (gd < 0.0) { lo = d; g_lo = gd; break; }
      hi = d;
      g_hi = gd;
    }
    if (tries == 200) throw NumericError("exit bracket underflow near the boundary");
  }
  if (g_lo >= 0.0) return lo;
  // Regula falsi with the Illinois modification, bracketed in [lo, hi].
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double d = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
    if (!(d > lo && d < hi)) d = 0.5 * (lo + hi);
    double gd = g(d);
    if (std::abs(gd) <= tol) return d;
    if (gd < 0.0) {
      lo = d;
      g_lo = gd;
      if (side == -1) g_hi *= 0.5;
      side = -1;
    } else {
      hi = d;
      g_hi = gd;
      if (side == 1) g_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-15 * h) return hi;
  }
  throw NumericError("exit time refinement did not converge");
}

GeodesicPath trace_geodesic(const ConformalMetric& m, const PhasePoint& start, const TraceOptions& opt) {
  if (opt.h_step <= 0.0) throw DomainError("h_step must be positive");
  double r2 = start.x.norm2();
  if (r2 >= 1.0 - 1e-12) {
    double radial = std::cos(start.theta) * start.x.x + std::sin(start.theta) * start.x.y;
    if (radial >= 0.0) throw DomainError("geodesic start on the boundary must point inward");
  }
  GeodesicPath path;
  path.h_step = opt.h_step;
  FlowExit e = trace_flow(m, start, opt, 1.0, [&](double, const PhasePoint& p) { path.samples.push_back(p); });
  path.exit_time = e.time;
  path.exit_point = e.point;
  path.beta_out = wrap_angle(std::atan2(e.point.x.y, e.point.x.x));
  path.theta_out = wrap_angle(e.point.theta);
  return path;
}

std::pair<InfluxCoord, double> trace_to_influx(const ConformalMetric& m, const PhasePoint& p,
                                               const TraceOptions& opt) {
  FlowExit e = trace_flow(m, p, opt, -1.0, [](double, const PhasePoint&) {});
  double beta = wrap_angle(std::atan2(e.point.x.y, e.point.x.x));
  double alpha = wrap_signed(e.point.theta - beta - kPi);
  return {InfluxCoord{beta, alpha}, e.time};
}

std::uint64_t endpoint_key(const ConformalMetric& m, const TraceOptions& opt) {
  std::uint64_t h = m.hash();
  double v[3] = {opt.h_step, opt.t_max, opt.tol_exit};
  return fnv1a(v, sizeof(v), h);
}

GeodesicEndpointTable GeodesicEndpointTable::build(const ConformalMetric& m, const BoundaryGrid& grid,
                                                   const TraceOptions& opt) {
  if (grid.nb() < 16) throw ShapeError("endpoint table needs N_b >= 16");
  GeodesicEndpointTable t;
  t.grid_ = grid;
  t.key_ = endpoint_key(m, opt);
  const std::size_t total = grid.influx_size();
  t.beta_out_.resize(total);
  t.theta_out_.resize(total);
  t.beta1_.resize(total);
  t.alpha1_.resize(total);
  t.tau_.resize(total);

  std::string failure;
  const int nbeta = grid.n_beta();
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < nbeta; ++i) {
    for (int j = 0; j < grid.nb(); ++j) {
      try {
        InfluxCoord c{grid.beta(i), grid.alpha(j)};
        FlowExit e = trace_flow(m, c.phase_point(), opt, 1.0, [](double, const PhasePoint&) {});
        double bo = wrap_angle(std::atan2(e.point.x.y, e.point.x.x));
        double to = wrap_angle(e.point.theta);
        std::size_t k = t.idx(i, j);
        t.beta_out_[k] = bo;
        t.theta_out_[k] = to;
        t.beta1_[k] = bo;
        t.alpha1_[k] = wrap_signed(to - bo);
        t.tau_[k] = e.time;
      } catch (const Error& err) {
#pragma omp critical
        if (failure.empty()) {
          std::ostringstream os;
          os << "tracing influx node (" << i << ", " << j << "): " << err.what();
          failure = os.str();
        }
      }
    }
  }
  if (!failure.empty()) throw NonTrappingError(failure);
  return t;
}

namespace {
constexpr char kTableMagic[4] = {'G', 'X', 'E', 'T'};
constexpr std::uint32_t kTableVersion = 1;
}  // namespace

void GeodesicEndpointTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write endpoint table " + path);
  out.write(kTableMagic, 4);
  write_le<std::uint32_t>(out, kTableVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid_.nb()));
  write_le<std::uint64_t>(out, key_);
  for (const auto* arr : {&beta_out_, &theta_out_, &beta1_, &alpha1_, &tau_})
    for (double v : *arr) write_le<double>(out, v);
  if (!out) throw IoError("short write on endpoint table " + path);
}

GeodesicEndpointTable GeodesicEndpointTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open endpoint table " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kTableMagic, 4) != 0) throw IoError("bad magic in endpoint table " + path);
  auto version = read_le<std::uint32_t>(in);
  if (version != kTableVersion) throw IoError("unsupported endpoint table version in " + path);
  auto nb = read_le<std::uint32_t>(in);
  GeodesicEndpointTable t;
  if (nb < 16 || nb % 2 != 0 || nb > 100000) throw IoError("invalid N_b in endpoint table " + path);
  t.grid_ = BoundaryGrid(static_cast<int>(nb));
  t.key_ = read_le<std::uint64_t>(in);
  const std::size_t total = t.grid_.influx_size();
  for (auto* arr : {&t.beta_out_, &t.theta_out_, &t.beta1_, &t.alpha1_, &t.tau_}) {
    arr->resize(total);
    for (auto& v : *arr) v = read_le<double>(in);
  }
  if (!in) throw IoError("truncated endpoint table " + path);
  return t;
}

GeodesicEndpointTable load_or_build_table(const ConformalMetric& m, const BoundaryGrid& grid,
                                          const TraceOptions& opt) {
  const char* dir = std::getenv("GEOXRAY_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return GeodesicEndpointTable::build(m, grid, opt);
  std::uint64_t key = endpoint_key(m, opt);
  std::ostringstream name;
  name << "endpoints_" << std::hex << key << std::dec << "_" << grid.nb() << ".gxet";
  std::filesystem::path path = std::filesystem::path(dir) / name.str();
  if (std::filesystem::exists(path)) {
    try {
      auto t = GeodesicEndpointTable::load(path.string());
      if (t.key() == key && t.grid() == grid) return t;
    } catch (const IoError& e) {
      std::cerr << "geoxray: rebuilding endpoint cache " << path.string() << ": " << e.what() << '\n';
    }
  }
  auto t = GeodesicEndpointTable::build(m, grid, opt);
  std::filesystem::create_directories(dir);
  t.save(path.string());
  return t;
}

}  // namespace geoxray
