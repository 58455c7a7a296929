#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "geoxray/types.hpp"

namespace geoxray {

// One Gaussian term amplitude * exp(-|x - center|^2 / (2 width^2)) of the
// conformal exponent lambda.
struct GaussianBump {
  double amplitude = 0.0;
  Vec2 center;
  double width = 1.0;
};

struct MetricSample {
  double lambda = 0.0;
  Vec2 grad;
  double laplacian = 0.0;
  double curvature = 0.0;  // -exp(-2 lambda) * laplacian
};

// Conformal metric g = exp(2 lambda) (dx^2 + dy^2) on the unit disk, with
// lambda a finite sum of Gaussian bumps. No bumps is the Euclidean disk.
class ConformalMetric {
 public:
  ConformalMetric() = default;
  explicit ConformalMetric(std::vector<GaussianBump> bumps) : bumps_(std::move(bumps)) {}

  static ConformalMetric euclidean() { return ConformalMetric(); }
  // +amplitude bump at center and -amplitude bump at -center: a slow region
  // around center and a fast one around -center.
  static ConformalMetric bump_pair(double amplitude, Vec2 center, double width);
  // bump_pair(0.2, (0.3, 0.3), 0.25).
  static ConformalMetric default_pair();

  const std::vector<GaussianBump>& bumps() const { return bumps_; }
  bool is_flat() const { return bumps_.empty(); }

  double lambda(Vec2 p) const {
    double l = 0.0;
    for (const auto& b : bumps_) {
      Vec2 d = p - b.center;
      l += b.amplitude * std::exp(-d.norm2() / (2.0 * b.width * b.width));
    }
    return l;
  }

  void lambda_grad(Vec2 p, double& l, Vec2& g) const {
    l = 0.0;
    g = {};
    for (const auto& b : bumps_) {
      Vec2 d = p - b.center;
      double s2 = b.width * b.width;
      double e = b.amplitude * std::exp(-d.norm2() / (2.0 * s2));
      l += e;
      g -= (e / s2) * d;
    }
  }

  // Sound speed exp(-lambda).
  double sound_speed(Vec2 p) const { return std::exp(-lambda(p)); }

  // Analytic lambda, gradient, laplacian and Gaussian curvature. Throws
  // DomainError outside the closed unit disk.
  MetricSample eval(Vec2 p) const;

  std::uint64_t hash() const;

 private:
  std::vector<GaussianBump> bumps_;
};

// (x, v) in SM in isothermal coordinates: v = exp(-lambda)(cos theta, sin theta).
struct PhasePoint {
  Vec2 x;
  double theta = 0.0;
};

// Point of the influx boundary: x(beta) = (cos beta, sin beta), direction
// theta = beta + pi + alpha, |alpha| < pi/2.
struct InfluxCoord {
  double beta = 0.0;
  double alpha = 0.0;

  double theta() const { return wrap_angle(beta + kPi + alpha); }
  double mu() const { return std::cos(alpha); }
  PhasePoint phase_point() const { return {{std::cos(beta), std::sin(beta)}, theta()}; }
};

struct TraceOptions {
  double h_step = 1e-3;
  double t_max = 10.0;
  double tol_exit = 1e-10;
};

struct FlowState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

// Right-hand side of the geodesic flow, scaled by direction (+1 forward, -1 backward).
inline FlowState flow_rhs(const ConformalMetric& m, const FlowState& s, double direction) {
  double c = std::cos(s.theta);
  double sn = std::sin(s.theta);
  if (m.is_flat()) return {direction * c, direction * sn, 0.0};
  double l;
  Vec2 g;
  m.lambda_grad({s.x, s.y}, l, g);
  double e = direction * std::exp(-l);
  return {e * c, e * sn, e * (g.y * c - g.x * sn)};
}

inline FlowState rk4_step(const ConformalMetric& m, const FlowState& s, double h, double direction) {
  if (m.is_flat()) {
    double d = direction * h;
    return {s.x + d * std::cos(s.theta), s.y + d * std::sin(s.theta), s.theta};
  }
  FlowState k1 = flow_rhs(m, s, direction);
  FlowState k2 = flow_rhs(m, {s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.theta + 0.5 * h * k1.theta}, direction);
  FlowState k3 = flow_rhs(m, {s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.theta + 0.5 * h * k2.theta}, direction);
  FlowState k4 = flow_rhs(m, {s.x + h * k3.x, s.y + h * k3.y, s.theta + h * k3.theta}, direction);
  return {s.x + h / 6.0 * (k1.x + 2.0 * (k2.x + k3.x) + k4.x),
          s.y + h / 6.0 * (k1.y + 2.0 * (k2.y + k3.y) + k4.y),
          s.theta + h / 6.0 * (k1.theta + 2.0 * (k2.theta + k3.theta) + k4.theta)};
}

// Step length in (0, h] at which an RK4 step from `s` reaches the unit
// circle, to |1 - |x|| <= tol. `s` is inside the disk, or on the circle when
// `from_boundary` is set.
double refine_exit_step(const ConformalMetric& m, const FlowState& s, double h, double direction, double tol,
                        bool from_boundary);

struct FlowExit {
  double time = 0.0;
  PhasePoint point;  // on the unit circle; theta is the forward geodesic direction
};

// Integrates the flow with fixed RK4 steps from `start` until the unit circle
// is crossed. visit(t, PhasePoint) is called at t = n * h_step for every
// sample strictly inside the flow interval, starting with t = 0.
template <class Visitor>
FlowExit trace_flow(const ConformalMetric& m, const PhasePoint& start, const TraceOptions& opt, double direction,
                    Visitor&& visit) {
  FlowState s{start.x.x, start.x.y, start.theta};
  const double r2 = start.x.norm2();
  if (r2 > 1.0 + 1e-9) throw DomainError("trace start outside the closed disk");
  const bool on_boundary = r2 >= 1.0 - 1e-12;
  if (on_boundary) {
    double radial = direction * (std::cos(start.theta) * start.x.x + std::sin(start.theta) * start.x.y);
    if (radial >= 0.0) return {0.0, start};
  }
  const double h = opt.h_step;
  visit(0.0, start);
  for (long n = 0;; ++n) {
    FlowState next = rk4_step(m, s, h, direction);
    if (next.x * next.x + next.y * next.y >= 1.0) {
      double delta = refine_exit_step(m, s, h, direction, opt.tol_exit, on_boundary && n == 0);
      FlowState e = rk4_step(m, s, delta, direction);
      return {n * h + delta, {{e.x, e.y}, e.theta}};
    }
    s = next;
    double t = (n + 1) * h;
    if (t > opt.t_max) throw NonTrappingError("geodesic did not exit before t_max");
    visit(t, PhasePoint{{s.x, s.y}, s.theta});
  }
}

struct GeodesicPath {
  std::vector<PhasePoint> samples;  // at t = n * h_step
  double h_step = 0.0;
  double exit_time = 0.0;
  PhasePoint exit_point;
  double beta_out = 0.0;
  double theta_out = 0.0;
};

// Forward geodesic from a point inside the disk, or on the boundary pointing inward.
GeodesicPath trace_geodesic(const ConformalMetric& m, const PhasePoint& start, const TraceOptions& opt);

// Follows the geodesic through p backwards to the boundary. Returns the influx
// coordinate of that geodesic and the elapsed time.
std::pair<InfluxCoord, double> trace_to_influx(const ConformalMetric& m, const PhasePoint& p,
                                               const TraceOptions& opt);

// Scattering data of every influx node of a BoundaryGrid.
class GeodesicEndpointTable {
 public:
  static GeodesicEndpointTable build(const ConformalMetric& m, const BoundaryGrid& grid, const TraceOptions& opt);

  // Reads a table written by save(). Throws IoError on a malformed file.
  static GeodesicEndpointTable load(const std::string& path);
  void save(const std::string& path) const;

  const BoundaryGrid& grid() const { return grid_; }
  std::uint64_t key() const { return key_; }

  // Exit point alpha(beta_i, alpha_j) = (beta_out, theta_out).
  double beta_out(int i, int j) const { return beta_out_[idx(i, j)]; }
  double theta_out(int i, int j) const { return theta_out_[idx(i, j)]; }
  // Antipodal scattering relation alpha_1(beta_i, alpha_j) = (beta', alpha').
  double beta1(int i, int j) const { return beta1_[idx(i, j)]; }
  double alpha1(int i, int j) const { return alpha1_[idx(i, j)]; }
  double tau(int i, int j) const { return tau_[idx(i, j)]; }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * grid_.nb() + j; }

  BoundaryGrid grid_;
  std::uint64_t key_ = 0;
  std::vector<double> beta_out_, theta_out_, beta1_, alpha1_, tau_;
};

// Cache key combining the metric hash and the integration step.
std::uint64_t endpoint_key(const ConformalMetric& m, const TraceOptions& opt);

// Builds the table, or reuses one stored under $GEOXRAY_CACHE_DIR when the
// variable is set and a file with the matching key exists.
GeodesicEndpointTable load_or_build_table(const ConformalMetric& m, const BoundaryGrid& grid,
                                          const TraceOptions& opt);

// 64-bit FNV-1a.
std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed = 14695981039346656037ull);

}  // namespace geoxray
