#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <vector>

#include "geoxray/error.hpp"

namespace geoxray {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }

  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Angle reduced to [0, 2pi).
inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

// Angle reduced to (-pi, pi].
inline double wrap_signed(double a) {
  double r = wrap_angle(a);
  return r > kPi ? r - kTwoPi : r;
}

// Cartesian N x N grid over [-1, 1]^2. Nodes with |x| < 1 form the disk mask.
class DiskGrid {
 public:
  DiskGrid() = default;
  explicit DiskGrid(int n);

  int n() const { return n_; }
  double spacing() const { return 2.0 / (n_ - 1); }
  double coord(int i) const { return -1.0 + i * spacing(); }
  Vec2 point(int ix, int iy) const { return {coord(ix), coord(iy)}; }
  Vec2 point(int idx) const { return point(idx % n_, idx / n_); }
  int index(int ix, int iy) const { return iy * n_ + ix; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  bool inside(int idx) const { return (*mask_)[idx] != 0; }
  bool inside(int ix, int iy) const {
    return ix >= 0 && iy >= 0 && ix < n_ && iy < n_ && inside(index(ix, iy));
  }
  // Nodes at distance >= ring * spacing from the boundary circle.
  bool interior(int idx, double ring) const {
    return inside(idx) && point(idx).norm() < 1.0 - ring * spacing();
  }

  // Flat indices of the mask nodes in increasing order.
  const std::vector<int>& mask_nodes() const { return *nodes_; }

  bool operator==(const DiskGrid& o) const { return n_ == o.n_; }

 private:
  int n_ = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> mask_;
  std::shared_ptr<const std::vector<int>> nodes_;
};

// Influx grid (beta_i, alpha_j), i < 2*nb, j < nb, together with the full
// boundary grid (beta_i, theta_k), k < 2*nb. All three angles share the step
// pi/nb; alpha and theta carry a half-cell offset so that every inward node of
// the full grid is exactly an influx node and no node is grazing.
class BoundaryGrid {
 public:
  BoundaryGrid() = default;
  explicit BoundaryGrid(int nb);

  int nb() const { return nb_; }
  int n_beta() const { return 2 * nb_; }
  int n_alpha() const { return nb_; }
  int n_theta() const { return 2 * nb_; }
  double delta() const { return kPi / nb_; }
  std::size_t influx_size() const { return static_cast<std::size_t>(2 * nb_) * nb_; }
  std::size_t full_size() const { return static_cast<std::size_t>(2 * nb_) * (2 * nb_); }

  double beta(int i) const { return i * delta(); }
  double alpha(int j) const { return -0.5 * kPi + (j + 0.5) * delta(); }
  double theta(int k) const { return (k + 0.5) * delta(); }

  // theta index of the influx node (i, j).
  int influx_k(int i, int j) const { return (i + j + nb_ / 2) % (2 * nb_); }
  // theta index of the outflux node at beta_i whose reversed direction is the
  // influx node (i, j), i.e. the point (x, -v) for (x, v) = influx(i, j).
  int outflux_k(int i, int j) const { return (i + j + nb_ / 2 + nb_) % (2 * nb_); }

  bool operator==(const BoundaryGrid& o) const { return nb_ == o.nb_; }

 private:
  int nb_ = 0;
};

// Uniform fiber grid theta_k = (k + 1/2) 2pi / n on each tangent circle.
class FiberGrid {
 public:
  FiberGrid() = default;
  explicit FiberGrid(int n);

  int n() const { return n_; }
  double delta() const { return kTwoPi / n_; }
  double theta(int k) const { return (k + 0.5) * delta(); }

  bool operator==(const FiberGrid& o) const { return n_ == o.n_; }

 private:
  int n_ = 0;
};

// Linear-space operations shared by every sampled quantity.
template <class Derived>
struct SampledValues {
  std::vector<cplx> values;

  Derived& self() { return static_cast<Derived&>(*this); }
  const Derived& self() const { return static_cast<const Derived&>(*this); }

  Derived& operator+=(const Derived& o) {
    check_same(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return self();
  }
  Derived& operator-=(const Derived& o) {
    check_same(o);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return self();
  }
  Derived& operator*=(cplx s) {
    for (auto& v : values) v *= s;
    return self();
  }

  friend Derived operator+(Derived a, const Derived& b) { return a += b; }
  friend Derived operator-(Derived a, const Derived& b) { return a -= b; }
  friend Derived operator*(cplx s, Derived a) { return a *= s; }
  friend Derived operator*(double s, Derived a) { return a *= cplx(s); }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
  }
  double max_abs_imag() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v.imag()));
    return m;
  }

 private:
  void check_same(const Derived& o) const {
    if (!(self().same_grid(o)) || o.values.size() != values.size())
      throw ShapeError("grid mismatch in arithmetic");
  }
};

// Samples on the Cartesian disk grid. All N*N nodes are stored; only mask
// nodes are meaningful, the rest hold an extension used by interpolation.
struct ScalarField : SampledValues<ScalarField> {
  DiskGrid grid;

  ScalarField() = default;
  explicit ScalarField(const DiskGrid& g) : grid(g) { values.assign(g.size(), cplx{}); }

  template <class Fn>
  static ScalarField from_function(const DiskGrid& g, Fn&& fn) {
    ScalarField s(g);
    for (int iy = 0; iy < g.n(); ++iy)
      for (int ix = 0; ix < g.n(); ++ix) s.values[g.index(ix, iy)] = fn(g.point(ix, iy));
    return s;
  }

  cplx& at(int ix, int iy) { return values[grid.index(ix, iy)]; }
  const cplx& at(int ix, int iy) const { return values[grid.index(ix, iy)]; }

  bool same_grid(const ScalarField& o) const { return grid == o.grid; }

  // Real part of every sample.
  ScalarField real_part() const;
  // Bilinear interpolation at an arbitrary point of [-1, 1]^2.
  cplx sample(Vec2 p) const;
};

// Complex samples on the influx grid of the boundary, values[i * nb + j].
struct InfluxData : SampledValues<InfluxData> {
  BoundaryGrid grid;

  InfluxData() = default;
  explicit InfluxData(const BoundaryGrid& g) : grid(g) { values.assign(g.influx_size(), cplx{}); }

  cplx& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.nb() + j]; }
  const cplx& at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.nb() + j]; }

  bool same_grid(const InfluxData& o) const { return grid == o.grid; }

  // Bilinear interpolation at (beta, alpha), periodic in beta and clamped in
  // alpha. Returns true when alpha had to be clamped (grazing sample).
  bool sample(double beta, double alpha, cplx& out) const;
};

// Complex samples on the full boundary grid (beta_i, theta_k), values[i * 2nb + k].
// Each row is one fiber over the tangent circle at x(beta_i).
struct FullBoundaryData : SampledValues<FullBoundaryData> {
  BoundaryGrid grid;

  FullBoundaryData() = default;
  explicit FullBoundaryData(const BoundaryGrid& g) : grid(g) { values.assign(g.full_size(), cplx{}); }

  int fiber_length() const { return grid.n_theta(); }
  std::size_t fiber_count() const { return static_cast<std::size_t>(grid.n_beta()); }

  cplx& at(int i, int k) { return values[static_cast<std::size_t>(i) * grid.n_theta() + k]; }
  const cplx& at(int i, int k) const { return values[static_cast<std::size_t>(i) * grid.n_theta() + k]; }

  // Values at the influx node (i, j).
  cplx& influx(int i, int j) { return at(i, grid.influx_k(i, j)); }
  const cplx& influx(int i, int j) const { return at(i, grid.influx_k(i, j)); }
  // Values at the outflux node opposite to the influx node (i, j).
  cplx& outflux(int i, int j) { return at(i, grid.outflux_k(i, j)); }
  const cplx& outflux(int i, int j) const { return at(i, grid.outflux_k(i, j)); }

  bool same_grid(const FullBoundaryData& o) const { return grid == o.grid; }

  // Bilinear interpolation over the outflux half, at the outflux point with
  // base angle beta and direction beta + rho, |rho| < pi/2.
  bool sample_outflux(double beta, double rho, cplx& out) const;
};

// Samples over (mask node, theta_k) of the disk grid; values[m * n_theta + k]
// where m enumerates DiskGrid::mask_nodes().
struct FiberField : SampledValues<FiberField> {
  DiskGrid disk;
  FiberGrid fiber;

  FiberField() = default;
  FiberField(const DiskGrid& d, const FiberGrid& f) : disk(d), fiber(f) {
    values.assign(d.mask_nodes().size() * static_cast<std::size_t>(f.n()), cplx{});
  }

  int fiber_length() const { return fiber.n(); }
  std::size_t fiber_count() const { return disk.mask_nodes().size(); }

  cplx& at(std::size_t m, int k) { return values[m * fiber.n() + k]; }
  const cplx& at(std::size_t m, int k) const { return values[m * fiber.n() + k]; }

  bool same_grid(const FiberField& o) const { return disk == o.disk && fiber == o.fiber; }
};

// Pointwise product of two fiber fields on the same grids.
FiberField multiply(const FiberField& a, const FiberField& b);

}  // namespace geoxray
