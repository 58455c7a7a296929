#include "geoxray/types.hpp"

#include <algorithm>
#include <string>

namespace geoxray {

DiskGrid::DiskGrid(int n) : n_(n) {
  if (n < 3) throw ShapeError("disk grid needs at least 3 nodes per side");
  auto mask = std::make_shared<std::vector<std::uint8_t>>(size(), 0);
  auto nodes = std::make_shared<std::vector<int>>();
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix)
      if (point(ix, iy).norm2() < 1.0) {
        (*mask)[index(ix, iy)] = 1;
        nodes->push_back(index(ix, iy));
      }
  mask_ = std::move(mask);
  nodes_ = std::move(nodes);
}

BoundaryGrid::BoundaryGrid(int nb) : nb_(nb) {
  if (nb < 2 || nb % 2 != 0)
    throw ShapeError("boundary grid size must be even and >= 2, got " + std::to_string(nb));
}

FiberGrid::FiberGrid(int n) : n_(n) {
  if (n < 2 || n % 2 != 0) throw ShapeError("fiber grid size must be even, got " + std::to_string(n));
}

ScalarField ScalarField::real_part() const {
  ScalarField r(grid);
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i].real();
  return r;
}

cplx ScalarField::sample(Vec2 p) const {
  const int n = grid.n();
  const double h = grid.spacing();
  double u = (p.x + 1.0) / h;
  double v = (p.y + 1.0) / h;
  u = std::clamp(u, 0.0, n - 1.0);
  v = std::clamp(v, 0.0, n - 1.0);
  int i0 = std::min(static_cast<int>(u), n - 2);
  int j0 = std::min(static_cast<int>(v), n - 2);
  double fu = u - i0;
  double fv = v - j0;
  const cplx* row0 = &values[static_cast<std::size_t>(j0) * n + i0];
  const cplx* row1 = row0 + n;
  return (1.0 - fv) * ((1.0 - fu) * row0[0] + fu * row0[1]) + fv * ((1.0 - fu) * row1[0] + fu * row1[1]);
}

namespace {

// Shared bilinear lookup over an influx-shaped (2nb x nb) table addressed by a
// fetch functor. beta is periodic, the alpha index is clamped.
template <class Fetch>
bool bilinear_influx(const BoundaryGrid& g, double beta, double alpha, Fetch&& fetch, cplx& out) {
  const int nbeta = g.n_beta();
  const int nalpha = g.n_alpha();
  const double d = g.delta();
  double u = wrap_angle(beta) / d;
  int i0 = static_cast<int>(u);
  double fu = u - i0;
  if (i0 >= nbeta) { i0 -= nbeta; }
  int i1 = (i0 + 1) % nbeta;

  double v = (alpha + 0.5 * kPi) / d - 0.5;
  bool clamped = false;
  if (v < 0.0) { v = 0.0; clamped = true; }
  if (v > nalpha - 1.0) { v = nalpha - 1.0; clamped = true; }
  int j0 = std::min(static_cast<int>(v), nalpha - 2);
  double fv = v - j0;
  out = (1.0 - fu) * ((1.0 - fv) * fetch(i0, j0) + fv * fetch(i0, j0 + 1)) +
        fu * ((1.0 - fv) * fetch(i1, j0) + fv * fetch(i1, j0 + 1));
  return clamped;
}

}  // namespace

bool InfluxData::sample(double beta, double alpha, cplx& out) const {
  return bilinear_influx(grid, beta, alpha, [this](int i, int j) { return at(i, j); }, out);
}

bool FullBoundaryData::sample_outflux(double beta, double rho, cplx& out) const {
  // The outflux node at (beta_i, rho_j) is stored as outflux(i, j), rho_j = alpha_j.
  return bilinear_influx(grid, beta, rho, [this](int i, int j) { return outflux(i, j); }, out);
}

FiberField multiply(const FiberField& a, const FiberField& b) {
  if (!a.same_grid(b)) throw ShapeError("fiber field grid mismatch");
  FiberField r = a;
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] *= b.values[i];
  return r;
}

}  // namespace geoxray
