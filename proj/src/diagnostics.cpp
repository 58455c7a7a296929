#include "geoxray/diagnostics.hpp"

#include <algorithm>

#include "geoxray/fiber.hpp"

namespace geoxray {

double chord_tau_error(const ScanGeometry& g) {
  const auto& t = g.table();
  const BoundaryGrid& bg = g.boundary();
  double e = 0.0;
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int j = 0; j < bg.nb(); ++j) e = std::max(e, std::abs(t.tau(i, j) - 2.0 * std::cos(bg.alpha(j))));
  return e;
}

double chord_alpha1_error(const ScanGeometry& g) {
  const auto& t = g.table();
  const BoundaryGrid& bg = g.boundary();
  double e = 0.0;
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int j = 0; j < bg.nb(); ++j) {
      double a = bg.alpha(j);
      e = std::max(e, std::abs(wrap_signed(t.beta1(i, j) - (bg.beta(i) + kPi + 2.0 * a))));
      e = std::max(e, std::abs(t.alpha1(i, j) + a));
    }
  return e;
}

double unit_chord_error(const ScanGeometry& g) {
  ScalarField one = ScalarField::from_function(g.disk(), [](Vec2) { return 1.0; });
  InfluxData d = forward_I0(one, g);
  const BoundaryGrid& bg = g.boundary();
  double e = 0.0;
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int j = 0; j < bg.nb(); ++j) e = std::max(e, std::abs(d.at(i, j) - 2.0 * std::cos(bg.alpha(j))));
  return e;
}

ScalarField random_smooth_field(const DiskGrid& disk, std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  struct Bump {
    Vec2 c;
    double w, amp;
  };
  std::vector<Bump> bumps(4);
  for (auto& b : bumps) {
    b.c = {0.45 * u(rng), 0.45 * u(rng)};
    b.w = 0.18 + 0.08 * u(rng);
    b.amp = u(rng);
  }
  return ScalarField::from_function(disk, [&](Vec2 p) {
    double s = 1.0 - p.norm2() / (radius * radius);
    if (s <= 0.0) return 0.0;
    double v = 0.0;
    for (const auto& b : bumps) v += b.amp * std::exp(-(p - b.c).norm2() / (2.0 * b.w * b.w));
    return v * s * s * s;
  });
}

InfluxData random_smooth_data(const BoundaryGrid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double c[3][3], ph[3][3];
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) {
      c[p][q] = u(rng);
      ph[p][q] = kPi * u(rng);
    }
  InfluxData d(grid);
  for (int i = 0; i < grid.n_beta(); ++i)
    for (int j = 0; j < grid.nb(); ++j) {
      double b = grid.beta(i), a = grid.alpha(j);
      double v = 0.0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) v += c[p][q] * std::cos(p * b + ph[p][q]) * std::cos(q * a + 0.5 * ph[q][p]);
      d.at(i, j) = v;
    }
  return d;
}

double relative_mismatch(cplx a, cplx b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double hilbert_square_error(int fibers, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  std::vector<cplx> f(static_cast<std::size_t>(fibers) * n), h(f.size()), hh(f.size());
  for (auto& v : f) v = {nd(rng), nd(rng)};
  fiberops::apply(f, h, n, fiberops::Multiplier::hilbert);
  fiberops::apply(h, hh, n, fiberops::Multiplier::hilbert);
  std::vector<cplx> m(fibers);
  fiberops::mean(f, m, n);
  double e = 0.0;
  for (int r = 0; r < fibers; ++r)
    for (int k = 0; k < n; ++k) {
      std::size_t idx = static_cast<std::size_t>(r) * n + k;
      e = std::max(e, std::abs(hh[idx] + f[idx] - m[r]));
    }
  return e;
}

double vpm_leak(const InfluxData& d, const ScanGeometry& g, int parity) {
  VpmSplit s = project_Vpm(d, g.table());
  double n = norm_mu(d, g);
  double wrong = norm_mu(parity > 0 ? s.minus : s.plus, g);
  return n > 0.0 ? wrong / n : 0.0;
}

}  // namespace geoxray
