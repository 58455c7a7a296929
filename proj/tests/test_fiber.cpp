#include <doctest.h>

#include <functional>
#include <random>

#include "geoxray/diagnostics.hpp"
#include "geoxray/fiber.hpp"
#include "geoxray/types.hpp"

using namespace geoxray;

namespace {

FullBoundaryData fibers_of(int nb, const std::function<cplx(double)>& fn) {
  BoundaryGrid bg(nb);
  FullBoundaryData u(bg);
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int k = 0; k < bg.n_theta(); ++k) u.at(i, k) = fn(bg.theta(k)) * double(i + 1);
  return u;
}

double diff(const FullBoundaryData& a, const FullBoundaryData& b) { return (a - b).max_abs(); }

}  // namespace

TEST_CASE("hilbert maps cos k theta to sin k theta") {
  for (int k : {1, 2, 5}) {
    auto u = fibers_of(16, [k](double t) { return cplx(std::cos(k * t)); });
    auto v = fibers_of(16, [k](double t) { return cplx(std::sin(k * t)); });
    CHECK(diff(hilbert(u), v) < 1e-12);
    CHECK(diff(hilbert(v), -1.0 * u) < 1e-12);
  }
}

TEST_CASE("hilbert annihilates constants") {
  auto u = fibers_of(16, [](double) { return cplx(3.0, -1.0); });
  CHECK(hilbert(u).max_abs() < 1e-12);
}

TEST_CASE("H^2 = -Id + pi_0 on random fibers") {
  std::mt19937_64 rng(7);
  CHECK(hilbert_square_error(16, 32, rng) < 1e-12);
  CHECK(hilbert_square_error(16, 64, rng) < 1e-12);
}

TEST_CASE("holomorphic projection keeps non-negative modes") {
  auto pos = fibers_of(16, [](double t) { return std::polar(1.0, 2.0 * t); });
  auto neg = fibers_of(16, [](double t) { return std::polar(1.0, -3.0 * t); });
  auto c = fibers_of(16, [](double) { return cplx(2.0); });
  CHECK(diff(holomorphic_projection(pos), 2.0 * pos) < 1e-12);
  CHECK(holomorphic_projection(neg).max_abs() < 1e-12);
  CHECK(diff(holomorphic_projection(c), c) < 1e-12);
  CHECK(diff(antiholomorphic_projection(neg), 2.0 * neg) < 1e-12);
  CHECK(negative_mode_fraction(holomorphic_projection(pos + neg)) < 1e-20);
}

TEST_CASE("parity split separates odd and even modes") {
  auto odd = fibers_of(16, [](double t) { return cplx(std::cos(t) + std::sin(3.0 * t)); });
  auto even = fibers_of(16, [](double t) { return cplx(1.0 + std::cos(2.0 * t)); });
  auto p = parity_split(odd + even);
  CHECK(diff(p.even, even) < 1e-12);
  CHECK(diff(p.odd, odd) < 1e-12);
  CHECK(even_fraction(odd) < 1e-12);
  CHECK(even_fraction(even) == doctest::Approx(1.0));
}

TEST_CASE("pi0 and fiber_mode") {
  auto u = fibers_of(16, [](double t) { return cplx(3.0) + std::polar(0.5, t) + std::cos(2.0 * t); });
  auto m0 = pi0(u);
  auto m1 = fiber_mode(u, 1);
  auto m2 = fiber_mode(u, -2);
  for (std::size_t i = 0; i < m0.size(); ++i) {
    double s = double(i + 1);
    CHECK(std::abs(m0[i] - 3.0 * s) < 1e-12);
    CHECK(std::abs(m1[i] - 0.5 * s) < 1e-12);
    CHECK(std::abs(m2[i] - 0.5 * s) < 1e-12);
  }
}

TEST_CASE("trigonometric interpolation is exact for band-limited fibers") {
  const int n = 32;
  std::vector<cplx> f(n);
  auto fn = [](double t) { return cplx(std::cos(t) - 0.3 * std::sin(4.0 * t), std::sin(2.0 * t)); };
  FiberGrid fg(n);
  for (int k = 0; k < n; ++k) f[k] = fn(fg.theta(k));
  for (double t : {0.0, 0.37, 2.0, 5.9}) CHECK(std::abs(fiberops::interpolate(f, t) - fn(t)) < 1e-12);
}
