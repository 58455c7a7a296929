#include <doctest.h>

#include <random>

#include "geoxray/diagnostics.hpp"
#include "geoxray/fiber.hpp"
#include "geoxray/xray.hpp"

#include "test_util.hpp"

using namespace geoxray;

namespace {

ScalarField constant(const DiskGrid& d, cplx c) {
  return ScalarField::from_function(d, [c](Vec2) { return c; });
}

}  // namespace

TEST_CASE("I0 of 1 is the chord length") {
  const ScanGeometry& g = test::euclid_small();
  InfluxData d = forward_I0(constant(g.disk(), 1.0), g);
  double err = 0.0;
  for (int i = 0; i < g.boundary().n_beta(); ++i)
    for (int j = 0; j < g.boundary().nb(); ++j)
      err = std::max(err, std::abs(d.at(i, j) - 2.0 * std::cos(g.boundary().alpha(j))));
  CHECK(err < 1e-9);
}

TEST_CASE("I0 of a linear function along chords") {
  const ScanGeometry& g = test::euclid_small();
  InfluxData d = forward_I0(ScalarField::from_function(g.disk(), [](Vec2 p) { return cplx(p.x); }), g);
  double err = 0.0;
  for (int i = 0; i < g.boundary().n_beta(); ++i)
    for (int j = 0; j < g.boundary().nb(); ++j) {
      InfluxCoord c{g.boundary().beta(i), g.boundary().alpha(j)};
      double tau = 2.0 * std::cos(c.alpha);
      double exact = tau * std::cos(c.beta) + 0.5 * tau * tau * std::cos(c.theta());
      err = std::max(err, std::abs(d.at(i, j) - exact));
    }
  CHECK(err < 1e-9);
}

TEST_CASE("constant attenuation closed form") {
  const ScanGeometry& g = test::euclid_small();
  const double c = 0.7;
  AttenuationProfile a(constant(g.disk(), c), [c](Vec2) { return c; });
  InfluxData d = forward_Ia(constant(g.disk(), 1.0), a, g);
  double err = 0.0;
  for (int i = 0; i < g.boundary().n_beta(); ++i)
    for (int j = 0; j < g.boundary().nb(); ++j) {
      double tau = 2.0 * std::cos(g.boundary().alpha(j));
      err = std::max(err, std::abs(d.at(i, j) - (std::exp(c * tau) - 1.0) / c));
    }
  CHECK(err < 1e-4);
}

TEST_CASE("zero attenuation reduces to I0") {
  const ScanGeometry& g = test::paper_small();
  std::mt19937_64 rng(3);
  ScalarField f = random_smooth_field(g.disk(), rng);
  InfluxData a = forward_Ia(f, AttenuationProfile::zero(g.disk()), g);
  CHECK(test::max_abs_diff(a.values, forward_I0(f, g).values) < 1e-12);
}

TEST_CASE("Iperp of zero and of a linear function") {
  const ScanGeometry& g = test::euclid_small();
  CHECK(forward_Iperp(ScalarField(g.disk()), g).max_abs() == 0.0);
  InfluxData d = forward_Iperp(ScalarField::from_function(g.disk(), [](Vec2 p) { return cplx(p.x); }), g);
  double err = 0.0;
  for (int i = 0; i < g.boundary().n_beta(); ++i)
    for (int j = 0; j < g.boundary().nb(); ++j) {
      InfluxCoord c{g.boundary().beta(i), g.boundary().alpha(j)};
      err = std::max(err, std::abs(d.at(i, j) - 2.0 * std::cos(c.alpha) * std::sin(c.theta())));
    }
  CHECK(err < 1e-6);
}

TEST_CASE("adjoint duality") {
  for (const ScanGeometry* g : {&test::euclid_small(), &test::paper_small()}) {
    std::mt19937_64 rng(11);
    ScalarField f = random_smooth_field(g->disk(), rng);
    InfluxData d = random_smooth_data(g->boundary(), rng);
    CHECK(relative_mismatch(inner_mu(forward_I0(f, *g), d, *g), inner_M(f, adjoint_I0(d, *g), *g)) < 0.02);
    CHECK(relative_mismatch(inner_mu(forward_Iperp(f, *g), d, *g), inner_M(f, adjoint_Iperp(d, *g), *g)) < 0.02);
  }
}

TEST_CASE("ranges of I0 and Iperp lie in V+ and V-") {
  const ScanGeometry& g = test::paper_mid();
  std::mt19937_64 rng(5);
  ScalarField f = random_smooth_field(g.disk(), rng);
  CHECK(vpm_leak(forward_I0(f, g), g, +1) < 0.02);
  CHECK(vpm_leak(forward_Iperp(f, g), g, -1) < 0.02);
}

TEST_CASE("A_+^* A_+ = 2 Id on the euclidean grid") {
  const ScanGeometry& g = test::euclid_small();
  std::mt19937_64 rng(9);
  InfluxData d = random_smooth_data(g.boundary(), rng);
  InfluxData back = apply_A_star(apply_A_plus(d, g.table()), g.table(), +1);
  CHECK((back - 2.0 * d).max_abs() < 1e-8 * d.max_abs());
  InfluxData zero = apply_A_star(apply_A_minus(d, g.table()), g.table(), +1);
  CHECK(zero.max_abs() < 1e-8 * d.max_abs());
}

TEST_CASE("Vpm projections are complementary") {
  const ScanGeometry& g = test::paper_small();
  std::mt19937_64 rng(13);
  InfluxData d = random_smooth_data(g.boundary(), rng);
  VpmSplit s = project_Vpm(d, g.table());
  CHECK((s.plus + s.minus - d).max_abs() < 1e-12);
}

TEST_CASE("harmonic extension reproduces harmonic polynomials") {
  const ScanGeometry& g = test::euclid_small();
  const BoundaryGrid& bg = g.boundary();
  std::vector<cplx> trace(bg.n_beta());
  for (int i = 0; i < bg.n_beta(); ++i) {
    double b = bg.beta(i);
    trace[i] = cplx(1.0 + std::cos(2.0 * b), std::sin(b) - 0.5 * std::sin(3.0 * b));
  }
  ScalarField h = harmonic_extension(trace, bg, g.disk());
  double err = 0.0;
  for (int idx : g.disk().mask_nodes()) {
    Vec2 p = g.disk().point(idx);
    cplx z(p.x, p.y);
    cplx exact(1.0 + (z * z).real(), p.y - 0.5 * (z * z * z).imag());
    err = std::max(err, std::abs(h.values[idx] - exact));
  }
  CHECK(err < 1e-12);
}

TEST_CASE("boundary trace split into holomorphic and antiholomorphic parts") {
  BoundaryGrid bg(16);
  std::vector<cplx> trace(bg.n_beta());
  for (int i = 0; i < bg.n_beta(); ++i)
    trace[i] = cplx(0.5) + std::polar(1.0, bg.beta(i)) + 2.0 * std::polar(1.0, -2.0 * bg.beta(i));
  auto [hol, anti] = split_boundary_trace(trace, bg);
  for (int i = 0; i < bg.n_beta(); ++i) {
    CHECK(std::abs(hol[i] - (cplx(0.5) + std::polar(1.0, bg.beta(i)))) < 1e-12);
    CHECK(std::abs(anti[i] - 2.0 * std::polar(1.0, -2.0 * bg.beta(i))) < 1e-12);
  }
}

TEST_CASE("dbar_fit is exact on linear functions") {
  DiskGrid d(21);
  const cplx a(1.0, 2.0), b(3.0, 0.0);
  ScalarField f = ScalarField::from_function(d, [&](Vec2 p) { return a * p.x + b * p.y + 0.25; });
  ScalarField z = dbar_fit(f, 2.0);
  const cplx exact = 0.5 * (a + cplx(0.0, 1.0) * b);
  double err = 0.0;
  for (int idx : d.mask_nodes()) err = std::max(err, std::abs(z.values[idx] - exact));
  CHECK(err < 1e-10);
}

TEST_CASE("dbar by differences on a quadratic") {
  DiskGrid d(41);
  ScalarField f = ScalarField::from_function(d, [](Vec2 p) { return cplx(p.x * p.x, p.x * p.y); });
  ScalarField z = dbar(f);
  double err = 0.0;
  for (int idx : d.mask_nodes()) {
    if (!d.interior(idx, 2.0)) continue;
    Vec2 p = d.point(idx);
    cplx exact = 0.5 * (cplx(2.0 * p.x, p.y) + cplx(0.0, 1.0) * cplx(0.0, p.x));
    err = std::max(err, std::abs(z.values[idx] - exact));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("Doppler transform of a solenoidal field is Iperp of its stream function") {
  const ScanGeometry& g = test::paper_small();
  auto h = [](Vec2 p) { return p.x * p.y + p.x * p.x; };
  ScalarField f1 = ScalarField::from_function(g.disk(), [](Vec2 p) { return cplx(-p.x); });
  ScalarField f2 = ScalarField::from_function(g.disk(), [](Vec2 p) { return cplx(p.y + 2.0 * p.x); });
  InfluxData dop = forward_doppler(f1, f2, AttenuationProfile::zero(g.disk()), g);
  InfluxData ip = forward_Iperp(ScalarField::from_function(g.disk(), [&](Vec2 p) { return cplx(h(p)); }), g);
  CHECK((dop - ip).max_abs() < 0.02 * ip.max_abs());
}

TEST_CASE("transport extension of I0 data is constant along the flow") {
  const ScanGeometry& g = test::euclid_small();
  std::mt19937_64 rng(17);
  InfluxData d = random_smooth_data(g.boundary(), rng);
  FiberField u = transport_extend(d, g);
  std::vector<cplx> at_centre = transport_fiber_at(d, g, {0.0, 0.0});
  REQUIRE(at_centre.size() == std::size_t(g.fiber().n()));
  for (int k = 0; k < g.fiber().n(); ++k) {
    double t = g.fiber().theta(k);
    InfluxCoord c{wrap_angle(t + kPi), 0.0};
    cplx direct;
    d.sample(c.beta, c.alpha, direct);
    CHECK(std::abs(at_centre[k] - direct) < 1e-9);
  }
  CHECK(u.fiber_count() == g.disk().mask_nodes().size());
}
