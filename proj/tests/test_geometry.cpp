#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "geoxray/diagnostics.hpp"
#include "geoxray/geometry.hpp"

#include "test_util.hpp"

using namespace geoxray;
namespace fs = std::filesystem;

TEST_CASE("metric derivatives match finite differences") {
  ConformalMetric m = ConformalMetric::default_pair();
  const double e = 1e-5;
  for (Vec2 p : {Vec2{0.1, -0.2}, Vec2{0.3, 0.3}, Vec2{-0.5, 0.4}}) {
    MetricSample s = m.eval(p);
    double lx = (m.lambda({p.x + e, p.y}) - m.lambda({p.x - e, p.y})) / (2 * e);
    double ly = (m.lambda({p.x, p.y + e}) - m.lambda({p.x, p.y - e})) / (2 * e);
    CHECK(s.lambda == doctest::Approx(m.lambda(p)));
    CHECK(std::abs(s.grad.x - lx) < 1e-8);
    CHECK(std::abs(s.grad.y - ly) < 1e-8);
    const double e2 = 1e-4;
    double lap = (m.lambda({p.x + e2, p.y}) + m.lambda({p.x - e2, p.y}) + m.lambda({p.x, p.y + e2}) +
                  m.lambda({p.x, p.y - e2}) - 4.0 * m.lambda(p)) /
                 (e2 * e2);
    CHECK(std::abs(s.laplacian - lap) < 1e-5);
    CHECK(s.curvature == doctest::Approx(-std::exp(-2.0 * s.lambda) * s.laplacian));
  }
  CHECK_THROWS_AS(m.eval({1.2, 0.0}), DomainError);
}

TEST_CASE("metric hash separates metrics") {
  CHECK(ConformalMetric::euclidean().hash() != ConformalMetric::default_pair().hash());
  CHECK(ConformalMetric::default_pair().hash() == ConformalMetric::bump_pair(0.2, {0.3, 0.3}, 0.25).hash());
}

TEST_CASE("euclidean geodesic from the centre") {
  TraceOptions opt;
  opt.h_step = 1e-2;
  auto [c, t] = trace_to_influx(ConformalMetric::euclidean(), {{0.0, 0.0}, 0.0}, opt);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(wrap_signed(c.beta - kPi)) < 1e-9);
  CHECK(std::abs(c.alpha) < 1e-9);

  GeodesicPath p = trace_geodesic(ConformalMetric::euclidean(), {{0.0, 0.0}, 0.5 * kPi}, opt);
  CHECK(p.exit_time == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(wrap_signed(p.beta_out - 0.5 * kPi)) < 1e-9);
  CHECK(p.samples.size() >= 100);
  CHECK(p.samples.size() <= 101);
}

TEST_CASE("euclidean endpoint table is the chord map") {
  const ScanGeometry& g = test::euclid_small();
  const auto& t = g.table();
  const BoundaryGrid& bg = g.boundary();
  double tau_err = 0.0, map_err = 0.0;
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int j = 0; j < bg.nb(); ++j) {
      double a = bg.alpha(j);
      tau_err = std::max(tau_err, std::abs(t.tau(i, j) - 2.0 * std::cos(a)));
      map_err = std::max(map_err, std::abs(wrap_signed(t.beta1(i, j) - (bg.beta(i) + kPi + 2.0 * a))));
      map_err = std::max(map_err, std::abs(t.alpha1(i, j) + a));
    }
  CHECK(tau_err < 1e-8);
  CHECK(map_err < 1e-8);
}

TEST_CASE("geodesics of the bump metric are reversible") {
  ConformalMetric m = ConformalMetric::default_pair();
  TraceOptions opt;
  opt.h_step = 2e-3;
  PhasePoint start{{0.1, 0.2}, 0.7};
  GeodesicPath fwd = trace_geodesic(m, start, opt);
  auto [c, t] = trace_to_influx(m, {fwd.exit_point.x, fwd.exit_point.theta}, opt);
  auto [c0, t0] = trace_to_influx(m, start, opt);
  CHECK(std::abs(t - (t0 + fwd.exit_time)) < 1e-6);
  CHECK(std::abs(wrap_signed(c.beta - c0.beta)) < 1e-6);
  CHECK(std::abs(c.alpha - c0.alpha) < 1e-6);
}

TEST_CASE("endpoint table save and load") {
  const ScanGeometry& g = test::paper_small();
  fs::path path = fs::temp_directory_path() / "geoxray_test_table.gxet";
  g.table().save(path.string());
  GeodesicEndpointTable t = GeodesicEndpointTable::load(path.string());
  CHECK(t.key() == g.table().key());
  CHECK(t.grid() == g.boundary());
  for (int i = 0; i < g.boundary().n_beta(); i += 7)
    for (int j = 0; j < g.boundary().nb(); j += 5) {
      CHECK(t.tau(i, j) == g.table().tau(i, j));
      CHECK(t.alpha1(i, j) == g.table().alpha1(i, j));
    }
  fs::remove(path);
}

TEST_CASE("malformed endpoint table raises IoError") {
  fs::path path = fs::temp_directory_path() / "geoxray_test_bad.gxet";
  {
    std::ofstream out(path, std::ios::binary);
    out << "XXXXnot a table";
  }
  CHECK_THROWS_AS(GeodesicEndpointTable::load(path.string()), IoError);
  fs::remove(path);
  CHECK_THROWS_AS(GeodesicEndpointTable::load(path.string()), IoError);
}

TEST_CASE("endpoint key depends on the step") {
  TraceOptions a, b;
  b.h_step = 2e-3;
  CHECK(endpoint_key(ConformalMetric::euclidean(), a) != endpoint_key(ConformalMetric::euclidean(), b));
}

TEST_CASE("trace start outside the disk is rejected") {
  CHECK_THROWS_AS(trace_geodesic(ConformalMetric::euclidean(), {{1.5, 0.0}, 0.0}, TraceOptions{}), DomainError);
}
