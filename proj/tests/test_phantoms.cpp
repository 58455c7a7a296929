#include <doctest.h>

#include <limits>

#include "geoxray/phantoms.hpp"

#include "test_util.hpp"

using namespace geoxray;

namespace {

// int_D (f1 + i f2) z^k dA by the midpoint rule in polar coordinates.
cplx moment(const VectorPhantom& v, int k) {
  const int nr = 200, nt = 256;
  cplx s{};
  for (int i = 0; i < nr; ++i) {
    double r = (i + 0.5) / nr;
    for (int j = 0; j < nt; ++j) {
      double t = kTwoPi * j / nt;
      Vec2 p{r * std::cos(t), r * std::sin(t)};
      Vec2 f = v.fn(p);
      s += cplx(f.x, f.y) * std::pow(cplx(p.x, p.y), k) * r;
    }
  }
  return s * (kTwoPi / nt) / double(nr);
}

}  // namespace

TEST_CASE("scalar phantoms stay within their bounds") {
  DiskGrid d(65);
  for (const char* id : {"smooth-gaussians", "jumpy"}) {
    ScalarPhantom p = make_phantom(id);
    ScalarField f = p.sample(d);
    for (int idx : d.mask_nodes()) {
      CHECK(f.values[idx].real() >= p.lower - 1e-12);
      CHECK(f.values[idx].real() <= p.upper + 1e-12);
    }
  }
  for (const char* id : {"constant", "smooth", "jumpy"}) {
    ScalarPhantom a = make_attenuation(id, 2.5);
    for (int idx : d.mask_nodes()) {
      double v = a.fn(d.point(idx));
      CHECK(v >= a.lower - 1e-12);
      CHECK(v <= a.upper + 1e-12);
    }
  }
}

TEST_CASE("unknown phantom ids") {
  CHECK_THROWS_AS(make_phantom("nope"), ConfigError);
  CHECK_THROWS_AS(make_attenuation("nope", 1.0), ConfigError);
  CHECK_THROWS_AS(make_vector_phantom("nope"), ConfigError);
  CHECK(is_vector_phantom("polynomial"));
  CHECK_FALSE(is_vector_phantom("jumpy"));
}

TEST_CASE("jump distance") {
  ScalarPhantom p = make_phantom("jumpy");
  CHECK(p.jump_distance({-0.3, 0.2}) == doctest::Approx(0.3));
  CHECK(make_phantom("smooth-gaussians").jump_distance({0.0, 0.0}) == std::numeric_limits<double>::infinity());
}

TEST_CASE("polynomial vector phantom") {
  VectorPhantom v = make_vector_phantom("polynomial");
  Vec2 c = v.fn({0.0, 0.0});
  CHECK(c.x == doctest::Approx(0.5));
  CHECK(c.y == doctest::Approx(-0.2));
}

TEST_CASE("reconstructable vector phantoms have vanishing holomorphic moments") {
  for (const char* id : {"polynomial", "solenoidal"}) {
    VectorPhantom v = make_vector_phantom(id);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(moment(v, k)) < 1e-4);
  }
  VectorPhantom g = make_vector_phantom("polynomial_generic");
  CHECK(std::abs(moment(g, 0)) > 0.1);
}

TEST_CASE("error fraction near jumps") {
  const ScanGeometry& g = test::euclid_small();
  ScalarPhantom p = make_phantom("jumpy");
  ScalarField t = p.sample(g.disk());
  ScalarField e = t;
  CHECK(error_fraction_near_jumps(e, t, {&p}, g, 2.0) == 0.0);
  for (int idx : g.disk().mask_nodes())
    if (p.jump_distance(g.disk().point(idx)) <= g.disk().spacing()) e.values[idx] += 1.0;
  CHECK(error_fraction_near_jumps(e, t, {&p}, g, 2.0) == doctest::Approx(1.0));
}
