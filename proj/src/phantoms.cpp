#include "geoxray/phantoms.hpp"

#include <algorithm>
#include <limits>

namespace geoxray {

namespace {

double gauss(Vec2 p, Vec2 c, double s) { return std::exp(-(p - c).norm2() / (2.0 * s * s)); }

double inside(Vec2 p, const Circle& c) { return (p - c.center).norm2() < c.radius * c.radius ? 1.0 : 0.0; }

}  // namespace

ScalarField ScalarPhantom::sample(const DiskGrid& g) const { return ScalarField::from_function(g, fn); }

double ScalarPhantom::jump_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& c : jumps) d = std::min(d, std::abs((p - c.center).norm() - c.radius));
  return d;
}

std::pair<ScalarField, ScalarField> VectorPhantom::sample(const DiskGrid& g) const {
  ScalarField f1(g), f2(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    Vec2 v = fn(g.point(static_cast<int>(i)));
    f1.values[i] = v.x;
    f2.values[i] = v.y;
  }
  return {f1, f2};
}

ScalarPhantom make_phantom(const std::string& id) {
  ScalarPhantom p;
  p.name = id;
  if (id == "smooth-gaussians") {
    p.fn = [](Vec2 x) {
      return 1.0 * gauss(x, {-0.25, 0.2}, 0.14) + 0.7 * gauss(x, {0.3, -0.1}, 0.12) -
             0.5 * gauss(x, {0.0, -0.4}, 0.1);
    };
    p.lower = -0.5;
    p.upper = 1.0;
  } else if (id == "jumpy") {
    // A disk, an annulus and a small negative inclusion.
    Circle d1{{-0.3, 0.2}, 0.3};
    Circle a_out{{0.3, -0.15}, 0.32}, a_in{{0.3, -0.15}, 0.16};
    Circle d2{{0.25, 0.45}, 0.12};
    p.fn = [=](Vec2 x) {
      return 1.0 * inside(x, d1) + 0.6 * (inside(x, a_out) - inside(x, a_in)) - 0.5 * inside(x, d2);
    };
    p.jumps = {d1, a_out, a_in, d2};
    p.lower = -0.5;
    p.upper = 1.0;
  } else if (id == "zero") {
    p.fn = [](Vec2) { return 0.0; };
  } else {
    throw ConfigError("unknown phantom '" + id + "'");
  }
  return p;
}

ScalarPhantom make_attenuation(const std::string& id, double scale) {
  ScalarPhantom p;
  p.name = id;
  if (id == "zero") {
    p.fn = [](Vec2) { return 0.0; };
  } else if (id == "constant") {
    p.fn = [scale](Vec2) { return scale; };
    p.lower = p.upper = scale;
  } else if (id == "smooth") {
    p.fn = [scale](Vec2 x) { return scale * gauss(x, {0.1, -0.1}, 0.3); };
    p.lower = 0.0;
    p.upper = scale;
  } else if (id == "jumpy") {
    Circle e1{{0.15, 0.25}, 0.4};
    Circle e2{{-0.35, -0.3}, 0.25};
    p.fn = [=](Vec2 x) { return scale * (0.6 * inside(x, e1) + 0.4 * inside(x, e2)); };
    p.jumps = {e1, e2};
    p.lower = 0.0;
    p.upper = scale;
  } else {
    throw ConfigError("unknown attenuation '" + id + "'");
  }
  return p;
}

VectorPhantom make_vector_phantom(const std::string& id) {
  VectorPhantom v;
  v.name = id;
  if (id == "polynomial") {
    // f1 + i f2 = 4 dbar[(1 - |z|^2) q], q = a + b z + c conj(z).
    v.fn = [](Vec2 x) {
      const cplx a(0.3, 0.1), b(0.2, -0.1), c(0.125, -0.05);
      const cplx z(x.x, x.y);
      cplx f = 4.0 * (c - a * z - b * z * z - 2.0 * c * std::norm(z));
      return Vec2{f.real(), f.imag()};
    };
  } else if (id == "polynomial_generic") {
    v.fn = [](Vec2 x) { return Vec2{0.5 + 0.3 * x.x - 0.4 * x.y * x.y, -0.2 + 0.5 * x.x * x.y + 0.2 * x.y}; };
  } else if (id == "solenoidal") {
    // (-h_y, h_x) for h = (1 - r^2)^2.
    v.fn = [](Vec2 x) {
      double s = 1.0 - x.norm2();
      return Vec2{4.0 * s * x.y, -4.0 * s * x.x};
    };
  } else {
    throw ConfigError("unknown vector phantom '" + id + "'");
  }
  return v;
}

bool is_vector_phantom(const std::string& id) {
  return id == "polynomial" || id == "polynomial_generic" || id == "solenoidal";
}

AttenuationProfile to_profile(const ScalarPhantom& a, const DiskGrid& g) { return AttenuationProfile(a.sample(g), a.fn); }

double error_fraction_near_jumps(const ScalarField& estimate, const ScalarField& truth,
                                 const std::vector<const ScalarPhantom*>& phantoms, const ScanGeometry& g,
                                 double cells, double ring) {
  const double reach = cells * g.disk().spacing();
  const auto& lam = g.lambda_nodes();
  double near = 0.0, total = 0.0;
  for (int idx : g.disk().mask_nodes()) {
    if (!g.disk().interior(idx, ring)) continue;
    double e = std::norm(estimate.values[idx] - truth.values[idx]) * std::exp(2.0 * lam[idx]);
    total += e;
    Vec2 p = g.disk().point(idx);
    bool close = false;
    for (const auto* ph : phantoms) close = close || ph->jump_distance(p) <= reach;
    if (close) near += e;
  }
  return total > 0.0 ? near / total : 0.0;
}

}  // namespace geoxray
