#pragma once

#include <functional>
#include <string>
#include <vector>

#include "geoxray/xray.hpp"

namespace geoxray {

struct Circle {
  Vec2 center;
  double radius = 0.0;
};

// Scalar test object given in closed form. `jumps` lists the circles across
// which the function is discontinuous.
struct ScalarPhantom {
  std::string name;
  std::function<double(Vec2)> fn;
  std::vector<Circle> jumps;
  double lower = 0.0;
  double upper = 0.0;

  ScalarField sample(const DiskGrid& g) const;
  // Euclidean distance from p to the nearest jump circle (infinity without jumps).
  double jump_distance(Vec2 p) const;
};

struct VectorPhantom {
  std::string name;
  std::function<Vec2(Vec2)> fn;

  std::pair<ScalarField, ScalarField> sample(const DiskGrid& g) const;
};

// "smooth-gaussians", "jumpy" or "zero".
ScalarPhantom make_phantom(const std::string& id);
// "zero", "constant", "smooth" or "jumpy", multiplied by scale.
ScalarPhantom make_attenuation(const std::string& id, double scale);
// "polynomial", "polynomial_generic" or "solenoidal". "polynomial" and
// "solenoidal" satisfy f1 + i f2 = 2 dbar(zeta) with zeta = 0 on the boundary;
// "polynomial_generic" does not.
VectorPhantom make_vector_phantom(const std::string& id);

bool is_vector_phantom(const std::string& id);

AttenuationProfile to_profile(const ScalarPhantom& a, const DiskGrid& g);

// Fraction of the squared error sum_{mask} |e - t|^2 e^{2 lambda} carried by
// nodes within `cells` grid cells of a jump of any of the given phantoms.
double error_fraction_near_jumps(const ScalarField& estimate, const ScalarField& truth,
                                 const std::vector<const ScalarPhantom*>& phantoms, const ScanGeometry& g,
                                 double cells, double ring = 1.0);

}  // namespace geoxray
