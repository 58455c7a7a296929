#pragma once

#include <optional>

#include "geoxray/fredholm.hpp"

namespace geoxray {

// Odd holomorphic solution w of Xw = -a, w = 2pi i (Id + iH) n_psi with
// I_perp^* n = a.
struct IntegratingFactor {
  InfluxData n_data;                 // n = R_perp a
  FullBoundaryData boundary_trace;   // w on the full boundary grid
  std::optional<FiberField> interior;
  NeumannResult solve;

  // w at (x, theta) for an arbitrary interior point, from nt backward traces
  // on the fiber grid rotated to start at theta (nt <= 0: 2 nb, the angular
  // resolution of the boundary grid).
  cplx evaluate(const ScanGeometry& g, Vec2 x, double theta, int nt = 0) const;
  // The whole fiber of w over the FiberGrid at x.
  std::vector<cplx> fiber_at(const ScanGeometry& g, Vec2 x) const;
};

// 2pi i (Id + iH) applied to the transport extension of n (interior) or to
// its odd extension (boundary).
FullBoundaryData hif_boundary_from(const InfluxData& n);
FiberField hif_interior_from(const InfluxData& n, const ScanGeometry& g);

IntegratingFactor build_hif_boundary(const AttenuationProfile& a, const ScanGeometry& g, const NeumannConfig& cfg);
IntegratingFactor build_hif_interior(const AttenuationProfile& a, const ScanGeometry& g, const NeumannConfig& cfg);

// Holomorphic u with Xu = -f1 - X_perp f2:
// u = 2pi i [(Id + iH)(R_perp f1)_psi - (Id + iH)(R_0 f2)_psi].
FiberField build_holomorphic_solution(const ScalarField& f1, const ScalarField& f2, const ScanGeometry& g,
                                      const NeumannConfig& cfg);

// Elementwise exp(s * w) of a fiber field or boundary trace.
FiberField exp_fiber(const FiberField& w, double s);
FullBoundaryData exp_boundary(const FullBoundaryData& w, double s);

}  // namespace geoxray
