#include "geoxray/hif.hpp"

namespace geoxray {

namespace {
const cplx kTwoPiI(0.0, kTwoPi);
}

FullBoundaryData hif_boundary_from(const InfluxData& n) {
  FullBoundaryData w = holomorphic_projection(extend_odd(n));
  w *= kTwoPiI;
  return w;
}

FiberField hif_interior_from(const InfluxData& n, const ScanGeometry& g) {
  FiberField w = holomorphic_projection(transport_extend(n, g));
  w *= kTwoPiI;
  return w;
}

std::vector<cplx> IntegratingFactor::fiber_at(const ScanGeometry& g, Vec2 x) const {
  std::vector<cplx> f = transport_fiber_at(n_data, g, x);
  std::vector<cplx> out(f.size());
  fiberops::apply(f, out, static_cast<int>(f.size()), fiberops::Multiplier::holomorphic);
  for (auto& v : out) v *= kTwoPiI;
  return out;
}

cplx IntegratingFactor::evaluate(const ScanGeometry& g, Vec2 x, double theta, int nt) const {
  if (nt <= 0) nt = g.boundary().n_theta();
  std::vector<cplx> f = transport_fiber_at(n_data, g, x, theta, nt);
  std::vector<cplx> out(f.size());
  fiberops::apply(f, out, nt, fiberops::Multiplier::holomorphic);
  return kTwoPiI * out[0];
}

IntegratingFactor build_hif_boundary(const AttenuationProfile& a, const ScanGeometry& g, const NeumannConfig& cfg) {
  IntegratingFactor w;
  w.n_data = right_inverse_Rperp(a.a, g, cfg, &w.solve);
  w.boundary_trace = hif_boundary_from(w.n_data);
  return w;
}

IntegratingFactor build_hif_interior(const AttenuationProfile& a, const ScanGeometry& g, const NeumannConfig& cfg) {
  IntegratingFactor w = build_hif_boundary(a, g, cfg);
  w.interior = hif_interior_from(w.n_data, g);
  return w;
}

FiberField build_holomorphic_solution(const ScalarField& f1, const ScalarField& f2, const ScanGeometry& g,
                                      const NeumannConfig& cfg) {
  InfluxData p = right_inverse_Rperp(f1, g, cfg);
  InfluxData q = right_inverse_R0(f2, g, cfg);
  return hif_interior_from(p - q, g);
}

FiberField exp_fiber(const FiberField& w, double s) {
  FiberField out = w;
  for (auto& v : out.values) v = std::exp(s * v);
  return out;
}

FullBoundaryData exp_boundary(const FullBoundaryData& w, double s) {
  FullBoundaryData out = w;
  for (auto& v : out.values) v = std::exp(s * v);
  return out;
}

}  // namespace geoxray
