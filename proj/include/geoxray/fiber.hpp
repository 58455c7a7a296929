#pragma once

#include <concepts>
#include <span>
#include <vector>

#include "geoxray/geometry.hpp"
#include "geoxray/types.hpp"

namespace geoxray {

// Any container of equal-length fibers stored contiguously, one fiber per row.
template <class T>
concept FiberFamily = requires(const T& t) {
  { t.fiber_length() } -> std::convertible_to<int>;
  { t.fiber_count() } -> std::convertible_to<std::size_t>;
  t.values;
};

// Raw kernels over `count` fibers of length n stored back to back.
namespace fiberops {

// Mode multiplier: out = IDFT(m(k) * DFT(in)) with signed frequency k in
// [-n/2, n/2); the Nyquist index maps to -n/2.
enum class Multiplier {
  hilbert,          // -i sgn(k)
  holomorphic,      // Id + iH: 1 at k = 0, 2 for k > 0, 0 for k < 0
  antiholomorphic,  // Id - iH
  derivative,       // d/dtheta, i k with the Nyquist mode dropped
};

void apply(std::span<const cplx> in, std::span<cplx> out, int n, Multiplier m);
void parity(std::span<const cplx> in, std::span<cplx> even, std::span<cplx> odd, int n);
void mean(std::span<const cplx> in, std::span<cplx> out, int n);
// Fourier coefficient (1/2pi) int u e^{-ik theta} d theta of each fiber on the
// grid theta_j = (j + 1/2) 2pi / n.
void mode(std::span<const cplx> in, std::span<cplx> out, int n, int k);
// Trigonometric interpolation of one fiber at angle theta (band-limited reconstruction).
cplx interpolate(std::span<const cplx> fiber, double theta);
// Fraction of squared spectral mass carried by the strictly negative modes.
double negative_mode_fraction(std::span<const cplx> in, int n);

}  // namespace fiberops

template <FiberFamily T>
T fiber_multiplier(const T& d, fiberops::Multiplier m) {
  T out = d;
  fiberops::apply(d.values, out.values, d.fiber_length(), m);
  return out;
}

// Fiberwise Hilbert transform H u_k = -i sgn(k) u_k.
template <FiberFamily T>
T hilbert(const T& d) {
  return fiber_multiplier(d, fiberops::Multiplier::hilbert);
}

// (Id + iH) d: keeps mode 0, doubles positive modes, removes negative modes.
template <FiberFamily T>
T holomorphic_projection(const T& d) {
  return fiber_multiplier(d, fiberops::Multiplier::holomorphic);
}

// (Id - iH) d.
template <FiberFamily T>
T antiholomorphic_projection(const T& d) {
  return fiber_multiplier(d, fiberops::Multiplier::antiholomorphic);
}

template <FiberFamily T>
struct ParityParts {
  T even;
  T odd;
};

// u_{+/-}(theta) = (u(theta) +/- u(theta + pi)) / 2.
template <FiberFamily T>
ParityParts<T> parity_split(const T& d) {
  ParityParts<T> p{d, d};
  fiberops::parity(d.values, p.even.values, p.odd.values, d.fiber_length());
  return p;
}

// H composed with the even projection (H_+) or the odd projection (H_-).
template <FiberFamily T>
T hilbert_even(const T& d) {
  return hilbert(parity_split(d).even);
}
template <FiberFamily T>
T hilbert_odd(const T& d) {
  return hilbert(parity_split(d).odd);
}

// Fiber averages, one value per fiber.
template <FiberFamily T>
std::vector<cplx> pi0(const T& d) {
  std::vector<cplx> out(d.fiber_count());
  fiberops::mean(d.values, out, d.fiber_length());
  return out;
}

// k-th Fourier coefficient of every fiber.
template <FiberFamily T>
std::vector<cplx> fiber_mode(const T& d, int k) {
  std::vector<cplx> out(d.fiber_count());
  fiberops::mode(d.values, out, d.fiber_length(), k);
  return out;
}

template <FiberFamily T>
double negative_mode_fraction(const T& d) {
  return fiberops::negative_mode_fraction(d.values, d.fiber_length());
}

// Relative size of the part that is even under theta -> theta + pi.
template <FiberFamily T>
double even_fraction(const T& d) {
  auto p = parity_split(d);
  double e = 0.0, t = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    e += std::norm(p.even.values[i]);
    t += std::norm(d.values[i]);
  }
  return t > 0.0 ? std::sqrt(e / t) : 0.0;
}

// Counts interpolation samples clamped at grazing incidence.
struct InterpStats {
  std::size_t clamped = 0;
};

// A_+ (sign = +1) and A_- (sign = -1): d on the influx half, +/- d o alpha on
// the outflux half.
FullBoundaryData apply_A(const InfluxData& d, const GeodesicEndpointTable& table, int sign,
                         InterpStats* stats = nullptr);
inline FullBoundaryData apply_A_plus(const InfluxData& d, const GeodesicEndpointTable& t,
                                     InterpStats* s = nullptr) {
  return apply_A(d, t, +1, s);
}
inline FullBoundaryData apply_A_minus(const InfluxData& d, const GeodesicEndpointTable& t,
                                      InterpStats* s = nullptr) {
  return apply_A(d, t, -1, s);
}

// A_+^* (sign = +1) and A_-^* (sign = -1): (u +/- u o alpha) restricted to the influx half.
InfluxData apply_A_star(const FullBoundaryData& u, const GeodesicEndpointTable& table, int sign,
                        InterpStats* stats = nullptr);

// Extension to the whole boundary by oddness (sign = -1) or evenness (+1)
// under v -> -v. For d in V_- (resp. V_+) this equals A_+ d (resp. A_- d up to sign).
FullBoundaryData extend_by_parity(const InfluxData& d, int sign);
inline FullBoundaryData extend_odd(const InfluxData& d) { return extend_by_parity(d, -1); }
inline FullBoundaryData extend_even(const InfluxData& d) { return extend_by_parity(d, +1); }

// Restriction of boundary samples to the influx half.
InfluxData restrict_influx(const FullBoundaryData& u);

struct VpmSplit {
  InfluxData plus;   // even under the antipodal scattering relation
  InfluxData minus;  // odd
};

// d_{+/-} = (d +/- d o alpha_1) / 2.
VpmSplit project_Vpm(const InfluxData& d, const GeodesicEndpointTable& table, InterpStats* stats = nullptr);

}  // namespace geoxray
