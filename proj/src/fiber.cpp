#include "geoxray/fiber.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace geoxray {

namespace {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// FFTW planning is not thread safe; execution with new arrays is.
const FftPlans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  FftPlans p;
  p.forward = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

void dft(const FftPlans& p, bool forward, const cplx* in, cplx* out) {
  fftw_execute_dft(forward ? p.forward : p.backward,
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

int signed_frequency(int m, int n) { return m < n / 2 ? m : m - n; }

cplx multiplier(fiberops::Multiplier kind, int k) {
  using M = fiberops::Multiplier;
  switch (kind) {
    case M::hilbert:
      return k > 0 ? cplx(0.0, -1.0) : (k < 0 ? cplx(0.0, 1.0) : cplx(0.0));
    case M::holomorphic:
      return k > 0 ? cplx(2.0) : (k < 0 ? cplx(0.0) : cplx(1.0));
    case M::antiholomorphic:
      return k > 0 ? cplx(0.0) : (k < 0 ? cplx(2.0) : cplx(1.0));
    case M::derivative:
      return cplx(0.0, static_cast<double>(k));
  }
  return {};
}

void check_shape(std::size_t size, int n) {
  if (n <= 0 || n % 2 != 0) throw ShapeError("fiber length must be even");
  if (size % static_cast<std::size_t>(n) != 0) throw ShapeError("sample count is not a multiple of the fiber length");
}

}  // namespace

namespace fiberops {

void apply(std::span<const cplx> in, std::span<cplx> out, int n, Multiplier m) {
  check_shape(in.size(), n);
  if (out.size() != in.size()) throw ShapeError("output size mismatch");
  const FftPlans& p = plans_for(n);
  std::vector<cplx> mult(n);
  for (int j = 0; j < n; ++j) mult[j] = multiplier(m, signed_frequency(j, n)) / static_cast<double>(n);
  if (m == Multiplier::derivative) mult[n / 2] = 0.0;
  const std::ptrdiff_t count = static_cast<std::ptrdiff_t>(in.size() / n);
#pragma omp parallel
  {
    std::vector<cplx> spec(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t f = 0; f < count; ++f) {
      dft(p, true, in.data() + f * n, spec.data());
      for (int j = 0; j < n; ++j) spec[j] *= mult[j];
      dft(p, false, spec.data(), out.data() + f * n);
    }
  }
}

void parity(std::span<const cplx> in, std::span<cplx> even, std::span<cplx> odd, int n) {
  check_shape(in.size(), n);
  const int half = n / 2;
  const std::size_t count = in.size() / n;
  for (std::size_t f = 0; f < count; ++f) {
    const cplx* u = in.data() + f * n;
    for (int j = 0; j < n; ++j) {
      cplx a = u[j];
      cplx b = u[(j + half) % n];
      even[f * n + j] = 0.5 * (a + b);
      odd[f * n + j] = 0.5 * (a - b);
    }
  }
}

void mean(std::span<const cplx> in, std::span<cplx> out, int n) {
  check_shape(in.size(), n);
  const std::size_t count = in.size() / n;
  for (std::size_t f = 0; f < count; ++f) {
    cplx s{};
    for (int j = 0; j < n; ++j) s += in[f * n + j];
    out[f] = s / static_cast<double>(n);
  }
}

void mode(std::span<const cplx> in, std::span<cplx> out, int n, int k) {
  check_shape(in.size(), n);
  std::vector<cplx> phase(n);
  for (int j = 0; j < n; ++j) phase[j] = std::polar(1.0 / n, -k * (j + 0.5) * kTwoPi / n);
  const std::size_t count = in.size() / n;
  for (std::size_t f = 0; f < count; ++f) {
    cplx s{};
    for (int j = 0; j < n; ++j) s += in[f * n + j] * phase[j];
    out[f] = s;
  }
}

cplx interpolate(std::span<const cplx> fiber, double theta) {
  const int n = static_cast<int>(fiber.size());
  check_shape(fiber.size(), n);
  std::vector<cplx> spec(n);
  dft(plans_for(n), true, fiber.data(), spec.data());
  // spec[m] = sum_j u_j e^{-2pi i m j / n}; the grid offset of half a cell
  // contributes the phase e^{-i k delta / 2}.
  const double d = kTwoPi / n;
  cplx s{};
  for (int m = 0; m < n; ++m) {
    int k = signed_frequency(m, n);
    s += spec[m] * std::polar(1.0 / n, k * (theta - 0.5 * d));
  }
  return s;
}

double negative_mode_fraction(std::span<const cplx> in, int n) {
  check_shape(in.size(), n);
  const FftPlans& p = plans_for(n);
  std::vector<cplx> spec(n);
  double neg = 0.0, total = 0.0;
  const std::size_t count = in.size() / n;
  for (std::size_t f = 0; f < count; ++f) {
    dft(p, true, in.data() + f * n, spec.data());
    for (int m = 0; m < n; ++m) {
      double e = std::norm(spec[m]);
      total += e;
      if (signed_frequency(m, n) < 0) neg += e;
    }
  }
  return total > 0.0 ? neg / total : 0.0;
}

}  // namespace fiberops

FullBoundaryData apply_A(const InfluxData& d, const GeodesicEndpointTable& table, int sign, InterpStats* stats) {
  if (!(d.grid == table.grid())) throw ShapeError("influx data and endpoint table grids differ");
  const BoundaryGrid& g = d.grid;
  FullBoundaryData u(g);
  std::size_t clamped = 0;
  for (int i = 0; i < g.n_beta(); ++i) {
    for (int j = 0; j < g.nb(); ++j) {
      u.influx(i, j) = d.at(i, j);
      // The outflux point opposite to influx (i, j) is the exit of the
      // geodesic entering at alpha_1(i, j).
      cplx v;
      if (d.sample(table.beta1(i, j), table.alpha1(i, j), v)) ++clamped;
      u.outflux(i, j) = static_cast<double>(sign) * v;
    }
  }
  if (stats) stats->clamped += clamped;
  return u;
}

InfluxData apply_A_star(const FullBoundaryData& u, const GeodesicEndpointTable& table, int sign,
                        InterpStats* stats) {
  if (!(u.grid == table.grid())) throw ShapeError("boundary data and endpoint table grids differ");
  const BoundaryGrid& g = u.grid;
  InfluxData d(g);
  std::size_t clamped = 0;
  for (int i = 0; i < g.n_beta(); ++i) {
    for (int j = 0; j < g.nb(); ++j) {
      cplx v;
      if (u.sample_outflux(table.beta1(i, j), table.alpha1(i, j), v)) ++clamped;
      d.at(i, j) = u.influx(i, j) + static_cast<double>(sign) * v;
    }
  }
  if (stats) stats->clamped += clamped;
  return d;
}

FullBoundaryData extend_by_parity(const InfluxData& d, int sign) {
  const BoundaryGrid& g = d.grid;
  FullBoundaryData u(g);
  for (int i = 0; i < g.n_beta(); ++i)
    for (int j = 0; j < g.nb(); ++j) {
      u.influx(i, j) = d.at(i, j);
      u.outflux(i, j) = static_cast<double>(sign) * d.at(i, j);
    }
  return u;
}

InfluxData restrict_influx(const FullBoundaryData& u) {
  const BoundaryGrid& g = u.grid;
  InfluxData d(g);
  for (int i = 0; i < g.n_beta(); ++i)
    for (int j = 0; j < g.nb(); ++j) d.at(i, j) = u.influx(i, j);
  return d;
}

VpmSplit project_Vpm(const InfluxData& d, const GeodesicEndpointTable& table, InterpStats* stats) {
  if (!(d.grid == table.grid())) throw ShapeError("influx data and endpoint table grids differ");
  const BoundaryGrid& g = d.grid;
  VpmSplit s{InfluxData(g), InfluxData(g)};
  std::size_t clamped = 0;
  for (int i = 0; i < g.n_beta(); ++i)
    for (int j = 0; j < g.nb(); ++j) {
      cplx back;
      if (d.sample(table.beta1(i, j), table.alpha1(i, j), back)) ++clamped;
      s.plus.at(i, j) = 0.5 * (d.at(i, j) + back);
      // d_- = d - d_+ keeps the recombination exact.
      s.minus.at(i, j) = d.at(i, j) - s.plus.at(i, j);
    }
  if (stats) stats->clamped += clamped;
  return s;
}

}  // namespace geoxray
