#include "geoxray/inversion.hpp"

#include <algorithm>
#include <sstream>

namespace geoxray {

ScalarField approx_inverse_La(const InfluxData& D, const IntegratingFactor& w, const ScanGeometry& g) {
  if (!(w.boundary_trace.grid == D.grid)) throw ShapeError("integrating factor and data grids differ");
  InfluxData v(D.grid);
  for (int i = 0; i < D.grid.n_beta(); ++i)
    for (int j = 0; j < D.grid.nb(); ++j) v.at(i, j) = std::exp(-w.boundary_trace.influx(i, j)) * D.at(i, j);
  return backproject_odd(v, g);
}

namespace {

IntegratingFactor zero_factor(const ScanGeometry& g) {
  IntegratingFactor w;
  w.n_data = InfluxData(g.boundary());
  w.boundary_trace = FullBoundaryData(g.boundary());
  w.interior = FiberField(g.disk(), g.fiber());
  return w;
}

bool is_zero(const AttenuationProfile& a) { return a.max_abs() == 0.0 && !a.closed_form; }

// Uses the caller's factor when given; otherwise builds one (with interior
// when `interior` is set).
const IntegratingFactor& resolve_factor(const IntegratingFactor* given, std::optional<IntegratingFactor>& storage,
                                        const AttenuationProfile& a, const ScanGeometry& g, const NeumannConfig& inner,
                                        bool interior) {
  if (given && (!interior || given->interior)) return *given;
  if (given) {
    storage = *given;
    storage->interior = hif_interior_from(given->n_data, g);
  } else if (is_zero(a)) {
    storage = zero_factor(g);
  } else {
    storage = interior ? build_hif_interior(a, g, inner) : build_hif_boundary(a, g, inner);
  }
  return *storage;
}

double take_real(const ScalarField& z, ScalarField& out) {
  double re = 0.0, im = 0.0;
  for (int idx : z.grid.mask_nodes()) {
    re = std::max(re, std::abs(z.values[idx].real()));
    im = std::max(im, std::abs(z.values[idx].imag()));
  }
  out = z.real_part();
  return re > 0.0 ? im / re : im;
}

}  // namespace

ReconstructionReport neumann_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* given) {
  opt.outer.validate();
  std::optional<IntegratingFactor> storage;
  const IntegratingFactor& w = resolve_factor(given, storage, a, g, opt.inner, false);

  ReconstructionReport rep;
  const double dnorm = norm_mu(D, g);
  ScalarField f = approx_inverse_La(D, w, g);
  const double f1norm = norm_interior(f, g, opt.ring);
  double min_step = std::numeric_limits<double>::infinity();
  double pending = std::numeric_limits<double>::quiet_NaN();
  for (int k = 1;; ++k) {
    InfluxData defect = D - forward_Ia(f, a, g);
    IterateRecord rec;
    rec.iteration = k;
    rec.residual = dnorm > 0.0 ? norm_mu(defect, g) / dnorm : 0.0;
    rec.step_change = pending;
    if (opt.truth) rec.error = relative_error(f, *opt.truth, g, opt.ring);
    rep.iterates.push_back(rec);
    if (k >= 2) {
      if (!std::isfinite(pending) || pending > opt.outer.divergence_guard * min_step) {
        rep.status = NeumannStatus::diverged;
        break;
      }
      min_step = std::min(min_step, pending);
      if (pending <= opt.outer.rel_tol) {
        rep.status = NeumannStatus::converged;
        break;
      }
    }
    if (k >= opt.outer.max_iters) {
      rep.status = NeumannStatus::maxed;
      break;
    }
    ScalarField corr = approx_inverse_La(defect, w, g);
    f += corr;
    pending = f1norm > 0.0 ? norm_interior(corr, g, opt.ring) / f1norm : 0.0;
  }
  rep.imag_residue = take_real(f, rep.estimate);
  return rep;
}

HolomorphicSplit holomorphic_split(const InfluxData& D, const IntegratingFactor& w, const ScanGeometry& g,
                                   const NeumannConfig& inner) {
  const BoundaryGrid& bg = g.boundary();
  FullBoundaryData v(bg);
  for (int i = 0; i < bg.n_beta(); ++i)
    for (int j = 0; j < bg.nb(); ++j) v.influx(i, j) = std::exp(-w.boundary_trace.influx(i, j)) * D.at(i, j);
  HolomorphicSplit s;
  s.v_minus = antiholomorphic_projection(v);
  // f2 = -i v0, whose boundary values are fiber means of v on the boundary.
  std::vector<cplx> trace(bg.n_beta());
  for (int i = 0; i < bg.n_beta(); ++i) {
    for (int k = 0; k < bg.n_theta(); ++k) trace[i] += v.at(i, k);
    trace[i] *= cplx(0.0, -1.0) / static_cast<double>(bg.n_theta());
  }
  s.inverse = invert_I0perp(apply_A_star(s.v_minus, g.table(), -1), g, inner, false, &trace);

  // w' with Xw' = -f1 - X_perp f2. The harmonic part H+ + H- of f2 (holomorphic
  // plus antiholomorphic) is matched by the fiber-constant W = i(H+ - H-); R_0
  // handles the remainder, which vanishes on the boundary.
  auto [hol, anti] = split_boundary_trace(trace, bg);
  ScalarField hp = harmonic_extension(hol, bg, g.disk());
  ScalarField hm = harmonic_extension(anti, bg, g.disk());
  s.harmonic_w = cplx(0.0, 1.0) * (hp - hm);
  ScalarField f2_inner = s.inverse.f2 - hp - hm;
  // I_0 g - i I_perp v0 = A_-^* v_minus with g = f1 and v0 = i f2.
  InfluxData p = right_inverse_Rperp(s.inverse.f1, g, inner);
  InfluxData q = right_inverse_R0(kQFactor * (cplx(0.0, 1.0) * f2_inner), g, inner);
  s.pq = p + q;
  FullBoundaryData wprime = holomorphic_projection(extend_odd(p) + extend_even(q));
  wprime *= cplx(0.0, kTwoPi);
  for (int i = 0; i < bg.n_beta(); ++i) {
    cplx wb = cplx(0.0, 1.0) * (hol[i] - anti[i]);
    for (int k = 0; k < bg.n_theta(); ++k) wprime.at(i, k) += wb;
  }
  s.h_prime = restrict_influx(0.5 * (s.v_minus - wprime));
  return s;
}

std::vector<cplx> imaginary_mode1(const IntegratingFactor& w, const InfluxData& h_prime, const ScanGeometry& g) {
  if (!w.interior) throw DomainError("integrating factor has no interior values");
  FiberField prod = multiply(exp_fiber(*w.interior, 1.0), transport_extend(h_prime, g));
  for (auto& v : prod.values) v = v.imag();
  return fiber_mode(prod, 1);
}

namespace {

// u~ e^{lambda} from the mode-1 coefficient, then e^{-2 lambda} dbar(.)
ScalarField eta_minus_mode1(const std::vector<cplx>& coeff, const ScanGeometry& g) {
  const DiskGrid& disk = g.disk();
  const auto& lam = g.lambda_nodes();
  ScalarField t(disk);
  const auto& nodes = disk.mask_nodes();
  for (std::size_t m = 0; m < nodes.size(); ++m) t.values[nodes[m]] = coeff[m] * std::exp(lam[nodes[m]]);
  extend_exterior(t);
  ScalarField d = dbar(t);
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] *= std::exp(-2.0 * lam[i]);
  return d;
}

}  // namespace

ReconstructionReport oneshot_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* given) {
  std::optional<IntegratingFactor> storage;
  const IntegratingFactor& w = resolve_factor(given, storage, a, g, opt.inner, true);
  HolomorphicSplit s = holomorphic_split(D, w, g, opt.inner);
  std::vector<cplx> m1 = imaginary_mode1(w, s.h_prime, g);
  for (auto& v : m1) v *= cplx(0.0, -2.0);
  ScalarField f = eta_minus_mode1(m1, g);
  f *= cplx(-1.0);
  if (!is_zero(a)) {
    // f = -eta_- u*_1 - a u*_0 with u*_0 = (v0 + w'_0) / 2.
    ScalarField w0 = cplx(0.0, 1.0) * adjoint_I0(s.pq, g) + s.harmonic_w;
    ScalarField u0 = 0.5 * (cplx(0.0, 1.0) * s.inverse.f2 + w0);
    for (int idx : g.disk().mask_nodes()) f.values[idx] -= a.a.values[idx] * u0.values[idx];
  }
  ReconstructionReport rep;
  rep.imag_residue = take_real(f, rep.estimate);
  IterateRecord rec;
  rec.iteration = 1;
  if (opt.truth) rec.error = relative_error(rep.estimate, *opt.truth, g, opt.ring);
  double dn = norm_mu(D, g);
  rec.residual = dn > 0.0 ? norm_mu(forward_Ia(rep.estimate, a, g) - D, g) / dn : 0.0;
  rep.iterates.push_back(rec);
  rep.status = NeumannStatus::converged;
  return rep;
}

namespace {

double masked_relative_error(const ScalarField& e1, const ScalarField& e2, const ScalarField& t1,
                             const ScalarField& t2, const std::vector<std::uint8_t>& support, const ScanGeometry& g,
                             double ring) {
  const auto& lam = g.lambda_nodes();
  double num = 0.0, den = 0.0;
  for (int idx : g.disk().mask_nodes()) {
    if (!support[idx] || !g.disk().interior(idx, ring)) continue;
    double w = std::exp(2.0 * lam[idx]);
    num += w * (std::norm(e1.values[idx] - t1.values[idx]) + std::norm(e2.values[idx] - t2.values[idx]));
    den += w * (std::norm(t1.values[idx]) + std::norm(t2.values[idx]));
  }
  if (den == 0.0) throw DomainError("relative error against a zero reference");
  return std::sqrt(num / den);
}

}  // namespace

ReconstructionReport doppler_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* given) {
  const DiskGrid& disk = g.disk();
  const double amax = a.max_abs();
  if (amax == 0.0) throw DomainError("vector field reconstruction needs a nonzero attenuation");
  const double a_min = opt.a_min_fraction * amax;
  std::vector<std::uint8_t> ok(disk.size(), 0);
  std::size_t kept = 0;
  for (int idx : disk.mask_nodes())
    if (std::abs(a.a.values[idx]) >= a_min) {
      ok[idx] = 1;
      ++kept;
    }
  const double frac = static_cast<double>(kept) / disk.mask_nodes().size();
  if (frac < 0.5) {
    std::ostringstream os;
    os << "attenuation below a_min on " << 100.0 * (1.0 - frac) << "% of the disk";
    throw DomainError(os.str());
  }

  std::optional<IntegratingFactor> storage;
  const IntegratingFactor& w = resolve_factor(given, storage, a, g, opt.inner, true);
  HolomorphicSplit s = holomorphic_split(D, w, g, opt.inner);
  std::vector<cplx> m1 = imaginary_mode1(w, s.h_prime, g);
  for (auto& v : m1) v *= cplx(0.0, -2.0);
  ScalarField phi = eta_minus_mode1(m1, g);
  ScalarField psi(disk);
  for (int idx : disk.mask_nodes()) psi.values[idx] = ok[idx] ? phi.values[idx] / a.a.values[idx].real() : 0.0;
  ScalarField z = dbar_fit(psi, opt.fit_sigma / disk.spacing(), &ok);
  z *= cplx(2.0);

  ReconstructionReport rep;
  rep.support.assign(disk.size(), 0);
  const int n = disk.n();
  for (int idx : disk.mask_nodes()) {
    int ix = idx % n, iy = idx / n;
    bool all = true;
    for (int dy = -1; dy <= 1 && all; ++dy)
      for (int dx = -1; dx <= 1 && all; ++dx) {
        int jx = ix + dx, jy = iy + dy;
        if (disk.inside(jx, jy) && !ok[disk.index(jx, jy)]) all = false;
      }
    rep.support[idx] = all ? 1 : 0;
  }
  rep.supported_fraction = frac;
  ScalarField f1(disk), f2(disk);
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    f1.values[i] = z.values[i].real();
    f2.values[i] = z.values[i].imag();
  }
  for (int idx : disk.mask_nodes())
    if (!rep.support[idx]) f1.values[idx] = f2.values[idx] = 0.0;
  rep.estimate = f1;
  rep.estimate2 = f2;
  IterateRecord rec;
  rec.iteration = 1;
  if (opt.truth && opt.truth2) rec.error = masked_relative_error(f1, f2, *opt.truth, *opt.truth2, rep.support, g, opt.ring);
  double dn = norm_mu(D, g);
  rec.residual = dn > 0.0 ? norm_mu(forward_doppler(f1, f2, a, g) - D, g) / dn : 0.0;
  rep.iterates.push_back(rec);
  rep.status = NeumannStatus::converged;
  return rep;
}

void write_iterates_csv(std::ostream& out, const std::vector<IterateRecord>& iterates) {
  out << "iteration,error,residual,step_change\n";
  for (const auto& r : iterates) out << r.iteration << ',' << r.error << ',' << r.residual << ',' << r.step_change << '\n';
}

}  // namespace geoxray
