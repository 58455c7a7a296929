#include "geoxray/fredholm.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

namespace geoxray {

void NeumannConfig::validate() const {
  if (max_iters < 1) throw ConfigError("neumann max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("neumann rel_tol must be positive");
  if (!(divergence_guard > 1.0)) throw ConfigError("neumann divergence_guard must exceed 1");
}

const char* to_string(NeumannStatus s) {
  switch (s) {
    case NeumannStatus::converged: return "converged";
    case NeumannStatus::maxed: return "maxed";
    case NeumannStatus::diverged: return "diverged";
    case NeumannStatus::stalled: return "stalled";
  }
  return "?";
}

NeumannResult neumann_solve(const FieldOperator& apply, const ScalarField& g, const NeumannConfig& cfg,
                            const ScanGeometry& geo) {
  cfg.validate();
  NeumannResult res;
  res.solution = g;
  const double gnorm = norm_interior(g, geo);
  if (gnorm == 0.0) {
    res.status = NeumannStatus::converged;
    return res;
  }
  double min_step = std::numeric_limits<double>::infinity();
  ScalarField previous;
  for (int k = 1; k <= cfg.max_iters; ++k) {
    ScalarField r = g - apply(res.solution);
    NeumannRecord rec;
    rec.iteration = k;
    rec.residual = norm_interior(r, geo) / gnorm;
    if (k > 1 && rec.residual >= res.history.back().residual) {
      // x_{k-1} is no better than x_{k-2}: keep x_{k-2}.
      rec.step_change = std::numeric_limits<double>::quiet_NaN();
      res.history.push_back(rec);
      res.solution = std::move(previous);
      res.status = NeumannStatus::stalled;
      return res;
    }
    previous = res.solution;
    res.solution += r;
    rec.step_change = norm_interior(r, geo) / gnorm;
    res.history.push_back(rec);
    if (!std::isfinite(rec.step_change) || rec.step_change > cfg.divergence_guard * min_step) {
      res.status = NeumannStatus::diverged;
      std::ostringstream os;
      os << "Neumann series diverged at iteration " << k << " (step change " << rec.step_change << ")";
      throw DivergenceError(os.str(), res.history);
    }
    min_step = std::min(min_step, rec.step_change);
    if (rec.step_change <= cfg.rel_tol) {
      res.status = NeumannStatus::converged;
      return res;
    }
  }
  res.status = NeumannStatus::maxed;
  return res;
}

void write_history_csv(std::ostream& out, const std::vector<NeumannRecord>& history) {
  out << "iteration,residual,step_change\n";
  for (const auto& r : history) out << r.iteration << ',' << r.residual << ',' << r.step_change << '\n';
}

namespace {

InfluxData filtered_boundary(const InfluxData& d, const ScanGeometry& g, int parity) {
  FullBoundaryData u = hilbert(extend_by_parity(d, parity));
  return apply_A_star(u, g.table(), +1);
}

}  // namespace

ScalarField backproject_odd(const InfluxData& d, const ScanGeometry& g) {
  ScalarField out = adjoint_Iperp(filtered_boundary(d, g, -1), g);
  out *= cplx(1.0 / (8.0 * kPi));
  return out;
}

ScalarField backproject_even(const InfluxData& d, const ScanGeometry& g) {
  ScalarField out = adjoint_I0(filtered_boundary(d, g, +1), g);
  out *= cplx(-1.0 / (8.0 * kPi));
  return out;
}

ScalarField op_FredW(const ScalarField& f, const ScanGeometry& g) { return backproject_odd(forward_I0(f, g), g); }

ScalarField op_FredWstar(const ScalarField& h, const ScanGeometry& g) {
  return backproject_even(forward_Iperp(h, g), g);
}

InfluxData right_inverse_Rperp(const ScalarField& f, const ScanGeometry& g, const NeumannConfig& cfg,
                               NeumannResult* solve) {
  NeumannResult r = neumann_solve([&](const ScalarField& x) { return op_FredW(x, g); }, f, cfg, g);
  InfluxData out = filtered_boundary(forward_I0(r.solution, g), g, -1);
  out *= cplx(1.0 / (8.0 * kPi));
  if (solve) *solve = std::move(r);
  return out;
}

InfluxData right_inverse_R0(const ScalarField& g_field, const ScanGeometry& g, const NeumannConfig& cfg,
                            NeumannResult* solve) {
  NeumannResult r = neumann_solve([&](const ScalarField& x) { return op_FredWstar(x, g); }, g_field, cfg, g);
  InfluxData out = filtered_boundary(forward_Iperp(r.solution, g), g, +1);
  out *= cplx(-1.0 / (8.0 * kPi));
  if (solve) *solve = std::move(r);
  return out;
}

I0PerpInverse invert_I0perp(const InfluxData& D, const ScanGeometry& g, const NeumannConfig& cfg,
                            bool compute_residual, const std::vector<cplx>* f2_trace) {
  std::optional<ScalarField> lift;
  if (f2_trace) lift = harmonic_extension(*f2_trace, g.boundary(), g.disk());
  VpmSplit s = project_Vpm(lift ? D - forward_Iperp(*lift, g) : D, g.table());
  I0PerpInverse out;
  out.solve1 = neumann_solve([&](const ScalarField& x) { return op_FredW(x, g); }, backproject_odd(s.plus, g), cfg, g);
  out.solve2 =
      neumann_solve([&](const ScalarField& x) { return op_FredWstar(x, g); }, backproject_even(s.minus, g), cfg, g);
  out.f1 = out.solve1.solution;
  out.f2 = out.solve2.solution;
  if (lift) out.f2 += *lift;
  if (compute_residual) {
    double dn = norm_mu(D, g);
    InfluxData model = forward_I0(out.f1, g) + forward_Iperp(out.f2, g);
    out.residual = dn > 0.0 ? norm_mu(model - D, g) / dn : 0.0;
  }
  return out;
}

}  // namespace geoxray
