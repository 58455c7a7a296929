#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "geoxray/xray.hpp"

namespace geoxray {

struct NeumannConfig {
  int max_iters = 8;
  double rel_tol = 1e-6;
  // The series is declared divergent when a step change exceeds
  // divergence_guard times the smallest step change seen so far.
  double divergence_guard = 10.0;

  void validate() const;
};

// stalled: the residual stopped decreasing; the best iterate is returned.
enum class NeumannStatus { converged, maxed, diverged, stalled };

const char* to_string(NeumannStatus s);

struct NeumannRecord {
  int iteration = 0;
  double residual = 0.0;     // ||g - apply(x_{k-1})|| / ||g||
  double step_change = 0.0;  // ||x_k - x_{k-1}|| / ||g||, NaN on the stalled record
};

struct NeumannResult {
  ScalarField solution;
  std::vector<NeumannRecord> history;
  NeumannStatus status = NeumannStatus::maxed;
};

// Carries the history of a series stopped by the divergence guard.
class DivergenceError : public NumericError {
 public:
  DivergenceError(const std::string& what, std::vector<NeumannRecord> history)
      : NumericError(what), history_(std::move(history)) {}
  const std::vector<NeumannRecord>& history() const { return history_; }

 private:
  std::vector<NeumannRecord> history_;
};

using FieldOperator = std::function<ScalarField(const ScalarField&)>;

// Solves apply(x) = g with x_0 = g, x_{k+1} = x_k + (g - apply(x_k)), i.e. the
// partial sums of sum_k (Id - apply)^k g. Norms are the interior L^2(M) norm.
// Stops with `stalled` at the first iterate whose residual does not improve on
// its predecessor and returns the predecessor. Throws DivergenceError when the
// guard fires.
NeumannResult neumann_solve(const FieldOperator& apply, const ScalarField& g, const NeumannConfig& cfg,
                            const ScanGeometry& geo);

void write_history_csv(std::ostream& out, const std::vector<NeumannRecord>& history);

// (1/8pi) I_perp^* A_+^* H (d extended by oddness). For d in V_+ this is
// (1/2pi) I_perp^* ((1/4) A_+^* H_- A_- d).
ScalarField backproject_odd(const InfluxData& d, const ScanGeometry& g);
// -(1/8pi) I_0^* A_+^* H (d extended by evenness).
ScalarField backproject_even(const InfluxData& d, const ScanGeometry& g);

// (Id + W^2) f.
ScalarField op_FredW(const ScalarField& f, const ScanGeometry& g);
// (Id + (W^*)^2) h.
ScalarField op_FredWstar(const ScalarField& h, const ScanGeometry& g);

// R_perp f = (1/8pi) A_+^* H_- A_- I_0 (Id + W^2)^{-1} f, so that I_perp^* R_perp f = f.
InfluxData right_inverse_Rperp(const ScalarField& f, const ScanGeometry& g, const NeumannConfig& cfg,
                               NeumannResult* solve = nullptr);
// R_0 g = -(1/8pi) A_+^* H_+ A_- I_perp (Id + (W^*)^2)^{-1} g, so that I_0^* R_0 g = g.
InfluxData right_inverse_R0(const ScalarField& g_field, const ScanGeometry& g, const NeumannConfig& cfg,
                            NeumannResult* solve = nullptr);

struct I0PerpInverse {
  ScalarField f1;
  ScalarField f2;
  NeumannResult solve1;
  NeumannResult solve2;
  double residual = 0.0;  // ||I_0 f1 + I_perp f2 - D||_mu / ||D||_mu, when requested
};

// Recovers (f1, f2) from D = I_0 f1 + I_perp f2. I_perp only sees f2 up to
// its boundary values; when f2_trace (f2 at the boundary points beta_i) is
// given, its harmonic extension is lifted out before the solve and added back.
I0PerpInverse invert_I0perp(const InfluxData& D, const ScanGeometry& g, const NeumannConfig& cfg,
                            bool compute_residual = false, const std::vector<cplx>* f2_trace = nullptr);

}  // namespace geoxray
