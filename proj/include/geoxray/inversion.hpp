#pragma once

#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "geoxray/hif.hpp"

namespace geoxray {

struct IterateRecord {
  int iteration = 0;
  double error = std::numeric_limits<double>::quiet_NaN();   // vs truth, interior relative L^2
  double residual = std::numeric_limits<double>::quiet_NaN();  // ||I_a f_k - D||_mu / ||D||_mu
  // ||f_k - f_{k-1}|| / ||f_1||, NaN on iterate 1
  double step_change = std::numeric_limits<double>::quiet_NaN();
};

struct ReconstructionReport {
  ScalarField estimate;                 // f, or f1 for vector fields
  std::optional<ScalarField> estimate2;  // f2 for vector fields
  std::vector<IterateRecord> iterates;
  NeumannStatus status = NeumannStatus::converged;
  // max |Im| / max |Re| of the nominally real output before the real part is taken
  double imag_residue = 0.0;
  // Fraction of mask nodes kept by the a_min floor (vector fields only).
  double supported_fraction = 1.0;
  std::vector<std::uint8_t> support;  // per disk node, vector fields only
};

struct ReconstructionOptions {
  NeumannConfig outer;  // defect-correction loop of neumann_reconstruct
  NeumannConfig inner;  // (Id + W^2)^{-1} and (Id + (W^*)^2)^{-1}
  const ScalarField* truth = nullptr;
  const ScalarField* truth2 = nullptr;
  double ring = 1.0;
  double a_min_fraction = 0.05;
  // Width in disk units of the local fit taking the outer dbar of the
  // vector-field formula.
  double fit_sigma = 0.0625;
};

// Factor relating q to v0 in the one-shot method: I_0^* q = kQFactor * v0.
inline const cplx kQFactor(0.0, 1.0);

// L_a D = (1/8pi) I_perp^* A_+^* H (e^{-w} D)_-.
ScalarField approx_inverse_La(const InfluxData& D, const IntegratingFactor& w, const ScanGeometry& g);

// f_0 = L_a D, f_{k+1} = f_k + L_a(D - I_a f_k). Iterate 1 is f_0. Stops as
// diverged when a step change exceeds divergence_guard times the smallest
// earlier one.
ReconstructionReport neumann_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* w = nullptr);

// Intermediate boundary quantities shared by the one-shot and vector-field methods.
struct HolomorphicSplit {
  FullBoundaryData v_minus;  // (Id - iH) v on the full boundary
  I0PerpInverse inverse;     // (g, -i v0) from A_-^* v_minus
  InfluxData pq;             // p + q, so that w' = 2pi i (Id + iH)(p + q)_psi + W
  ScalarField harmonic_w;    // W
  InfluxData h_prime;
};

HolomorphicSplit holomorphic_split(const InfluxData& D, const IntegratingFactor& w, const ScanGeometry& g,
                                   const NeumannConfig& inner);

// (Im(e^w h'_psi))_1 per mask node.
std::vector<cplx> imaginary_mode1(const IntegratingFactor& w, const InfluxData& h_prime, const ScanGeometry& g);

ReconstructionReport oneshot_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* w = nullptr);

ReconstructionReport doppler_reconstruct(const InfluxData& D, const AttenuationProfile& a, const ScanGeometry& g,
                                         const ReconstructionOptions& opt, const IntegratingFactor* w = nullptr);

void write_iterates_csv(std::ostream& out, const std::vector<IterateRecord>& iterates);

}  // namespace geoxray
