#pragma once

#include <random>

#include "geoxray/xray.hpp"

namespace geoxray {

// Largest |tau - 2 cos alpha| over the endpoint table.
double chord_tau_error(const ScanGeometry& g);
// Largest deviation of alpha_1 from the chord map (beta + pi + 2 alpha, -alpha).
double chord_alpha1_error(const ScanGeometry& g);
// Largest |I_0 1 - 2 cos alpha| over the influx grid.
double unit_chord_error(const ScanGeometry& g);

// Sum of a few random Gaussian bumps times the cutoff (1 - r^2 / R^2)^3 on r < R.
ScalarField random_smooth_field(const DiskGrid& disk, std::mt19937_64& rng, double radius = 0.8);
// Low-order trigonometric polynomial in (beta, alpha).
InfluxData random_smooth_data(const BoundaryGrid& grid, std::mt19937_64& rng);

// |a - b| / max(|a|, |b|).
double relative_mismatch(cplx a, cplx b);

// Max-norm of H^2 f + f - pi_0 f on random fibers.
double hilbert_square_error(int fibers, int n, std::mt19937_64& rng);

// ||d -/+ (d)_{+/-}||_mu / ||d||_mu: the part of d outside V_+ (parity +1) or
// V_- (parity -1).
double vpm_leak(const InfluxData& d, const ScanGeometry& g, int parity);

}  // namespace geoxray
