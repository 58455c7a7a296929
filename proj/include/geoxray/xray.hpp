#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "geoxray/fiber.hpp"
#include "geoxray/geometry.hpp"
#include "geoxray/types.hpp"

namespace geoxray {

// Backward-traced influx coordinates (beta, alpha) for every (mask node, theta_k)
// of a disk grid, i.e. the lookup behind the transport extension h_psi.
class InteriorEndpoints {
 public:
  static InteriorEndpoints build(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                                 const TraceOptions& opt);
  static InteriorEndpoints load(const std::string& path);
  void save(const std::string& path) const;

  const DiskGrid& disk() const { return disk_; }
  const FiberGrid& fiber() const { return fiber_; }
  std::uint64_t key() const { return key_; }

  double beta(std::size_t m, int k) const { return beta_[m * fiber_.n() + k]; }
  double alpha(std::size_t m, int k) const { return alpha_[m * fiber_.n() + k]; }
  // (node, angle) pairs whose trace failed and were copied from a neighbour.
  std::size_t flagged() const { return flagged_; }

 private:
  DiskGrid disk_;
  FiberGrid fiber_;
  std::uint64_t key_ = 0;
  std::size_t flagged_ = 0;
  std::vector<double> beta_, alpha_;
};

std::uint64_t interior_key(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                           const TraceOptions& opt);

// Same as InteriorEndpoints::build, going through $GEOXRAY_CACHE_DIR when set.
InteriorEndpoints load_or_build_interior(const ConformalMetric& m, const DiskGrid& disk, const FiberGrid& fiber,
                                         const TraceOptions& opt);

struct ScanConfig {
  int grid_n = 300;
  int boundary_n = 300;
  int n_theta = 64;
  TraceOptions trace;
  // Step of the backward traces used by the transport extension.
  double h_interior = 0.02;
};

// Everything fixed by the metric and the discretization: grids, the boundary
// endpoint table and the (lazily built) interior endpoint table. Copies share
// the tables.
class ScanGeometry {
 public:
  ScanGeometry(ConformalMetric metric, const ScanConfig& cfg);

  const ConformalMetric& metric() const { return metric_; }
  const ScanConfig& config() const { return cfg_; }
  const DiskGrid& disk() const { return disk_; }
  const BoundaryGrid& boundary() const { return boundary_; }
  const FiberGrid& fiber() const { return fiber_; }
  const TraceOptions& trace() const { return cfg_.trace; }
  const GeodesicEndpointTable& table() const { return *table_; }
  const InteriorEndpoints& interior() const;

  // lambda at every node of the disk grid (all N*N nodes, analytic).
  const std::vector<double>& lambda_nodes() const { return *lambda_; }
  // lambda at x(beta_i), constant in i for radial metrics only.
  double lambda_boundary(int i) const { return (*lambda_bdry_)[i]; }

 private:
  struct Lazy {
    std::once_flag once;
    std::optional<InteriorEndpoints> interior;
  };

  ConformalMetric metric_;
  ScanConfig cfg_;
  DiskGrid disk_;
  BoundaryGrid boundary_;
  FiberGrid fiber_;
  std::shared_ptr<const GeodesicEndpointTable> table_;
  std::shared_ptr<Lazy> lazy_;
  std::shared_ptr<const std::vector<double>> lambda_;
  std::shared_ptr<const std::vector<double>> lambda_bdry_;
};

// Real attenuation sampled on the disk grid, optionally with a closed form used
// for off-grid evaluation along rays.
struct AttenuationProfile {
  ScalarField a;
  std::function<double(Vec2)> closed_form;

  AttenuationProfile() = default;
  explicit AttenuationProfile(ScalarField field, std::function<double(Vec2)> fn = {})
      : a(std::move(field)), closed_form(std::move(fn)) {}

  static AttenuationProfile zero(const DiskGrid& g) { return AttenuationProfile(ScalarField(g)); }

  double operator()(Vec2 p) const { return closed_form ? closed_form(p) : a.sample(p).real(); }
  double max_abs() const;
};

// ---- grid calculus -------------------------------------------------------

// Fills every node outside the disk mask by repeated averaging of already
// filled neighbours, ring by ring.
void extend_exterior(ScalarField& f);

struct Gradient {
  ScalarField dx;
  ScalarField dy;
};

// Central differences where both neighbours are in the mask, one-sided
// otherwise. Exterior nodes of the result are extended.
Gradient gradient(const ScalarField& f);

// (d/dx + i d/dy) f / 2.
ScalarField dbar(const ScalarField& f);
// dbar f from a local linear fit at each mask node, weighted by a Gaussian of
// width sigma_cells grid cells. Only nodes with use[idx] set enter the fit
// (all mask nodes when use is null); nodes left without a fit are zero.
ScalarField dbar_fit(const ScalarField& f, double sigma_cells, const std::vector<std::uint8_t>* use = nullptr);

// exp(s * lambda) on the disk grid.
ScalarField exp_lambda(const ScanGeometry& g, double s);

// Pointwise product.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

// <f1, f2>_{L^2(M)} = sum over the mask of f1 conj(f2) e^{2 lambda} h^2.
cplx inner_M(const ScalarField& f1, const ScalarField& f2, const ScanGeometry& g);
double norm_M(const ScalarField& f, const ScanGeometry& g);

// <d1, d2>_{L^2_mu} = sum d1 conj(d2) cos(alpha_j) e^{lambda(x(beta_i))} dbeta dalpha.
cplx inner_mu(const InfluxData& d1, const InfluxData& d2, const ScanGeometry& g);
double norm_mu(const InfluxData& d, const ScanGeometry& g);

// Relative L^2(M) error over mask nodes at least `ring` cells inside the
// boundary circle.
double relative_error(const ScalarField& estimate, const ScalarField& truth, const ScanGeometry& g,
                      double ring = 1.0);
double norm_interior(const ScalarField& f, const ScanGeometry& g, double ring = 1.0);

// ---- forward transforms --------------------------------------------------

// Integrates integrand(PhasePoint) along the geodesic of every influx node,
// weighted by exp(int_0^t a). The integrand returns (value, a) at the sample.
// Trapezoid rule on the uniform flow samples plus the final partial step.
template <class Integrand>
InfluxData integrate_rays(const ScanGeometry& g, Integrand&& integrand) {
  const BoundaryGrid& bg = g.boundary();
  InfluxData out(bg);
  const int nbeta = bg.n_beta();
  const int nalpha = bg.nb();
  const double h = g.trace().h_step;
  std::string failure;
#pragma omp parallel for schedule(dynamic, 2)
  for (int i = 0; i < nbeta; ++i) {
    for (int j = 0; j < nalpha; ++j) {
      try {
        InfluxCoord c{bg.beta(i), bg.alpha(j)};
        cplx sum{};
        double att = 0.0;
        cplx prev_val{};
        double prev_a = 0.0;
        bool first = true;
        double last_t = 0.0;
        FlowExit e = trace_flow(g.metric(), c.phase_point(), g.trace(), 1.0, [&](double t, const PhasePoint& p) {
          last_t = t;
          auto [v, a] = integrand(p);
          if (!first) {
            att += 0.5 * h * (prev_a + a);
            cplx weighted = v * std::exp(att);
            sum += 0.5 * h * (prev_val + weighted);
            prev_val = weighted;
          } else {
            prev_val = v;
            first = false;
          }
          prev_a = a;
        });
        double delta = e.time - last_t;
        if (delta > 0.0 && !first) {
          auto [v, a] = integrand(e.point);
          att += 0.5 * delta * (prev_a + a);
          sum += 0.5 * delta * (prev_val + v * std::exp(att));
        }
        out.at(i, j) = sum;
      } catch (const Error& err) {
#pragma omp critical
        if (failure.empty()) failure = std::string("ray (") + std::to_string(i) + ", " + std::to_string(j) + "): " + err.what();
      }
    }
  }
  if (!failure.empty()) throw NonTrappingError(failure);
  return out;
}

// I_a f = int_0^tau f(gamma(t)) exp(int_0^t a(gamma(s)) ds) dt.
InfluxData forward_Ia(const ScalarField& f, const AttenuationProfile& a, const ScanGeometry& g);
InfluxData forward_I0(const ScalarField& f, const ScanGeometry& g);
// I_perp h = I(X_perp h), X_perp h = -e^{-lambda}(-sin(theta) h_x + cos(theta) h_y).
InfluxData forward_Iperp(const ScalarField& h, const ScanGeometry& g);

// Harmonic function on the disk taking the values trace[i] at the boundary points beta_i.
ScalarField harmonic_extension(const std::vector<cplx>& trace, const BoundaryGrid& bg, const DiskGrid& disk);
// Splits boundary values at the points beta_i into the trace of a holomorphic
// function (Fourier modes k >= 0) and of an antiholomorphic one (k < 0).
std::pair<std::vector<cplx>, std::vector<cplx>> split_boundary_trace(const std::vector<cplx>& trace,
                                                                     const BoundaryGrid& bg);
// Attenuated transform of the vector field f1 dx + f2 dy paired with the unit
// tangent: integrand e^{-lambda}(f1 cos(theta) + f2 sin(theta)).
InfluxData forward_doppler(const ScalarField& f1, const ScalarField& f2, const AttenuationProfile& a,
                           const ScanGeometry& g);

// ---- transport extension and backprojection ------------------------------

// h_psi on (mask node, theta_k): d looked up at the backward-traced influx point.
FiberField transport_extend(const InfluxData& d, const ScanGeometry& g, InterpStats* stats = nullptr);

// Fiber of h_psi at an arbitrary point x on the FiberGrid of g.
std::vector<cplx> transport_fiber_at(const InfluxData& d, const ScanGeometry& g, Vec2 x);
// Same on the rotated grid theta0 + k 2pi / nt, k < nt.
std::vector<cplx> transport_fiber_at(const InfluxData& d, const ScanGeometry& g, Vec2 x, double theta0, int nt);

// I_0^* d = 2pi (d_psi)_0.
ScalarField adjoint_I0(const InfluxData& d, const ScanGeometry& g);
// I_perp^* d = e^{-2 lambda} div(e^{lambda} int (-sin, cos) d_psi dtheta).
ScalarField adjoint_Iperp(const InfluxData& d, const ScanGeometry& g);
// -2pi (X_perp d_psi)_0 computed on the fiber field itself: spatial gradients
// of d_psi and the theta derivative from the fiber spectrum.
ScalarField adjoint_Iperp_fiber(const InfluxData& d, const ScanGeometry& g);

// Backprojection of fiber-field moments: mask values of a fiber average
// 2pi * mean_theta(u) with exterior extension.
ScalarField fiber_average(const FiberField& u, double scale = kTwoPi);

}  // namespace geoxray
