#pragma once

// Heat flow u_t = Delta_{g(t)} u on the evolving metric: classical explicit
// RK4 in time with a CFL-capped internal step, positivity monitoring, and
// per-stamp caches of f = log u, the gradient data and f_t = Delta f +
// F^2(nabla f).

#include <string>
#include <vector>

#include "finsler/laplacian.hpp"

namespace finsler {

struct HeatFlowConfig {
  double cfl = 0.2;                 // dt <= cfl * min(h)^2 / sup g^{ij} bound
  LegendreSolveConfig legendre{};
  double mask_tolerance = 0.0;      // 0 picks the default
  // Selective damping of grid-scale modes, applied once per internal step.
  // The composed first-derivative Laplacian is blind to the Nyquist mode, so
  // the flux corner at critical points would otherwise pump undamped
  // checkerboard error into the trajectory. The filter's symbol is
  // -nu sin^10(theta/2) per axis: full strength at Nyquist, O((kh)^10) on smooth
  // modes, far below the stencil truncation.
  double filter_strength = 0.02;
};

struct FlowStamp {
  double time = 0.0;
  ScalarField u;
  ScalarField f;         // log u, masked
  FieldGradient grad;    // gradient data of f
  ScalarField f_t;       // Delta f + F^2(nabla f)
  ScalarField laplace_u; // Delta u (diagnostic, dumped)
  double mass = 0.0;     // integral of u d(mu)
  double min_u = 0.0;
  double max_u = 0.0;
};

struct FlowTrajectory {
  const MetricFamily* metric = nullptr;
  const MeasureSpec* measure = nullptr;
  GridSpec grid;
  std::vector<FlowStamp> stamps;
  double dt_internal = 0.0;

  const FlowStamp& at(size_t s) const { return stamps.at(s); }
  size_t size() const { return stamps.size(); }
};

// Integrate from u0 at t = 0 through the increasing stamp times (all > 0).
FlowTrajectory run_heat_flow(const MetricFamily& m, const MeasureSpec& mu,
                             const ScalarField& u0,
                             const std::vector<double>& stamp_times,
                             const HeatFlowConfig& cfg = {});

struct SigmaFFields {
  double alpha = 0.0;
  double time = 0.0;
  ScalarField sigma;    // t f_t
  ScalarField script_f; // t F^2(nabla f) - alpha sigma
};

SigmaFFields sigma_f_fields(const FlowTrajectory& traj, double alpha,
                            size_t stamp);

// One CSV table per stamp (coordinates, u, f, F(nabla f), f_t, Delta u);
// returns the written file names.
std::vector<std::string> dump_trajectory(const FlowTrajectory& traj,
                                         const std::string& directory);

// Spectral bound sup of eigenvalues of g^{ij} over a coarse sample of the
// chart, directions, and the given times.
double inverse_metric_bound(const MetricFamily& m, const GridSpec& grid,
                            double t0, double t1);

}  // namespace finsler
