#pragma once

// Numerical verification of the evolution identities: the
// Bochner-Weitzenboeck formula, the time-derivative formula for F^2(nabla f),
// the operator exchange formulae with their commutator defect J, the
// quadrature identity coupling h to J, the log-transformed heat equation, the
// parabolic equations for sigma = t f_t and script-F = t F^2(nabla f) -
// alpha sigma, and the Hessian trace inequality.
//
// Each check assembles both sides of an identity through independent
// pipelines and reports the sup residual normalized by the largest
// participating term, plus a measured convergence order when at least three
// refinement levels ran.

#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "finsler/flow_tensors.hpp"
#include "finsler/heat.hpp"

namespace finsler {

struct ResidualLevel {
  double parameter = 0.0;  // grid spacing or differencing step
  double sup_residual = 0.0;
  double scale = 0.0;
  long long samples = 0;

  double relative() const {
    return sup_residual / std::max(scale, 1e-14);
  }
};

struct ResidualReport {
  std::string tag;
  std::string sample_description;
  std::vector<ResidualLevel> levels;  // refinement history, coarse to fine
  ResidualLevel headline;             // the level quoted as the result
  std::optional<double> order;        // least-squares slope, >= 3 levels only
  bool reliable = true;
  std::string note;
  std::vector<std::pair<std::string, double>> extras;

  double relative_sup() const { return headline.relative(); }
};

// Fit and store the convergence order if enough levels are present.
void finalize_order(ResidualReport& report);

// Closed-form space-time scripts decoupled from the PDE solver.
struct ScriptedField {
  std::string name;
  std::function<double(Vec2, double)> value;
  std::function<double(Vec2, double)> dt;  // exact time derivative
};

ScriptedField script_decaying_sine();  // e^{-t} sin x1
ScriptedField script_sine_mix();       // sin x1 + 0.3 sin x2, static
ScriptedField script_cos_mix();        // 2 + cos x1 + 0.3 sin x2, static
ScriptedField script_test_function();  // cos x2, static test function

// Nodes where |df| clears `frac` of its sup, eroded by `erode` so stencils
// never straddle the near-critical band (where the anisotropic flux is
// under-resolved).
std::vector<std::uint8_t> robust_mask(const GridSpec& grid,
                                      const VectorField& df, double frac = 0.3,
                                      int erode = 4);

// Random nodes of the given mask, uniformly over the grid, seeded.
std::vector<std::pair<int, int>> draw_probes(
    const GridSpec& grid, const std::vector<std::uint8_t>& mask, int count,
    std::uint64_t seed);

// --- Bochner-Weitzenboeck formula ---------------------------------------
// Delta^{nabla u}(F^2(nabla u)) = 2 du(nabla^{nabla u} Delta u)
//                                 + 2 ||nabla^2 u||^2_{HS} + 2 Ric^inf.
ResidualReport check_bochner(const MetricFamily& m, const MeasureSpec& mu,
                             const ScriptedField& u, double t,
                             const GridSpec& grid, const DiffConfig& dc = {});
ResidualReport check_bochner_refined(const MetricFamily& m,
                                     const MeasureSpec& mu,
                                     const ScriptedField& u, double t,
                                     const std::vector<GridSpec>& grids,
                                     const DiffConfig& dc = {});

// --- Evolution of the gradient energy ---------------------------------------------------------------
// d/dt F^2(nabla f) = 2 h(nabla f) + 2 df_t(nabla f), time derivative by
// central differencing with the given step.
ResidualReport check_energy_evolution(const MetricFamily& m, const MeasureSpec& mu,
                             const ScriptedField& f, double t,
                             const GridSpec& grid, int probes,
                             std::uint64_t seed, double t_step = 1e-4,
                             const DiffConfig& dc = {});
ResidualReport check_energy_evolution_refined(const MetricFamily& m,
                                     const MeasureSpec& mu,
                                     const ScriptedField& f, double t,
                                     const GridSpec& grid, int probes,
                                     std::uint64_t seed,
                                     const std::vector<double>& steps,
                                     double headline_step = 1e-4,
                                     const DiffConfig& dc = {});

// --- Operator exchange formulae ---------------------------------------------------
// (i)  [nabla^{nabla f}, d/dt] f = -2 df(h-flat),
// (ii) [Delta^{nabla f}, d/dt] f = -2 J.
struct ExchangeReports {
  ResidualReport gradient;   // (i)
  ResidualReport laplacian;  // (ii)
};
ExchangeReports check_exchange(const MetricFamily& m, const MeasureSpec& mu,
                               const ScriptedField& f, double t,
                               const GridSpec& grid, int probes,
                               std::uint64_t seed, double t_step = 1e-4,
                               const DiffConfig& dc = {});
ExchangeReports check_exchange_refined(const MetricFamily& m,
                                       const MeasureSpec& mu,
                                       const ScriptedField& f, double t,
                                       const GridSpec& grid, int probes,
                                       std::uint64_t seed,
                                       const std::vector<double>& steps,
                                       double headline_step = 1e-4,
                                       const DiffConfig& dc = {});

// --- Flow-defect quadrature identity ----------------------------------------------
// int h_{nabla f}(nabla f, nabla^{nabla f} phi) dmu = -int phi J dmu, the
// divergence correction vanishing on the closed torus (reported separately).
ResidualReport check_defect_quadrature(const MetricFamily& m,
                                        const MeasureSpec& mu,
                                        const ScriptedField& f,
                                        const ScriptedField& phi, double t,
                                        const GridSpec& grid,
                                        const DiffConfig& dc = {});

// --- Log-transformed heat equation (strong form on the mask) --------------------------------------
// f_t = Delta f + F^2(nabla f) along solver trajectories.
ResidualReport check_log_heat(const FlowTrajectory& traj, size_t stamp);

// --- Parabolic equations for sigma and script-F ----------------------------------------------------------
// d/dt sigma - Delta^{nabla f} sigma - 2 d sigma(nabla f) - sigma/t
//   = 2t [h(nabla f) + J],
// d/dt F - Delta^{nabla f} F - 2 dF(nabla f) - F/t
//   = -2t [(alpha-1) h(nabla f) + Ric^inf(nabla f) + ||nabla^2 f||^2 + alpha J].
struct EvolutionReports {
  ResidualReport sigma;
  ResidualReport script_f;
};
EvolutionReports check_evolution_pdes(const FlowTrajectory& traj, double alpha,
                                      size_t stamp, const DiffConfig& dc = {});

// --- Hessian trace inequality -----------------------------
// ||nabla^2 f||^2_{HS} >= (Delta f)^2/N - S^2(nabla f)/(N-n); the headline
// residual is the minimum slack (negative = violation).
ResidualReport check_hessian_trace_inequality(const FlowTrajectory& traj,
                                              size_t stamp, double N,
                                              const DiffConfig& dc = {});

}  // namespace finsler
