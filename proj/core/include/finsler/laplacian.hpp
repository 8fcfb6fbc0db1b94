#pragma once

// Measure-weighted divergence and the nonlinear Finsler Laplacian
// Delta u = div_mu(nabla u), plus its linearization at a frozen reference
// direction field.

#include "finsler/legendre.hpp"
#include "finsler/measure.hpp"

namespace finsler {

// div_mu V = dV^i/dx^i + V^i dPhi/dx^i, discretized in the mimetic form
// e^{-Phi} d_i(V^i e^Phi) so the discrete divergence theorem on the closed
// torus holds to accumulation roundoff.
ScalarField divergence_mu(const MeasureSpec& mu, const VectorField& v);

// Nonlinear Laplacian of u at flow time t; the Legendre flux is zero where
// du is below the mask tolerance. Sets u's mask.
ScalarField finsler_laplacian(const MetricFamily& m, const MeasureSpec& mu,
                              ScalarField& u, double t,
                              const LegendreSolveConfig& cfg = {});

// Same but reusing a precomputed gradient field.
ScalarField finsler_laplacian(const MeasureSpec& mu, const FieldGradient& gf);

// Delta^V v = div_mu( g^{ij}(V) v_i d_j ) with metric coefficients frozen at
// the reference direction field; flux is zero where the reference vanishes.
ScalarField linearized_laplacian(const MetricFamily& m, const MeasureSpec& mu,
                                 const VectorField& reference,
                                 const ScalarField& v, double t);

}  // namespace finsler
