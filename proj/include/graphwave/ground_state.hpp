#pragma once

#include <optional>
#include <vector>

#include "graphwave/discretization.hpp"
#include "graphwave/spectral.hpp"

namespace graphwave {

struct EnergyBreakdown {
  double kinetic_potential = 0.0;  // F[u] / 2
  double nonlinear = 0.0;          // -||u||_{p+1}^{p+1} / (p+1)
  double total = 0.0;
};

/// E(u) = F[u] / 2 - ||u||_{p+1}^{p+1} / (p+1).
EnergyBreakdown energy(const GraphFunction& u, double p);

/// Largest admissible mass r / lambda0 for which S(c) meets B(r).
double feasibility_bound(double lambda0, double r);

/// omega = (||phi||_{p+1}^{p+1} - F[phi]) / ||phi||^2, from H phi + omega phi = |phi|^{p-1} phi.
double lagrange_multiplier(const GraphFunction& phi, double p);

struct MinimizerDiagnostics {
  bool positivity_ok = false;
  bool phase_constant_ok = false;
  bool de_inequality_ok = false;   // E < -lambda0 c / 2
  bool ball_interior_ok = false;   // ||phi||_G^2 <= r c (1 + eps)
  double theta = 0.0;              // recovered global phase
  double max_imag = 0.0;           // max |Im(e^{-i theta} phi)|
  double min_real = 0.0;           // min Re(e^{-i theta} phi)
  double de_margin = 0.0;          // -lambda0 c / 2 - E
};

struct MinimizerResult {
  GraphFunction phi;
  double p = 0.0;
  double c = 0.0;
  double r = 0.0;
  double lambda0 = 0.0;
  double energy = 0.0;
  double omega = 0.0;
  double g_norm_sq = 0.0;
  long iterations = 0;
  double gradient_residual = 0.0;
  std::vector<double> energy_history;
  MinimizerDiagnostics diagnostics;
};

struct MinimizeOptions {
  /// Pseudo-time step; 0 picks 1 / (2 lambda0).
  double tau = 0.0;
  double tol = 1e-9;
  long max_iter = 20000;
  /// Initial state; defaults to sqrt(c) psi0.
  std::optional<GraphFunction> init;
  /// Precomputed linear ground state of the same discretization.
  std::optional<GroundStatePair> ground;
};

/// Normalized gradient flow for inf { E(u) : ||u||^2 = c, ||u||_G^2 <= r }.
///
/// Each step solves (M / tau + A) v = (M / tau) u + M (|u|^{p-1} - omega(u)) u
/// and rescales v back to mass c. Subtracting the current multiplier makes
/// every fixed point an exact discrete solution; without it the fixed point
/// solves the equation with the nonlinearity rescaled by the normalization. The ball constraint is monitored: leaving it
/// raises BallExitError.
MinimizerResult minimize(const DiscretizationPtr& d, double p, double c, double r,
                         const MinimizeOptions& opts = {});

/// Strong residual ||A u - M |u|^{p-1} u + omega M u||_{M^{-1}} / ||u||_M.
double stationary_residual(const GraphFunction& u, double p, double omega);

MinimizerDiagnostics structure_diagnostics(const MinimizerResult& res,
                                           const GraphFunction& psi0);

struct ScalingPoint {
  double lambda;
  double mass;
  double energy;
};

/// E(phi_lambda) for phi_lambda(x) = lambda^{1/2} phi(lambda x) on a star.
///
/// phi_lambda is sampled on the star mesh scaled by 1/lambda (step h/lambda,
/// truncation L/lambda), where node k of the scaled mesh lands on node k of
/// the original one, so no interpolation error enters.
std::vector<ScalingPoint> scaling_energy_curve(const GraphFunction& phi, double p,
                                               const std::vector<double>& lambdas);

}  // namespace graphwave
