#pragma once

#include <Eigen/SparseLU>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "graphwave/discretization.hpp"

namespace graphwave {

struct EvolutionState {
  double t = 0.0;
  GraphFunction u;
  /// Relaxation field gamma^{n-1/2} approximating |u|^{p-1} at half steps.
  RealVector relax;
  double dt = 0.0;
};

/// Starts a run at time t0 with the relaxation field set to |u0|^{p-1}.
EvolutionState make_state(GraphFunction u0, double p, double dt, double t0 = 0.0);

/// Relaxation Crank-Nicolson integrator for i u_t = H u - |u|^{p-1} u.
///
/// Per step:
///   gamma^{n+1/2} = 2 |u^n|^{p-1} - gamma^{n-1/2}
///   (i M/dt - A/2 + M gamma/2) u^{n+1} = (i M/dt + A/2 - M gamma/2) u^n
/// The step is a Cayley transform in the M inner product, so discrete mass
/// is conserved up to the linear solver.
class RelaxationPropagator {
 public:
  RelaxationPropagator(DiscretizationPtr d, double p, bool nonlinear = true);

  void step(EvolutionState& s);

  /// Overflow guard: sup norm above this raises BlowUpError.
  void set_blowup_limit(double limit) { blowup_limit_ = limit; }
  double p() const { return p_; }
  bool nonlinear() const { return nonlinear_; }

 private:
  void factor(const RealVector& gamma, double dt);

  DiscretizationPtr d_;
  double p_;
  bool nonlinear_;
  double blowup_limit_ = std::numeric_limits<double>::infinity();
  Eigen::SparseMatrix<Complex> lhs_;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu_;
  bool analyzed_ = false;
  double factored_dt_ = 0.0;
  bool factored_ = false;
};

/// Single step of the scheme above; convenience wrapper.
EvolutionState step(EvolutionState state, const DiscretizationPtr& d, double p);

/// Discrete E(u) = Re(u^* A u) / 2 - sum m |u|^{p+1} / (p+1).
double evolution_energy(const GraphFunction& u, double p);

struct OrbitDistance {
  double distance;
  double theta;
};

/// inf over theta of ||u - e^{i theta} phi_ref||_{H1}; the optimum is
/// theta = arg <phi_ref, u>_{H1}.
OrbitDistance orbit_distance(const GraphFunction& u, const GraphFunction& phi_ref);

struct TraceRow {
  double t;
  double mass;
  double energy;
  double sup_norm;
};

struct EvolveOptions {
  double dt = 0.0;  // 0 picks h / 2
  double t_final = 1.0;
  long sample_every = 1;
  bool nonlinear = true;
};

/// Integrates to t_final, sampling (t, mass, energy, sup norm).
std::vector<TraceRow> evolve(const GraphFunction& u0, double p, const EvolveOptions& opts,
                             GraphFunction* final_state = nullptr);

enum class PerturbationMode {
  MultiplicativeNoise,  // u0 = phi (1 + delta xi), xi uniform in [-1, 1]
  EigenfunctionBump,    // u0 = phi + delta ||phi|| eta, eta = x psi0 on the first edge
};

struct Perturbation {
  PerturbationMode mode = PerturbationMode::EigenfunctionBump;
  double delta = 1e-2;
  std::uint64_t seed = 1;
};

struct StabilityTrace {
  std::vector<double> times;
  std::vector<double> orbit_distance;
  std::vector<double> mass_drift;    // relative to the initial mass
  std::vector<double> energy_drift;  // relative to the initial energy
  double initial_distance = 0.0;
  double reference_h1 = 0.0;  // ||phi_ref||_{H1}
};

/// Perturbed initial datum rescaled to the mass of phi_ref.
GraphFunction perturb(const GraphFunction& phi_ref, const GraphFunction& psi0,
                      const Perturbation& pert);

StabilityTrace stability_experiment(const GraphFunction& phi_ref, const GraphFunction& psi0,
                                    double p, const Perturbation& pert, double t_final,
                                    double dt, long sample_every = 1);

}  // namespace graphwave
