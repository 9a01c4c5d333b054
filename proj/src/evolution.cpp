#include "graphwave/evolution.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "graphwave/errors.hpp"

namespace graphwave {

EvolutionState make_state(GraphFunction u0, double p, double dt, double t0) {
  if (!(dt != 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be nonzero");
  RealVector relax = u0.values().array().abs().pow(p - 1.0).matrix();
  return EvolutionState{t0, std::move(u0), std::move(relax), dt};
}

RelaxationPropagator::RelaxationPropagator(DiscretizationPtr d, double p, bool nonlinear)
    : d_(std::move(d)), p_(p), nonlinear_(nonlinear) {
  if (!(p_ >= 1.0)) throw DomainError("nonlinearity power must be >= 1");
}

void RelaxationPropagator::factor(const RealVector& gamma, double dt) {
  if (!nonlinear_ && factored_ && dt == factored_dt_) return;
  const RealVector& m = d_->mass_weights();
  lhs_ = (-0.5 * d_->form_matrix()).cast<Complex>();
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    lhs_.coeffRef(i, i) += Complex(0.5 * m[i] * gamma[i], m[i] / dt);
  }
  lhs_.makeCompressed();
  if (!analyzed_) {
    lu_.analyzePattern(lhs_);
    analyzed_ = true;
  }
  lu_.factorize(lhs_);
  if (lu_.info() != Eigen::Success) throw SolverError("sparse LU factorization failed", 0.0, 0);
  factored_ = true;
  factored_dt_ = dt;
}

void RelaxationPropagator::step(EvolutionState& s) {
  if (s.u.disc_ptr() != d_) throw ConfigError("state lives on a different discretization");
  const ComplexVector& u = s.u.values();
  const RealVector& m = d_->mass_weights();
  RealVector gamma = nonlinear_
                         ? RealVector(2.0 * u.array().abs().pow(p_ - 1.0).matrix() - s.relax)
                         : RealVector::Zero(u.size());
  factor(gamma, s.dt);

  const ComplexVector au = d_->form_matrix().cast<Complex>() * u;
  const ComplexVector rhs =
      (m.cast<Complex>().array() *
       (Complex(0.0, 1.0 / s.dt) * u.array() - 0.5 * gamma.cast<Complex>().array() * u.array()))
          .matrix() +
      0.5 * au;
  ComplexVector next = lu_.solve(rhs);
  if (lu_.info() != Eigen::Success || !next.allFinite())
    throw SolverError("sparse LU solve failed", 0.0, 0);

  s.u.values() = std::move(next);
  s.relax = std::move(gamma);
  s.t += s.dt;
  const double sup = s.u.values().cwiseAbs().maxCoeff();
  if (sup > blowup_limit_) {
    std::ostringstream msg;
    msg << "blow-up suspected at t = " << s.t << ": sup norm " << sup;
    throw BlowUpError(msg.str(), s.t);
  }
}

EvolutionState step(EvolutionState state, const DiscretizationPtr& d, double p) {
  RelaxationPropagator prop(d, p);
  prop.step(state);
  return state;
}

double evolution_energy(const GraphFunction& u, double p) {
  const double power =
      (u.disc().mass_weights().array() * u.values().array().abs().pow(p + 1.0)).sum();
  return 0.5 * quadratic_form(u) - power / (p + 1.0);
}

OrbitDistance orbit_distance(const GraphFunction& u, const GraphFunction& phi_ref) {
  const double ref_sq = h1_norm_sq(phi_ref);
  if (!(ref_sq > 0.0)) throw DomainError("orbit distance needs a nonzero reference");
  const Complex overlap = h1_inner(phi_ref, u);
  const double theta = std::arg(overlap);
  // ||u||^2 + ||phi||^2 - 2 |<phi, u>|, clamped against round-off.
  const double d2 = h1_norm_sq(u) + ref_sq - 2.0 * std::abs(overlap);
  return {std::sqrt(std::max(d2, 0.0)), theta};
}

std::vector<TraceRow> evolve(const GraphFunction& u0, double p, const EvolveOptions& opts,
                             GraphFunction* final_state) {
  const auto& d = u0.disc_ptr();
  const double dt = opts.dt > 0.0 ? opts.dt : 0.5 * d->max_step();
  if (!(opts.t_final >= 0.0)) throw ConfigError("final time must be nonnegative");
  if (opts.sample_every <= 0) throw ConfigError("sample interval must be positive");
  const long steps = std::lround(opts.t_final / dt);

  RelaxationPropagator prop(d, p, opts.nonlinear);
  const double sup0 = u0.values().cwiseAbs().maxCoeff();
  prop.set_blowup_limit(1e6 * std::max(sup0, 1e-300));
  EvolutionState s = make_state(u0, p, dt);

  std::vector<TraceRow> trace;
  auto sample = [&] {
    trace.push_back({s.t, mass(s.u), evolution_energy(s.u, p), s.u.values().cwiseAbs().maxCoeff()});
  };
  sample();
  for (long n = 1; n <= steps; ++n) {
    prop.step(s);
    if (n % opts.sample_every == 0 || n == steps) sample();
  }
  if (final_state) *final_state = s.u;
  return trace;
}

GraphFunction perturb(const GraphFunction& phi_ref, const GraphFunction& psi0,
                      const Perturbation& pert) {
  if (!(pert.delta >= 0.0)) throw DomainError("perturbation size must be nonnegative");
  const auto& d = phi_ref.disc_ptr();
  ComplexVector u = phi_ref.values();
  if (pert.mode == PerturbationMode::MultiplicativeNoise) {
    std::mt19937_64 rng(pert.seed);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double xi = 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
      u[i] *= 1.0 + pert.delta * xi;
    }
  } else {
    // eta = x psi0(x) on the first edge: continuous (zero at the vertex),
    // smooth, and not a multiple of phi_ref.
    ComplexVector eta = ComplexVector::Zero(u.size());
    const auto& grid = d->edges().front();
    for (int k = 1; k <= grid.intervals; ++k) {
      const int gi = grid.nodes[static_cast<std::size_t>(k)];
      if (gi >= 0) eta[gi] = k * grid.h * psi0.values()[gi];
    }
    GraphFunction bump(d, eta);
    const double eta_mass = mass(bump);
    if (!(eta_mass > 0.0)) throw DomainError("perturbation direction vanishes");
    eta /= std::sqrt(eta_mass);
    u += pert.delta * std::sqrt(mass(phi_ref)) * eta;
  }
  GraphFunction out(d, std::move(u));
  out.values() *= std::sqrt(mass(phi_ref) / mass(out));
  return out;
}

StabilityTrace stability_experiment(const GraphFunction& phi_ref, const GraphFunction& psi0,
                                    double p, const Perturbation& pert, double t_final,
                                    double dt, long sample_every) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (sample_every <= 0) throw ConfigError("sample interval must be positive");
  const auto& d = phi_ref.disc_ptr();
  const GraphFunction u0 = perturb(phi_ref, psi0, pert);

  StabilityTrace trace;
  trace.reference_h1 = std::sqrt(h1_norm_sq(phi_ref));
  const double m0 = mass(u0);
  const double e0 = evolution_energy(u0, p);

  RelaxationPropagator prop(d, p);
  prop.set_blowup_limit(1e6 * u0.values().cwiseAbs().maxCoeff());
  EvolutionState s = make_state(u0, p, dt);
  auto sample = [&] {
    trace.times.push_back(s.t);
    trace.orbit_distance.push_back(orbit_distance(s.u, phi_ref).distance);
    trace.mass_drift.push_back((mass(s.u) - m0) / m0);
    trace.energy_drift.push_back((evolution_energy(s.u, p) - e0) / std::abs(e0));
  };
  sample();
  trace.initial_distance = trace.orbit_distance.front();
  const long steps = std::lround(t_final / dt);
  for (long n = 1; n <= steps; ++n) {
    prop.step(s);
    if (n % sample_every == 0 || n == steps) sample();
  }
  return trace;
}

}  // namespace graphwave
