#include "graphwave/ground_state.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "graphwave/errors.hpp"

namespace graphwave {

namespace {

ComplexVector nonlinearity(const ComplexVector& u, double p) {
  return u.array() * u.array().abs().pow(p - 1.0);
}

double power_integral(const GraphFunction& u, double p) {
  return (u.disc().mass_weights().array() * u.values().array().abs().pow(p + 1.0)).sum();
}

}  // namespace

EnergyBreakdown energy(const GraphFunction& u, double p) {
  if (!(p >= 1.0)) throw DomainError("energy needs p >= 1");
  EnergyBreakdown e;
  e.kinetic_potential = 0.5 * quadratic_form(u);
  e.nonlinear = -power_integral(u, p) / (p + 1.0);
  e.total = e.kinetic_potential + e.nonlinear;
  return e;
}

double feasibility_bound(double lambda0, double r) {
  if (!(r > 0.0)) throw DomainError("ball radius r must be positive");
  if (!(lambda0 > 0.0)) throw DomainError("lambda0 must be positive");
  return r / lambda0;
}

double lagrange_multiplier(const GraphFunction& phi, double p) {
  const double m = mass(phi);
  if (!(m > 0.0)) throw DomainError("Lagrange multiplier undefined for phi = 0");
  return (power_integral(phi, p) - quadratic_form(phi)) / m;
}

double stationary_residual(const GraphFunction& u, double p, double omega) {
  const auto& d = u.disc();
  const RealVector& m = d.mass_weights();
  const ComplexVector& x = u.values();
  const ComplexVector ax = d.form_matrix().cast<Complex>() * x;
  const ComplexVector r =
      ax + (m.cast<Complex>().array() * (omega * x - nonlinearity(x, p)).array()).matrix();
  const double num = std::sqrt((r.array().abs2() / m.array()).sum());
  return num / std::sqrt(mass(u));
}

MinimizerResult minimize(const DiscretizationPtr& d, double p, double c, double r,
                         const MinimizeOptions& opts) {
  if (!(p >= 5.0)) throw DomainError("local minimization is set up for p >= 5");
  if (!(c > 0.0)) throw DomainError("mass c must be positive");
  if (!(opts.tol > 0.0) || opts.max_iter <= 0) throw ConfigError("bad minimize options");

  const GroundStatePair ground = opts.ground ? *opts.ground : ground_state(d);
  const double lambda0 = ground.lambda0;
  const double c_max = feasibility_bound(lambda0, r);
  if (c > c_max) {
    std::ostringstream msg;
    msg << "infeasible: S(c) and B(r) are disjoint unless c <= r / lambda0; got c = " << c
        << " > r / lambda0 = " << c_max;
    throw FeasibilityError(msg.str());
  }

  const double tau = opts.tau > 0.0 ? opts.tau : 0.5 / lambda0;
  const RealVector& mw = d->mass_weights();
  SparseMatrix system = d->form_matrix();
  for (Eigen::Index i = 0; i < mw.size(); ++i) system.coeffRef(i, i) += mw[i] / tau;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(system);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any())
    throw ConfigError("M / tau + A is not positive definite; need tau < 1 / lambda0");

  auto project = [&](ComplexVector v) {
    GraphFunction f(d, std::move(v));
    const double m = mass(f);
    if (!(m > 0.0)) throw SolverError("gradient flow collapsed to zero", 0.0, 0);
    f.values() *= std::sqrt(c / m);
    return f;
  };

  GraphFunction u = opts.init ? project(opts.init->values())
                              : project(ground.psi0.values() * Complex(std::sqrt(c), 0.0));

  MinimizerResult res{u, p, c, r, lambda0, 0.0, 0.0, 0.0, 0, 0.0, {}, {}};
  double gn = g_norm_sq(u, lambda0);
  if (gn > r) {
    std::ostringstream msg;
    msg << "initial state lies outside B(r): ||u||_G^2 = " << gn << " > r = " << r;
    throw BallExitError(msg.str(), 0, gn);
  }

  double omega = lagrange_multiplier(u, p);
  double residual = stationary_residual(u, p, omega);
  res.energy_history.push_back(energy(u, p).total);
  std::vector<double> residual_history{residual};
  long it = 0;
  while (residual > opts.tol) {
    if (it >= opts.max_iter) {
      std::ostringstream msg;
      msg << "gradient flow did not converge in " << opts.max_iter
          << " iterations (residual " << residual << ")";
      throw SolverError(msg.str(), residual, it, residual_history);
    }
    ++it;
    const ComplexVector rhs =
        (mw.cast<Complex>().array() *
         ((1.0 / tau - omega) * u.values() + nonlinearity(u.values(), p)).array())
            .matrix();
    ComplexVector v(rhs.size());
    v.real() = ldlt.solve(RealVector(rhs.real()));
    v.imag() = ldlt.solve(RealVector(rhs.imag()));
    u = project(std::move(v));
    if (!u.values().allFinite()) throw SolverError("gradient flow produced non-finite values", residual, it);

    gn = g_norm_sq(u, lambda0);
    if (gn > r) {
      std::ostringstream msg;
      msg << "iterate " << it << " left B(r): ||u||_G^2 = " << gn << " > r = " << r
          << "; c is too large for this radius";
      throw BallExitError(msg.str(), it, gn);
    }
    omega = lagrange_multiplier(u, p);
    residual = stationary_residual(u, p, omega);
    residual_history.push_back(residual);
    res.energy_history.push_back(energy(u, p).total);
  }

  res.phi = u;
  res.energy = energy(u, p).total;
  res.omega = omega;
  res.g_norm_sq = gn;
  res.iterations = it;
  res.gradient_residual = residual;
  res.diagnostics = structure_diagnostics(res, ground.psi0);
  return res;
}

MinimizerDiagnostics structure_diagnostics(const MinimizerResult& res,
                                           const GraphFunction& psi0) {
  MinimizerDiagnostics diag;
  const auto& m = res.phi.disc().mass_weights();
  const ComplexVector& phi = res.phi.values();
  const Complex overlap =
      (m.cast<Complex>().array() * phi.array() * psi0.values().array().real().cast<Complex>())
          .sum();
  diag.theta = std::arg(overlap);
  const ComplexVector gauged = phi * std::polar(1.0, -diag.theta);
  const double sup = phi.cwiseAbs().maxCoeff();
  diag.max_imag = gauged.imag().cwiseAbs().maxCoeff();
  diag.min_real = gauged.real().minCoeff();
  diag.phase_constant_ok = diag.max_imag <= 1e-8 * sup;
  diag.positivity_ok = diag.min_real > 0.0;
  diag.ball_interior_ok = res.g_norm_sq <= res.r * res.c * (1.0 + 1e-8);
  diag.de_margin = -0.5 * res.lambda0 * res.c - res.energy;
  diag.de_inequality_ok = diag.de_margin > 0.0;
  return diag;
}

std::vector<ScalingPoint> scaling_energy_curve(const GraphFunction& phi, double p,
                                               const std::vector<double>& lambdas) {
  const auto& d = phi.disc();
  const auto& g = d.graph();
  const bool star = g.vertices().size() == 1 &&
                    std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) {
                      return e.external() && e.potential.is_zero();
                    });
  if (!star) throw DomainError("scaling curve needs a star graph with zero potential");

  std::vector<ScalingPoint> out;
  for (double lambda : lambdas) {
    if (!(lambda >= 1.0)) throw DomainError("scaling factor lambda must be >= 1");
    std::vector<Edge> edges = g.edges();
    for (auto& e : edges) *e.truncation /= lambda;
    MetricGraph scaled_graph(g.vertices(), std::move(edges));
    const auto scaled = Discretization::build(scaled_graph, d.max_step() / lambda, d.boundary());
    ComplexVector values(scaled->size());
    for (std::size_t e = 0; e < d.edges().size(); ++e) {
      const auto& src = d.edges()[e];
      const auto& dst = scaled->edges()[e];
      if (src.intervals != dst.intervals)
        throw DomainError("scaled mesh does not align with the original mesh");
      for (int k = 0; k <= src.intervals; ++k) {
        const int gi = dst.nodes[static_cast<std::size_t>(k)];
        if (gi >= 0) values[gi] = std::sqrt(lambda) * phi.at(e, k);
      }
    }
    const GraphFunction scaled_phi(scaled, std::move(values));
    out.push_back({lambda, mass(scaled_phi), energy(scaled_phi, p).total});
  }
  return out;
}

}  // namespace graphwave
