#include "graphwave/spectral.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "graphwave/errors.hpp"

namespace graphwave {

namespace {

using Ldlt = Eigen::SimplicialLDLT<SparseMatrix>;

/// Shift-and-invert iteration for A x = mu M x with M diagonal positive.
///
/// The shift is tightened from below as the Rayleigh quotient settles; the
/// LDL^T inertia (number of negative pivots) keeps it below the wanted
/// eigenvalue, i.e. exactly `below` eigenvalues lie under the shift.
class ShiftInvertSolver {
 public:
  ShiftInvertSolver(const SparseMatrix& a, const RealVector& m) : a_(a), m_(m) {}

  struct Result {
    double eigenvalue;
    RealVector vector;  // M-normalized
    long iterations;
    double residual;
  };

  Result solve(double sigma, int below, const RealVector* deflate, RealVector x, double tol,
               long max_iterations) {
    factor_at(sigma, below);
    const double sigma_floor = sigma;
    project(x, deflate);
    normalize(x);

    double rho = x.dot(a_ * x);
    double residual = relative_residual(x, rho);
    long it = 0;
    while (residual > tol) {
      if (it >= max_iterations) {
        std::ostringstream msg;
        msg << "shift-invert iteration did not converge in " << max_iterations
            << " iterations (residual " << residual << ")";
        throw SolverError(msg.str(), residual, it);
      }
      ++it;
      RealVector y = ldlt_.solve(m_.cwiseProduct(x));
      if (ldlt_.info() != Eigen::Success)
        throw SolverError("sparse LDL^T solve failed", residual, it);
      project(y, deflate);
      normalize(y);
      x = std::move(y);
      rho = x.dot(a_ * x);
      residual = relative_residual(x, rho);

      // Eigenvalue enclosure: some mu lies within eta of rho.
      const RealVector r = a_ * x - rho * m_.cwiseProduct(x);
      const double eta = std::sqrt(r.cwiseAbs2().cwiseQuotient(m_).sum());
      const double candidate = rho - 2.0 * eta - 1e-14 * std::abs(rho);
      if (candidate > sigma_ && (rho - sigma_) > 4.0 * (rho - candidate)) {
        try_shift(candidate, below, sigma_floor);
      }
    }
    return {rho, std::move(x), it, residual};
  }

 private:
  void factor_at(double sigma, int below) {
    SparseMatrix b = a_;
    for (Eigen::Index i = 0; i < m_.size(); ++i) b.coeffRef(i, i) -= sigma * m_[i];
    ldlt_.compute(b);
    if (ldlt_.info() != Eigen::Success)
      throw SolverError("sparse LDL^T factorization failed", 0.0, 0);
    const auto negatives = (ldlt_.vectorD().array() < 0.0).count();
    if (negatives != below) {
      std::ostringstream msg;
      msg << "shift " << sigma << " has " << negatives << " eigenvalues below it, expected "
          << below;
      throw SolverError(msg.str(), 0.0, 0);
    }
    sigma_ = sigma;
  }

  // Moves the shift toward `target`, backing off while the inertia says the
  // shift overtook the wanted eigenvalue.
  void try_shift(double target, int below, double floor) {
    const double previous = sigma_;
    for (int attempt = 0; attempt < 30; ++attempt) {
      try {
        factor_at(target, below);
        return;
      } catch (const SolverError&) {
        target = 0.5 * (target + previous);
      }
    }
    factor_at(std::max(previous, floor), below);
  }

  void project(RealVector& x, const RealVector* deflate) const {
    if (deflate) x -= deflate->dot(m_.cwiseProduct(x)) * *deflate;
  }

  void normalize(RealVector& x) const { x /= std::sqrt(x.dot(m_.cwiseProduct(x))); }

  double relative_residual(const RealVector& x, double rho) const {
    const RealVector mx = m_.cwiseProduct(x);
    return (a_ * x - rho * mx).norm() / mx.norm();
  }

  const SparseMatrix& a_;
  const RealVector& m_;
  Ldlt ldlt_;
  double sigma_ = 0.0;
};

// Gershgorin-type lower bound for the spectrum of M^{-1} A.
double spectrum_lower_bound(const SparseMatrix& a, const RealVector& m) {
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index col = 0; col < a.outerSize(); ++col) {
    double diag = 0.0;
    double off = 0.0;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      if (it.row() == col) diag += it.value();
      else off += std::abs(it.value());
    }
    bound = std::min(bound, (diag - off) / m[col]);
  }
  return bound - 1.0 - 1e-3 * std::abs(bound);
}

}  // namespace

GroundStatePair ground_state(const DiscretizationPtr& d, const SpectralOptions& opts) {
  if (!(opts.tol > 0.0)) throw ConfigError("spectral tolerance must be positive");
  const SparseMatrix& a = d->form_matrix();
  const RealVector& m = d->mass_weights();
  ShiftInvertSolver solver(a, m);

  const double sigma0 = spectrum_lower_bound(a, m);
  auto ground = solver.solve(sigma0, 0, nullptr, RealVector::Ones(d->size()), opts.tol,
                             opts.max_iterations);

  RealVector psi = std::move(ground.vector);
  Eigen::Index imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  if (psi[imax] < 0.0) psi = -psi;

  const double lambda0 = -ground.eigenvalue;
  if (!(lambda0 > 0.0)) {
    std::ostringstream msg;
    msg << "no negative ground energy (bottom of the spectrum "
        << ground.eigenvalue << ")";
    throw AssumptionViolation(msg.str());
  }

  GroundStatePair out{lambda0, GraphFunction(d, psi.cast<Complex>()), 0.0, ground.iterations,
                      ground.residual};

  if (opts.compute_gap) {
    // Deterministic start vector with no special symmetry.
    RealVector x(d->size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = std::sin(0.37 * static_cast<double>(i) + 0.1) + 0.5 * std::cos(1.3 * static_cast<double>(i));
    const double mu0 = ground.eigenvalue;
    const double sigma = mu0 + 1e-6 * std::max(1.0, std::abs(mu0));
    const double tol2 = std::max(opts.tol, 1e-9);
    auto second = solver.solve(sigma, 1, &psi, std::move(x), tol2, opts.max_iterations);
    out.gap = second.eigenvalue - mu0;
    out.iterations += second.iterations;
  }
  return out;
}

SpectralGapReport spectral_gap_report(const GroundStatePair& pair, double tol) {
  SpectralGapReport rep;
  rep.lambda0 = pair.lambda0;
  rep.gap = pair.gap;
  rep.threshold = 10.0 * tol;
  rep.isolation_certified = pair.gap >= rep.threshold;
  rep.message = rep.isolation_certified ? "isolated" : "isolation not numerically certified";
  return rep;
}

}  // namespace graphwave
