#pragma once

#include <string>

#include "graphwave/discretization.hpp"

namespace graphwave {

/// Bottom of the spectrum of the discrete form: the smallest eigenvalue of
/// A psi = mu M psi is -lambda0.
struct GroundStatePair {
  double lambda0 = 0.0;
  GraphFunction psi0;  // real, mass-normalized, positive
  double gap = 0.0;    // mu_2 - mu_min
  long iterations = 0;
  double residual = 0.0;  // ||A psi + lambda0 M psi|| / ||M psi||
};

struct SpectralOptions {
  double tol = 1e-10;
  long max_iterations = 5000;
  bool compute_gap = true;
};

GroundStatePair ground_state(const DiscretizationPtr& d, const SpectralOptions& opts = {});

struct SpectralGapReport {
  double lambda0 = 0.0;
  double gap = 0.0;
  double threshold = 0.0;
  bool isolation_certified = false;
  std::string message;
};

/// Flags gaps below 10 * tol as "isolation not numerically certified".
SpectralGapReport spectral_gap_report(const GroundStatePair& pair, double tol = 1e-10);

}  // namespace graphwave
