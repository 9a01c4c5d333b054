#pragma once

#include <utility>
#include <vector>

#include "graphwave/discretization.hpp"

namespace graphwave {

/// Exact standing waves of the star graph with zero potential and central
/// coupling gamma: branch j has j edges carrying f(x - a) and N - j edges
/// carrying f(x + a), where tanh(beta a) = gamma / ((N - 2j) sqrt(omega)).
class ClosedFormWave {
 public:
  ClosedFormWave(int n_edges, double gamma, double p, double omega, int branch = 0);

  int n_edges() const { return n_; }
  double gamma() const { return gamma_; }
  double p() const { return p_; }
  double omega() const { return omega_; }
  int branch() const { return j_; }

  /// atanh(gamma / ((N - 2j) sqrt(omega))).
  double rapidity() const { return rapidity_; }
  /// Spatial shift a = rapidity / beta of the profile on every edge.
  double shift() const { return shift_; }
  /// beta = (p - 1) sqrt(omega) / 2.
  double width_rate() const { return beta_; }
  double amplitude() const;  // f(0)

  /// Value on edge i (0-based) at distance x from the central vertex.
  double value(int edge, double x) const;
  double vertex_value() const;
  /// sum_e int |phi_e|^2 over the half-lines, in closed form.
  double mass() const;
  /// E(phi) on the untruncated star, by quadrature.
  double energy() const;

 private:
  int n_;
  double gamma_;
  double p_;
  double omega_;
  int j_;
  double rapidity_;
  double beta_;
  double shift_;
};

/// f(x) = [((p+1) omega / 2) sech^2((p-1) sqrt(omega) x / 2)]^{1/(p-1)}.
double profile_f(double x, double p, double omega);

/// Samples the wave on a star discretization with matching edge count.
GraphFunction evaluate_wave(const ClosedFormWave& w, const DiscretizationPtr& d);

/// ||A phi + omega M phi - M |phi|^{p-1} phi||_inf / ||phi||_inf (unscaled rows).
double stationarity_defect(const GraphFunction& phi, double p, double omega);

/// Discrete delta condition at vertex v: the sum over incident edges of the
/// one-sided outward derivative, plus alpha_v phi(v).
double vertex_balance(const GraphFunction& phi, std::size_t v);

/// h(x) = int_x^1 (1 - t^2)^{(3-p)/(p-1)} dt for 0 <= x < 1, p >= 5.
double h_integral(double x, double p);

/// Mass of the j = 0 wave as a function of omega.
double mass_curve_R(int n_edges, double gamma, double p, double omega);

/// Largest omega such that R is increasing on (gamma^2/N^2, omega), found
/// on a log-spaced sample grid above the threshold. If R increases on the
/// whole sampled range, `bounded` is false and omega_max is the last sample.
struct MonotoneWindow {
  double omega_min;  // existence threshold gamma^2 / N^2
  double omega_max;
  double mass_max;   // R(omega_max)
  bool bounded;
};
MonotoneWindow detect_monotone_window(int n_edges, double gamma, double p,
                                      double span_decades = 4.0, int samples = 400);

/// Solves R(omega) = c by bisection inside the bracket.
double solve_omega_for_mass(int n_edges, double gamma, double p, double c,
                            std::pair<double, double> bracket);
/// Same, with the bracket taken as the detected monotone window.
double solve_omega_for_mass(int n_edges, double gamma, double p, double c);

}  // namespace graphwave
