#include "graphwave/closed_form.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "graphwave/errors.hpp"

namespace graphwave {

namespace {

double threshold(int n_edges, int branch, double gamma) {
  const double k = n_edges - 2 * branch;
  return gamma * gamma / (k * k);
}

double adaptive_simpson_step(const std::function<double(double)>& f, double a, double b,
                             double fa, double fm, double fb, double whole, double tol,
                             int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol) {
  if (b <= a) return 0.0;
  // Split into a few panels first so that narrow features are not missed.
  constexpr int kPanels = 16;
  double total = 0.0;
  const double w = (b - a) / kPanels;
  for (int k = 0; k < kPanels; ++k) {
    const double lo = a + k * w;
    const double hi = (k + 1 == kPanels) ? b : lo + w;
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson_step(f, lo, hi, fa, fm, fb, whole, tol / kPanels, 40);
  }
  return total;
}

}  // namespace

double profile_f(double x, double p, double omega) {
  if (!(omega > 0.0) || !(p > 1.0)) throw DomainError("profile needs omega > 0 and p > 1");
  const double beta = 0.5 * (p - 1.0) * std::sqrt(omega);
  // sech^{2/(p-1)} computed through exp to stay finite for large |x|.
  const double z = std::abs(beta * x);
  const double sech = 2.0 * std::exp(-z) / (1.0 + std::exp(-2.0 * z));
  return std::pow(0.5 * (p + 1.0) * omega, 1.0 / (p - 1.0)) *
         std::pow(sech, 2.0 / (p - 1.0));
}

ClosedFormWave::ClosedFormWave(int n_edges, double gamma, double p, double omega, int branch)
    : n_(n_edges), gamma_(gamma), p_(p), omega_(omega), j_(branch) {
  if (n_ < 2) throw DomainError("closed-form wave needs N >= 2");
  if (!(gamma_ > 0.0)) throw DomainError("closed-form wave needs gamma > 0");
  if (!(p_ > 1.0)) throw DomainError("closed-form wave needs p > 1");
  if (j_ < 0 || j_ > (n_ - 1) / 2) throw DomainError("branch index j out of range");
  const double th = threshold(n_, j_, gamma_);
  if (!(omega_ > th)) {
    std::ostringstream msg;
    msg << "omega below existence threshold for branch j = " << j_ << " (need omega > " << th
        << ")";
    throw DomainError(msg.str());
  }
  rapidity_ = std::atanh(gamma_ / ((n_ - 2 * j_) * std::sqrt(omega_)));
  beta_ = 0.5 * (p_ - 1.0) * std::sqrt(omega_);
  shift_ = rapidity_ / beta_;
}

double ClosedFormWave::amplitude() const { return profile_f(0.0, p_, omega_); }

double ClosedFormWave::value(int edge, double x) const {
  return edge < j_ ? profile_f(x - shift_, p_, omega_) : profile_f(x + shift_, p_, omega_);
}

double ClosedFormWave::vertex_value() const { return profile_f(shift_, p_, omega_); }

double ClosedFormWave::mass() const {
  // int f^2 over [s, inf) = (C / beta) * int_{tanh(beta s)}^1 (1 - t^2)^{(3-p)/(p-1)} dt.
  const double c = std::pow(0.5 * (p_ + 1.0) * omega_, 2.0 / (p_ - 1.0));
  const double t = std::tanh(rapidity_);
  const double outer = h_integral(t, p_);
  const double inner = 2.0 * h_integral(0.0, p_) - outer;  // over [-t, 1]
  return c / beta_ * (j_ * inner + (n_ - j_) * outer);
}

double ClosedFormWave::energy() const {
  const double p = p_;
  const double omega = omega_;
  const double beta = beta_;
  // f' = -sqrt(omega) tanh(beta x) f.
  auto density = [p, omega, beta](double y) {
    const double f = profile_f(y, p, omega);
    const double df = -std::sqrt(omega) * std::tanh(beta * y) * f;
    return 0.5 * df * df - std::pow(f, p + 1.0) / (p + 1.0);
  };
  // Past this distance the integrand is below round-off.
  const double reach = 40.0 / std::sqrt(omega);
  const double outer = adaptive_simpson(density, shift_, shift_ + reach, 1e-13);
  const double inner = adaptive_simpson(density, -shift_, shift_ + reach, 1e-13);
  const double v = vertex_value();
  return j_ * inner + (n_ - j_) * outer - 0.5 * gamma_ * v * v;
}

GraphFunction evaluate_wave(const ClosedFormWave& w, const DiscretizationPtr& d) {
  const auto& g = d->graph();
  if (static_cast<int>(g.edges().size()) != w.n_edges() || g.vertices().size() != 1)
    throw DomainError("closed-form wave needs a star discretization with N = " +
                      std::to_string(w.n_edges()) + " edges");
  ComplexVector values = ComplexVector::Zero(d->size());
  for (const auto& grid : d->edges()) {
    const int e = static_cast<int>(grid.edge);
    for (int k = 0; k <= grid.intervals; ++k) {
      const int gi = grid.nodes[static_cast<std::size_t>(k)];
      if (gi >= 0) values[gi] = w.value(e, k * grid.h);
    }
  }
  return GraphFunction(d, std::move(values));
}

double stationarity_defect(const GraphFunction& phi, double p, double omega) {
  const auto& d = phi.disc();
  const ComplexVector& x = phi.values();
  const ComplexVector nl = x.array() * x.array().abs().pow(p - 1.0);
  const ComplexVector r = d.form_matrix().cast<Complex>() * x +
                          (d.mass_weights().cast<Complex>().array() * (omega * x - nl).array())
                              .matrix();
  return r.cwiseAbs().maxCoeff() / x.cwiseAbs().maxCoeff();
}

double vertex_balance(const GraphFunction& phi, std::size_t v) {
  const auto& d = phi.disc();
  const auto& edges = d.graph().edges();
  const Complex at_v = phi.values()[d.vertex_node(v)];
  Complex sum = d.graph().vertices()[v].alpha * at_v;
  for (const auto& grid : d.edges()) {
    const Edge& e = edges[grid.edge];
    // phi_e increases away from v: derivative taken into the edge.
    if (e.from == v) sum += (phi.at(grid.edge, 1) - at_v) / grid.h;
    if (e.to && *e.to == v) sum += (phi.at(grid.edge, grid.intervals - 1) - at_v) / grid.h;
  }
  return std::abs(sum);
}

double h_integral(double x, double p) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("h(x) needs 0 <= x < 1");
  if (!(p > 1.0)) throw DomainError("h(x) needs p > 1");
  // 1 - t = w^m with m = (p-1)/2 turns the endpoint singularity of
  // (1 - t^2)^{(3-p)/(p-1)} into the bounded integrand m (2 - w^m)^{(3-p)/(p-1)}.
  const double m = 0.5 * (p - 1.0);
  const double expo = (3.0 - p) / (p - 1.0);
  const double upper = std::pow(1.0 - x, 1.0 / m);
  auto integrand = [m, expo](double w) { return m * std::pow(2.0 - std::pow(w, m), expo); };
  return adaptive_simpson(integrand, 0.0, upper, 1e-13);
}

double mass_curve_R(int n_edges, double gamma, double p, double omega) {
  if (n_edges < 2 || !(gamma > 0.0) || !(p > 1.0))
    throw DomainError("mass curve needs N >= 2, gamma > 0, p > 1");
  const double th = threshold(n_edges, 0, gamma);
  if (!(omega > th)) throw DomainError("mass curve needs omega > gamma^2 / N^2");
  const double x = gamma / (n_edges * std::sqrt(omega));
  if (!(x < 1.0)) throw DomainError("mass curve needs omega > gamma^2 / N^2");
  return 2.0 * n_edges / (p - 1.0) * std::pow(0.5 * (p + 1.0), 2.0 / (p - 1.0)) *
         std::pow(omega, (5.0 - p) / (2.0 * (p - 1.0))) * h_integral(x, p);
}

MonotoneWindow detect_monotone_window(int n_edges, double gamma, double p,
                                      double span_decades, int samples) {
  if (samples < 2 || !(span_decades > 0.0)) throw DomainError("window scan needs samples");
  const double th = threshold(n_edges, 0, gamma);
  auto omega_at = [&](int k) {
    return th * std::pow(10.0, span_decades * static_cast<double>(k) / samples);
  };
  double prev_omega = omega_at(1);
  double prev_mass = mass_curve_R(n_edges, gamma, p, prev_omega);
  for (int k = 2; k <= samples; ++k) {
    const double om = omega_at(k);
    const double r = mass_curve_R(n_edges, gamma, p, om);
    if (!(r > prev_mass)) return {th, prev_omega, prev_mass, true};
    prev_omega = om;
    prev_mass = r;
  }
  return {th, prev_omega, prev_mass, false};
}

double solve_omega_for_mass(int n_edges, double gamma, double p, double c,
                            std::pair<double, double> bracket) {
  auto [lo, hi] = bracket;
  if (!(c > 0.0)) throw DomainError("target mass must be positive");
  if (!(hi > lo)) throw DomainError("omega bracket is empty");
  const double r_lo = mass_curve_R(n_edges, gamma, p, lo);
  const double r_hi = mass_curve_R(n_edges, gamma, p, hi);
  if (!(r_lo < c && c < r_hi)) {
    std::ostringstream msg;
    msg << "omega bracket does not straddle c = " << c << " (R(lo) = " << r_lo
        << ", R(hi) = " << r_hi << ")";
    throw DomainError(msg.str());
  }
  constexpr int kChecks = 64;
  double prev = r_lo;
  for (int k = 1; k <= kChecks; ++k) {
    const double r = mass_curve_R(n_edges, gamma, p, lo + (hi - lo) * k / kChecks);
    if (!(r > prev)) throw DomainError("bracket lies outside the monotone window omega*");
    prev = r;
  }
  for (int it = 0; it < 300 && (hi - lo) > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass_curve_R(n_edges, gamma, p, mid) < c) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double solve_omega_for_mass(int n_edges, double gamma, double p, double c) {
  const auto window = detect_monotone_window(n_edges, gamma, p);
  const double lo = window.omega_min * (1.0 + 1e-13);
  return solve_omega_for_mass(n_edges, gamma, p, c, {lo, window.omega_max});
}

}  // namespace graphwave
