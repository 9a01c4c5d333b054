#include <cmath>

#include "doctest.h"
#include "graphwave/closed_form.hpp"
#include "graphwave/discretization.hpp"
#include "graphwave/errors.hpp"
#include "graphwave/evolution.hpp"
#include "graphwave/graph.hpp"
#include "graphwave/spectral.hpp"

using namespace graphwave;

namespace {

DiscretizationPtr star_mesh(double h, double truncation) {
  return Discretization::build(make_star({3, 1.0, truncation}), h);
}

}  // namespace

TEST_CASE("linear flow rotates the ground state with the Cayley phase") {
  const auto d = star_mesh(0.1, 20.0);
  const auto ground = ground_state(d);
  const double dt = 0.05;
  EvolveOptions opts;
  opts.dt = dt;
  opts.t_final = 2.0;
  opts.nonlinear = false;
  GraphFunction last = ground.psi0;
  evolve(ground.psi0, 5.0, opts, &last);
  // i u_t = H u with H psi0 = -lambda0 psi0; Crank-Nicolson advances the
  // phase by 2 atan(lambda0 dt / 2) per step.
  const double phase = 40.0 * 2.0 * std::atan(0.5 * ground.lambda0 * dt);
  const ComplexVector expected = ground.psi0.values() * std::polar(1.0, phase);
  CHECK((last.values() - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("mass is conserved for rough data") {
  const auto d = star_mesh(0.1, 10.0);
  ComplexVector v(d->size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = d->sites()[static_cast<std::size_t>(i)].x;
    v[i] = std::polar(std::exp(-0.3 * x) * (1.0 + 0.5 * std::cos(3.0 * i)), 0.7 * x);
  }
  const GraphFunction u0(d, v);
  EvolveOptions opts;
  opts.dt = 0.01;
  opts.t_final = 1.0;
  opts.sample_every = 10;
  const auto trace = evolve(u0, 5.0, opts);
  REQUIRE(trace.size() == 11);
  for (const auto& row : trace) {
    CHECK(std::abs(row.mass - trace.front().mass) <= 1e-12 * trace.front().mass);
  }
  CHECK(trace.back().t == doctest::Approx(1.0));
}

TEST_CASE("exact standing wave stays on its orbit") {
  const auto d = star_mesh(0.02, 20.0);
  const ClosedFormWave w(3, 1.0, 5.0, 1.0);
  const auto phi = evaluate_wave(w, d);
  EvolveOptions opts;
  opts.dt = 1e-2;
  opts.t_final = 1.0;
  opts.sample_every = 100;
  GraphFunction last = phi;
  const auto trace = evolve(phi, 5.0, opts, &last);
  const auto od = orbit_distance(last, phi);
  CHECK(od.distance < 1e-2 * std::sqrt(h1_norm_sq(phi)));
  // Phase advances at the rate omega = 1.
  CHECK(std::remainder(od.theta - 1.0, 2.0 * M_PI) == doctest::Approx(0.0).epsilon(1e-2));
  CHECK(std::abs(trace.back().energy - trace.front().energy) < 1e-6);
}

TEST_CASE("orbit distance") {
  const auto d = star_mesh(0.1, 10.0);
  const auto psi = ground_state(d).psi0;
  const GraphFunction rotated(d, psi.values() * std::polar(1.0, 2.0));
  const auto od = orbit_distance(rotated, psi);
  CHECK(od.distance < 1e-7);
  CHECK(od.theta == doctest::Approx(2.0));
  const GraphFunction scaled(d, psi.values() * 1.5);
  CHECK(orbit_distance(scaled, psi).distance ==
        doctest::Approx(0.5 * std::sqrt(h1_norm_sq(psi))));
  CHECK_THROWS_AS(orbit_distance(psi, GraphFunction::zero(d)), DomainError);
}

TEST_CASE("perturbations") {
  const auto d = star_mesh(0.1, 10.0);
  const auto psi = ground_state(d).psi0;
  const GraphFunction phi(d, psi.values() * 0.8);
  Perturbation noise{PerturbationMode::MultiplicativeNoise, 1e-2, 7};
  const auto a = perturb(phi, psi, noise);
  const auto b = perturb(phi, psi, noise);
  CHECK(a.values() == b.values());
  noise.seed = 8;
  const auto c = perturb(phi, psi, noise);
  CHECK(a.values() != c.values());
  CHECK(mass(a) == doctest::Approx(mass(phi)).epsilon(1e-13));

  const auto bump = perturb(phi, psi, Perturbation{PerturbationMode::EigenfunctionBump, 1e-2, 1});
  CHECK(mass(bump) == doctest::Approx(mass(phi)).epsilon(1e-13));
  CHECK(bump.values()[0] != phi.values()[0]);  // rescaling touches the vertex too
  const double dist = orbit_distance(bump, phi).distance;
  CHECK(dist > 0.0);
  CHECK(dist < 5e-2 * std::sqrt(h1_norm_sq(phi)));
  CHECK_THROWS_AS(perturb(phi, psi, Perturbation{PerturbationMode::EigenfunctionBump, -1.0, 1}),
                  DomainError);
}

TEST_CASE("guards") {
  const auto d = star_mesh(0.1, 10.0);
  const auto psi = ground_state(d).psi0;
  CHECK_THROWS_AS(make_state(psi, 5.0, 0.0), ConfigError);
  RelaxationPropagator prop(d, 5.0);
  prop.set_blowup_limit(0.5 * psi.values().cwiseAbs().maxCoeff());
  auto s = make_state(psi, 5.0, 0.01);
  CHECK_THROWS_AS(prop.step(s), BlowUpError);
  const auto other = star_mesh(0.2, 10.0);
  RelaxationPropagator foreign(other, 5.0);
  auto s2 = make_state(psi, 5.0, 0.01);
  CHECK_THROWS_AS(foreign.step(s2), ConfigError);

  // The free-standing step matches the propagator.
  auto s3 = make_state(psi, 5.0, 0.01);
  const auto next = step(s3, d, 5.0);
  RelaxationPropagator fresh(d, 5.0);
  fresh.step(s3);
  CHECK((next.u.values() - s3.u.values()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(next.t == doctest::Approx(0.01));
}
