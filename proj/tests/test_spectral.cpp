#include <cmath>

#include "doctest.h"
#include "graphwave/discretization.hpp"
#include "graphwave/errors.hpp"
#include "graphwave/graph.hpp"
#include "graphwave/spectral.hpp"

using namespace graphwave;

// Reference eigenvalues below come from a dense generalized symmetric
// eigensolver (LAPACK via scipy) applied to an independently assembled copy
// of the same P1 / lumped-mass matrices.

TEST_CASE("coarse star matches the dense reference") {
  const auto d = Discretization::build(make_star({3, 1.0, 10.0}), 0.5);
  const auto pair = ground_state(d);
  CHECK(pair.lambda0 == doctest::Approx(0.10976621361861232).epsilon(1e-10));
  CHECK(pair.gap == doctest::Approx(0.10976621361861232 + 0.09849327523890143).epsilon(1e-8));
  CHECK(pair.residual < 1e-8);

  const auto neu = Discretization::build(make_star({3, 1.0, 10.0}), 0.5,
                                         TruncationBoundary::Neumann);
  const auto pn = ground_state(neu);
  CHECK(pn.lambda0 == doctest::Approx(0.11091698356206689).epsilon(1e-10));
  CHECK(pn.gap == doctest::Approx(0.11091698356206689 + 0.024661330134972723).epsilon(1e-8));
}

TEST_CASE("ground state is positive, normalized and solves the pencil") {
  const auto d = Discretization::build(make_star({4, 2.0, 12.0}), 0.05);
  const auto pair = ground_state(d);
  const auto& psi = pair.psi0.values();
  CHECK(mass(pair.psi0) == doctest::Approx(1.0));
  CHECK(psi.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(psi.real().minCoeff() > 0.0);
  // The maximum sits at the attractive vertex.
  Eigen::Index arg = 0;
  psi.real().maxCoeff(&arg);
  CHECK(arg == d->vertex_node(0));
  const RealVector r = d->form_matrix() * psi.real() +
                       pair.lambda0 * d->mass_weights().cwiseProduct(psi.real());
  CHECK(r.norm() / d->mass_weights().cwiseProduct(psi.real()).norm() < 1e-8);
  // Continuous value on the truncated star: kappa coth(kappa L) = gamma / N,
  // here indistinguishable from gamma^2 / N^2 = 1/4.
  CHECK(pair.lambda0 == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("eigenvalue converges at second order to the half-line value") {
  auto err_at = [](double h) {
    const auto d = Discretization::build(make_star({3, 1.0, 40.0}), h);
    return std::abs(ground_state(d).lambda0 - 1.0 / 9.0);
  };
  const double e1 = err_at(0.04);
  const double e2 = err_at(0.02);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("truncated star approaches the continuous transcendental value") {
  // kappa coth(10 kappa) = 1/3 gives kappa^2 = 0.11053714690300201.
  const auto d = Discretization::build(make_star({3, 1.0, 10.0}), 0.01);
  CHECK(ground_state(d).lambda0 == doctest::Approx(0.11053714690300201).epsilon(1e-4));
}

TEST_CASE("repulsive or absent coupling violates the negative-energy assumption") {
  const char* cfg = R"({"vertices": [{"id": "v", "alpha": -1}],
    "edges": [{"id": "e1", "from": "v", "to": null, "length": "inf", "truncation": 10},
              {"id": "e2", "from": "v", "to": null, "length": "inf", "truncation": 10}]})";
  const auto d = Discretization::build(parse_graph(cfg), 0.1);
  CHECK_THROWS_AS(ground_state(d), AssumptionViolation);
}

TEST_CASE("potential well alone produces a bound state") {
  const char* cfg = R"({"vertices": [{"id": "v", "alpha": 0}],
    "edges": [{"id": "e1", "from": "v", "to": null, "length": "inf", "truncation": 20,
               "potential": {"type": "square_well", "depth": -1.0, "start": 0.0, "width": 2.0}},
              {"id": "e2", "from": "v", "to": null, "length": "inf", "truncation": 20}]})";
  const auto d = Discretization::build(parse_graph(cfg), 0.02);
  const auto pair = ground_state(d);
  CHECK(pair.lambda0 > 0.0);
  CHECK(pair.lambda0 < 1.0);
  CHECK(pair.psi0.values().real().minCoeff() > 0.0);
}

TEST_CASE("gap report") {
  const auto d = Discretization::build(make_star({3, 1.0, 10.0}), 0.5);
  const auto pair = ground_state(d);
  const auto rep = spectral_gap_report(pair);
  CHECK(rep.isolation_certified);
  GroundStatePair tight = pair;
  tight.gap = 1e-12;
  const auto bad = spectral_gap_report(tight, 1e-10);
  CHECK_FALSE(bad.isolation_certified);
  CHECK(bad.message.find("not numerically certified") != std::string::npos);
}
