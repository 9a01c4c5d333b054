#include <cmath>
#include <sstream>

#include "doctest.h"
#include "graphwave/discretization.hpp"
#include "graphwave/errors.hpp"
#include "graphwave/graph.hpp"

using namespace graphwave;

namespace {

// Segment [0, 3] between two vertices plus a loop of length 2 at the second.
MetricGraph compact_graph(double alpha_a, double alpha_b) {
  std::vector<Vertex> vs{{"a", alpha_a}, {"b", alpha_b}};
  Edge seg;
  seg.id = "seg";
  seg.from = 0;
  seg.to = 1;
  seg.length = 3.0;
  Edge loop;
  loop.id = "loop";
  loop.from = 1;
  loop.to = 1;
  loop.length = 2.0;
  return MetricGraph(vs, {seg, loop}, Validation::Structural);
}

GraphFunction sample(const DiscretizationPtr& d, double (*f)(std::size_t, double)) {
  ComplexVector v(d->size());
  for (Eigen::Index i = 0; i < d->size(); ++i) {
    const auto& s = d->sites()[static_cast<std::size_t>(i)];
    v[i] = f(s.edge, s.x);
  }
  return GraphFunction(d, v);
}

}  // namespace

TEST_CASE("node counts and vertex gluing") {
  const MetricGraph star = make_star({3, 1.0, 10.0});
  const auto dir = Discretization::build(star, 0.5);
  CHECK(dir->size() == 1 + 3 * 19);
  const auto neu = Discretization::build(star, 0.5, TruncationBoundary::Neumann);
  CHECK(neu->size() == 1 + 3 * 20);
  for (const auto& grid : dir->edges()) {
    CHECK(grid.intervals == 20);
    CHECK(grid.nodes.front() == dir->vertex_node(0));
    CHECK(grid.nodes.back() == -1);
  }
  // h equal to L/4 is still allowed; coarser is not.
  CHECK_NOTHROW(Discretization::build(star, 2.5));
  CHECK_THROWS_AS(Discretization::build(star, 2.6), ConfigError);
  CHECK_THROWS_AS(Discretization::build(star, 0.0), ConfigError);
}

TEST_CASE("mass weights integrate the measure") {
  const auto neu = Discretization::build(make_star({3, 1.0, 10.0}), 0.5,
                                         TruncationBoundary::Neumann);
  CHECK(neu->mass_weights().sum() == doctest::Approx(30.0));
  const auto dir = Discretization::build(make_star({3, 1.0, 10.0}), 0.5);
  CHECK(dir->mass_weights().sum() == doctest::Approx(30.0 - 3 * 0.25));
  const auto cmp = Discretization::build(compact_graph(0.0, 0.0), 0.1);
  CHECK(cmp->mass_weights().sum() == doctest::Approx(5.0));
}

TEST_CASE("constants span the stiffness kernel") {
  const auto cmp = Discretization::build(compact_graph(0.0, 0.0), 0.1);
  const RealVector ones = RealVector::Ones(cmp->size());
  CHECK((cmp->stiffness_matrix() * ones).cwiseAbs().maxCoeff() < 1e-12);
  const auto neu = Discretization::build(make_star({4, 1.0, 8.0}), 0.25,
                                         TruncationBoundary::Neumann);
  CHECK((neu->stiffness_matrix() * RealVector::Ones(neu->size())).cwiseAbs().maxCoeff() < 1e-12);
  const auto u = GraphFunction::constant(neu, Complex(2.0, 0.0));
  CHECK(mass(u) == doctest::Approx(4.0 * 32.0));
  CHECK(gradient_norm_sq(u) == doctest::Approx(0.0));
}

TEST_CASE("quadratic form is exact on piecewise linear functions") {
  // u = x on the segment, u = 3 on the loop: int |u'|^2 = 3, vertex terms
  // -alpha_a * 0 - alpha_b * 9.
  const auto d = Discretization::build(compact_graph(1.5, 0.5), 0.25);
  const auto u = sample(d, [](std::size_t e, double x) { return e == 0 ? x : 3.0; });
  CHECK(gradient_norm_sq(u) == doctest::Approx(3.0));
  CHECK(quadratic_form(u) == doctest::Approx(3.0 - 0.5 * 9.0));
  CHECK(g_norm_sq(u, 0.2) == doctest::Approx(quadratic_form(u) + 0.4 * mass(u)));
  CHECK(h1_norm_sq(u) == doctest::Approx(gradient_norm_sq(u) + mass(u)));
  CHECK(std::abs(h1_inner(u, u) - Complex(h1_norm_sq(u), 0.0)) < 1e-12);
}

TEST_CASE("quadratic form of a smooth function converges at second order") {
  // u = cos(pi x / 3) on the segment, exact int |u'|^2 = pi^2 / 6; the loop
  // carries the vertex value -1 so u is continuous.
  auto err_at = [](double h) {
    const auto d = Discretization::build(compact_graph(0.0, 0.0), h);
    const auto u = sample(d, [](std::size_t e, double x) {
      return e == 0 ? std::cos(M_PI * x / 3.0) : -1.0;
    });
    return std::abs(gradient_norm_sq(u) - M_PI * M_PI / 6.0);
  };
  const double e1 = err_at(0.05);
  const double e2 = err_at(0.025);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("potential enters the form with lumped weights") {
  const char* cfg = R"({"vertices": [{"id": "v", "alpha": 0}],
    "edges": [{"id": "e", "from": "v", "to": null, "length": "inf", "truncation": 4,
               "potential": {"type": "square_well", "depth": 2.0, "start": 0.0, "width": 10.0}}]})";
  const auto d = Discretization::build(parse_graph(cfg), 0.5, TruncationBoundary::Neumann);
  const auto u = GraphFunction::constant(d, Complex(1.0, 0.0));
  CHECK(quadratic_form(u) == doctest::Approx(2.0 * 4.0));
}

TEST_CASE("norms") {
  const auto d = Discretization::build(make_star({3, 1.0, 10.0}), 0.5,
                                       TruncationBoundary::Neumann);
  const auto u = GraphFunction::constant(d, Complex(0.0, 2.0));
  CHECK(lp_norm(u, 2.0) == doctest::Approx(std::sqrt(mass(u))));
  CHECK(lp_norm(u, 4.0) == doctest::Approx(2.0 * std::pow(30.0, 0.25)));
  CHECK_THROWS_AS(lp_norm(u, 0.5), DomainError);
  CHECK_THROWS_AS(gn_ratio(GraphFunction::zero(d), 5.0), DomainError);
}

TEST_CASE("csv round trip and resampling") {
  const auto d = Discretization::build(make_star({3, 1.0, 10.0}), 0.25);
  ComplexVector v(d->size());
  for (Eigen::Index i = 0; i < d->size(); ++i) {
    const auto& s = d->sites()[static_cast<std::size_t>(i)];
    v[i] = Complex(std::exp(-s.x) * (s.edge + 1.0), 0.5 * s.x);
  }
  v[0] = Complex(2.0, 0.0);
  const GraphFunction u(d, v);
  std::stringstream ss;
  write_csv(ss, u);
  CHECK(ss.str().rfind("edge_id,x,re,im\n", 0) == 0);
  const GraphFunction back = read_csv(ss, d);
  CHECK((back.values() - u.values()).cwiseAbs().maxCoeff() < 1e-14);

  // Resampling a linear profile onto a finer mesh is exact.
  std::stringstream lin;
  lin << "edge_id,x,re,im\n";
  for (int e = 1; e <= 3; ++e) {
    lin << "e" << e << ",0,1,0\n";
    lin << "e" << e << ",10,0,0\n";
  }
  const auto fine = Discretization::build(make_star({3, 1.0, 10.0}), 0.5);
  const GraphFunction w = read_csv(lin, fine);
  CHECK(w.at(1, 5).real() == doctest::Approx(1.0 - 2.5 / 10.0));
  CHECK(w.values()[0].real() == doctest::Approx(1.0));

  std::stringstream bad("edge_id,x,re,im\ne1,0,1\n");
  CHECK_THROWS_AS(read_csv(bad, fine), ParseError);
}
