#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "graphwave/graph.hpp"

namespace graphwave {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Complex = std::complex<double>;

/// Condition imposed at the artificial end of a truncated half-line.
enum class TruncationBoundary {
  Dirichlet,  // end node eliminated (u = 0)
  Neumann,    // end node kept as an unknown with a free end
};

/// Uniform grid of one edge. Local node k sits at x = k * h, k = 0..intervals.
struct EdgeGrid {
  std::size_t edge = 0;
  double length = 0.0;
  int intervals = 0;
  double h = 0.0;
  /// Global index of each local node, -1 for an eliminated Dirichlet node.
  std::vector<int> nodes;
};

/// Piecewise-linear discretization of a metric graph with lumped mass.
///
/// Vertex nodes come first in the global numbering (one unknown per graph
/// vertex, so grid functions are continuous across vertices), followed by
/// the interior nodes of each edge. The form matrix realizes
///   F[u] = sum_e int |u'|^2 + int W |u|^2 - sum_v alpha_v |u(v)|^2
/// as Re(u^* A u).
class Discretization {
 public:
  static std::shared_ptr<const Discretization> build(
      const MetricGraph& g, double target_h,
      TruncationBoundary boundary = TruncationBoundary::Dirichlet);

  const MetricGraph& graph() const { return graph_; }
  TruncationBoundary boundary() const { return boundary_; }
  Eigen::Index size() const { return mass_.size(); }
  const std::vector<EdgeGrid>& edges() const { return grids_; }
  double max_step() const;

  /// Lumped (trapezoid) mass weights.
  const RealVector& mass_weights() const { return mass_; }
  /// Full form matrix: stiffness + potential - vertex couplings.
  const SparseMatrix& form_matrix() const { return form_; }
  /// Stiffness part only (int |u'|^2).
  const SparseMatrix& stiffness_matrix() const { return stiffness_; }

  /// Global index of the node of vertex v.
  int vertex_node(std::size_t v) const { return static_cast<int>(v); }
  /// Coordinate of each global node along a representative edge.
  struct NodeSite {
    std::size_t edge;
    double x;
  };
  const std::vector<NodeSite>& sites() const { return sites_; }

 private:
  Discretization(MetricGraph g, TruncationBoundary boundary)
      : graph_(std::move(g)), boundary_(boundary) {}

  MetricGraph graph_;
  TruncationBoundary boundary_;
  std::vector<EdgeGrid> grids_;
  std::vector<NodeSite> sites_;
  RealVector mass_;
  SparseMatrix form_;
  SparseMatrix stiffness_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

/// Complex grid function on the discretized graph.
class GraphFunction {
 public:
  GraphFunction(DiscretizationPtr d, ComplexVector values);
  static GraphFunction zero(DiscretizationPtr d);
  static GraphFunction constant(DiscretizationPtr d, Complex value);

  const Discretization& disc() const { return *disc_; }
  const DiscretizationPtr& disc_ptr() const { return disc_; }
  const ComplexVector& values() const { return values_; }
  ComplexVector& values() { return values_; }

  /// Value at local node k of edge e (0 at an eliminated Dirichlet node).
  Complex at(std::size_t edge, int k) const;

 private:
  DiscretizationPtr disc_;
  ComplexVector values_;
};

double mass(const GraphFunction& u);
double quadratic_form(const GraphFunction& u);
/// F[u] + 2 lambda0 ||u||^2, the squared norm defining the ball B(r).
double g_norm_sq(const GraphFunction& u, double lambda0);
double lp_norm(const GraphFunction& u, double q);
/// sum_e int |u'|^2 from element gradients.
double gradient_norm_sq(const GraphFunction& u);
double h1_norm_sq(const GraphFunction& u);
/// H1 inner product <u, v> = sum_e int conj(u') v' + conj(u) v.
Complex h1_inner(const GraphFunction& u, const GraphFunction& v);
/// ||u||_{p+1}^{p+1} / (||u'||_2^{(p-1)/2} ||u||_2^{(p+3)/2}).
double gn_ratio(const GraphFunction& u, double p);

/// CSV with header "edge_id,x,re,im"; one row per local node of every edge.
void write_csv(std::ostream& os, const GraphFunction& u);
/// Reads the CSV layout above and interpolates it onto d (edge by edge).
GraphFunction read_csv(std::istream& is, DiscretizationPtr d);

}  // namespace graphwave
