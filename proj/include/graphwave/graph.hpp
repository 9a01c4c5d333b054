#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace graphwave {

inline constexpr double kInfiniteLength = std::numeric_limits<double>::infinity();

// Edge potentials, expressed in the edge's own coordinate x in [0, L_e].
// A single signed stream W = W+ - W-.
namespace potential {
struct Zero {
  friend bool operator==(const Zero&, const Zero&) = default;
};
struct SquareWell {
  double depth;
  double start;
  double width;
  friend bool operator==(const SquareWell&, const SquareWell&) = default;
};
struct Gaussian {
  double amplitude;
  double center;
  double width;
  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};
struct Samples {
  std::vector<double> x;
  std::vector<double> w;
  friend bool operator==(const Samples&, const Samples&) = default;
};
}  // namespace potential

class PotentialSpec {
 public:
  using Variant = std::variant<potential::Zero, potential::SquareWell,
                               potential::Gaussian, potential::Samples>;

  PotentialSpec() = default;
  PotentialSpec(Variant v);  // NOLINT(google-explicit-constructor)

  double operator()(double x) const;
  bool is_zero() const { return std::holds_alternative<potential::Zero>(v_); }
  const Variant& variant() const { return v_; }

  /// Points inside (0, length) where the potential is not smooth.
  std::vector<double> breakpoints(double length) const;

  /// Checks the variant against an edge of the given (effective) length.
  void validate(double length, std::string_view edge_id) const;

  friend bool operator==(const PotentialSpec&, const PotentialSpec&) = default;

 private:
  Variant v_ = potential::Zero{};
};

struct Vertex {
  std::string id;
  double alpha = 0.0;  // delta coupling; alpha > 0 is attractive

  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  std::string id;
  std::size_t from = 0;
  std::optional<std::size_t> to;  // empty for an external (half-line) edge
  double length = kInfiniteLength;
  std::optional<double> truncation;
  PotentialSpec potential;

  bool external() const { return !to.has_value(); }
  /// Length of the computational interval: the edge length, or the
  /// truncation length for a half-line.
  double effective_length() const { return external() ? *truncation : length; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Validation {
  Full,        // structural invariants + connectivity + an external edge
  Structural,  // structural invariants only (compact test graphs)
};

/// Metric graph with delta couplings at the vertices. Immutable once built.
class MetricGraph {
 public:
  MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges,
              Validation level = Validation::Full);

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t vertex_index(std::string_view id) const;

  bool connected() const;
  bool has_external_edge() const;
  double total_measure() const;

  friend bool operator==(const MetricGraph&, const MetricGraph&) = default;

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
};

struct StarGraphSpec {
  int n_edges = 3;
  double gamma = 1.0;
  double truncation = 40.0;
};

MetricGraph make_star(const StarGraphSpec& spec);

MetricGraph parse_graph(std::string_view config_text);
std::string serialize_graph(const MetricGraph& g);

struct IntegrabilityReport {
  double exponent_low = 1.0;   // r = 1
  double exponent_high = 1.0;  // r = 1 + 2/(p-1)
  double w_plus_l1 = 0.0;
  double w_plus_linf = 0.0;
  double w_minus_l1 = 0.0;
  double w_minus_lr = 0.0;  // norm at exponent_high
};

/// Norms of W+ and W- on the truncated domain. Diagnostic only.
IntegrabilityReport potential_integrability_report(const MetricGraph& g, double p);

}  // namespace graphwave
