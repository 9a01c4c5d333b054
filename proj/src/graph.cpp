#include "graphwave/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "graphwave/errors.hpp"
#include "json.hpp"

namespace graphwave {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string edge_field(std::string_view edge_id, std::string_view field) {
  return "edge '" + std::string(edge_id) + "' " + std::string(field);
}

}  // namespace

PotentialSpec::PotentialSpec(Variant v) : v_(std::move(v)) {}

double PotentialSpec::operator()(double x) const {
  return std::visit(
      Overloaded{
          [](const potential::Zero&) { return 0.0; },
          [x](const potential::SquareWell& s) {
            return (x >= s.start && x <= s.start + s.width) ? s.depth : 0.0;
          },
          [x](const potential::Gaussian& g) {
            const double z = (x - g.center) / g.width;
            return g.amplitude * std::exp(-0.5 * z * z);
          },
          [x](const potential::Samples& s) {
            // Linear interpolation inside, nearest value outside.
            if (x <= s.x.front()) return s.w.front();
            if (x >= s.x.back()) return s.w.back();
            const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
            const auto k = static_cast<std::size_t>(it - s.x.begin());
            const double t = (x - s.x[k - 1]) / (s.x[k] - s.x[k - 1]);
            return (1.0 - t) * s.w[k - 1] + t * s.w[k];
          },
      },
      v_);
}

std::vector<double> PotentialSpec::breakpoints(double length) const {
  std::vector<double> pts;
  if (const auto* s = std::get_if<potential::SquareWell>(&v_)) {
    pts = {s->start, s->start + s->width};
  } else if (const auto* s = std::get_if<potential::Samples>(&v_)) {
    pts = s->x;
  }
  std::erase_if(pts, [length](double x) { return x <= 0.0 || x >= length; });
  return pts;
}

void PotentialSpec::validate(double length, std::string_view edge_id) const {
  std::visit(
      Overloaded{
          [](const potential::Zero&) {},
          [&](const potential::SquareWell& s) {
            if (!(s.width > 0.0))
              throw ParseError(edge_field(edge_id, "potential.width must be positive"));
            if (!std::isfinite(s.depth) || !std::isfinite(s.start))
              throw ParseError(edge_field(edge_id, "potential fields must be finite"));
          },
          [&](const potential::Gaussian& g) {
            if (!(g.width > 0.0))
              throw ParseError(edge_field(edge_id, "potential.width must be positive"));
            if (!std::isfinite(g.amplitude) || !std::isfinite(g.center))
              throw ParseError(edge_field(edge_id, "potential fields must be finite"));
          },
          [&](const potential::Samples& s) {
            if (s.x.empty() || s.x.size() != s.w.size())
              throw ParseError(edge_field(edge_id, "potential.x and potential.w must be "
                                                   "non-empty and of equal size"));
            for (std::size_t i = 1; i < s.x.size(); ++i) {
              if (!(s.x[i] > s.x[i - 1]))
                throw ParseError(
                    edge_field(edge_id, "potential.x must be strictly increasing"));
            }
            if (s.x.front() < 0.0 || s.x.back() > length)
              throw ParseError(edge_field(edge_id, "potential.x must lie within the edge"));
          },
      },
      v_);
}

MetricGraph::MetricGraph(std::vector<Vertex> vertices, std::vector<Edge> edges,
                         Validation level)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (vertices_.empty()) throw ParseError("vertices: graph needs at least one vertex");
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (!std::isfinite(vertices_[i].alpha))
      throw ParseError("vertex '" + vertices_[i].id + "' alpha must be finite");
    for (std::size_t j = 0; j < i; ++j) {
      if (vertices_[j].id == vertices_[i].id)
        throw ParseError("vertex id '" + vertices_[i].id + "' is duplicated");
    }
  }
  if (edges_.empty()) throw ParseError("edges: graph needs at least one edge");
  for (const auto& e : edges_) {
    if (e.from >= vertices_.size())
      throw ParseError(edge_field(e.id, "from references an unknown vertex"));
    if (e.to && *e.to >= vertices_.size())
      throw ParseError(edge_field(e.id, "to references an unknown vertex"));
    if (e.external()) {
      if (std::isfinite(e.length))
        throw ParseError(edge_field(e.id, "external edge must have infinite length"));
      if (!e.truncation)
        throw ParseError(edge_field(e.id, "truncation is required for an infinite edge"));
      if (!(*e.truncation > 0.0) || !std::isfinite(*e.truncation))
        throw ParseError(edge_field(e.id, "truncation length must be positive"));
    } else {
      if (!std::isfinite(e.length))
        throw ParseError(edge_field(e.id, "infinite edge must have exactly one vertex "
                                          "endpoint (to = null)"));
      if (!(e.length > 0.0)) throw ParseError(edge_field(e.id, "edge length must be positive"));
    }
    e.potential.validate(e.effective_length(), e.id);
  }

  if (level == Validation::Full) {
    if (!connected())
      throw AssumptionViolation("graph is not connected");
    if (!has_external_edge())
      throw AssumptionViolation("graph has no external (half-line) edge");
  }
}

std::size_t MetricGraph::vertex_index(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i].id == id) return i;
  }
  throw ParseError("unknown vertex id '" + std::string(id) + "'");
}

bool MetricGraph::connected() const {
  std::vector<std::size_t> parent(vertices_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : edges_) {
    if (e.to) parent[find(e.from)] = find(*e.to);
  }
  const std::size_t root = find(0);
  for (std::size_t v = 1; v < vertices_.size(); ++v) {
    if (find(v) != root) return false;
  }
  return true;
}

bool MetricGraph::has_external_edge() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.external(); });
}

double MetricGraph::total_measure() const {
  double total = 0.0;
  for (const auto& e : edges_) total += e.effective_length();
  return total;
}

MetricGraph make_star(const StarGraphSpec& spec) {
  if (spec.n_edges < 2) throw ConfigError("star graph needs N >= 2 half-lines");
  if (!(spec.gamma > 0.0)) throw ConfigError("star graph needs gamma > 0");
  if (!(spec.truncation > 0.0)) throw ConfigError("star graph needs a positive truncation");
  std::vector<Vertex> vertices{{"v0", spec.gamma}};
  std::vector<Edge> edges;
  for (int i = 0; i < spec.n_edges; ++i) {
    Edge e;
    e.id = "e" + std::to_string(i + 1);
    e.from = 0;
    e.truncation = spec.truncation;
    edges.push_back(std::move(e));
  }
  return MetricGraph(std::move(vertices), std::move(edges));
}

namespace {

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + "." + key + " is missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::vector<double> require_array(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_array())
    throw ParseError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : obj.at(key)) {
    if (!v.is_number()) throw ParseError(where + "." + key + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PotentialSpec parse_potential(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be an object");
  if (!obj.contains("type") || !obj.at("type").is_string())
    throw ParseError(where + ".type is missing");
  const auto type = obj.at("type").get<std::string>();
  if (type == "zero") return PotentialSpec(potential::Zero{});
  if (type == "square_well") {
    return PotentialSpec::Variant(potential::SquareWell{require_number(obj, "depth", where),
                                 require_number(obj, "start", where),
                                 require_number(obj, "width", where)});
  }
  if (type == "gaussian") {
    return PotentialSpec::Variant(potential::Gaussian{require_number(obj, "amplitude", where),
                               require_number(obj, "center", where),
                               require_number(obj, "width", where)});
  }
  if (type == "samples") {
    return PotentialSpec::Variant(potential::Samples{require_array(obj, "x", where), require_array(obj, "w", where)});
  }
  throw ParseError(where + ".type '" + type + "' is not a known potential");
}

json potential_to_json(const PotentialSpec& p) {
  return std::visit(
      Overloaded{
          [](const potential::Zero&) { return json{{"type", "zero"}}; },
          [](const potential::SquareWell& s) {
            return json{{"type", "square_well"}, {"depth", s.depth}, {"start", s.start},
                        {"width", s.width}};
          },
          [](const potential::Gaussian& g) {
            return json{{"type", "gaussian"}, {"amplitude", g.amplitude},
                        {"center", g.center}, {"width", g.width}};
          },
          [](const potential::Samples& s) {
            return json{{"type", "samples"}, {"x", s.x}, {"w", s.w}};
          },
      },
      p.variant());
}

}  // namespace

MetricGraph parse_graph(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("graph config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("graph config must be a JSON object");
  if (!doc.contains("vertices") || !doc.at("vertices").is_array())
    throw ParseError("vertices must be an array");
  if (!doc.contains("edges") || !doc.at("edges").is_array())
    throw ParseError("edges must be an array");

  std::vector<Vertex> vertices;
  for (std::size_t i = 0; i < doc["vertices"].size(); ++i) {
    const auto& v = doc["vertices"][i];
    const std::string where = "vertices[" + std::to_string(i) + "]";
    if (!v.is_object()) throw ParseError(where + " must be an object");
    if (!v.contains("id") || !v.at("id").is_string()) throw ParseError(where + ".id is missing");
    vertices.push_back({v.at("id").get<std::string>(), require_number(v, "alpha", where)});
  }

  auto find_vertex = [&](const std::string& id, const std::string& where) {
    for (std::size_t k = 0; k < vertices.size(); ++k) {
      if (vertices[k].id == id) return k;
    }
    throw ParseError(where + " references unknown vertex '" + id + "'");
  };

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const auto& e = doc["edges"][i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    if (!e.is_object()) throw ParseError(where + " must be an object");
    Edge edge;
    if (!e.contains("id") || !e.at("id").is_string()) throw ParseError(where + ".id is missing");
    edge.id = e.at("id").get<std::string>();
    if (!e.contains("from") || !e.at("from").is_string())
      throw ParseError(where + ".from must be a vertex id");
    edge.from = find_vertex(e.at("from").get<std::string>(), where + ".from");
    if (!e.contains("to")) throw ParseError(where + ".to is missing (null for external)");
    if (!e.at("to").is_null()) {
      if (!e.at("to").is_string()) throw ParseError(where + ".to must be a vertex id or null");
      edge.to = find_vertex(e.at("to").get<std::string>(), where + ".to");
    }
    if (!e.contains("length")) throw ParseError(where + ".length is missing");
    const auto& len = e.at("length");
    if (len.is_string() && len.get<std::string>() == "inf") {
      edge.length = kInfiniteLength;
    } else if (len.is_number()) {
      edge.length = len.get<double>();
    } else {
      throw ParseError(where + ".length must be a number or \"inf\"");
    }
    if (e.contains("truncation") && !e.at("truncation").is_null())
      edge.truncation = require_number(e, "truncation", where);
    if (e.contains("potential")) edge.potential = parse_potential(e.at("potential"), where + ".potential");
    edges.push_back(std::move(edge));
  }
  return MetricGraph(std::move(vertices), std::move(edges));
}

std::string serialize_graph(const MetricGraph& g) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : g.vertices()) doc["vertices"].push_back({{"id", v.id}, {"alpha", v.alpha}});
  doc["edges"] = json::array();
  for (const auto& e : g.edges()) {
    json je{{"id", e.id}, {"from", g.vertices()[e.from].id}};
    je["to"] = e.to ? json(g.vertices()[*e.to].id) : json(nullptr);
    je["length"] = std::isfinite(e.length) ? json(e.length) : json("inf");
    if (e.truncation) je["truncation"] = *e.truncation;
    je["potential"] = potential_to_json(e.potential);
    doc["edges"].push_back(std::move(je));
  }
  return doc.dump(2);
}

namespace {

// Composite Simpson on [a, b] with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int k = 1; k < panels; ++k) s += f(a + k * h) * ((k % 2) ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Integrates f over [0, length], splitting at potential breakpoints.
template <class F>
double integrate_edge(const PotentialSpec& pot, double length, F&& f) {
  std::vector<double> cuts = pot.breakpoints(length);
  cuts.insert(cuts.begin(), 0.0);
  cuts.push_back(length);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k];
    const double b = cuts[k + 1];
    if (b <= a) continue;
    // Evaluate strictly inside the piece so that jumps sit on the boundary.
    const double eps = 1e-12 * std::max(1.0, b - a);
    const int panels = std::max(200, static_cast<int>(std::ceil((b - a) / 1e-3)));
    total += simpson([&](double x) { return f(std::clamp(x, a + eps, b - eps)); }, a, b,
                     panels);
  }
  return total;
}

}  // namespace

IntegrabilityReport potential_integrability_report(const MetricGraph& g, double p) {
  if (!(p >= 5.0)) throw DomainError("integrability report requires p >= 5");
  IntegrabilityReport rep;
  rep.exponent_low = 1.0;
  rep.exponent_high = 1.0 + 2.0 / (p - 1.0);
  double minus_lr = 0.0;
  for (const auto& e : g.edges()) {
    if (e.potential.is_zero()) continue;
    const double len = e.effective_length();
    const auto& w = e.potential;
    rep.w_plus_l1 += integrate_edge(w, len, [&](double x) { return std::max(w(x), 0.0); });
    rep.w_minus_l1 += integrate_edge(w, len, [&](double x) { return std::max(-w(x), 0.0); });
    minus_lr += integrate_edge(
        w, len, [&](double x) { return std::pow(std::max(-w(x), 0.0), rep.exponent_high); });
    // Sup of W+ sampled on a fine grid plus the breakpoints.
    const int n = std::max(1000, static_cast<int>(std::ceil(len / 1e-3)));
    for (int k = 0; k <= n; ++k)
      rep.w_plus_linf = std::max(rep.w_plus_linf, w(len * k / n));
    for (double x : w.breakpoints(len)) rep.w_plus_linf = std::max(rep.w_plus_linf, w(x));
  }
  rep.w_minus_lr = std::pow(minus_lr, 1.0 / rep.exponent_high);
  return rep;
}

}  // namespace graphwave
