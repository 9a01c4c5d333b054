#include "graphwave/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "graphwave/errors.hpp"

namespace graphwave {

std::shared_ptr<const Discretization> Discretization::build(const MetricGraph& g,
                                                            double target_h,
                                                            TruncationBoundary boundary) {
  if (!(target_h > 0.0)) throw ConfigError("mesh step must be positive");
  std::shared_ptr<Discretization> d(new Discretization(g, boundary));
  const auto& edges = d->graph_.edges();
  const int n_vertices = static_cast<int>(d->graph_.vertices().size());

  // Node numbering: vertices first, then edge interiors.
  int next = n_vertices;
  d->sites_.resize(static_cast<std::size_t>(n_vertices), NodeSite{0, -1.0});
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    const double len = e.effective_length();
    if (target_h > len / 4.0 * (1.0 + 1e-12)) {
      throw ConfigError("mesh step " + std::to_string(target_h) + " too large for edge '" +
                        e.id + "' of length " + std::to_string(len) +
                        " (need h <= length / 4)");
    }
    EdgeGrid grid;
    grid.edge = ei;
    grid.length = len;
    grid.intervals = static_cast<int>(std::ceil(len / target_h - 1e-9));
    grid.h = len / grid.intervals;
    grid.nodes.resize(static_cast<std::size_t>(grid.intervals) + 1);
    grid.nodes.front() = static_cast<int>(e.from);
    if (d->sites_[e.from].x < 0.0) d->sites_[e.from] = {ei, 0.0};
    for (int k = 1; k < grid.intervals; ++k) {
      grid.nodes[static_cast<std::size_t>(k)] = next++;
      d->sites_.push_back({ei, k * grid.h});
    }
    if (e.to) {
      grid.nodes.back() = static_cast<int>(*e.to);
      if (d->sites_[*e.to].x < 0.0) d->sites_[*e.to] = {ei, len};
    } else if (boundary == TruncationBoundary::Neumann) {
      grid.nodes.back() = next++;
      d->sites_.push_back({ei, len});
    } else {
      grid.nodes.back() = -1;
    }
    d->grids_.push_back(std::move(grid));
  }

  for (int v = 0; v < n_vertices; ++v) {
    if (d->sites_[static_cast<std::size_t>(v)].x < 0.0)
      throw ConfigError("vertex '" + d->graph_.vertices()[static_cast<std::size_t>(v)].id +
                        "' has no incident edge");
  }

  const Eigen::Index n = next;
  d->mass_ = RealVector::Zero(n);
  std::vector<Eigen::Triplet<double>> stiff;
  std::vector<Eigen::Triplet<double>> form;
  stiff.reserve(static_cast<std::size_t>(4 * n));
  form.reserve(static_cast<std::size_t>(5 * n));

  for (const auto& grid : d->grids_) {
    const Edge& e = edges[grid.edge];
    const double h = grid.h;
    for (int k = 0; k <= grid.intervals; ++k) {
      const int gi = grid.nodes[static_cast<std::size_t>(k)];
      if (gi < 0) continue;
      const double w = (k == 0 || k == grid.intervals) ? 0.5 * h : h;
      d->mass_[gi] += w;
      if (!e.potential.is_zero()) form.emplace_back(gi, gi, e.potential(k * h) * w);
    }
    for (int k = 0; k < grid.intervals; ++k) {
      const int a = grid.nodes[static_cast<std::size_t>(k)];
      const int b = grid.nodes[static_cast<std::size_t>(k) + 1];
      const double s = 1.0 / h;
      if (a >= 0) stiff.emplace_back(a, a, s);
      if (b >= 0) stiff.emplace_back(b, b, s);
      if (a >= 0 && b >= 0) {
        stiff.emplace_back(a, b, -s);
        stiff.emplace_back(b, a, -s);
      }
    }
  }
  for (int v = 0; v < n_vertices; ++v) {
    const double alpha = d->graph_.vertices()[static_cast<std::size_t>(v)].alpha;
    if (alpha != 0.0) form.emplace_back(v, v, -alpha);
  }

  d->stiffness_.resize(n, n);
  d->stiffness_.setFromTriplets(stiff.begin(), stiff.end());
  form.insert(form.end(), stiff.begin(), stiff.end());
  d->form_.resize(n, n);
  d->form_.setFromTriplets(form.begin(), form.end());
  d->stiffness_.makeCompressed();
  d->form_.makeCompressed();
  return d;
}

double Discretization::max_step() const {
  double h = 0.0;
  for (const auto& g : grids_) h = std::max(h, g.h);
  return h;
}

GraphFunction::GraphFunction(DiscretizationPtr d, ComplexVector values)
    : disc_(std::move(d)), values_(std::move(values)) {
  if (!disc_) throw ConfigError("grid function needs a discretization");
  if (values_.size() != disc_->size())
    throw ConfigError("grid function length does not match the discretization");
}

GraphFunction GraphFunction::zero(DiscretizationPtr d) {
  const auto n = d->size();
  return GraphFunction(std::move(d), ComplexVector::Zero(n));
}

GraphFunction GraphFunction::constant(DiscretizationPtr d, Complex value) {
  const auto n = d->size();
  return GraphFunction(std::move(d), ComplexVector::Constant(n, value));
}

Complex GraphFunction::at(std::size_t edge, int k) const {
  const int gi = disc_->edges()[edge].nodes[static_cast<std::size_t>(k)];
  return gi < 0 ? Complex{} : values_[gi];
}

double mass(const GraphFunction& u) {
  return (u.disc().mass_weights().array() * u.values().array().abs2()).sum();
}

namespace {

double form_value(const SparseMatrix& a, const ComplexVector& u) {
  // Re(u^* A u) for real symmetric A.
  const RealVector re = u.real();
  const RealVector im = u.imag();
  return re.dot(a * re) + im.dot(a * im);
}

}  // namespace

double quadratic_form(const GraphFunction& u) {
  return form_value(u.disc().form_matrix(), u.values());
}

double g_norm_sq(const GraphFunction& u, double lambda0) {
  return quadratic_form(u) + 2.0 * lambda0 * mass(u);
}

double lp_norm(const GraphFunction& u, double q) {
  if (!(q >= 1.0)) throw DomainError("L^q norm needs q >= 1");
  const double s =
      (u.disc().mass_weights().array() * u.values().array().abs().pow(q)).sum();
  return std::pow(s, 1.0 / q);
}

double gradient_norm_sq(const GraphFunction& u) {
  return form_value(u.disc().stiffness_matrix(), u.values());
}

double h1_norm_sq(const GraphFunction& u) { return gradient_norm_sq(u) + mass(u); }

Complex h1_inner(const GraphFunction& u, const GraphFunction& v) {
  const auto& d = u.disc();
  const ComplexVector kv = d.stiffness_matrix().cast<Complex>() * v.values();
  const ComplexVector mv = d.mass_weights().cast<Complex>().cwiseProduct(v.values());
  return u.values().dot(kv + mv);  // dot() conjugates the first argument
}

double gn_ratio(const GraphFunction& u, double p) {
  const double l2 = std::sqrt(mass(u));
  const double grad = std::sqrt(gradient_norm_sq(u));
  if (l2 == 0.0 || grad == 0.0) throw DomainError("Gagliardo-Nirenberg ratio undefined for u = 0");
  const double num = std::pow(lp_norm(u, p + 1.0), p + 1.0);
  return num / (std::pow(grad, 0.5 * (p - 1.0)) * std::pow(l2, 0.5 * (p + 3.0)));
}

void write_csv(std::ostream& os, const GraphFunction& u) {
  const auto& d = u.disc();
  os << "edge_id,x,re,im\n";
  os << std::setprecision(17);
  for (const auto& grid : d.edges()) {
    const auto& id = d.graph().edges()[grid.edge].id;
    for (int k = 0; k <= grid.intervals; ++k) {
      const Complex z = u.at(grid.edge, k);
      os << id << ',' << k * grid.h << ',' << z.real() << ',' << z.imag() << '\n';
    }
  }
}

GraphFunction read_csv(std::istream& is, DiscretizationPtr d) {
  struct Sample {
    double x;
    Complex z;
  };
  std::map<std::string, std::vector<Sample>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("edge_id", 0) == 0) continue;
    std::stringstream ss(line);
    std::string id, xs, re, im;
    if (!std::getline(ss, id, ',') || !std::getline(ss, xs, ',') ||
        !std::getline(ss, re, ',') || !std::getline(ss, im, ','))
      throw ParseError("csv line " + std::to_string(lineno) + ": expected 4 columns");
    try {
      rows[id].push_back({std::stod(xs), {std::stod(re), std::stod(im)}});
    } catch (const std::exception&) {
      throw ParseError("csv line " + std::to_string(lineno) + ": bad number");
    }
  }

  ComplexVector sum = ComplexVector::Zero(d->size());
  std::vector<int> count(static_cast<std::size_t>(d->size()), 0);
  for (const auto& grid : d->edges()) {
    const auto& id = d->graph().edges()[grid.edge].id;
    auto it = rows.find(id);
    if (it == rows.end()) throw ParseError("csv has no rows for edge '" + id + "'");
    auto& s = it->second;
    std::stable_sort(s.begin(), s.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
    for (int k = 0; k <= grid.intervals; ++k) {
      const int gi = grid.nodes[static_cast<std::size_t>(k)];
      if (gi < 0) continue;
      const double x = k * grid.h;
      Complex z;
      if (x <= s.front().x) {
        z = s.front().z;
      } else if (x >= s.back().x) {
        z = s.back().z;
      } else {
        const auto hi = std::upper_bound(s.begin(), s.end(), x,
                                         [](double v, const Sample& a) { return v < a.x; });
        const auto lo = hi - 1;
        const double t = (x - lo->x) / (hi->x - lo->x);
        z = (1.0 - t) * lo->z + t * hi->z;
      }
      sum[gi] += z;
      ++count[static_cast<std::size_t>(gi)];
    }
  }
  for (Eigen::Index i = 0; i < sum.size(); ++i) sum[i] /= count[static_cast<std::size_t>(i)];
  return GraphFunction(std::move(d), std::move(sum));
}

}  // namespace graphwave
