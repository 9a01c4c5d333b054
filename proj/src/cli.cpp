#include "graphwave/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "graphwave/closed_form.hpp"
#include "graphwave/discretization.hpp"
#include "graphwave/errors.hpp"
#include "graphwave/evolution.hpp"
#include "graphwave/graph.hpp"
#include "graphwave/ground_state.hpp"
#include "graphwave/spectral.hpp"
#include "json.hpp"

namespace graphwave::cli {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

/// Shared state of one invocation: resolved parameters and output sink.
struct Run {
  std::string command;
  std::string out_dir;
  std::uint64_t seed = 1;
  json params = json::object();
  std::string graph_hash;
  std::string started;
  std::vector<std::string> artifacts;

  bool has_out() const { return !out_dir.empty(); }

  std::ofstream open_artifact(const std::string& name) {
    fs::create_directories(out_dir);
    artifacts.push_back(name);
    std::ofstream f(fs::path(out_dir) / name, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + name + "' in '" + out_dir + "'");
    return f;
  }

  void write_manifest() {
    if (!has_out()) return;
    json m;
    m["schema_version"] = kSchemaVersion;
    m["kind"] = "run_manifest";
    m["command"] = command;
    m["parameters"] = params;
    m["graph_hash"] = graph_hash;
    m["tool_version"] = std::string(kToolVersion);
    m["seed"] = seed;
    m["artifacts"] = artifacts;
    m["timestamps"] = {{"started", started}, {"finished", utc_now()}};
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
  }
};

json summary_header(const Run& run) {
  return json{{"schema_version", kSchemaVersion}, {"command", run.command}};
}

MetricGraph load_graph(Run& run, const std::string& path) {
  const std::string text = read_file(path);
  run.graph_hash = hex64(fnv1a64(text));
  run.params["graph"] = path;
  return parse_graph(text);
}

TruncationBoundary parse_boundary(const std::string& s) {
  if (s == "dirichlet") return TruncationBoundary::Dirichlet;
  if (s == "neumann") return TruncationBoundary::Neumann;
  throw UsageError("--boundary must be dirichlet or neumann");
}

json diagnostics_json(const MinimizerDiagnostics& d) {
  return json{{"positivity_ok", d.positivity_ok},
              {"phase_constant_ok", d.phase_constant_ok},
              {"de_inequality_ok", d.de_inequality_ok},
              {"ball_interior_ok", d.ball_interior_ok},
              {"theta", d.theta},
              {"max_imag", d.max_imag},
              {"min_real", d.min_real},
              {"de_margin", d.de_margin}};
}

struct StarParams {
  int n;
  double gamma;
  double truncation;
};

StarParams star_params(const MetricGraph& g) {
  const bool star = g.vertices().size() == 1 &&
                    std::all_of(g.edges().begin(), g.edges().end(), [](const Edge& e) {
                      return e.external() && e.potential.is_zero();
                    });
  if (!star) throw DomainError("this command needs a star graph with zero potential");
  const double trunc = *g.edges().front().truncation;
  for (const auto& e : g.edges()) {
    if (*e.truncation != trunc) throw DomainError("star edges must share one truncation length");
  }
  return {static_cast<int>(g.edges().size()), g.vertices().front().alpha, trunc};
}

// -------------------------------------------------------------------------
// spectrum

struct SpectrumArgs {
  std::string graph;
  double h = 0.01;
  double tol = 1e-10;
  std::string boundary = "dirichlet";
  std::string dump_psi0;
};

void run_spectrum(Run& run, const SpectrumArgs& a, std::ostream& out) {
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"h", a.h}, {"tol", a.tol}, {"boundary", a.boundary}});
  const auto d = Discretization::build(g, a.h, parse_boundary(a.boundary));
  SpectralOptions opts;
  opts.tol = a.tol;
  const auto pair = ground_state(d, opts);
  const auto rep = spectral_gap_report(pair, a.tol);
  if (!a.dump_psi0.empty()) {
    std::ofstream f(a.dump_psi0, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + a.dump_psi0 + "'");
    write_csv(f, pair.psi0);
  }
  if (run.has_out()) {
    auto f = run.open_artifact("psi0.csv");
    write_csv(f, pair.psi0);
  }
  json j = summary_header(run);
  j.update({{"lambda0", pair.lambda0},
            {"gap", pair.gap},
            {"residual", pair.residual},
            {"iterations", pair.iterations},
            {"nodes", d->size()},
            {"isolation_certified", rep.isolation_certified},
            {"isolation_message", rep.message}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

// -------------------------------------------------------------------------
// minimize

struct MinimizeArgs {
  std::string graph;
  double p = 6.0;
  double c = 0.5;
  double r = 1.0;
  double h = 0.01;
  double tol = 1e-9;
  double tau = 0.0;
  long max_iter = 20000;
  std::string init;
  std::string boundary = "dirichlet";
};

json minimizer_json(const MinimizerResult& res) {
  return json{{"energy", res.energy},
              {"omega", res.omega},
              {"lambda0", res.lambda0},
              {"g_norm_sq", res.g_norm_sq},
              {"c", res.c},
              {"r", res.r},
              {"p", res.p},
              {"iterations", res.iterations},
              {"gradient_residual", res.gradient_residual},
              {"diagnostics", diagnostics_json(res.diagnostics)}};
}

void run_minimize(Run& run, const MinimizeArgs& a, std::ostream& out) {
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"p", a.p}, {"c", a.c}, {"r", a.r}, {"h", a.h}, {"tol", a.tol},
                     {"tau", a.tau}, {"max_iter", a.max_iter}, {"init", a.init},
                     {"boundary", a.boundary}});
  const auto d = Discretization::build(g, a.h, parse_boundary(a.boundary));
  MinimizeOptions opts;
  opts.tol = a.tol;
  opts.tau = a.tau;
  opts.max_iter = a.max_iter;
  if (!a.init.empty()) {
    std::ifstream f(a.init);
    if (!f) throw UsageError("cannot open '" + a.init + "'");
    opts.init = read_csv(f, d);
  }
  const auto res = minimize(d, a.p, a.c, a.r, opts);
  if (run.has_out()) {
    auto f = run.open_artifact("minimizer.csv");
    write_csv(f, res.phi);
  }
  json j = summary_header(run);
  j.update(minimizer_json(res));
  out << std::setprecision(17) << j.dump(2) << '\n';
}

// -------------------------------------------------------------------------
// closed-form and mass-curve

struct ClosedFormArgs {
  int n = 3;
  double gamma = 1.0;
  double p = 5.0;
  double omega = 1.0;
  int j = 0;
  double truncation = 40.0;
  double h = 0.01;
};

void run_closed_form(Run& run, const ClosedFormArgs& a, std::ostream& out) {
  run.params.update({{"N", a.n}, {"gamma", a.gamma}, {"p", a.p}, {"omega", a.omega},
                     {"j", a.j}, {"L", a.truncation}, {"h", a.h}});
  const ClosedFormWave w(a.n, a.gamma, a.p, a.omega, a.j);
  if (run.has_out()) {
    const auto d = Discretization::build(make_star({a.n, a.gamma, a.truncation}), a.h);
    auto f = run.open_artifact("profile.csv");
    write_csv(f, evaluate_wave(w, d));
  }
  json j = summary_header(run);
  j.update({{"a_j", w.shift()},
            {"rapidity", w.rapidity()},
            {"vertex_value", w.vertex_value()},
            {"amplitude", w.amplitude()},
            {"mass", w.mass()},
            {"energy", w.energy()}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

struct MassCurveArgs {
  int n = 3;
  double gamma = 1.0;
  double p = 6.0;
  std::vector<double> omega_range;
  int count = 200;
};

void run_mass_curve(Run& run, const MassCurveArgs& a, std::ostream& out) {
  if (a.omega_range.size() != 2 || !(a.omega_range[1] > a.omega_range[0]))
    throw UsageError("--omega-range needs two increasing values");
  if (a.count < 2) throw UsageError("--count must be >= 2");
  run.params.update({{"N", a.n}, {"gamma", a.gamma}, {"p", a.p},
                     {"omega_range", a.omega_range}, {"count", a.count}});
  std::vector<std::pair<double, double>> rows;
  for (int k = 0; k < a.count; ++k) {
    const double om = a.omega_range[0] + (a.omega_range[1] - a.omega_range[0]) * k / (a.count - 1);
    rows.emplace_back(om, mass_curve_R(a.n, a.gamma, a.p, om));
  }
  if (run.has_out()) {
    auto f = run.open_artifact("mass_curve.csv");
    f << "omega,R\n" << std::setprecision(17);
    for (const auto& [om, r] : rows) f << om << ',' << r << '\n';
  }
  const auto window = detect_monotone_window(a.n, a.gamma, a.p);
  json j = summary_header(run);
  j.update({{"threshold", window.omega_min},
            {"window_omega_max", window.omega_max},
            {"window_mass_max", window.mass_max},
            {"window_bounded", window.bounded},
            {"points", rows.size()}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

// -------------------------------------------------------------------------
// evolve and stability

struct EvolveArgs {
  std::string graph;
  double p = 5.0;
  double h = 0.01;
  double dt = 0.0;
  double t_final = 1.0;
  std::string init;
  long sample_every = 10;
  bool linear = false;
};

void run_evolve(Run& run, const EvolveArgs& a, std::ostream& out) {
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"p", a.p}, {"h", a.h}, {"dt", a.dt}, {"T", a.t_final},
                     {"init", a.init}, {"sample_every", a.sample_every}, {"linear", a.linear}});
  const auto d = Discretization::build(g, a.h);
  std::ifstream f(a.init);
  if (!f) throw UsageError("cannot open '" + a.init + "'");
  const GraphFunction u0 = read_csv(f, d);
  EvolveOptions opts;
  opts.dt = a.dt;
  opts.t_final = a.t_final;
  opts.sample_every = a.sample_every;
  opts.nonlinear = !a.linear;
  const auto trace = evolve(u0, a.p, opts);
  if (run.has_out()) {
    auto tf = run.open_artifact("trace.csv");
    tf << "t,mass,energy,sup_norm\n" << std::setprecision(17);
    for (const auto& r : trace) tf << r.t << ',' << r.mass << ',' << r.energy << ',' << r.sup_norm << '\n';
  }
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  for (const auto& r : trace) {
    mass_drift = std::max(mass_drift, std::abs(r.mass - trace.front().mass) / trace.front().mass);
    energy_drift = std::max(energy_drift, std::abs(r.energy - trace.front().energy) /
                                              std::abs(trace.front().energy));
  }
  json j = summary_header(run);
  j.update({{"samples", trace.size()},
            {"t_final", trace.back().t},
            {"max_relative_mass_drift", mass_drift},
            {"max_relative_energy_drift", energy_drift}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

struct StabilityArgs {
  std::string graph;
  double p = 6.0;
  double h = 0.02;
  double dt = 0.0;
  double t_final = 20.0;
  double delta = 1e-2;
  std::string ref;
  double c = 0.5;
  double r = 1.0;
  std::string mode = "bump";
  long sample_every = 10;
};

void run_stability(Run& run, const StabilityArgs& a, std::ostream& out) {
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"p", a.p}, {"h", a.h}, {"dt", a.dt}, {"T", a.t_final},
                     {"delta", a.delta}, {"ref", a.ref}, {"c", a.c}, {"r", a.r},
                     {"mode", a.mode}, {"sample_every", a.sample_every}});
  const auto d = Discretization::build(g, a.h);
  const auto ground = ground_state(d);
  GraphFunction ref = ground.psi0;
  if (!a.ref.empty()) {
    std::ifstream f(a.ref);
    if (!f) throw UsageError("cannot open '" + a.ref + "'");
    ref = read_csv(f, d);
  } else {
    MinimizeOptions opts;
    opts.ground = ground;
    ref = minimize(d, a.p, a.c, a.r, opts).phi;
  }
  Perturbation pert;
  pert.delta = a.delta;
  pert.seed = run.seed;
  if (a.mode == "bump") pert.mode = PerturbationMode::EigenfunctionBump;
  else if (a.mode == "noise") pert.mode = PerturbationMode::MultiplicativeNoise;
  else throw UsageError("--mode must be bump or noise");
  const double dt = a.dt > 0.0 ? a.dt : 0.5 * d->max_step();
  const auto trace = stability_experiment(ref, ground.psi0, a.p, pert, a.t_final, dt, a.sample_every);
  if (run.has_out()) {
    auto f = run.open_artifact("stability.csv");
    f << "t,orbit_distance,mass_drift,energy_drift\n" << std::setprecision(17);
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
      f << trace.times[k] << ',' << trace.orbit_distance[k] << ',' << trace.mass_drift[k] << ','
        << trace.energy_drift[k] << '\n';
    }
  }
  const double sup = *std::max_element(trace.orbit_distance.begin(), trace.orbit_distance.end());
  json j = summary_header(run);
  j.update({{"initial_distance", trace.initial_distance},
            {"sup_distance", sup},
            {"reference_h1", trace.reference_h1},
            {"sup_over_delta_h1", sup / (a.delta * trace.reference_h1)},
            {"final_mass_drift", trace.mass_drift.back()},
            {"final_energy_drift", trace.energy_drift.back()}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

// -------------------------------------------------------------------------
// validate

struct ValidateArgs {
  std::string graph;
  double p = 5.0;
  double h = 0.01;
  double omega = 1.0;
  std::string format = "table";
};

void run_validate(Run& run, const ValidateArgs& a, std::ostream& out, bool& all_pass) {
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"p", a.p}, {"h", a.h}, {"omega", a.omega}, {"format", a.format}});
  const StarParams s = star_params(g);
  json checks = json::array();
  auto check = [&](const std::string& name, double value, double tol, bool pass) {
    checks.push_back({{"name", name}, {"value", value}, {"tolerance", tol}, {"pass", pass}});
  };

  const auto d = Discretization::build(g, a.h);
  const auto d2 = Discretization::build(g, 0.5 * a.h);
  const auto ground = ground_state(d);
  const double exact = s.gamma * s.gamma / (s.n * s.n);
  const double err = std::abs(ground.lambda0 - exact);
  check("lambda0 = gamma^2/N^2", err, 1e-4, err <= 1e-4);

  const ClosedFormWave w(s.n, s.gamma, a.p, a.omega);
  const auto phi = evaluate_wave(w, d);
  const auto phi2 = evaluate_wave(w, d2);
  const double r1 = stationarity_defect(phi, a.p, a.omega);
  const double r2 = stationarity_defect(phi2, a.p, a.omega);
  check("stationarity defect order h^2 (ratio)", r1 / r2, 3.5, r1 / r2 >= 3.5);
  const double b1 = vertex_balance(phi, 0);
  const double b2 = vertex_balance(phi2, 0);
  check("vertex balance order h (ratio)", b1 / b2, 1.8, b1 / b2 >= 1.8);

  const double mass_err = std::abs(mass(phi) - mass_curve_R(s.n, s.gamma, a.p, a.omega));
  check("sampled mass = R(omega)", mass_err, 1e-4, mass_err <= 1e-4);
  const double om_err = std::abs(lagrange_multiplier(phi, a.p) - a.omega);
  check("multiplier of closed form = omega", om_err, 1e-3, om_err <= 1e-3);
  const double h0 = std::abs(h_integral(0.0, 5.0) - std::numbers::pi / 2.0);
  check("h(0) = pi/2 at p = 5", h0, 1e-10, h0 <= 1e-10);

  const double c = 0.5 * feasibility_bound(ground.lambda0, 1.0) * 0.1;
  const GraphFunction psi_c(d, ground.psi0.values() * std::sqrt(c));
  const double margin = -0.5 * ground.lambda0 * c - energy(psi_c, a.p).total;
  check("E(sqrt(c) psi0) < -lambda0 c / 2", margin, 0.0, margin > 0.0);

  all_pass = std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["pass"].get<bool>(); });
  if (a.format == "table") {
    out << std::left << std::setw(42) << "check" << std::setw(14) << "value" << std::setw(12)
        << "tolerance" << "result\n";
    for (const auto& c : checks) {
      out << std::left << std::setw(42) << c["name"].get<std::string>() << std::setw(14)
          << std::setprecision(6) << c["value"].get<double>() << std::setw(12)
          << c["tolerance"].get<double>() << (c["pass"].get<bool>() ? "PASS" : "FAIL") << '\n';
    }
  } else {
    json j = summary_header(run);
    j.update({{"checks", checks}, {"all_pass", all_pass}});
    out << std::setprecision(17) << j.dump(2) << '\n';
  }
}

// -------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string graph;
  std::vector<double> p{6.0};
  double c_min = 0.1;
  double c_max = 1.0;
  int count = 8;
  double r = 1.0;
  double h = 0.02;
  double tol = 1e-9;
  int threads = 0;
};

struct SweepRow {
  double p = 0.0;
  double c = 0.0;
  std::string status = "ok";
  double omega = 0.0;
  double energy = 0.0;
  double g_norm_sq = 0.0;
  long iterations = 0;
  MinimizerDiagnostics diag;
};

void run_sweep(Run& run, const SweepArgs& a, std::ostream& out) {
  if (a.count <= 0 || a.p.empty()) throw UsageError("sweep grid is empty");
  if (!(a.c_min > 0.0) || !(a.c_max >= a.c_min)) throw UsageError("need 0 < c-min <= c-max");
  const MetricGraph g = load_graph(run, a.graph);
  run.params.update({{"p", a.p}, {"c_min", a.c_min}, {"c_max", a.c_max}, {"count", a.count},
                     {"r", a.r}, {"h", a.h}, {"tol", a.tol}});
  const auto d = Discretization::build(g, a.h);
  const auto ground = ground_state(d);

  std::vector<SweepRow> rows;
  for (double p : a.p) {
    for (int k = 0; k < a.count; ++k) {
      const double c = a.count == 1 ? a.c_min
                                    : a.c_min * std::pow(a.c_max / a.c_min,
                                                         static_cast<double>(k) / (a.count - 1));
      SweepRow row;
      row.p = p;
      row.c = c;
      rows.push_back(row);
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        MinimizeOptions opts;
        opts.tol = a.tol;
        opts.ground = ground;
        const auto res = minimize(d, row.p, row.c, a.r, opts);
        row.omega = res.omega;
        row.energy = res.energy;
        row.g_norm_sq = res.g_norm_sq;
        row.iterations = res.iterations;
        row.diag = res.diagnostics;
      } catch (const FeasibilityError&) {
        row.status = "infeasible";
      } catch (const BallExitError&) {
        row.status = "ball_exit";
      } catch (const SolverError&) {
        row.status = "no_convergence";
      } catch (const Error& e) {
        row.status = "error";
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_threads =
      std::min<unsigned>(a.threads > 0 ? static_cast<unsigned>(a.threads) : hw,
                         static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  json table = json::array();
  for (const auto& row : rows) {
    table.push_back({{"p", row.p}, {"c", row.c}, {"status", row.status}, {"omega", row.omega},
                     {"energy", row.energy}, {"g_norm_sq", row.g_norm_sq},
                     {"iterations", row.iterations},
                     {"de_inequality_ok", row.diag.de_inequality_ok},
                     {"positivity_ok", row.diag.positivity_ok},
                     {"phase_constant_ok", row.diag.phase_constant_ok},
                     {"ball_interior_ok", row.diag.ball_interior_ok}});
  }
  if (run.has_out()) {
    auto f = run.open_artifact("sweep.csv");
    f << "p,c,status,omega,energy,g_norm_sq,iterations,de_inequality_ok,positivity_ok,"
         "phase_constant_ok,ball_interior_ok\n"
      << std::setprecision(17);
    for (const auto& row : rows) {
      f << row.p << ',' << row.c << ',' << row.status << ',' << row.omega << ',' << row.energy
        << ',' << row.g_norm_sq << ',' << row.iterations << ',' << row.diag.de_inequality_ok
        << ',' << row.diag.positivity_ok << ',' << row.diag.phase_constant_ok << ','
        << row.diag.ball_interior_ok << '\n';
    }
  }
  json j = summary_header(run);
  j.update({{"lambda0", ground.lambda0}, {"rows", table}});
  out << std::setprecision(17) << j.dump(2) << '\n';
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"graphwave: NLS standing waves on metric graphs"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.fallthrough();
  Run run;
  run.started = utc_now();
  app.add_option("--out", run.out_dir, "Directory for CSV artifacts and the run manifest");
  app.add_option("--seed", run.seed, "Seed for perturbation noise");

  SpectrumArgs spec;
  auto* s_spec = app.add_subcommand("spectrum", "Linear ground state lambda0, psi0 and gap");
  s_spec->add_option("graph", spec.graph)->required();
  s_spec->add_option("--h", spec.h);
  s_spec->add_option("--tol", spec.tol);
  s_spec->add_option("--boundary", spec.boundary);
  s_spec->add_option("--dump-psi0", spec.dump_psi0);

  MinimizeArgs mini;
  auto* s_min = app.add_subcommand("minimize", "Local constrained energy minimizer");
  s_min->add_option("graph", mini.graph)->required();
  s_min->add_option("--p", mini.p);
  s_min->add_option("--c", mini.c)->required();
  s_min->add_option("--r", mini.r);
  s_min->add_option("--h", mini.h);
  s_min->add_option("--tol", mini.tol);
  s_min->add_option("--tau", mini.tau);
  s_min->add_option("--max-iter", mini.max_iter);
  s_min->add_option("--init", mini.init);
  s_min->add_option("--boundary", mini.boundary);

  ClosedFormArgs cf;
  auto* s_cf = app.add_subcommand("closed-form", "Exact star-graph standing wave");
  s_cf->add_option("--N", cf.n);
  s_cf->add_option("--gamma", cf.gamma);
  s_cf->add_option("--p", cf.p);
  s_cf->add_option("--omega", cf.omega)->required();
  s_cf->add_option("--j", cf.j);
  s_cf->add_option("--L", cf.truncation);
  s_cf->add_option("--h", cf.h);

  MassCurveArgs mc;
  auto* s_mc = app.add_subcommand("mass-curve", "Mass R(omega) of the ground branch");
  s_mc->add_option("--N", mc.n);
  s_mc->add_option("--gamma", mc.gamma);
  s_mc->add_option("--p", mc.p);
  s_mc->add_option("--omega-range", mc.omega_range)->expected(2)->required();
  s_mc->add_option("--count", mc.count);

  EvolveArgs ev;
  auto* s_ev = app.add_subcommand("evolve", "Time evolution with mass/energy trace");
  s_ev->add_option("graph", ev.graph)->required();
  s_ev->add_option("--p", ev.p);
  s_ev->add_option("--h", ev.h);
  s_ev->add_option("--dt", ev.dt);
  s_ev->add_option("--T", ev.t_final);
  s_ev->add_option("--init", ev.init)->required();
  s_ev->add_option("--sample-every", ev.sample_every);
  s_ev->add_flag("--linear", ev.linear);

  StabilityArgs st;
  auto* s_st = app.add_subcommand("stability", "Orbital stability experiment");
  s_st->add_option("graph", st.graph)->required();
  s_st->add_option("--p", st.p);
  s_st->add_option("--h", st.h);
  s_st->add_option("--dt", st.dt);
  s_st->add_option("--T", st.t_final);
  s_st->add_option("--delta", st.delta);
  s_st->add_option("--ref", st.ref);
  s_st->add_option("--c", st.c);
  s_st->add_option("--r", st.r);
  s_st->add_option("--mode", st.mode);
  s_st->add_option("--sample-every", st.sample_every);

  ValidateArgs va;
  auto* s_va = app.add_subcommand("validate", "Oracle checks on a star graph");
  s_va->add_option("graph", va.graph)->required();
  s_va->add_option("--p", va.p);
  s_va->add_option("--h", va.h);
  s_va->add_option("--omega", va.omega);
  s_va->add_option("--format", va.format)->check(CLI::IsMember({"table", "json"}));

  SweepArgs sw;
  auto* s_sw = app.add_subcommand("sweep", "Minimizers over a geometric c grid");
  s_sw->add_option("graph", sw.graph)->required();
  s_sw->add_option("--p", sw.p);
  s_sw->add_option("--c-min", sw.c_min);
  s_sw->add_option("--c-max", sw.c_max);
  s_sw->add_option("--count", sw.count);
  s_sw->add_option("--r", sw.r);
  s_sw->add_option("--h", sw.h);
  s_sw->add_option("--tol", sw.tol);
  s_sw->add_option("--threads", sw.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    bool ok = true;
    if (*s_spec) {
      run.command = "spectrum";
      run_spectrum(run, spec, out);
    } else if (*s_min) {
      run.command = "minimize";
      run_minimize(run, mini, out);
    } else if (*s_cf) {
      run.command = "closed-form";
      run_closed_form(run, cf, out);
    } else if (*s_mc) {
      run.command = "mass-curve";
      run_mass_curve(run, mc, out);
    } else if (*s_ev) {
      run.command = "evolve";
      run_evolve(run, ev, out);
    } else if (*s_st) {
      run.command = "stability";
      run_stability(run, st, out);
    } else if (*s_va) {
      run.command = "validate";
      run_validate(run, va, out, ok);
    } else if (*s_sw) {
      run.command = "sweep";
      run_sweep(run, sw, out);
    }
    run.params["seed"] = run.seed;
    run.write_manifest();
    return ok ? kExitOk : kExitDomain;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const BlowUpError& e) {
    err << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"graphwave"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace graphwave::cli
