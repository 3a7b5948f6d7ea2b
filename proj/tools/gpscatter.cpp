// gpscatter: command-line front end.
//
//   gpscatter simulate    --eq gp|mkdv|kdv6 --init <spec> --dt <h> --t-final <T> [--snap k] --out <dir>
//   gpscatter scatter     --init <spec> [--tau-grid a:b:n] [--xi-grid a:b:n] [--eigen]
//   gpscatter energies    --init <spec> --s <s> --tau <tau'> [--lmax l]
//   gpscatter metric      --a <spec> --b <spec> --s <s>
//   gpscatter miura-check --init <spec> --t-final <T>
//   gpscatter verify      [--suite fast|full]
//
// <spec> is a preset (one, black, dark:<phi>, bump:<a>:<w>, kinkpair:<d>) or
// a field file. Exit codes: 0 ok, 1 numerical failure, 2 usage.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpscatter/acceptance.hpp"
#include "gpscatter/energies.hpp"
#include "gpscatter/evolution.hpp"
#include "gpscatter/io.hpp"
#include "gpscatter/lax.hpp"
#include "gpscatter/metric.hpp"
#include "gpscatter/miura.hpp"

namespace gs = gpscatter;
using json = nlohmann::ordered_json;

namespace {

constexpr int exit_ok = 0, exit_numerical = 1, exit_usage = 2;

struct GridSpec {
  double length = 40.0;
  int n = 1024;
  double x0 = -20.0;
};

gs::SampledFunction load(const std::string& spec, const GridSpec& gspec) {
  if (gs::is_preset_name(spec)) return gs::preset_samples(spec, gs::make_grid(gspec.length, gspec.n, gspec.x0));
  if (!std::filesystem::exists(spec))
    throw gs::InvalidArgument("'" + spec + "' is neither a preset nor an existing field file");
  return gs::read_field(spec);
}

std::vector<double> parse_range(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw gs::InvalidArgument(flag + " expects a:b:n, got '" + text + "'");
  double a = 0, b = 0;
  long n = 0;
  try {
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    n = std::stol(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::exception&) {
    throw gs::InvalidArgument(flag + ": malformed range '" + text + "'");
  }
  if (n < 1 || n > 100000) throw gs::InvalidArgument(flag + ": point count must lie in [1, 100000]");
  std::vector<double> out(n);
  for (long i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

void emit(json out, std::chrono::steady_clock::time_point t0) {
  out["meta"] = {{"timing", {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}}}};
  std::cout << out.dump() << "\n";
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string eq = "gp", init, out;
  double dt = 1e-3, t_final = 0.0, edge_tol = 1e-6;
  int snap = 0;
};

void write_csv_row(std::ostream& os, double t, const std::string& name, double value, double drift) {
  os << std::setprecision(17) << t << ',' << name << ',' << value << ',' << drift << '\n';
}

json run_simulate(const SimulateArgs& a, const GridSpec& g) {
  const auto f0 = load(a.init, g);
  gs::EvolveOptions opt;
  opt.snapshot_every = a.snap;
  gs::Trajectory tr;
  gs::FieldTolerance tol;
  tol.decay = a.edge_tol;
  if (a.eq == "gp") tr = gs::evolve_gp(gs::GPField(f0), a.dt, a.t_final, opt);
  else if (a.eq == "mkdv") tr = gs::evolve_mkdv(gs::GPField(f0), a.dt, a.t_final, opt);
  else tr = gs::evolve_kdv6(f0, a.dt, a.t_final, opt);

  std::filesystem::create_directories(a.out);
  json files = json::array();
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::setw(5) << std::setfill('0') << i << ".txt";
    gs::write_field((std::filesystem::path(a.out) / name.str()).string(), tr.states[i]);
    files.push_back({{"t", tr.times[i]}, {"file", name.str()}});
  }

  std::ofstream csv(std::filesystem::path(a.out) / "drift.csv");
  csv << "t,observable,value,rel_drift\n";
  json max_drift = json::object();
  if (a.eq == "kdv6") {
    // Real decaying data: mass and L2 norm of u.
    std::vector<std::pair<std::string, std::function<double(const gs::SampledFunction&)>>> obs{
        {"int_u", [](const gs::SampledFunction& u) { return gs::integrate(u).real(); }},
        {"int_u2", [](const gs::SampledFunction& u) { return std::pow(gs::l2_norm(u), 2); }}};
    for (const auto& [name, fn] : obs) {
      const double v0 = fn(tr.states.front());
      double worst = 0.0;
      for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const double v = fn(tr.states[i]);
        const double d = std::abs(v - v0) / std::max(std::abs(v0), 1.0);
        worst = std::max(worst, d);
        write_csv_row(csv, tr.times[i], name, v, d);
      }
      max_drift[name] = worst;
    }
  } else {
    const std::vector<gs::Observable> obs{
        {"mass", [](const gs::GPField& q) { return gs::mass_momentum(q).mass; }},
        {"momentum", [](const gs::GPField& q) { return gs::mass_momentum(q).momentum; }},
        {"E_GL", [](const gs::GPField& q) { return gs::ginzburg_landau(q); }},
        {"H3", [](const gs::GPField& q) { return gs::hamiltonian_h3(q); }}};
    const auto table = gs::conservation_monitor(tr, obs, tol);
    for (const auto& r : table.rows) write_csv_row(csv, r.t, r.observable, r.value, r.rel_drift);
    for (const auto& [name, d] : table.max_drift) max_drift[name] = d;
  }
  if (!csv) throw gs::InvalidArgument("cannot write drift.csv in '" + a.out + "'");

  return {{"command", "simulate"},
          {"equation", gs::equation_name(tr.equation)},
          {"dt", tr.dt},
          {"steps", tr.steps},
          {"substeps", tr.substeps},
          {"stiffness", tr.stiffness},
          {"snapshots", files},
          {"drift_csv", "drift.csv"},
          {"max_drift", max_drift}};
}

// ---------------------------------------------------------------------------

struct ScatterArgs {
  std::string init, tau_grid, xi_grid;
  bool eigen = false;
};

json eigen_json(const gs::EigenReport& rep) {
  json e = json::array();
  for (const auto& v : rep.eigenvalues) e.push_back({{"lambda", v.lambda}, {"z_im", v.z_im}});
  return e;
}

json run_scatter(const ScatterArgs& a, const GridSpec& g) {
  const gs::JostSolver solver{gs::GPField(load(a.init, g))};
  json out{{"command", "scatter"}, {"mass", solver.mass()}, {"momentum", solver.momentum()}};
  json cut = json::array(), axis = json::array();
  if (!a.xi_grid.empty()) {
    for (const auto& c : gs::cut_samples(solver, parse_range(a.xi_grid, "--xi-grid")))
      cut.push_back({{"xi", c.xi},
                     {"re", c.plus.real()},
                     {"im", c.plus.imag()},
                     {"re_minus", c.minus.real()},
                     {"im_minus", c.minus.imag()}});
  }
  if (!a.tau_grid.empty()) {
    for (const auto& s : gs::axis_samples(solver, parse_range(a.tau_grid, "--tau-grid")))
      axis.push_back({{"tau", s.tau},
                      {"re_log", s.log_plus.real()},
                      {"im_log", s.log_plus.imag()},
                      {"re_log_minus", s.log_minus.real()},
                      {"im_log_minus", s.log_minus.imag()}});
  }
  out["cut"] = cut;
  out["imag_axis"] = axis;
  out["eigenvalues"] = a.eigen ? eigen_json(gs::eigenvalues(solver)) : json::array();
  return out;
}

// ---------------------------------------------------------------------------

struct EnergiesArgs {
  std::string init;
  double s = 1.0, tau = 4.0;
  int lmax = 1;
};

json run_energies(const EnergiesArgs& a, const GridSpec& g) {
  if (!(a.s > 0.5)) throw gs::InvalidArgument("--s must exceed 1/2 for the energies (got " + std::to_string(a.s) + ")");
  if (!(a.tau >= 2.0)) throw gs::InvalidArgument("--tau must be >= 2");
  if (a.lmax < 0 || a.lmax > 4) throw gs::InvalidArgument("--lmax must lie in [0, 4]");
  const gs::GPField q(load(a.init, g));
  const gs::JostSolver solver(q);
  gs::EnergyCalculator calc(solver);
  json hams = json::array();
  for (int l = 0; l <= a.lmax; ++l) {
    const auto h = calc.hamiltonian(l);
    hams.push_back({{"l", l}, {"value", h.value}, {"cut", h.cut}, {"eigen", h.eigen}, {"tail_estimate", h.tail_estimate}});
  }
  const auto e = calc.energy(a.s, a.tau);
  const auto eq = calc.equivalence(a.s, a.tau);
  json mismatch = json::array();
  for (double m : e.coefficient_mismatch) mismatch.push_back(m);
  return {{"command", "energies"},
          {"direct", {{"mass", solver.mass()},
                      {"momentum", solver.momentum()},
                      {"ginzburg_landau", gs::ginzburg_landau(q)},
                      {"H3", gs::hamiltonian_h3(q)}}},
          {"eigenvalues", eigen_json(calc.eigen())},
          {"hamiltonians", hams},
          {"energy",
           {{"s", e.s},
            {"tau", e.tau},
            {"value", e.value},
            {"integer_shortcut", e.integer_shortcut},
            {"integral", e.integral},
            {"tail", e.tail},
            {"sum_part", e.sum_part},
            {"coefficient_mismatch", mismatch},
            {"g_evaluations", e.g_evaluations},
            {"cut_integral_form", calc.energy_trace(a.s, a.tau)}}},
          {"equivalence",
           {{"norm_squared", eq.norm_squared},
            {"ratio", eq.ratio},
            {"surrogate", eq.surrogate},
            {"constant", eq.constant}}}};
}

// ---------------------------------------------------------------------------

json run_metric(const std::string& fa, const std::string& fb, double s, const GridSpec& g) {
  if (!(s >= 0.0)) throw gs::InvalidArgument("--s must be non-negative");
  const auto r = gs::metric_distance(gs::GPField(load(fa, g)), gs::GPField(load(fb, g)), s);
  return {{"command", "metric"}, {"distance", r.distance}, {"tail_estimate", r.tail_estimate}, {"y_nodes", r.y_nodes}};
}

json run_miura(const std::string& init, double t_final, double dt, const GridSpec& g) {
  auto q0 = load(init, g);
  const auto rep = gs::mkdv_kdv_correspondence(q0, t_final, dt, 0);
  json pts = json::array();
  for (const auto& p : rep.points) pts.push_back({{"t", p.t}, {"mismatch_l2", p.mismatch_l2}});
  return {{"command", "miura-check"}, {"points", pts}, {"max_mismatch", rep.max_mismatch}};
}

// ---------------------------------------------------------------------------

int run_verify(const std::string& suite) {
  bool all = true;
  double total = 0.0;
  for (const auto& c : gs::acceptance::criteria()) {
    if (suite == "fast" && !c.fast) continue;
    const auto r = gs::acceptance::run(c);
    json values = json::array();
    for (const auto& m : r.values) {
      json v{{"name", m.name}, {"value", m.value}, {"pass", m.pass}};
      if (std::isfinite(m.limit)) v["limit"] = m.limit;
      values.push_back(v);
    }
    json line{{"criterion", r.id}, {"title", r.title}, {"pass", r.pass}, {"values", values}};
    if (!r.note.empty()) line["note"] = r.note;
    line["meta"] = {{"timing", {{"seconds", r.seconds}}}};
    std::cout << line.dump() << std::endl;
    all = all && r.pass;
    total += r.seconds;
  }
  std::cout << json{{"suite", suite}, {"pass", all}, {"meta", {{"timing", {{"seconds", total}}}}}}.dump() << std::endl;
  return all ? exit_ok : exit_numerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical inverse scattering for the Gross-Pitaevskii equation"};
  app.require_subcommand(1);
  int threads = 0;
  GridSpec grid;
  app.add_option("--threads", threads, "Cap on worker threads (also GPSCATTER_THREADS)")->check(CLI::PositiveNumber);

  auto grid_options = [&](CLI::App* sub) {
    sub->add_option("--L", grid.length, "Box length for presets")->check(CLI::PositiveNumber);
    sub->add_option("--n", grid.n, "Grid points for presets (power of two)")->check(CLI::Range(8, 1 << 20));
    sub->add_option("--x0", grid.x0, "Left edge for presets");
  };

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Evolve a field under GP, mKdV or KdV6");
  simulate->add_option("--eq", sim.eq, "Equation")->check(CLI::IsMember({"gp", "mkdv", "kdv6"}));
  simulate->add_option("--init", sim.init, "Preset or field file")->required();
  simulate->add_option("--dt", sim.dt, "Time step")->check(CLI::PositiveNumber);
  simulate->add_option("--t-final", sim.t_final, "Final time")->required()->check(CLI::NonNegativeNumber);
  simulate->add_option("--snap", sim.snap, "Steps between snapshots (0: ends only)")->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--edge-tol", sim.edge_tol, "Margin flatness accepted for evolved states")
      ->check(CLI::PositiveNumber);
  grid_options(simulate);

  ScatterArgs sc;
  auto* scatter = app.add_subcommand("scatter", "Transmission coefficient and bound states");
  scatter->add_option("--init", sc.init, "Preset or field file")->required();
  scatter->add_option("--tau-grid", sc.tau_grid, "Imaginary-axis ladder a:b:n (tau >= 2)");
  scatter->add_option("--xi-grid", sc.xi_grid, "Cut samples a:b:n (xi != 0)");
  scatter->add_flag("--eigen", sc.eigen, "Locate bound states");
  grid_options(scatter);

  EnergiesArgs en;
  auto* energies = app.add_subcommand("energies", "Trace-formula Hamiltonians and the energy E^s_tau");
  energies->add_option("--init", en.init, "Preset or field file")->required();
  energies->add_option("--s", en.s, "Regularity s > 1/2")->required();
  energies->add_option("--tau", en.tau, "tau' >= 2")->required();
  energies->add_option("--lmax", en.lmax, "Highest Hamiltonian index");
  grid_options(energies);

  std::string ma, mb;
  double ms = 1.0;
  auto* metric = app.add_subcommand("metric", "Gauge-invariant distance d^s");
  metric->add_option("--a", ma, "First field")->required();
  metric->add_option("--b", mb, "Second field")->required();
  metric->add_option("--s", ms, "Sobolev exponent")->required();
  grid_options(metric);

  std::string mi_init;
  double mi_t = 0.25, mi_dt = 1e-3;
  auto* miura = app.add_subcommand("miura-check", "mKdV / KdV6 correspondence through the Miura map");
  miura->add_option("--init", mi_init, "Real preset or field file")->required();
  miura->add_option("--t-final", mi_t, "Final time")->required()->check(CLI::NonNegativeNumber);
  miura->add_option("--dt", mi_dt, "Time step")->check(CLI::PositiveNumber);
  grid_options(miura);

  std::string suite = "fast";
  auto* verify = app.add_subcommand("verify", "Run the acceptance suite");
  verify->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }
  if (threads > 0) gs::set_max_threads(threads);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (*simulate) emit(run_simulate(sim, grid), t0);
    else if (*scatter) emit(run_scatter(sc, grid), t0);
    else if (*energies) emit(run_energies(en, grid), t0);
    else if (*metric) emit(run_metric(ma, mb, ms, grid), t0);
    else if (*miura) emit(run_miura(mi_init, mi_t, mi_dt, grid), t0);
    else if (*verify) return run_verify(suite);
  } catch (const gs::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const gs::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_ok;
}
