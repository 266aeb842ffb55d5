#include "ogr/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ogr/analytic.hpp"
#include "ogr/bernoulli.hpp"
#include "ogr/error.hpp"
#include "ogr/gsolver.hpp"
#include "ogr/orlicz.hpp"
#include "ogr/probes.hpp"
#include "ogr/young.hpp"

namespace ogr::cli {

using io::json;
namespace fs = std::filesystem;

namespace {

std::string describe(const std::string& cmd) {
  static const std::map<std::string, std::string> text{
      {"young-check", "indices, doubling and split-sum checks of a Young function"},
      {"solve", "Dirichlet problem for the g-Laplacian from a problem file"},
      {"replace", "g-harmonic replacement of a field on a ball"},
      {"energy", "modular and Luxemburg norm of a field and its gradient"},
      {"almost-min", "compare J_G against trace-preserving competitors"},
      {"scaling", "scaling identity of J_G under x -> r x"},
      {"dichotomy", "energy-drop vs flatness alternatives on a ball"},
      {"iterate", "flatness improvement iteration over shrinking balls"},
      {"campanato", "modular Campanato seminorm and Hoelder certificate"},
      {"bmo", "borderline BMO* seminorm with the density bound"},
      {"lipschitz", "recurrence and gradient ratio of the Lipschitz scheme"}};
  return text.at(cmd);
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"young-check", "solve",    "replace", "energy",
                                              "almost-min",  "scaling",  "dichotomy", "iterate",
                                              "campanato",   "bmo",      "lipschitz"};
  return names;
}

namespace {

json point_json(const Point& p, int dim) { return dim == 2 ? json{p[0], p[1]} : json{p[0]}; }

json default_probe(const std::string& cmd) {
  if (cmd == "young-check") return {{"samples", 1000}, {"t_min", 1e-3}, {"t_max", 1e3}};
  if (cmd == "solve") return json::object();
  if (cmd == "replace") return {{"center", {0.0, 0.0}}, {"radius", 0.5}};
  if (cmd == "energy") return {{"center", {0.0, 0.0}}, {"radius", 0.5}};
  if (cmd == "almost-min") return {{"center", {0.0, 0.0}}, {"radius", 0.5}, {"kappa", 0.0}, {"beta", 1.0}};
  if (cmd == "scaling") {
    return {{"r", 0.5}, {"centers", {{0.0, 0.0}, {0.25, 0.125}}}, {"radii", {0.25, 0.5}}, {"tol", 1e-3}};
  }
  if (cmd == "dichotomy") {
    return {{"center", {0.0, 0.0}}, {"radius", 1.0}, {"epsilon", 0.05}, {"eta", 0.25},
            {"M", 1.0},             {"C_flat", 2.0}, {"C0", 2.0}};
  }
  if (cmd == "iterate") {
    return {{"center", {0.0, 0.0}}, {"radius", 1.0}, {"rho", 0.5}, {"alpha", 0.5},
            {"epsilon", 0.05},      {"K", 8}};
  }
  if (cmd == "campanato") return {{"mode", "inf"}, {"stride", 4}};
  if (cmd == "bmo") return {{"stride", 4}};
  if (cmd == "lipschitz") {
    return {{"center", {0.0, 0.0}}, {"radius", 1.0}, {"eta", 0.25}, {"M", 1.0}, {"K", 6}, {"epsilon", 0.05}};
  }
  throw ParseError("command", "unknown command '" + cmd + "'");
}

json default_field(const std::string& cmd) {
  if (cmd == "campanato" || cmd == "bmo") return {{"source", "analytic"}, {"id", "sqrt_abs"}};
  if (cmd == "dichotomy") return {{"source", "analytic"}, {"id", "linear"}};
  if (cmd == "iterate") return {{"source", "analytic"}, {"id", "tilted_power"}};
  if (cmd == "almost-min") return {{"source", "analytic"}, {"id", "one_phase"}};
  if (cmd == "lipschitz") {
    // one-phase profile smoothed by its replacement on the unit ball
    return {{"source", "solver"},
            {"problem",
             {{"region", {{"kind", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}}},
              {"data", {{"source", "analytic"}, {"id", "one_phase"}}}}}};
  }
  return {{"source", "analytic"}, {"id", "smooth_random"}};
}

Point point_of(const json& j, const std::string& key, const std::string& path) {
  return io::get_point(j, key, path, {0.0, 0.0});
}

std::vector<Point> points_of(const json& j, const std::string& key, const std::string& path) {
  std::vector<Point> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ParseError(path + "." + key, "expected an array of points");
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    out.push_back(io::get_point(json{{"x", j[key][i]}}, "x", path + "." + key + "[" + std::to_string(i) + "]",
                                {0.0, 0.0}));
  }
  return out;
}

std::vector<double> numbers_of(const json& j, const std::string& key, const std::string& path) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ParseError(path + "." + key, "expected an array");
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ParseError(path + "." + key, "expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

AnalyticParams analytic_params(const json& desc, const std::string& path, double p_default,
                               std::uint64_t seed) {
  AnalyticParams P;
  P.q = io::get_point(desc, "q", path, P.q);
  P.b = io::get_number(desc, "b", path, P.b);
  P.c = io::get_number(desc, "c", path, P.c);
  P.s = io::get_number(desc, "s", path, P.s);
  P.p = io::get_number(desc, "p", path, p_default);
  P.r_in = io::get_number(desc, "r_in", path, P.r_in);
  P.r_out = io::get_number(desc, "r_out", path, P.r_out);
  P.modes = io::get_int(desc, "modes", path, P.modes);
  P.seed = desc.contains("seed") ? desc["seed"].get<std::uint64_t>() : seed;
  return P;
}

struct Context {
  YoungFunction F;
  Grid grid;
  std::uint64_t seed = 0;
};

struct ProblemRun {
  SolveResult result;
  std::optional<double> linf_error;
};

ScalarField load_field(const json& desc, const Context& ctx, const std::string& path);

DirichletProblem make_problem(const json& pj, const Context& ctx, const std::string& path,
                              std::optional<ScalarField>& oracle) {
  Context local = ctx;
  if (pj.contains("young")) local.F = io::young_from_json(pj["young"], path + ".young");
  if (pj.contains("grid")) local.grid = io::grid_from_json(pj["grid"], path + ".grid");
  if (!pj.contains("region")) throw ParseError(path + ".region", "missing region");
  if (!pj.contains("data")) throw ParseError(path + ".data", "missing boundary data");
  Region region = io::region_from_json(pj["region"], local.grid, path + ".region");
  ScalarField data = load_field(pj["data"], local, path + ".data");
  if (!(data.grid() == local.grid)) throw ParseError(path + ".data", "grid differs from the problem grid");
  if (pj.contains("oracle")) oracle = load_field(pj["oracle"], local, path + ".oracle");
  DirichletProblem P{local.F, std::move(region), std::move(data), std::nullopt};
  if (pj.contains("eps_reg")) P.eps_reg = io::get_number(pj, "eps_reg", path);
  P.tol = io::get_number(pj, "tol", path, P.tol);
  P.residual_tol = io::get_number(pj, "residual_tol", path, P.residual_tol);
  P.max_iters = io::get_int(pj, "max_iters", path, P.max_iters);
  return P;
}

json problem_json(const json& v, const std::string& path) {
  if (v.is_string()) return io::load_json(v.get<std::string>());
  if (v.is_object()) return v;
  throw ParseError(path, "expected a problem object or a path");
}

ProblemRun run_problem(const json& pj, const Context& ctx, const std::string& path) {
  std::optional<ScalarField> oracle;
  DirichletProblem P = make_problem(pj, ctx, path, oracle);
  ProblemRun out{solve(P), std::nullopt};
  if (oracle) {
    double e = 0.0;
    for (std::size_t n : region_nodes(P.data.grid(), P.region)) {
      e = std::max(e, std::abs(out.result.u[n] - (*oracle)[n]));
    }
    out.linf_error = e;
  }
  return out;
}

ScalarField load_field(const json& desc, const Context& ctx, const std::string& path) {
  const std::string source = io::get_string(desc, "source", path, "analytic");
  if (source == "analytic") {
    const std::string id = io::get_string(desc, "id", path, "");
    if (id.empty()) throw ParseError(path + ".id", "missing analytic field id");
    try {
      return analytic_field(id, ctx.grid, analytic_params(desc, path, ctx.F.p(), ctx.seed));
    } catch (const PreconditionError& e) {
      throw ParseError(path + ".id", e.what());
    }
  }
  if (source == "file") {
    const std::string file = io::get_string(desc, "path", path, "");
    if (file.empty()) throw ParseError(path + ".path", "missing file path");
    return io::field_from_json(io::load_json(file), file);
  }
  if (source == "solver") {
    if (!desc.contains("problem")) throw ParseError(path + ".problem", "missing problem");
    return run_problem(problem_json(desc["problem"], path + ".problem"), ctx, path + ".problem").result.u;
  }
  throw ParseError(path + ".source", "unknown field source '" + source + "'");
}

std::string verdict_of(bool pass) { return pass ? "PASS" : "FAIL"; }

// Output bookkeeping for one experiment.
struct Sink {
  fs::path dir;
  std::string stem;
  std::vector<fs::path> files;

  fs::path path(const std::string& suffix) const { return dir / (stem + "-" + suffix); }
  std::ofstream open(const std::string& suffix) {
    fs::create_directories(dir);
    files.push_back(path(suffix));
    std::ofstream f(files.back());
    if (!f) throw IoError("cannot write " + files.back().string());
    return f;
  }
};

std::vector<std::string> planned_files(const std::string& cmd) {
  std::vector<std::string> out{"summary.json"};
  if (cmd == "solve" || cmd == "replace") {
    out.push_back("solution.csv");
    out.push_back("log.csv");
  } else {
    out.push_back("trace.csv");
  }
  return out;
}

Region domain_of(const json& probe, const Grid& g) {
  return probe.contains("domain") ? io::region_from_json(probe["domain"], g, "probe.domain") : Region::full(g);
}

json young_check(const Context& ctx, const json& probe, Sink& sink) {
  const auto& F = ctx.F;
  const auto samples = static_cast<std::size_t>(io::get_int(probe, "samples", "probe", 1000));
  const double t_min = io::get_number(probe, "t_min", "probe", 1e-3);
  const double t_max = io::get_number(probe, "t_max", "probe", 1e3);
  const auto idx = lieberman_indices(F, t_min, t_max, samples);
  const auto dbl = check_doubling(F, samples, ctx.seed);
  double roundtrip = 0.0;
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"t", "g", "G", "inverse_G_error", "complementary"});
    for (std::size_t i = 0; i < samples; ++i) {
      const double t = t_min * std::pow(t_max / t_min, static_cast<double>(i) / static_cast<double>(samples - 1));
      const double G = F.G(t);
      const double err = std::abs(F.inverse_G(G) - t) / std::max(1.0, t);
      roundtrip = std::max(roundtrip, err);
      w << t << F.g(t) << G << err << F.complementary(t);
      w.end_row();
    }
  }
  const bool idx_ok = idx.delta_hat >= F.delta() - 1e-6 && idx.g0_hat <= F.g0() + 1e-6;
  const bool pass = dbl.ok && idx_ok && roundtrip <= 1e-8;
  json s;
  s["delta"] = F.delta();
  s["g0"] = F.g0();
  s["amplitude"] = F.amplitude();
  s["delta_hat"] = idx.delta_hat;
  s["g0_hat"] = idx.g0_hat;
  s["roundtrip_max_rel_error"] = roundtrip;
  s["doubling"] = {{"ok", dbl.ok},
                   {"checked", dbl.checked},
                   {"worst_G_doubling", dbl.worst_G_doubling},
                   {"worst_complementary_doubling", dbl.worst_complementary_doubling},
                   {"worst_index_sandwich", dbl.worst_index_sandwich},
                   {"worst_split_sum", dbl.worst_split_sum},
                   {"violations", dbl.violations.size()}};
  json emb = json::object();
  for (int n : {1, 2}) {
    const auto c = sobolev_conjugate_classify(F, n);
    json e{{"case", to_string(c.kind)}, {"tail_ratio", c.tail_ratio}};
    if (c.exponent_check) e["exponent_check"] = *c.exponent_check;
    emb[std::to_string(n)] = e;
  }
  s["embedding"] = emb;
  s["verdict"] = verdict_of(pass);
  return s;
}

json solve_like(const std::string& cmd, const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  SolveResult res;
  std::optional<double> linf;
  if (probe.contains("problem")) {
    auto run = run_problem(problem_json(probe["problem"], "probe.problem"), ctx, "probe.problem");
    res = std::move(run.result);
    linf = run.linf_error;
  } else if (cmd == "solve") {
    throw ParseError("probe.problem", "solve needs a problem (--problem)");
  } else {
    const ScalarField u = load_field(cfg["field"], ctx, "field");
    const Region ball = Region::ball(u.grid(), point_of(probe, "center", "probe"),
                                     io::get_number(probe, "radius", "probe"));
    res = harmonic_replacement(ctx.F, u, ball);
  }
  {
    auto f = sink.open("solution.csv");
    io::write_field_csv(f, res.u);
  }
  {
    auto f = sink.open("log.csv");
    io::write_solver_log_csv(f, res.log);
  }
  json s;
  s["energy"] = res.energy;
  s["residual"] = res.residual;
  s["iterations"] = res.iterations;
  s["converged"] = res.converged;
  s["fallback_steps"] = res.fallback_steps;
  if (linf) s["linf_error"] = *linf;
  bool pass = res.converged;
  if (linf && probe.contains("oracle_tol")) pass = pass && *linf <= io::get_number(probe, "oracle_tol", "probe");
  s["verdict"] = verdict_of(pass);
  return s;
}

json energy(const Context& ctx, const json& cfg, Sink& sink, std::ostream& out) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const Region domain = domain_of(probe, u.grid());
  const auto ru = norm_modular_bound(ctx.F, u, domain);
  const auto rg = norm_modular_bound(ctx.F, gradient(u), domain);
  const auto J = j_g(ctx.F, u, domain);
  json s;
  auto mr = [](const ModularReport& r) {
    return json{{"modular", r.modular}, {"norm", r.norm}, {"bound", r.bound}, {"holds", r.holds}};
  };
  s["u"] = mr(ru);
  s["grad_u"] = mr(rg);
  s["j_g"] = {{"g_energy", J.g_energy}, {"pos_measure", J.pos_measure}, {"j_value", J.j_value}};
  bool pass = ru.holds && rg.holds;
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"quantity", "modular", "norm", "bound", "holds"});
    w << std::string("u") << ru.modular << ru.norm << ru.bound << std::string(ru.holds ? "true" : "false");
    w.end_row();
    w << std::string("grad_u") << rg.modular << rg.norm << rg.bound << std::string(rg.holds ? "true" : "false");
    w.end_row();
  }
  if (probe.contains("radius")) {
    const Region ball = Region::ball(u.grid(), point_of(probe, "center", "probe"),
                                     io::get_number(probe, "radius", "probe"));
    const auto gap = energy_gap_check(ctx.F, u, ball);
    s["energy_gap"] = {{"lhs", gap.lhs}, {"rhs", gap.rhs}, {"ratio", gap.ratio}, {"minimal", gap.minimal}};
    pass = pass && gap.minimal;
  }
  out << "quantity    modular                  norm                     bound\n";
  for (const auto& [name, r] : {std::pair{"u", ru}, std::pair{"grad_u", rg}}) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s  %-23.16g  %-23.16g  %-23.16g\n", name, r.modular, r.norm,
                  r.bound);
    out << line;
  }
  s["verdict"] = verdict_of(pass);
  return s;
}

json almost_min(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const Region ball = Region::ball(u.grid(), point_of(probe, "center", "probe"),
                                   io::get_number(probe, "radius", "probe"));
  AlmostMinParams P;
  P.kappa = io::get_number(probe, "kappa", "probe", P.kappa);
  P.beta = io::get_number(probe, "beta", "probe", P.beta);
  if (probe.contains("truncation_levels")) P.truncation_levels = numbers_of(probe, "truncation_levels", "probe");
  const auto rep = almost_min_check(ctx.F, u, ball, P);
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"competitor", "J_u", "J_v", "slack", "verdict"});
    for (const auto& r : rep.rows) {
      w << r.id << r.j_u << r.j_v << r.slack << verdict_of(r.pass);
      w.end_row();
    }
  }
  json s;
  s["radius"] = rep.radius;
  s["factor"] = rep.factor;
  s["competitors"] = rep.rows.size();
  s["rejected"] = rep.rejected;
  s["label"] = rep.verdict();
  s["verdict"] = verdict_of(!rep.falsified);
  return s;
}

json scaling(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const auto rep = scaling_check(ctx.F, u, io::get_number(probe, "r", "probe"), points_of(probe, "centers", "probe"),
                                 numbers_of(probe, "radii", "probe"));
  const int dim = u.grid().dim();
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"x", "y", "rho", "lhs", "rhs", "rel_error", "resampled_rhs", "resampled_rel_error"});
    for (const auto& r : rep.rows) {
      w << r.x_bar[0] << (dim == 2 ? r.x_bar[1] : 0.0) << r.rho << r.lhs << r.rhs << r.rel_error
        << r.resampled_rhs << r.resampled_rel_error;
      w.end_row();
    }
  }
  const double tol = io::get_number(probe, "tol", "probe", 1e-3);
  json s;
  s["r"] = rep.r;
  s["pairs"] = rep.rows.size();
  s["max_rel_error"] = rep.max_rel_error;
  s["max_resampled_rel_error"] = rep.max_resampled_rel_error;
  s["verdict"] = verdict_of(!rep.rows.empty() && rep.max_rel_error <= tol);
  return s;
}

DichotomyParams dichotomy_params(const json& probe) {
  DichotomyParams P;
  P.epsilon = io::get_number(probe, "epsilon", "probe", P.epsilon);
  P.eta = io::get_number(probe, "eta", "probe", P.eta);
  P.M_threshold = io::get_number(probe, "M", "probe", P.M_threshold);
  P.C_flat = io::get_number(probe, "C_flat", "probe", P.C_flat);
  P.C0 = io::get_number(probe, "C0", "probe", P.C0);
  P.ball = {point_of(probe, "center", "probe"), io::get_number(probe, "radius", "probe", 1.0)};
  return P;
}

json dichotomy(const Context& ctx, const json& cfg, Sink& sink) {
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const int dim = u.grid().dim();
  DichotomyParams P = dichotomy_params(cfg["probe"]);
  P.sigma = std::pow(P.eta, dim + 1);
  const auto r = dichotomy_probe(ctx.F, u, P);
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"G_of_a", "a", "avg_eta", "half_level", "q_x", "q_y", "q_norm", "flatness",
                        "flat_bound", "window_lo", "window_hi", "verdict"});
    w << r.G_of_a << r.a << r.avg_eta << r.half_level << r.q[0] << r.q[1] << r.q_norm << r.flatness
      << r.flat_bound << r.window_lo << r.window_hi << to_string(r.verdict);
    w.end_row();
  }
  json s;
  s["dichotomy"] = to_string(r.verdict);
  s["degenerate"] = r.degenerate;
  s["below_threshold"] = r.below_threshold;
  s["a"] = r.a;
  s["G_of_a"] = r.G_of_a;
  s["q"] = point_json(r.q, dim);
  s["flatness"] = r.flatness;
  s["flat_bound"] = r.flat_bound;
  s["flat_bound_remark"] = r.flat_bound_remark;
  s["slack_sigma"] = P.sigma;
  s["verdict"] = "DIAGNOSTIC";
  return s;
}

json iterate(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const int dim = u.grid().dim();
  std::optional<Point> q0;
  if (probe.contains("q0")) q0 = point_of(probe, "q0", "probe");
  const double alpha = io::get_number(probe, "alpha", "probe");
  const double eps = io::get_number(probe, "epsilon", "probe");
  const auto tr = improvement_iterate(ctx.F, u, q0, io::get_number(probe, "rho", "probe"), alpha, eps,
                                      io::get_int(probe, "K", "probe", 8),
                                      {point_of(probe, "center", "probe"), io::get_number(probe, "radius", "probe")});
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"k", "radius", "q_x", "q_y", "flatness", "flat_bound", "drift", "drift_scale",
                        "avg_energy", "sandwich_ok"});
    for (const auto& st : tr.states) {
      w << st.k << st.radius << st.q_k[0] << st.q_k[1] << st.flatness_k << st.flat_bound << st.drift
        << st.drift_scale << st.avg_energy << std::string(st.sandwich_ok ? "true" : "false");
      w.end_row();
    }
  }
  const double tau = (ctx.F.delta() + 1.0) / (ctx.F.g0() + 1.0);
  json s;
  s["steps"] = tr.states.size();
  s["truncated"] = tr.truncated;
  s["alpha_hat"] = tr.alpha_hat;
  s["alpha_fit_r2"] = tr.alpha_fit_r2;
  s["tau"] = tau;
  s["drift_ratio"] = tr.drift_ratio;
  s["predicted_drift_ratio"] = std::pow(io::get_number(probe, "rho", "probe"), alpha * tau);
  s["C_tilde"] = tr.C_tilde;
  s["drift_sum"] = tr.drift_sum;
  s["drift_series_bound"] = tr.drift_series_bound;
  s["b_intercept"] = tr.b_intercept;
  s["a_level"] = tr.states.empty() ? 0.0 : tr.states.front().a_level;
  if (!tr.states.empty()) s["q_final"] = point_json(tr.states.back().q_k, dim);
  s["verdict"] = verdict_of(tr.drift_sum <= tr.drift_series_bound * (1.0 + 1e-12) + 1e-15);
  return s;
}

json campanato(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const Grid& g = u.grid();
  const Region domain = domain_of(probe, g);
  const double lambda = io::get_number(probe, "lambda", "probe", g.dim() + 1.5);
  const std::string mode = io::get_string(probe, "mode", "probe", "inf");
  if (mode != "inf" && mode != "avg") throw ParseError("probe.mode", "expected 'inf' or 'avg'");
  const int stride = io::get_int(probe, "stride", "probe", 4);
  auto rep = campanato_seminorm(ctx.F, u, domain, lambda, default_centers(g, domain, stride),
                                default_radii(g, domain),
                                mode == "inf" ? CampanatoMode::InfOverXi : CampanatoMode::AvgCentered);
  const bool holder = lambda > g.dim();
  if (holder) {
    rep.holder_seminorm = holder_seminorm(u, domain, rep.gamma);
    rep.fitted_C = rep.seminorm_inf > 0.0 ? rep.holder_seminorm / ctx.F.inverse_G(rep.seminorm_inf) : 0.0;
  }
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"x", "y", "radius", "avg_value", "inf_value", "measure"});
    for (const auto& r : rep.rows) {
      w << r.x0[0] << r.x0[1] << r.radius << r.avg_value << r.inf_value << r.measure;
      w.end_row();
    }
  }
  const double cap = std::pow(2.0, ctx.F.g0() + 1.0);
  const bool pass = std::isfinite(rep.seminorm) && rep.min_ratio >= 1.0 - 1e-12 && rep.max_ratio <= cap;
  json s;
  s["lambda"] = rep.lambda;
  s["gamma"] = rep.gamma;
  s["mode"] = mode;
  s["seminorm"] = rep.seminorm;
  s["seminorm_avg"] = rep.seminorm_avg;
  s["seminorm_inf"] = rep.seminorm_inf;
  if (holder) {
    s["holder_seminorm"] = rep.holder_seminorm;
    s["fitted_C"] = rep.fitted_C;
  }
  s["ratio_range"] = {rep.min_ratio, rep.max_ratio};
  s["ratio_cap"] = cap;
  s["upd_constant"] = rep.upd_constant;
  s["pairs"] = rep.rows.size();
  s["verdict"] = verdict_of(pass);
  return s;
}

json bmo(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const Grid& g = u.grid();
  const Region domain = domain_of(probe, g);
  std::optional<double> c0;
  if (probe.contains("c0")) c0 = io::get_number(probe, "c0", "probe");
  const auto rep = bmo_star_seminorm(ctx.F, u, domain, c0,
                                     default_centers(g, domain, io::get_int(probe, "stride", "probe", 4)),
                                     default_radii(g, domain));
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"x", "y", "radius", "mean_osc", "density", "phi_n", "bound", "holds"});
    for (const auto& r : rep.rows) {
      w << r.x0[0] << r.x0[1] << r.radius << r.mean_osc << r.density << r.phi_n << r.bound
        << std::string(r.holds ? "true" : "false");
      w.end_row();
    }
  }
  json s;
  s["bmo"] = rep.bmo;
  s["bound"] = rep.bound;
  s["phi_n"] = rep.phi_n;
  s["upd_constant"] = rep.upd_constant;
  s["empirical_c0"] = rep.empirical_c0;
  s["upd_violations"] = rep.upd_violations.size();
  s["pairs"] = rep.rows.size();
  s["verdict"] = verdict_of(rep.holds);
  return s;
}

json lipschitz(const Context& ctx, const json& cfg, Sink& sink) {
  const json& probe = cfg["probe"];
  const ScalarField u = load_field(cfg["field"], ctx, "field");
  const auto rep = lipschitz_certificate(
      ctx.F, u, io::get_number(probe, "eta", "probe"), io::get_number(probe, "M", "probe"),
      io::get_int(probe, "K", "probe", 6),
      {point_of(probe, "center", "probe"), io::get_number(probe, "radius", "probe")},
      io::get_number(probe, "epsilon", "probe", 0.05));
  {
    auto f = sink.open("trace.csv");
    io::CsvWriter w(f, {"k", "radius", "G_of_a", "recurrence_rhs", "recurrence_ok", "above_M", "dichotomy"});
    for (const auto& st : rep.steps) {
      w << st.k << st.radius << st.G_of_a << st.recurrence_rhs << std::string(st.recurrence_ok ? "true" : "false")
        << std::string(st.above_M ? "true" : "false") << (st.dichotomy ? to_string(*st.dichotomy) : std::string("-"));
      w.end_row();
    }
  }
  json s;
  s["grad_sup_half"] = rep.grad_sup_half;
  s["energy_B1"] = rep.energy_B1;
  s["ratio"] = rep.ratio;
  s["recurrence_ok"] = rep.recurrence_ok;
  s["completed"] = rep.completed;
  s["verdict"] = verdict_of(rep.completed && rep.recurrence_ok && std::isfinite(rep.ratio));
  return s;
}

}  // namespace

json resolve(const std::string& command, json config) {
  if (!config.is_object()) throw ParseError("config", "expected a JSON object");
  json cfg;
  cfg["command"] = command;
  cfg["young"] = {{"family", "power"}, {"p", 3.0}, {"quad_tol", 1e-12}};
  cfg["grid"] = {{"dim", 2}, {"h", 1.0 / 64.0}, {"lo", {-1.0, -1.0}}, {"hi", {1.0, 1.0}}};
  // Hoelder certificates are cheapest and sharpest on a fine 1D line
  if (command == "campanato") cfg["grid"] = {{"dim", 1}, {"h", 1.0 / 256.0}, {"lo", {-1.0}}, {"hi", {1.0}}};
  cfg["field"] = default_field(command);
  cfg["probe"] = default_probe(command);
  cfg["seed"] = 0;
  cfg["output_dir"] = "ogr_out";
  config.erase("command");
  // A new field source replaces the default one instead of merging with it.
  if (config.contains("field") && config["field"].contains("source")) cfg["field"] = json::object();
  cfg.merge_patch(config);

  const auto F = io::young_from_json(cfg["young"], "young");
  const auto g = io::grid_from_json(cfg["grid"], "grid");
  // keep the grid in node form so the hash does not depend on how it was given
  cfg["grid"] = io::to_json(g);
  cfg["young"] = io::to_json(F);
  if (!cfg["seed"].is_number_unsigned() && !cfg["seed"].is_number_integer()) {
    throw ParseError("seed", "expected a non-negative integer");
  }
  if (!cfg["output_dir"].is_string()) throw ParseError("output_dir", "expected a path");
  // inline problem files so the hash covers their contents
  if (cfg["probe"].contains("problem") && cfg["probe"]["problem"].is_string()) {
    cfg["probe"]["problem"] = problem_json(cfg["probe"]["problem"], "probe.problem");
  }
  if (cfg["field"].contains("problem") && cfg["field"]["problem"].is_string()) {
    cfg["field"]["problem"] = problem_json(cfg["field"]["problem"], "field.problem");
  }
  if (command == "campanato" && !cfg["probe"].contains("lambda")) cfg["probe"]["lambda"] = g.dim() + 1.5;
  return cfg;
}

std::string config_hash(const json& resolved) { return io::fnv1a_hex(resolved.dump()); }

Outcome execute(const json& cfg, bool dry_run, std::ostream& out) {
  const std::string cmd = cfg.at("command").get<std::string>();
  const std::string hash = config_hash(cfg);
  Sink sink{cfg["output_dir"].get<std::string>(), cmd + "-" + hash, {}};
  Outcome o;
  if (dry_run) {
    json plan{{"command", cmd}, {"hash", hash}, {"config", cfg}};
    for (const auto& f : planned_files(cmd)) plan["outputs"].push_back(sink.path(f).string());
    out << plan.dump(2) << '\n';
    o.summary = plan;
    return o;
  }
  Context ctx{io::young_from_json(cfg["young"]), io::grid_from_json(cfg["grid"]),
              cfg["seed"].get<std::uint64_t>()};
  json s;
  if (cmd == "young-check") s = young_check(ctx, cfg["probe"], sink);
  else if (cmd == "solve" || cmd == "replace") s = solve_like(cmd, ctx, cfg, sink);
  else if (cmd == "energy") s = energy(ctx, cfg, sink, out);
  else if (cmd == "almost-min") s = almost_min(ctx, cfg, sink);
  else if (cmd == "scaling") s = scaling(ctx, cfg, sink);
  else if (cmd == "dichotomy") s = dichotomy(ctx, cfg, sink);
  else if (cmd == "iterate") s = iterate(ctx, cfg, sink);
  else if (cmd == "campanato") s = campanato(ctx, cfg, sink);
  else if (cmd == "bmo") s = bmo(ctx, cfg, sink);
  else if (cmd == "lipschitz") s = lipschitz(ctx, cfg, sink);
  else throw ParseError("command", "unknown command '" + cmd + "'");

  s["command"] = cmd;
  s["hash"] = hash;
  s["config"] = cfg;
  {
    auto f = sink.open("summary.json");
    f << s.dump(2) << '\n';
  }
  out << s.dump(2) << '\n';
  o.summary = std::move(s);
  o.files = sink.files;
  o.exit_code = o.summary["verdict"] == "FAIL" ? kFail : kOk;
  return o;
}

namespace {

// Probe keys exposed as numeric flags, per command. Integer keys are marked.
struct NumFlag {
  std::string key;
  bool integer = false;
};

const std::map<std::string, std::vector<NumFlag>>& numeric_flags() {
  static const std::map<std::string, std::vector<NumFlag>> m{
      {"young-check", {{"samples", true}, {"t_min"}, {"t_max"}}},
      {"solve", {{"oracle_tol"}}},
      {"replace", {{"radius"}, {"oracle_tol"}}},
      {"energy", {{"radius"}}},
      {"almost-min", {{"radius"}, {"kappa"}, {"beta"}}},
      {"scaling", {{"r"}, {"tol"}}},
      {"dichotomy", {{"radius"}, {"epsilon"}, {"eta"}, {"M"}, {"C_flat"}, {"C0"}}},
      {"iterate", {{"radius"}, {"rho"}, {"alpha"}, {"epsilon"}, {"K", true}}},
      {"campanato", {{"lambda"}, {"stride", true}}},
      {"bmo", {{"c0"}, {"stride", true}}},
      {"lipschitz", {{"radius"}, {"eta"}, {"M"}, {"K", true}, {"epsilon"}}},
  };
  return m;
}

std::string flag_name(const std::string& key) {
  std::string s = key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return "--" + s;
}

struct Flags {
  std::string config;
  std::optional<std::string> family, field, field_file, problem, output_dir, mode;
  std::optional<double> p, quad_tol, h, b, c, s;
  std::optional<int> dim;
  std::optional<std::uint64_t> seed;
  std::vector<double> lo, hi, q, center, q0, radii;
  std::map<std::string, std::optional<double>> num;
  bool dry_run = false;
};

json overrides(const std::string& cmd, const Flags& f) {
  json j = f.config.empty() ? json::object() : io::load_json(f.config);
  if (!j.is_object()) throw ParseError(f.config, "expected a JSON object");
  auto vec = [](const std::vector<double>& v) { return json(v); };
  if (f.family) j["young"]["family"] = *f.family;
  if (f.p) j["young"]["p"] = *f.p;
  if (f.quad_tol) j["young"]["quad_tol"] = *f.quad_tol;
  if (f.dim || f.h || !f.lo.empty() || !f.hi.empty()) {
    // a partially specified grid is completed from the box defaults
    json g = j.value("grid", json::object());
    g.erase("nodes");
    g.erase("origin");
    if (f.dim) g["dim"] = *f.dim;
    if (f.h) g["h"] = *f.h;
    if (!f.lo.empty()) g["lo"] = vec(f.lo);
    if (!f.hi.empty()) g["hi"] = vec(f.hi);
    if (!g.contains("h")) g["h"] = 1.0 / 64.0;
    j["grid"] = g;
  }
  if (f.field) j["field"] = {{"source", "analytic"}, {"id", *f.field}};
  if (f.field_file) j["field"] = {{"source", "file"}, {"path", *f.field_file}};
  if (f.b) j["field"]["b"] = *f.b;
  if (f.c) j["field"]["c"] = *f.c;
  if (f.s) j["field"]["s"] = *f.s;
  if (!f.q.empty()) j["field"]["q"] = vec(f.q);
  if (f.seed) j["seed"] = *f.seed;
  if (f.output_dir) j["output_dir"] = *f.output_dir;
  if (f.problem) j["probe"]["problem"] = *f.problem;
  if (f.mode) j["probe"]["mode"] = *f.mode;
  if (!f.center.empty()) j["probe"]["center"] = vec(f.center);
  if (!f.q0.empty()) j["probe"]["q0"] = vec(f.q0);
  if (!f.radii.empty()) j["probe"]["radii"] = vec(f.radii);
  const auto it = numeric_flags().find(cmd);
  if (it != numeric_flags().end()) {
    for (const auto& nf : it->second) {
      const auto& v = f.num.at(nf.key);
      if (!v) continue;
      if (nf.integer) {
        j["probe"][nf.key] = static_cast<long long>(std::llround(*v));
      } else {
        j["probe"][nf.key] = *v;
      }
    }
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orlicz-growth experiment runner"};
  app.name("ogr");
  app.require_subcommand(1, 1);
  app.set_help_flag("--help", "print this help");  // -h is the grid spacing
  Flags f;
  for (const auto& nf : numeric_flags()) {
    for (const auto& k : nf.second) f.num[k.key] = std::nullopt;
  }
  for (const auto& cmd : commands()) {
    auto* sc = app.add_subcommand(cmd, describe(cmd));
    sc->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
    sc->add_flag("--dry-run", f.dry_run, "print the resolved plan without computing");
    sc->add_option("--family", f.family, "Young family: power, plog, tabulated");
    sc->add_option("--p", f.p, "growth exponent");
    sc->add_option("--quad-tol", f.quad_tol, "relative quadrature tolerance");
    sc->add_option("--dim", f.dim, "dimension (1 or 2)");
    sc->add_option("--h", f.h, "grid spacing");
    sc->add_option("--lo", f.lo, "lower box corner")->expected(1, 2);
    sc->add_option("--hi", f.hi, "upper box corner")->expected(1, 2);
    sc->add_option("--field", f.field, "analytic field id");
    sc->add_option("--field-file", f.field_file, "field JSON {grid, values}");
    sc->add_option("--q", f.q, "slope of the analytic field")->expected(1, 2);
    sc->add_option("--b", f.b, "offset of the analytic field");
    sc->add_option("--c", f.c, "perturbation amplitude");
    sc->add_option("--s", f.s, "perturbation exponent");
    sc->add_option("--seed", f.seed, "seed for randomized sampling");
    sc->add_option("--output-dir", f.output_dir, "directory for CSV/JSON outputs");
    if (cmd == "solve" || cmd == "replace") sc->add_option("--problem", f.problem, "Dirichlet problem JSON");
    if (cmd == "campanato") sc->add_option("--mode", f.mode, "inf or avg");
    if (cmd == "scaling") sc->add_option("--radii", f.radii, "ball radii rho");
    if (cmd == "iterate") sc->add_option("--q0", f.q0, "initial slope")->expected(1, 2);
    const auto& nfs = numeric_flags().at(cmd);
    const bool has_center = std::any_of(nfs.begin(), nfs.end(), [](const NumFlag& n) { return n.key == "radius"; });
    if (has_center) sc->add_option("--center", f.center, "ball center")->expected(1, 2);
    for (const auto& nf : nfs) sc->add_option(flag_name(nf.key), f.num[nf.key], nf.key);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const json cfg = resolve(cmd, overrides(cmd, f));
    return execute(cfg, f.dry_run, out).exit_code;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ogr::cli
