// SPDX-License-Identifier: MIT
// lriga: command line runner for the low-rank Poisson and elasticity solvers.
//
// Exit codes: 0 success, 1 no convergence, 2 configuration error, 3 breakdown.

#include "lriga/experiments.hpp"
#include "lriga/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kNoConvergence = 1, kConfigError = 2, kBreakdown = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json defaults() {
  return json{{"geometry", "quarter_annulus"},
              {"load", "one"},
              {"p", 2},
              {"n_el", 16},
              {"tol", 1e-6},
              {"eps_prec", 0.1},
              {"threads", 1},
              {"exact_eigen", false},
              {"levels", {3, 4, 5}},
              {"tight_tol", 1e-8},
              {"p_list", {2, 3, 4}},
              {"n_el_list", {16, 32, 64}},
              {"zero_load", false},
              {"tpcg", {{"beta", 0.1}, {"eps0", 0.1}, {"alpha", 0.5}, {"eps_min", -1.0}, {"delta", 1e-3},
                        {"max_iterations", 500}, {"restarts", 0}}}};
}

// Command line values collected as JSON so they overlay the file in one step.
struct Overrides {
  std::string config;
  std::string csv;
  json flags = json::object();
};

template <class T>
void add_flag(CLI::App* app, Overrides& ov, const std::string& name, const std::string& key, const std::string& help) {
  app->add_option_function<T>(name, [&ov, key](const T& v) { ov.flags[key] = v; }, help);
}

void add_switch(CLI::App* app, Overrides& ov, const std::string& name, const std::string& key, const std::string& help) {
  app->add_flag_function(name, [&ov, key](std::int64_t n) { ov.flags[key] = n > 0; }, help);
}

json load_config(const Overrides& ov, json cfg = defaults()) {
  if (!ov.config.empty()) {
    std::ifstream in(ov.config);
    if (!in) throw ConfigError("cannot open config '" + ov.config + "'");
    json file;
    try {
      in >> file;
    } catch (const json::exception& e) {
      throw ConfigError("config '" + ov.config + "': " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config '" + ov.config + "' must hold a JSON object");
    cfg.merge_patch(file);
  }
  cfg.merge_patch(ov.flags);
  return cfg;
}

json elasticity_defaults() {
  json cfg = defaults();
  cfg["geometry"] = "column";
  cfg["p"] = 3;
  cfg["n_el"] = 8;
  return cfg;
}

template <class T>
T get(const json& cfg, const std::string& key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

lriga::GeometryMap geometry(const json& cfg) {
  try {
    if (cfg.contains("geometry_file")) return lriga::load_polynomial_map(get<std::string>(cfg, "geometry_file"));
    return lriga::geometry_by_name(get<std::string>(cfg, "geometry"));
  } catch (const lriga::GeometryError& e) {
    throw ConfigError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

lriga::TpcgConfig tpcg_config(const json& cfg) {
  lriga::TpcgConfig t;
  t.tol = get<double>(cfg, "tol");
  const json& k = cfg.at("tpcg");
  t.beta = get<double>(k, "beta");
  t.eps0 = get<double>(k, "eps0");
  t.alpha = get<double>(k, "alpha");
  t.eps_min = get<double>(k, "eps_min");
  t.delta = get<double>(k, "delta");
  t.max_iterations = get<int>(k, "max_iterations");
  t.restarts = get<int>(k, "restarts");
  if (!(t.tol > 0.0)) throw ConfigError("tol must be positive");
  if (!(t.beta > 0.0 && t.beta < 1.0)) throw ConfigError("tpcg.beta must lie in (0,1)");
  if (!(t.alpha > 0.0 && t.alpha < 1.0)) throw ConfigError("tpcg.alpha must lie in (0,1)");
  if (!(t.eps0 > 0.0)) throw ConfigError("tpcg.eps0 must be positive");
  if (!(t.delta > 0.0)) throw ConfigError("tpcg.delta must be positive");
  if (t.max_iterations < 1) throw ConfigError("tpcg.max_iterations must be at least 1");
  if (t.restarts < 0) throw ConfigError("tpcg.restarts must be non-negative");
  return t;
}

int checked_degree(const json& cfg, const std::string& key) {
  const int p = get<int>(cfg, key);
  if (p < 1 || p > 10) throw ConfigError(key + " must lie in 1..10");
  return p;
}

int checked_elements(int n) {
  if (n < 1 || n > 4096) throw ConfigError("n_el must lie in 1..4096");
  return n;
}

int elements(const json& cfg) {
  if (cfg.contains("level")) {
    const int l = get<int>(cfg, "level");
    if (l < 0 || l > 12) throw ConfigError("level must lie in 0..12");
    return 1 << l;
  }
  return checked_elements(get<int>(cfg, "n_el"));
}

lriga::PoissonSetup poisson_setup(const json& cfg) {
  lriga::PoissonSetup s;
  s.geometry = geometry(cfg);
  s.load = get<std::string>(cfg, "load");
  try {
    (void)lriga::load_by_name(s.load);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  s.p = checked_degree(cfg, "p");
  s.n_el = elements(cfg);
  s.eps_prec = get<double>(cfg, "eps_prec");
  if (!(s.eps_prec > 0.0)) throw ConfigError("eps_prec must be positive");
  s.cfg = tpcg_config(cfg);
  s.eig.force_exact = get<bool>(cfg, "exact_eigen");
  return s;
}

// Writes to the --csv path, or stdout when none is given.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string rank_str(const lriga::MultilinearRank& r) {
  return "(" + std::to_string(r.r1) + "," + std::to_string(r.r2) + "," + std::to_string(r.r3) + ")";
}

int status(const lriga::SolveReport& rep) {
  if (rep.breakdown) return kBreakdown;
  return rep.converged ? kOk : kNoConvergence;
}

int cmd_solve(const json& cfg, const std::string& csv) {
  const lriga::PoissonSetup s = poisson_setup(cfg);
  const lriga::PoissonRun run = lriga::run_poisson(s);
  CsvSink sink(csv);
  lriga::write_report_csv(sink.os(), run.report);
  std::fprintf(stderr,
               "geometry=%s p=%d n_el=%d iterations=%d converged=%d breakdown=%d max_rank=%ld "
               "rank=%s memory_compression=%.6g residual=%.6e tol_abs=%.6e R_P=%d M_P=%.6g\n",
               s.geometry.name.c_str(), s.p, s.n_el, run.report.iterations, run.report.converged ? 1 : 0,
               run.report.breakdown ? 1 : 0, static_cast<long>(run.x.rank().max()), rank_str(run.x.rank()).c_str(),
               run.report.memory_compression, run.report.final_residual, run.report.tol_abs, run.rank_p, run.M_p);
  return status(run.report);
}

int cmd_convergence(const json& cfg, const std::string& csv) {
  const auto G = geometry(cfg);
  const int p = checked_degree(cfg, "p");
  const auto levels = get<std::vector<int>>(cfg, "levels");
  if (levels.empty()) throw ConfigError("levels must not be empty");
  for (int l : levels)
    if (l < 0 || l > 8) throw ConfigError("levels must lie in 0..8");
  const double tight = get<double>(cfg, "tight_tol");
  const lriga::ConvergenceStudy st = lriga::convergence_study(G, p, levels, tight, get<double>(cfg, "eps_prec"));
  CsvSink sink(csv);
  auto& os = sink.os();
  os.precision(10);
  os << "level,n_el,h,tol,iterations,l2,h1,rel_l2,rel_h1,order_l2,order_h1\n";
  bool ok = true;
  for (const auto& r : st.rows) {
    ok = ok && r.converged;
    os << r.level << ',' << r.n_el << ',' << r.h << ',' << r.tol << ',' << r.iterations << ',' << r.err.l2 << ','
       << r.err.h1 << ',' << r.err.l2 / r.err.u_l2 << ',' << r.err.h1 / r.err.u_h1 << ',';
    if (st.rows.size() > 1) os << st.order_l2 << ',' << st.order_h1;
    else os << ',';
    os << '\n';
  }
  std::fprintf(stderr, "p=%d fitted orders L2=%.4f H1=%.4f\n", p, st.order_l2, st.order_h1);
  return ok ? kOk : kNoConvergence;
}

struct StudyRow {
  int n_el = 0, p = 0;
  lriga::PoissonRun run;
};

std::vector<StudyRow> sweep(const json& cfg, const std::vector<int>& ps, const std::vector<int>& ns) {
  const lriga::PoissonSetup base = poisson_setup(cfg);
  const int threads = std::max(1, get<int>(cfg, "threads"));
  std::vector<StudyRow> rows;
  for (int p : ps)
    for (int n : ns) rows.push_back({checked_elements(n), p, {}});
  for (const auto& r : rows)
    if (r.p < 1 || r.p > 10) throw ConfigError("p_list entries must lie in 1..10");
  for (std::size_t start = 0; start < rows.size(); start += threads) {
    std::vector<std::future<void>> jobs;
    for (std::size_t i = start; i < std::min(rows.size(), start + threads); ++i) {
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred, [&, i] {
        lriga::PoissonSetup s = base;
        s.p = rows[i].p;
        s.n_el = rows[i].n_el;
        rows[i].run = lriga::run_poisson(s);
      }));
    }
    for (auto& j : jobs) j.get();
  }
  return rows;
}

int cmd_precond_study(const json& cfg, const std::string& csv) {
  const auto rows = sweep(cfg, get<std::vector<int>>(cfg, "p_list"), get<std::vector<int>>(cfg, "n_el_list"));
  CsvSink sink(csv);
  auto& os = sink.os();
  os.precision(10);
  os << "n_el,p,M_P,R_P,exp_sum_error,iterations,converged\n";
  int code = kOk;
  for (const auto& r : rows) {
    os << r.n_el << ',' << r.p << ',' << r.run.M_p << ',' << r.run.rank_p << ',' << r.run.exp_sum_error << ','
       << r.run.report.iterations << ',' << (r.run.report.converged ? 1 : 0) << '\n';
    code = std::max(code, status(r.run.report));
  }
  return code;
}

lriga::ElasticitySetup elasticity_setup(const json& cfg) {
  if (!cfg.contains("lambda") || !cfg.contains("mu")) throw ConfigError("elasticity needs Lame parameters 'lambda' and 'mu'");
  lriga::ElasticitySetup s;
  s.lame.lambda = get<double>(cfg, "lambda");
  s.lame.mu = get<double>(cfg, "mu");
  if (!(s.lame.mu > 0.0 && s.lame.lambda >= 0.0)) throw ConfigError("need mu > 0 and lambda >= 0");
  s.geometry = geometry(cfg);
  s.p = checked_degree(cfg, "p");
  s.n_el = elements(cfg);
  s.eps_prec = get<double>(cfg, "eps_prec");
  if (!(s.eps_prec > 0.0)) throw ConfigError("eps_prec must be positive");
  s.zero_load = get<bool>(cfg, "zero_load");
  s.cfg = tpcg_config(cfg);
  s.eig.force_exact = get<bool>(cfg, "exact_eigen");
  return s;
}

int cmd_elasticity(const json& cfg, const std::string& csv) {
  const lriga::ElasticitySetup s = elasticity_setup(cfg);
  const lriga::ElasticityRun run = lriga::run_elasticity(s);
  CsvSink sink(csv);
  lriga::write_block_report_csv(sink.os(), run.report);
  std::string ranks;
  for (int c = 0; c < 3; ++c) ranks += rank_str(run.rank_x[c]);
  std::fprintf(stderr,
               "geometry=%s p=%d n_el=%d iterations=%d converged=%d breakdown=%d ranks=%s "
               "memory_compression=%.6g residual=%.6e tol_abs=%.6e R_P=%d,%d,%d\n",
               s.geometry.name.c_str(), s.p, s.n_el, run.report.iterations, run.report.converged ? 1 : 0,
               run.report.breakdown ? 1 : 0, ranks.c_str(), run.report.memory_compression, run.report.final_residual,
               run.report.tol_abs, run.rank_p[0], run.rank_p[1], run.rank_p[2]);
  return status(run.report);
}

// Desk-scale versions of the four published tables.
int cmd_paper_tables(const std::string& csv) {
  CsvSink sink(csv);
  auto& os = sink.os();
  os.precision(6);
  int code = kOk;
  const std::vector<int> ps{2, 3, 4}, ns{8, 16, 32};
  os << "# scaled-down reproduction: n_el <= 32 instead of up to 1024; relative tol 1e-6; eps_prec 0.1\n";
  for (const std::string g : {"quarter_annulus", "shell"}) {
    json cfg = defaults();
    cfg["geometry"] = g;
    const auto rows = sweep(cfg, ps, ns);
    os << "# table: " << g << " (iterations, M_P, R_P, memory compression %)\n";
    os << "geometry,n_el,p,M_P,R_P,iterations,memory_compression\n";
    for (const auto& r : rows) {
      os << g << ',' << r.n_el << ',' << r.p << ',' << r.run.M_p << ',' << r.run.rank_p << ','
         << r.run.report.iterations << ',' << r.run.report.memory_compression << '\n';
      code = std::max(code, status(r.run.report));
    }
  }
  os << "# table: deformed column elasticity, p=3 (iterations, memory compression %)\n";
  os << "n_el,p,iterations,memory_compression\n";
  for (int n : {8, 16, 32}) {
    json cfg = elasticity_defaults();
    cfg["lambda"] = 0.3 / 0.52;
    cfg["mu"] = 1.0 / 2.6;
    cfg["n_el"] = n;
    const auto run = lriga::run_elasticity(elasticity_setup(cfg));
    os << n << ",3," << run.report.iterations << ',' << run.report.memory_compression << '\n';
    code = std::max(code, status(run.report));
  }
  return code;
}

void common_options(CLI::App* app, Overrides& ov) {
  app->add_option("--config", ov.config, "JSON config file; flags override its values");
  app->add_option("--csv", ov.csv, "CSV output path (default: stdout)");
  add_flag<std::string>(app, ov, "--geometry", "geometry", "cube | quarter_annulus | shell | column");
  add_flag<std::string>(app, ov, "--geometry-file", "geometry_file", "polynomial geometry in JSON");
  add_flag<int>(app, ov, "--p", "p", "spline degree");
  add_flag<double>(app, ov, "--tol", "tol", "TPCG tolerance relative to ||f||");
  add_flag<double>(app, ov, "--eps-prec", "eps_prec", "relative exponential-sum tolerance");
  add_switch(app, ov, "--exact-eigen", "exact_eigen", "use exact generalized eigenpairs");
  add_flag<int>(app, ov, "--max-iterations", "/tpcg/max_iterations", "iteration cap");
  add_flag<int>(app, ov, "--restarts", "/tpcg/restarts", "restarts from the current iterate after a breakdown");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank Tucker solvers for isogeometric Poisson and elasticity problems"};
  app.require_subcommand(0, 1);
  bool paper_tables = false;
  std::string tables_csv;
  app.add_flag("--paper-tables", paper_tables, "print scaled-down versions of the published tables");
  app.add_option("--tables-csv", tables_csv, "output path for --paper-tables");

  Overrides solve_ov, conv_ov, study_ov, el_ov;
  auto* solve = app.add_subcommand("solve", "assemble, precondition and solve one Poisson problem");
  common_options(solve, solve_ov);
  add_flag<int>(solve, solve_ov, "--n-el", "n_el", "elements per direction");
  add_flag<int>(solve, solve_ov, "--level", "level", "n_el = 2^level");
  add_flag<std::string>(solve, solve_ov, "--load", "load", "one | manufactured | zero");

  auto* conv = app.add_subcommand("convergence", "manufactured-solution error study");
  common_options(conv, conv_ov);
  add_flag<std::vector<int>>(conv, conv_ov, "--levels", "levels", "levels (n_el = 2^level)");
  add_flag<double>(conv, conv_ov, "--tight-tol", "tight_tol", "tolerance of the error-estimating solve");

  auto* study = app.add_subcommand("precond-study", "exponential-sum ranks and iteration counts over a sweep");
  common_options(study, study_ov);
  add_flag<std::vector<int>>(study, study_ov, "--p-list", "p_list", "degrees");
  add_flag<std::vector<int>>(study, study_ov, "--n-el-list", "n_el_list", "element counts");
  add_flag<std::string>(study, study_ov, "--load", "load", "one | manufactured | zero");
  add_flag<int>(study, study_ov, "--threads", "threads", "concurrent sweep cells");

  auto* el = app.add_subcommand("elasticity", "block solve of the deformed column");
  common_options(el, el_ov);
  add_flag<int>(el, el_ov, "--n-el", "n_el", "elements per direction");
  add_flag<int>(el, el_ov, "--level", "level", "n_el = 2^level");
  add_flag<double>(el, el_ov, "--lambda", "lambda", "first Lame parameter");
  add_flag<double>(el, el_ov, "--mu", "mu", "shear modulus");
  add_switch(el, el_ov, "--zero-load", "zero_load", "zero load and zero boundary data");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  // Flag keys beginning with '/' address nested config entries.
  auto resolve = [](Overrides& ov) {
    json flat = json::object();
    for (auto& [k, v] : ov.flags.items()) {
      if (!k.empty() && k[0] == '/') {
        flat[json::json_pointer(k)] = v;
      } else {
        flat[k] = v;
      }
    }
    ov.flags = flat;
  };

  try {
    if (paper_tables) return cmd_paper_tables(tables_csv);
    if (solve->parsed()) {
      resolve(solve_ov);
      return cmd_solve(load_config(solve_ov), solve_ov.csv);
    }
    if (conv->parsed()) {
      resolve(conv_ov);
      return cmd_convergence(load_config(conv_ov), conv_ov.csv);
    }
    if (study->parsed()) {
      resolve(study_ov);
      return cmd_precond_study(load_config(study_ov), study_ov.csv);
    }
    if (el->parsed()) {
      resolve(el_ov);
      return cmd_elasticity(load_config(el_ov, elasticity_defaults()), el_ov.csv);
    }
    std::cout << app.help();
    return kConfigError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const lriga::GuardError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const lriga::SetupError& e) {
    std::fprintf(stderr, "setup failed: %s\n", e.what());
    return kBreakdown;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBreakdown;
  }
}
