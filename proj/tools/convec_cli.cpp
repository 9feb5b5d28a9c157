// convec: command-line driver for the cell simulations, the annulus base
// state and energy-stability analysis, and the acceptance suite.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>

#include "acceptance.hpp"
#include "convec/annulus_basestate.hpp"
#include "convec/benard_dynamics.hpp"
#include "convec/stability_variational.hpp"
#include "convec/symmetric_subspace.hpp"
#include "io.hpp"

namespace fs = std::filesystem;
using namespace convec;
using io::CsvWriter;
using io::Json;

namespace {

std::string num(double v) { return std::isnan(v) ? "" : CsvWriter::num(v); }

// ---- simulate ----

benard::OBState initial_state(const io::Config& cfg, int m_max, int n_max, const fs::path& base_dir) {
  const std::string init = cfg.str("initial", "mixed");
  const double amp = cfg.real("amplitude", 0.1);
  const unsigned seed = static_cast<unsigned>(cfg.integer("seed", 1));
  constexpr double pi = std::numbers::pi;
  auto s = benard::OBState::zero(m_max, n_max);
  if (init == "conduction") return s;
  if (init == "s-profiles" || init == "mixed") {
    // v^x = cos(pi z) + cos(2 pi z), tau = sin(pi z), scaled by the amplitude
    s.phi.set({0, 1, 1}, -amp / pi);
    if (n_max >= 2) s.phi.set({0, 2, 1}, -amp / (2 * pi));
    s.tau.set({0, 1, 1}, amp);
  }
  if (init == "mixed") {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int m = 1; m <= std::min(m_max, 2); ++m)
      for (int n = 1; n <= std::min(n_max, 2); ++n)
        for (int par : {1, -1}) {
          s.phi.set({m, n, par}, amp * u(rng) / (m * m + n * n));
          s.tau.set({m, n, par}, amp * u(rng) / (m * m + n * n));
        }
    return s;
  }
  if (init == "mode11") {
    if (m_max < 1) throw io::ConfigError("mode11 needs m_max >= 1");
    s.phi.set({1, 1, -1}, amp);
    return s;
  }
  if (init == "s-profiles") return s;
  fs::path p(init);
  if (p.is_relative()) p = base_dir / p;
  auto loaded = io::state_from_json(io::read_json(p));
  if (loaded.m_max() != m_max || loaded.n_max() != n_max)
    throw io::ConfigError("initial snapshot truncation differs from m_max/n_max");
  return loaded;
}

int cmd_simulate(const fs::path& config_path, const std::string& out_override) {
  const auto cfg = io::Config::load(config_path);
  cfg.require_known({"pr", "ra", "dt", "t_end", "m_max", "n_max", "initial", "seed", "amplitude", "sample_every",
                     "output_dir"});
  benard::OBParams p;
  p.pr = cfg.real("pr", p.pr);
  p.ra = cfg.real("ra", p.ra);
  p.dt = cfg.real("dt", p.dt);
  p.t_end = cfg.real("t_end", p.t_end);
  p.m_max = cfg.integer("m_max", p.m_max);
  p.n_max = cfg.integer("n_max", p.n_max);
  p.validate();
  const int every = cfg.integer("sample_every", 10);
  if (every < 1) throw io::ConfigError("sample_every must be >= 1");
  const fs::path out = out_override.empty() ? fs::path(cfg.str("output_dir", "simulate_out")) : fs::path(out_override);

  const auto init = initial_state(cfg, p.m_max, p.n_max, config_path.parent_path());
  int index = 0;
  const auto traj = benard::simulate(init, p, every, [&](const benard::OBState& s) {
    char name[64];
    std::snprintf(name, sizeof name, "state_%06d.json", index++);
    io::write_json(out / "snapshots" / name, io::state_to_json(s));
  });
  CsvWriter csv({"t", "E", "grad_u_sq", "grad_sigma_sq", "F_value", "residual"});
  for (const auto& r : traj.records)
    csv.row({num(r.t), num(r.E), num(r.grad_u_sq), num(r.grad_sigma_sq), num(r.F_value), num(r.residual)});
  csv.save(out / "diagnostics.csv");
  std::printf("wrote %zu samples to %s\n", traj.records.size(), out.string().c_str());
  return io::kOk;
}

// ---- decompose ----

int cmd_decompose(const fs::path& input, double pr, double ra, double t_end, int samples, int nz,
                  const fs::path& out) {
  if (samples < 1) throw io::ConfigError("samples must be >= 1");
  if (nz < 2) throw io::ConfigError("nz must be >= 2");
  if (!(t_end >= 0)) throw io::ConfigError("t_end must be non-negative");
  const auto state = io::state_from_json(io::read_json(input));
  const auto parts = subspace::split(state, pr, ra);
  auto s_state = subspace::reconstruct(parts.s_part, state.m_max());
  s_state.t = state.t;
  auto f_state = parts.f_part;
  f_state.t = state.t;
  io::write_json(out / "s_part.json", io::state_to_json(s_state));
  io::write_json(out / "f_part.json", io::state_to_json(f_state));

  const Eigen::VectorXd z = subspace::profile_grid(nz);
  CsvWriter csv({"t", "z", "mean_vx", "mean_tau"});
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : t_end * i / (samples - 1);
    const auto mv = subspace::mean_values(state, t, pr, ra);
    for (int k = 0; k < z.size(); ++k) csv.row({num(t), num(z[k]), num(mv.velocity(z[k])), num(mv.temperature(z[k]))});
  }
  csv.save(out / "profiles.csv");
  std::printf("wrote s_part.json, f_part.json, profiles.csv to %s\n", out.string().c_str());
  return io::kOk;
}

// ---- annulus ----

Json modes_json(const std::vector<annulus::Mode>& modes, const Eigen::VectorXd& c) {
  Json arr = Json::array();
  for (std::size_t i = 0; i < modes.size(); ++i) arr.push_back({modes[i].k, modes[i].parity, modes[i].j, c[i]});
  return arr;
}

Json params_json(const annulus::AnnulusParams& p, const annulus::Resolution& res) {
  return Json{{"pr", p.pr}, {"ra", p.ra},       {"d", p.d},         {"b", p.b},
              {"ri", p.ri}, {"ro", p.ro},       {"k_max", res.k_max}, {"n_r", res.n_r}};
}

Json base_json(const annulus::BaseState& b) {
  const annulus::PolarSpace space(b.params.ri, b.res, annulus::Family::Even, false);
  return Json{{"params", params_json(b.params, b.res)},
              {"stream", modes_json(space.stream_modes(), b.stream)},
              {"temperature", modes_json(space.scalar_modes(), b.temperature)},
              {"residual", b.residual},
              {"picard_iters", b.picard_iters},
              {"grad_v_norm", b.grad_v_norm},
              {"grad_tau_norm", b.grad_tau_norm}};
}

annulus::Resolution resolution(int k, int nr) {
  annulus::Resolution r;
  r.k_max = k;
  r.n_r = nr;
  r.validate();
  return r;
}

annulus::BaseState solve_base(double pr, double ra, double d, const annulus::Resolution& res) {
  const auto p = annulus::geometry(d, pr, ra);
  return ra > 0 ? annulus::steady_solve(p, res) : annulus::conduction_state(p, res);
}

std::string tag(double ra) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "ra_%g", ra);
  return buf;
}

int cmd_steady(double pr, const std::vector<double>& ras, double d, int k, int nr, const fs::path& out) {
  const auto res = resolution(k, nr);
  std::vector<annulus::BaseState> bases(ras.size());
  io::parallel_for(static_cast<int>(ras.size()), [&](int i) { bases[i] = solve_base(pr, ras[i], d, res); });
  CsvWriter csv({"ra", "grad_v_norm", "grad_tau_norm", "residual"});
  for (std::size_t i = 0; i < ras.size(); ++i) {
    const auto& b = bases[i];
    io::write_json(out / (ras.size() == 1 ? std::string("base.json") : "base_" + tag(ras[i]) + ".json"), base_json(b));
    csv.row({num(ras[i]), num(b.grad_v_norm), num(b.grad_tau_norm), num(b.residual)});
    std::printf("Ra %g: residual %.3e after %d iterations, |grad v0| %.6g\n", ras[i], b.residual, b.picard_iters,
                b.grad_v_norm);
  }
  csv.save(out / "steady.csv");
  return io::kOk;
}

Json report_json(const stability::StabilityReport& r, const annulus::BaseState& base) {
  const annulus::PolarSpace full(base.params.ri, base.res, annulus::Family::Full, false);
  const int nu = full.n_stream();
  Json lambdas = Json::array(), labels = Json::array();
  for (double l : r.lambdas) lambdas.push_back(l);
  for (auto l : r.labels) labels.push_back(stability::to_string(l));
  auto finite = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return Json{{"params", params_json(base.params, base.res)},
              {"M", r.M},
              {"M_eig", r.M_eig},
              {"lambda_c", finite(r.lambda_c)},
              {"lambda_coupling", finite(r.lambda_coupling)},
              {"energy_stable", r.energy_stable},
              {"verdict", r.verdict()},
              {"label", stability::to_string(r.label)},
              {"normalization", r.normalization},
              {"el_residual", r.el_residual},
              {"iterations", r.iterations},
              {"lambdas", lambdas},
              {"labels", labels},
              {"most_dangerous",
               Json{{"stream", modes_json(full.stream_modes(), r.most_dangerous.head(nu))},
                    {"temperature", modes_json(full.scalar_modes(), r.most_dangerous.tail(full.n_scalar()))}}}};
}

int cmd_stability(double pr, double ra, double d, int modes, int k, int nr, const fs::path& out) {
  if (modes < 1) throw io::ConfigError("modes must be >= 1");
  const auto base = solve_base(pr, ra, d, resolution(k, nr));
  const auto rep = stability::maximize_F(base, modes);
  io::write_json(out / "stability.json", report_json(rep, base));
  CsvWriter csv({"index", "lambda", "symmetry_label"});
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i)
    csv.row({CsvWriter::num(static_cast<int>(i)), num(rep.lambdas[i]), stability::to_string(rep.labels[i])});
  csv.save(out / "spectrum.csv");
  std::printf("M = %.10g (eigen route %.10g), lambda_c = %.10g, maximizer %s: %s\n", rep.M, rep.M_eig, rep.lambda_c,
              stability::to_string(rep.label).c_str(), rep.verdict().c_str());
  return io::kOk;
}

int cmd_eig0(int nr, double kmin, double kmax, int grid, const fs::path& out) {
  const auto s = stability::solve_eig0(nr, kmin, kmax, grid);
  io::write_json(out / "eig0.json", Json{{"lambda_c", s.lambda_c},
                                         {"rayleigh", s.lambda_c * s.lambda_c},
                                         {"wavenumber", s.wavenumber},
                                         {"n_r", s.n_r},
                                         {"label", stability::to_string(s.label)}});
  CsvWriter curve({"wavenumber", "lambda_c"});
  for (int i = 0; i < grid; ++i) {
    const double a = kmin + (kmax - kmin) * i / (grid - 1);
    curve.row({num(a), num(stability::solve_eig0_at(nr, a).lambda_c)});
  }
  curve.save(out / "eig0_curve.csv");
  CsvWriter spec({"index", "lambda"});
  for (int i = 0; i < s.spectrum.size(); ++i)
    if (std::isfinite(s.spectrum[i])) spec.row({CsvWriter::num(i), num(s.spectrum[i])});
  spec.save(out / "eig0_spectrum.csv");
  std::printf("lambda_c = %.12g at a = %.8g (Ra = %.8g), eigenfunction %s\n", s.lambda_c, s.wavenumber,
              s.lambda_c * s.lambda_c, stability::to_string(s.label).c_str());
  return io::kOk;
}

int cmd_sweep(double pr, const std::vector<double>& ras, double d, int k, int nr, const fs::path& out) {
  const auto res = resolution(k, nr);
  struct Point {
    annulus::BaseState base;
    stability::StabilityReport rep;
  };
  std::vector<Point> pts(ras.size());
  io::parallel_for(static_cast<int>(ras.size()), [&](int i) {
    const fs::path dir = out / tag(ras[i]);
    pts[i].base = solve_base(pr, ras[i], d, res);
    pts[i].rep = stability::maximize_F(pts[i].base, 4);
    io::write_json(dir / "base.json", base_json(pts[i].base));
    io::write_json(dir / "stability.json", report_json(pts[i].rep, pts[i].base));
  });
  CsvWriter csv({"ra", "M", "lambda_c", "verdict", "label", "grad_v_norm", "residual"});
  for (std::size_t i = 0; i < ras.size(); ++i) {
    const auto& p = pts[i];
    csv.row({num(ras[i]), num(p.rep.M), num(p.rep.lambda_c), p.rep.verdict(), stability::to_string(p.rep.label),
             num(p.base.grad_v_norm), num(p.base.residual)});
  }
  csv.save(out / "sweep.csv");
  std::printf("wrote %zu sweep points to %s\n", ras.size(), out.string().c_str());
  return io::kOk;
}

// ---- repro ----

int cmd_repro(bool quick, const fs::path& out) {
  CsvWriter csv({"criterion", "name", "verdict", "seconds", "measured"});
  int failed = 0;
  for (int i = 1; i <= acceptance::count(); ++i) {
    const auto r = acceptance::run_one(i);
    std::printf("%s\n", acceptance::format_row(r).c_str());
    std::fflush(stdout);
    failed += !r.passed;
    csv.row({CsvWriter::num(r.id), r.name, r.passed ? "PASS" : "FAIL", num(r.seconds), r.measured});
  }
  csv.save(out / "repro.csv");
  if (!quick) {
    // plot-ready threshold data: M(Ra) at D = 1, Pr = 1 and the layer curve
    cmd_sweep(1.0, {250, 500, 1000, 1500, 2000, 3000}, 1.0, 8, 24, out / "sweep");
    cmd_eig0(24, 1.0, 6.0, 24, out / "eig0");
  }
  std::printf("repro: %d of %d criteria passed\n", acceptance::count() - failed, acceptance::count());
  return failed ? io::kCheckFailed : io::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convection analysis: cell simulations, annulus base states, energy stability"};
  app.require_subcommand(1);
  std::string out;

  auto* sim = app.add_subcommand("simulate", "Run the Boussinesq cell from a key = value config");
  std::string config;
  sim->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
  sim->add_option("--output-dir", out, "overrides output_dir from the config");

  auto* dec = app.add_subcommand("decompose", "Split a snapshot into its x-independent part and the rest");
  std::string input;
  double dpr = 1.0, dra = 0.0, dt_end = 1.0;
  int samples = 11, nz = 32;
  dec->add_option("--input", input, "state snapshot JSON")->required()->check(CLI::ExistingFile);
  dec->add_option("--pr", dpr, "Prandtl number")->required();
  dec->add_option("--ra", dra, "Rayleigh number")->required();
  dec->add_option("--t-end", dt_end, "last profile time")->capture_default_str();
  dec->add_option("--samples", samples, "profile times")->capture_default_str();
  dec->add_option("--nz", nz, "profile heights")->capture_default_str();
  dec->add_option("--output-dir", out, "output directory")->required();

  auto* ann = app.add_subcommand("annulus", "Annulus between horizontal cylinders");
  ann->require_subcommand(1);
  double apr = 1.0, ad = 1.0;
  std::vector<double> aras;
  int ak = 8, anr = 24, modes = 6;
  auto* steady = ann->add_subcommand("steady", "Even-symmetric steady base state");
  auto* stab = ann->add_subcommand("stability", "Energy stability of the base state");
  for (auto* sc : {steady, stab}) {
    sc->add_option("--pr", apr, "Prandtl number")->required();
    sc->add_option("--d", ad, "gap parameter 2 Ri / (Ro - Ri)")->required();
    sc->add_option("--k", ak, "largest Fourier wavenumber")->capture_default_str();
    sc->add_option("--nr", anr, "radial basis size")->capture_default_str();
    sc->add_option("--output-dir", out, "output directory")->required();
  }
  steady->add_option("--ra", aras, "Rayleigh number(s)")->required()->delimiter(',');
  double sra = 0;
  stab->add_option("--ra", sra, "Rayleigh number")->required();
  stab->add_option("--modes", modes, "eigenpairs to report")->capture_default_str();

  auto* layer = app.add_subcommand("layer", "Planar-layer limit problem");
  layer->require_subcommand(1);
  auto* eig0 = layer->add_subcommand("eig0", "Critical eigenvalue over horizontal wavenumbers");
  int lnr = 24, grid = 24;
  double kmin = 1.0, kmax = 6.0;
  eig0->add_option("--nr", lnr, "basis size")->capture_default_str();
  eig0->add_option("--kmin", kmin, "smallest wavenumber")->capture_default_str();
  eig0->add_option("--kmax", kmax, "largest wavenumber")->capture_default_str();
  eig0->add_option("--grid", grid, "wavenumber grid points")->capture_default_str();
  eig0->add_option("--output-dir", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Base state and energy stability over a list of Ra");
  sweep->add_option("--pr", apr, "Prandtl number")->required();
  sweep->add_option("--ra", aras, "Rayleigh numbers")->required()->delimiter(',');
  sweep->add_option("--d", ad, "gap parameter")->required();
  sweep->add_option("--k", ak, "largest Fourier wavenumber")->capture_default_str();
  sweep->add_option("--nr", anr, "radial basis size")->capture_default_str();
  sweep->add_option("--output-dir", out, "output directory")->required();

  auto* repro = app.add_subcommand("repro", "Run the acceptance suite");
  bool quick = false;
  repro->add_flag("--quick", quick, "criteria only, no sweep data");
  repro->add_option("--output-dir", out, "output directory (default repro_out)");

  if (argc <= 1) {
    std::cerr << app.help();
    return io::kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return io::kUsage;
  }

  try {
    if (*sim) return cmd_simulate(config, out);
    if (*dec) return cmd_decompose(input, dpr, dra, dt_end, samples, nz, out);
    if (*steady) return cmd_steady(apr, aras, ad, ak, anr, out);
    if (*stab) return cmd_stability(apr, sra, ad, modes, ak, anr, out);
    if (*eig0) return cmd_eig0(lnr, kmin, kmax, grid, out);
    if (*sweep) return cmd_sweep(apr, aras, ad, ak, anr, out);
    if (*repro) return cmd_repro(quick, out.empty() ? fs::path("repro_out") : fs::path(out));
  } catch (const io::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return io::kUsage;
  } catch (const io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return io::kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return io::kConfig;
  } catch (const InconsistentData& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return io::kConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return io::kDivergence;
  } catch (const BlowUp& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return io::kDivergence;
  } catch (const ResolutionError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return io::kDivergence;
  } catch (const NormalizationMismatch& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return io::kCheckFailed;
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return io::kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kFailure;
  }
  return io::kUsage;
}
