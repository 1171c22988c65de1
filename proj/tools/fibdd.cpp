// Command-line front end: relaxation runs, spectra, curve analysis, recursion
// validation, and parameter sweeps. Configuration comes from an INI-style
// file (sections mode/chain/protocol/noise/limits/sweep/output) and every key
// can be overridden by the flag of the same dotted name.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fibdd/analysis.hpp"
#include "fibdd/csvio.hpp"
#include "fibdd/evolve.hpp"
#include "fibdd/fibrec.hpp"
#include "fibdd/reference_tables.hpp"
#include "fibdd/rng.hpp"
#include "fibdd/spectra.hpp"

using namespace fibdd;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

/// INI-style config: `[section]` headers plus `key = value` lines become
/// `--section.key value ...` arguments injected ahead of the real command
/// line, so explicit flags win. Values may hold whitespace-separated lists.
std::vector<std::string> config_file_args(const std::string& path,
                                          const std::vector<std::string>& given_flags) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::vector<std::string> args;
  std::string line, section;
  while (std::getline(in, line)) {
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("malformed config line: " + line);
    const std::string flag = "--" + (section.empty() ? key : section + "." + key);
    if (std::find(given_flags.begin(), given_flags.end(), flag) != given_flags.end())
      continue;  // explicit command-line flag overrides the file
    args.push_back(flag);
    std::stringstream vs(value);
    std::string token;
    while (vs >> token) args.push_back(token);
  }
  return args;
}

struct Options {
  std::string mode = "relax";

  int chain_length = 8;
  double chain_quartic = 1.0;
  bool single_spin = false;

  int num_drives = 1;
  int num_layers = 1;
  double base_period = 0.04;

  std::string noise_kind = "fibonacci";
  double epsilon = 0.016;
  std::uint64_t seed = 1;

  int max_depth = 60;
  long long max_boundaries = 100000;
  int points_per_decade = 40;
  std::string record = "auto";  // auto | depths | boundaries

  std::vector<int> observables;

  double spectrum_duration = 1000.0;
  long long spectrum_boundaries = 0;  // 0: derive from duration
  int spectrum_points = 40000;
  std::vector<int> spectrum_label;

  std::vector<std::string> analyze_inputs;
  bool analyze_force = false;

  std::vector<double> sweep_epsilon;
  std::vector<double> sweep_period;
  std::vector<int> sweep_length;
  int sweep_workers = 2;
  bool sweep_save_curves = false;

  std::string output_path = "fibdd_out";
};

evolve::ExperimentConfig experiment_config(const Options& opt) {
  evolve::ExperimentConfig config;
  config.single_spin = opt.single_spin;
  config.chain.length = opt.single_spin ? 1 : opt.chain_length;
  config.chain.quartic = opt.chain_quartic;
  config.proto = {.num_drives = opt.num_drives,
                  .num_layers = opt.num_layers,
                  .base_period = opt.base_period};
  config.noise = {.kind = drive::noise_kind_from_string(opt.noise_kind),
                  .epsilon = opt.epsilon,
                  .seed = opt.seed};
  config.max_depth = opt.max_depth;
  config.max_boundaries = opt.max_boundaries;
  config.points_per_decade = opt.points_per_decade;
  if (!opt.observables.empty()) {
    config.observables = opt.observables;
  } else {
    config.observables.clear();
    for (int i = 1; i <= opt.num_drives; ++i) config.observables.push_back(i);
  }
  return config;
}

bool use_sequential_engine(const Options& opt, const evolve::ExperimentConfig& config) {
  switch (config.noise.kind) {
    case drive::NoiseKind::Synchronous:
    case drive::NoiseKind::Asynchronous:
      return true;
    case drive::NoiseKind::Ideal:
      return opt.record == "boundaries";
    case drive::NoiseKind::Fibonacci:
      return false;
  }
  return false;
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

int run_relax(const Options& opt) {
  const auto config = experiment_config(opt);
  const auto curve = use_sequential_engine(opt, config)
                         ? evolve::run_random_experiment(config)
                         : evolve::run_fibonacci_experiment(config);
  ensure_parent_dir(opt.output_path);
  io::write_relaxation_csv(opt.output_path + ".csv", curve);
  io::write_meta_json(opt.output_path + ".meta.json", curve);
  std::cout << "wrote " << opt.output_path << ".csv (" << curve.times.size() << " rows, engine "
            << curve.info.engine << ")\n";
  return kExitOk;
}

int run_spectrum(const Options& opt) {
  const auto config = experiment_config(opt);
  long long boundaries = opt.spectrum_boundaries;
  if (boundaries <= 0)
    boundaries = std::max<long long>(2, std::llround(opt.spectrum_duration / opt.base_period));
  const auto schedule = drive::realize_schedule(config.proto, config.noise, boundaries);

  std::vector<int> label = opt.spectrum_label;
  if (label.empty()) {
    label.assign(std::size_t(opt.num_drives), 0);
    label[0] = 1;
  }
  if (label.size() != std::size_t(opt.num_drives))
    throw std::invalid_argument("spectrum label length must equal protocol.n_s");
  const auto wave = drive::waveform(schedule, label);
  const auto grid = spectra::default_grid(opt.base_period, opt.spectrum_points);
  const auto series = spectra::spectrum_scan(wave, grid);

  ensure_parent_dir(opt.output_path);
  io::write_spectrum_csv(opt.output_path + ".csv", series, io::config_hash(config));

  nlohmann::json meta;
  meta["version"] = io::code_version;
  meta["config_hash"] = io::config_hash(config);
  meta["duration"] = series.duration;
  meta["boundaries"] = boundaries;
  meta["label"] = label;
  meta["noise"] = {{"kind", opt.noise_kind}, {"epsilon", opt.epsilon}, {"seed", opt.seed}};
  meta["protocol"] = {{"num_drives", opt.num_drives},
                      {"num_layers", opt.num_layers},
                      {"base_period", opt.base_period}};
  io::write_text_file(opt.output_path + ".meta.json", meta.dump(2) + "\n");
  std::cout << "wrote " << opt.output_path << ".csv (" << series.omega.size()
            << " frequencies, duration " << series.duration << ")\n";
  return kExitOk;
}

int run_validate(const Options&) {
  bool ok = true;

  const auto table_check = fibrec::check_against_references();
  std::cout << table_check.report;
  std::cout << (table_check.matched ? "[PASS]" : "[FAIL]") << " category tables\n";
  ok = ok && table_check.matched;

  // Oracle equivalence on a random 16-dimensional Hermitian generator.
  Rng rng(20240001);
  Matrix a(16, 16);
  for (int c = 0; c < 16; ++c)
    for (int r = 0; r < 16; ++r) a(r, c) = Complex(rng.gaussian(), rng.gaussian());
  const Matrix h = 0.5 * (a + a.adjoint());

  Matrix sx = Matrix::Zero(2, 2), sz = Matrix::Zero(2, 2);
  sx(0, 1) = sx(1, 0) = 1;
  sz(0, 0) = 1;
  sz(1, 1) = -1;
  const auto kron = [](const Matrix& x, const Matrix& y) {
    Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j)
        out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
  };
  const Matrix id2 = Matrix::Identity(2, 2);
  const Matrix x1 = kron(kron(sx, id2), kron(id2, id2));
  const Matrix x2 = kron(kron(id2, sz), kron(id2, id2));

  const double t0 = 0.19, eps = 0.11;
  const Matrix u_plus = evolve::propagator(h, drive::fibonacci_long(t0, eps));
  const Matrix u_minus = evolve::propagator(h, drive::fibonacci_short(t0, eps));

  for (auto [ns, nf] : {std::pair{1, 1}, {2, 1}, {1, 2}, {2, 2}}) {
    std::vector<Matrix> drives = {x1};
    if (ns > 1) drives.push_back(x2);
    const auto plan = fibrec::derive_plan(ns, nf);
    drive::ProtocolSpec proto{.num_drives = ns, .num_layers = nf, .base_period = t0};
    double worst = 0.0;
    auto seeds = fibrec::make_seeds(plan, u_minus, u_plus, drives);
    fibrec::recursive_evolve(plan, std::move(seeds), 18, {},
                             [&](int depth, long long, const Matrix& u) {
                               const Matrix oracle =
                                   fibrec::oracle_unitary(proto, depth, u_plus, u_minus, drives);
                               worst = std::max(worst, max_abs(u - oracle));
                             });
    const bool pass = worst < 1e-9;
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " oracle equivalence n_s=" << ns
              << " n_f=" << nf << " depths 3..18, max deviation " << worst << "\n";
    ok = ok && pass;
  }

  return ok ? kExitOk : kExitNumerical;
}

int run_analyze(const Options& opt) {
  if (opt.analyze_inputs.empty())
    throw std::invalid_argument("analyze mode needs --analyze.inputs");
  std::vector<io::LoadedCurve> curves;
  for (const auto& path : opt.analyze_inputs) curves.push_back(io::read_relaxation_csv(path));

  for (std::size_t k = 1; k < curves.size(); ++k) {
    if (curves[k].hash != curves[0].hash && !opt.analyze_force)
      throw std::invalid_argument(
          "curve config hashes differ; pass --analyze.force to analyze anyway");
  }

  nlohmann::json report;
  report["version"] = io::code_version;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    nlohmann::json entry;
    entry["file"] = opt.analyze_inputs[k];
    entry["config_hash"] = curves[k].hash;
    for (std::size_t obs = 0; obs < curves[k].names.size(); ++obs) {
      analysis::Curve c;
      c.t = curves[k].times;
      c.r = curves[k].values[obs];
      nlohmann::json fits;
      const auto record = [&](const char* name, auto&& fn) {
        try {
          const analysis::FitResult f = fn();
          fits[name] = {{"value", f.value},
                        {"stderr", f.stderr_},
                        {"window", {f.window_lo, f.window_hi}},
                        {"residual", f.residual_norm}};
        } catch (const analysis::FitError& err) {
          fits[name] = {{"error", err.what()}};
        }
      };
      record("plateau", [&] { return analysis::plateau_height(c); });
      record("ramp_rate", [&] { return analysis::ramp_rate(c); });
      double tau = 0.0;
      record("crossover", [&] {
        const auto f = analysis::crossover_time(c);
        tau = f.value;
        return f;
      });
      record("log_slope", [&] { return analysis::log_slope(c, tau); });
      entry["fits"][curves[k].names[obs]] = fits;
    }
    report["curves"].push_back(entry);
  }

  ensure_parent_dir(opt.output_path);
  io::write_text_file(opt.output_path + ".analysis.json", report.dump(2) + "\n");
  std::cout << "wrote " << opt.output_path << ".analysis.json\n";
  return kExitOk;
}

int run_sweep(const Options& opt) {
  std::vector<double> eps_axis = opt.sweep_epsilon;
  std::vector<double> period_axis = opt.sweep_period;
  std::vector<int> length_axis = opt.sweep_length;
  if (eps_axis.empty() && period_axis.empty() && length_axis.empty())
    throw std::invalid_argument("sweep mode needs at least one non-empty axis");
  if (eps_axis.empty()) eps_axis = {opt.epsilon};
  if (period_axis.empty()) period_axis = {opt.base_period};
  if (length_axis.empty()) length_axis = {opt.chain_length};

  struct Point {
    std::size_t index;
    double epsilon, period;
    int length;
  };
  std::vector<Point> points;
  for (double e : eps_axis)
    for (double p : period_axis)
      for (int l : length_axis)
        points.push_back({points.size(), e, p, l});

  struct Row {
    bool ok = false;
    std::string message;
    double plateau = 0, gamma = 0, tau = 0, logb = 0;
    bool has_plateau = false, has_gamma = false, has_tau = false, has_logb = false;
  };
  std::vector<Row> rows(points.size());

  const auto work = [&](const Point& pt) {
    Row row;
    try {
      Options local = opt;
      local.epsilon = pt.epsilon;
      local.base_period = pt.period;
      local.chain_length = pt.length;
      local.seed = derive_seed(opt.seed, pt.index);
      auto config = experiment_config(local);
      const auto curve = use_sequential_engine(local, config)
                             ? evolve::run_random_experiment(config)
                             : evolve::run_fibonacci_experiment(config);
      if (opt.sweep_save_curves) {
        const std::string base = opt.output_path + ".point" + std::to_string(pt.index);
        io::write_relaxation_csv(base + ".csv", curve);
        io::write_meta_json(base + ".meta.json", curve);
      }
      analysis::Curve c;
      c.t = curve.times;
      c.r = curve.values[0];
      try {
        row.plateau = analysis::plateau_height(c).value;
        row.has_plateau = true;
      } catch (const analysis::FitError&) {}
      try {
        row.gamma = analysis::ramp_rate(c).value;
        row.has_gamma = true;
      } catch (const analysis::FitError&) {}
      try {
        row.tau = analysis::crossover_time(c).value;
        row.has_tau = true;
        row.logb = analysis::log_slope(c, row.tau).value;
        row.has_logb = true;
      } catch (const analysis::FitError&) {}
      row.ok = true;
    } catch (const std::exception& err) {
      row.ok = false;
      row.message = err.what();
    }
    return row;
  };

  const int workers = std::max(1, opt.sweep_workers);
  std::atomic<std::size_t> cursor{0};
  std::vector<std::future<void>> pool;
  for (int w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (;;) {
        const std::size_t k = cursor.fetch_add(1);
        if (k >= points.size()) return;
        rows[k] = work(points[k]);
      }
    }));
  }
  for (auto& f : pool) f.get();

  std::ostringstream os;
  os.precision(17);
  Options hash_opt = opt;
  os << "# config=" << io::config_hash(experiment_config(hash_opt)) << "\n";
  os << "index,epsilon,T0,L,status,plateau,gamma,tau,log_slope,message\n";
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    const auto& row = rows[k];
    os << pt.index << "," << pt.epsilon << "," << pt.period << "," << pt.length << ","
       << (row.ok ? "ok" : "error") << ",";
    if (row.has_plateau) os << row.plateau;
    os << ",";
    if (row.has_gamma) os << row.gamma;
    os << ",";
    if (row.has_tau) os << row.tau;
    os << ",";
    if (row.has_logb) os << row.logb;
    os << "," << row.message << "\n";
  }
  ensure_parent_dir(opt.output_path);
  io::write_text_file(opt.output_path + ".sweep.csv", os.str());
  std::cout << "wrote " << opt.output_path << ".sweep.csv (" << points.size() << " points)\n";

  for (const auto& row : rows)
    if (!row.ok) std::cout << "note: point failed: " << row.message << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"polyfractal dynamical-decoupling simulator"};
  std::string config_path;
  app.add_option("--config", config_path, "INI config file (sections chain/protocol/...)");

  app.add_option("--mode", opt.mode, "relax | spectrum | analyze | validate | sweep")
      ->check(CLI::IsMember({"relax", "spectrum", "analyze", "validate", "sweep"}));

  app.add_option("--chain.L", opt.chain_length, "number of spin sites");
  app.add_option("--chain.V", opt.chain_quartic, "quartic coupling");
  app.add_flag("--chain.single_spin", opt.single_spin, "single spin in a static field");

  app.add_option("--protocol.n_s", opt.num_drives, "number of drive unitaries (1 or 2)");
  app.add_option("--protocol.n_f", opt.num_layers, "number of fractal layers (1 or 2)");
  app.add_option("--protocol.T0", opt.base_period, "base drive period");

  app.add_option("--noise.kind", opt.noise_kind, "ideal | synchronous | asynchronous | fibonacci");
  app.add_option("--noise.epsilon", opt.epsilon, "noise amplitude");
  app.add_option("--noise.seed", opt.seed, "master seed")->envname("FIBDD_SEED");

  app.add_option("--limits.max_depth", opt.max_depth, "recursion depth for fibonacci runs");
  app.add_option("--limits.max_boundaries", opt.max_boundaries, "boundaries for sequential runs");
  app.add_option("--limits.points_per_decade", opt.points_per_decade, "sequential recording density");
  app.add_option("--limits.record", opt.record, "auto | depths | boundaries")
      ->check(CLI::IsMember({"auto", "depths", "boundaries"}));

  app.add_option("--observables", opt.observables, "drive indices to track (default: all)");

  app.add_option("--spectrum.duration", opt.spectrum_duration, "waveform duration");
  app.add_option("--spectrum.boundaries", opt.spectrum_boundaries, "boundary count (overrides duration)");
  app.add_option("--spectrum.points", opt.spectrum_points, "frequency grid size");
  app.add_option("--spectrum.label", opt.spectrum_label, "parity label, e.g. 1 0");

  app.add_option("--analyze.inputs", opt.analyze_inputs, "curve CSV files");
  app.add_flag("--analyze.force", opt.analyze_force, "allow mismatched config hashes");

  app.add_option("--sweep.epsilon", opt.sweep_epsilon, "epsilon axis");
  app.add_option("--sweep.T0", opt.sweep_period, "base period axis");
  app.add_option("--sweep.L", opt.sweep_length, "chain length axis");
  app.add_option("--sweep.workers", opt.sweep_workers, "parallel workers");
  app.add_flag("--sweep.save_curves", opt.sweep_save_curves, "write per-point curve files");

  app.add_option("--output.path", opt.output_path, "output path prefix");

  try {
    // Expand --config into injected arguments; explicit flags keep priority.
    std::vector<std::string> raw(argv + 1, argv + argc);
    std::vector<std::string> given_flags;
    for (const auto& a : raw)
      if (a.rfind("--", 0) == 0) given_flags.push_back(a.substr(0, a.find('=')));
    std::vector<std::string> full;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] == "--config" && k + 1 < raw.size()) {
        const auto injected = config_file_args(raw[k + 1], given_flags);
        full.insert(full.end(), injected.begin(), injected.end());
        ++k;
      } else if (raw[k].rfind("--config=", 0) == 0) {
        const auto injected = config_file_args(raw[k].substr(9), given_flags);
        full.insert(full.end(), injected.begin(), injected.end());
      } else {
        full.push_back(raw[k]);
      }
    }
    std::vector<const char*> cargs = {argv[0]};
    for (const auto& a : full) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (opt.mode == "relax") return run_relax(opt);
    if (opt.mode == "spectrum") return run_spectrum(opt);
    if (opt.mode == "validate") return run_validate(opt);
    if (opt.mode == "analyze") return run_analyze(opt);
    if (opt.mode == "sweep") return run_sweep(opt);
    std::cerr << "unknown mode: " << opt.mode << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitNumerical;
  }
}
