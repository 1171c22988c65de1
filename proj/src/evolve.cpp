#include "fibdd/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "fibdd/fibrec.hpp"

namespace fibdd::evolve {

Matrix closest_unitary(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

bool UnitarityGuard::maintain(Matrix& u) {
  ++checks;
  const double defect = unitarity_defect(u);
  worst_defect = std::max(worst_defect, defect);
  if (defect <= threshold) return false;
  u = closest_unitary(u);
  ++events;
  return true;
}

Eigensystem Eigensystem::of(const Matrix& h, double tol) {
  require_hermitian(h, tol, "Eigensystem");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("Eigensystem: eigendecomposition failed");
  Eigensystem es;
  es.energies = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  return es;
}

Matrix Eigensystem::propagator(double duration) const {
  Eigen::VectorXcd phases(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k)
    phases[k] = std::exp(Complex(0.0, -energies[k] * duration));
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

Matrix propagator(const Matrix& h, double duration) {
  return Eigensystem::of(h).propagator(duration);
}

double relaxation_value(const Matrix& u_t, const Matrix& x, int dim) {
  if (u_t.rows() != x.rows() || u_t.cols() != x.cols() || u_t.rows() != dim)
    throw std::invalid_argument("relaxation_value: dimension mismatch");
  const Complex tr = (u_t.adjoint() * x * u_t * x).trace();
  const double r = 1.0 - std::abs(tr) / double(dim);
  return std::clamp(r, 0.0, 1.0);
}

double relaxation_value(const Matrix& u_t, const spinchain::SectorOp& x) {
  if (u_t.rows() != x.dim())
    throw std::invalid_argument("relaxation_value: dimension mismatch");
  const double r = 1.0 - std::abs(x.relaxation_trace(u_t)) / double(x.dim());
  return std::clamp(r, 0.0, 1.0);
}

void ExperimentConfig::validate() const {
  proto.validate();
  noise.validate();
  if (single_spin) {
    if (proto.num_drives != 1)
      throw std::invalid_argument("config: the single-spin setup is driven by X_1 only");
  } else {
    chain.validate();
    if (chain.length < 2 || chain.length % 2 != 0)
      throw std::invalid_argument("config: chain runs need an even length >= 2");
  }
  if (observables.empty()) throw std::invalid_argument("config: no observables selected");
  for (int i : observables)
    if (i < 1 || i > proto.num_drives)
      throw std::invalid_argument("config: observables must name one of the drives");
  if (max_depth < 2 || max_depth > 90)
    throw std::invalid_argument("config: max_depth must be in [2, 90]");
  if (max_boundaries < 1 || max_boundaries > 2000000)
    throw std::invalid_argument("config: max_boundaries must be in [1, 2e6]");
  if (points_per_decade < 1) throw std::invalid_argument("config: points_per_decade >= 1");
}

namespace {

struct Workspace {
  Matrix hamiltonian;                        // in the simulated basis
  std::vector<spinchain::SectorOp> drives;   // X_1[, X_2]
  std::vector<Matrix> drive_dense;
  int dim = 0;
  std::string trace_scope;
};

Workspace build_workspace(const ExperimentConfig& config) {
  using namespace spinchain;
  Workspace w;
  if (config.single_spin) {
    ChainSpec spec;
    spec.length = 1;
    SectorBasis full;  // no projection for L = 1: X_1 flips the parity
    full.parity = +1;
    full.states = {0, 1};
    full.dim = 2;
    w.hamiltonian = single_spin_hamiltonian();
    w.drives.push_back(sector_op(drive_string(spec, 1), full));
    w.trace_scope = "full-space";
    w.dim = 2;
  } else {
    const ChainSpec& spec = config.chain;
    const SectorBasis basis = SectorBasis::build(spec, +1);
    w.hamiltonian = sector_matrix(hamiltonian_terms(spec), basis);
    for (int i = 1; i <= config.proto.num_drives; ++i)
      w.drives.push_back(sector_op(drive_string(spec, i), basis));
    w.trace_scope = "parity-sector";
    w.dim = basis.dim;
  }
  for (const auto& d : w.drives) w.drive_dense.push_back(d.dense());
  return w;
}

std::vector<long long> log_spaced_counts(long long max_count, int per_decade, long long snap) {
  std::set<long long> counts;
  const auto add = [&](long long m) {
    if (snap > 1) m = (m / snap) * snap;
    if (m >= 1 && m <= max_count) counts.insert(m);
  };
  add(1);
  add(max_count);
  const double step = 1.0 / double(per_decade);
  for (double e = step;; e += step) {
    const long long m = static_cast<long long>(std::llround(std::pow(10.0, e)));
    if (m >= max_count) break;
    add(m);
  }
  return {counts.begin(), counts.end()};
}

}  // namespace

RelaxationCurve run_fibonacci_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.noise.kind != drive::NoiseKind::Fibonacci &&
      config.noise.kind != drive::NoiseKind::Ideal)
    throw std::invalid_argument("run_fibonacci_experiment: noise must be fibonacci or ideal");

  const Workspace w = build_workspace(config);
  const double t0 = config.proto.base_period;
  const double eps = config.noise.kind == drive::NoiseKind::Fibonacci ? config.noise.epsilon : 0.0;
  const double t_plus = drive::fibonacci_long(t0, eps);
  const double t_minus = drive::fibonacci_short(t0, eps);

  const Eigensystem es = Eigensystem::of(w.hamiltonian);
  const Matrix u_plus = es.propagator(t_plus);
  const Matrix u_minus = es.propagator(t_minus);

  const auto plan = fibrec::derive_plan(config.proto.num_drives, config.proto.num_layers);
  auto seeds = fibrec::make_seeds(plan, u_minus, u_plus, w.drive_dense);

  RelaxationCurve curve;
  curve.config = config;
  curve.info.engine = "fibonacci-recursion";
  curve.info.trace_scope = w.trace_scope;
  curve.info.sector_dim = w.dim;
  curve.info.t_plus = t_plus;
  curve.info.t_minus = t_minus;
  curve.times.push_back(0.0);
  for (int obs : config.observables) {
    curve.names.push_back("R_X" + std::to_string(obs));
    curve.values.push_back({0.0});
  }

  UnitarityGuard guard;
  fibrec::recursive_evolve(
      plan, std::move(seeds), config.max_depth, {},
      [&](int depth, long long, const Matrix& u) {
        curve.times.push_back(fibrec::elapsed_time(depth, t_plus, t_minus));
        for (std::size_t k = 0; k < config.observables.size(); ++k)
          curve.values[k].push_back(relaxation_value(u, w.drives[config.observables[k] - 1]));
      },
      &guard);

  curve.info.drift_checks = guard.checks;
  curve.info.reunitarizations = guard.events;
  curve.info.worst_drift = guard.worst_defect;
  return curve;
}

RelaxationCurve run_random_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.noise.kind == drive::NoiseKind::Fibonacci)
    throw std::invalid_argument("run_random_experiment: use the fibonacci engine instead");

  const Workspace w = build_workspace(config);
  const Eigensystem es = Eigensystem::of(w.hamiltonian);
  const auto schedule =
      drive::realize_schedule(config.proto, config.noise, config.max_boundaries);

  // Work in the eigenbasis of H: one diagonal rescale per interval plus one
  // dense multiplication per nontrivial boundary mask.
  std::vector<Matrix> mask_op(1 << config.proto.num_drives);
  std::vector<bool> mask_used(mask_op.size(), false);
  for (std::uint8_t mask : schedule.boundary_ops) mask_used[mask] = true;
  for (std::size_t mask = 1; mask < mask_op.size(); ++mask) {
    if (!mask_used[mask]) continue;
    Matrix d = Matrix::Identity(w.dim, w.dim);
    for (int i = 1; i <= config.proto.num_drives; ++i)
      if (mask & (1u << (i - 1))) d = w.drive_dense[i - 1] * d;
    mask_op[mask] = es.vectors.adjoint() * d * es.vectors;
  }

  const auto record_counts =
      log_spaced_counts(config.max_boundaries, config.points_per_decade,
                        config.snap_to_cycle ? config.proto.cycle_boundaries() : 1);

  RelaxationCurve curve;
  curve.config = config;
  curve.info.engine = "sequential";
  curve.info.trace_scope = w.trace_scope;
  curve.info.sector_dim = w.dim;
  curve.info.t_plus = config.proto.base_period;
  curve.info.t_minus = config.proto.base_period;
  curve.times.push_back(0.0);
  for (int obs : config.observables) {
    curve.names.push_back("R_X" + std::to_string(obs));
    curve.values.push_back({0.0});
  }

  UnitarityGuard guard;
  Matrix v = es.vectors.adjoint();  // holds W^dag U(t); U(0) = I
  Eigen::ArrayXcd scale(w.dim);
  double elapsed = 0.0;
  std::size_t next_record = 0;
  for (long long m = 1; m <= schedule.boundaries(); ++m) {
    const double dt = schedule.durations[m - 1];
    for (int k = 0; k < w.dim; ++k)
      scale[k] = std::exp(Complex(0.0, -es.energies[k] * dt));
    v.array().colwise() *= scale;
    const std::uint8_t mask = schedule.boundary_ops[m - 1];
    if (mask) v = mask_op[mask] * v;
    elapsed += dt;

    if (m % 4096 == 0) guard.maintain(v);

    while (next_record < record_counts.size() && record_counts[next_record] == m) {
      const Matrix u = es.vectors * v;
      curve.times.push_back(elapsed);
      for (std::size_t k = 0; k < config.observables.size(); ++k)
        curve.values[k].push_back(relaxation_value(u, w.drives[config.observables[k] - 1]));
      ++next_record;
    }
  }

  curve.info.drift_checks = guard.checks;
  curve.info.reunitarizations = guard.events;
  curve.info.worst_drift = guard.worst_defect;
  return curve;
}

}  // namespace fibdd::evolve
