#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibdd/drive.hpp"
#include "fibdd/spinchain.hpp"
#include "fibdd/types.hpp"
#include "fibdd/unitarity.hpp"

namespace fibdd::evolve {

/// Eigendecomposition of a Hermitian generator, kept around so that every
/// propagator for the same H costs one diagonal rescale.
struct Eigensystem {
  RealVector energies;
  Matrix vectors;  // H = vectors * diag(energies) * vectors^dag

  static Eigensystem of(const Matrix& h, double tol = 1e-12);
  Matrix propagator(double duration) const;  // exp(-i H T)
};

Matrix propagator(const Matrix& h, double duration);

/// R = 1 - |Tr(U^dag X U X)| / dim, clamped into [0, 1].
double relaxation_value(const Matrix& u_t, const Matrix& x, int dim);
double relaxation_value(const Matrix& u_t, const spinchain::SectorOp& x);

enum class RecordPolicy {
  Default,           // Fibonacci depths for fibonacci/ideal, log-spaced otherwise
  FibonacciDepths,
  LogBoundaries,
};

struct ExperimentConfig {
  bool single_spin = false;
  spinchain::ChainSpec chain;
  drive::ProtocolSpec proto;
  drive::NoiseModel noise;
  int max_depth = 60;                  // recursion runs
  long long max_boundaries = 100000;   // sequential runs
  int points_per_decade = 40;          // sequential recording density
  RecordPolicy record = RecordPolicy::Default;
  bool snap_to_cycle = false;          // record only at full Floquet cycles
  std::vector<int> observables = {1};  // drive indices to track

  void validate() const;
};

struct RunInfo {
  std::string engine;       // "fibonacci-recursion" or "sequential"
  std::string trace_scope;  // "parity-sector" or "full-space"
  int sector_dim = 0;
  long long drift_checks = 0;
  long long reunitarizations = 0;
  double worst_drift = 0.0;
  double t_plus = 0.0;
  double t_minus = 0.0;
};

/// Stroboscopic relaxation data R_X(t); times start at t = 0 where R = 0.
struct RelaxationCurve {
  std::vector<double> times;
  std::vector<std::string> names;            // "R_X1", ...
  std::vector<std::vector<double>> values;   // [observable][time index]
  ExperimentConfig config;
  RunInfo info;

  int observable_count() const { return static_cast<int>(values.size()); }
};

/// Fibonacci (or ideal) drive evolved by the category recursion; records at
/// every depth n >= 2 up to max_depth. The exponential growth of F_n is what
/// buys exponentially long simulation times.
RelaxationCurve run_fibonacci_experiment(const ExperimentConfig& config);

/// Synchronous/asynchronous (or ideal) drive evolved boundary by boundary;
/// records at log-spaced boundary counts.
RelaxationCurve run_random_experiment(const ExperimentConfig& config);

}  // namespace fibdd::evolve
