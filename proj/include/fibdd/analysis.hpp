#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fibdd::analysis {

struct Curve {
  std::vector<double> t;
  std::vector<double> r;
};

struct FitResult {
  double value = 0.0;
  double stderr_ = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual_norm = 0.0;
};

/// Raised when a curve does not contain the requested feature; what() names
/// the missing piece ("plateau not detected", "no linear window found",
/// "missing log segment", "window too short").
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tunable detection thresholds. Defaults are the documented ones; they can
/// be overridden from the run configuration.
struct FitPolicy {
  double plateau_lo = 10.0;         // plateau window, absolute time units
  double plateau_hi = 100.0;
  double plateau_slope_limit = 0.10;  // max |d median / d log10 t| per decade, relative
  double transient_time = 2.0;        // ignore everything before the microscopic rise
  double ramp_lower_factor = 2.0;     // ramp window: R in [factor * plateau, ramp_upper]
  double ramp_upper = 0.3;
  int min_window_points = 4;
  double log_stability = 2.5;    // max ratio of local d R / d ln t inside the log window
  double log_min_decades = 0.8;  // minimum decade span of the log window
  double log_max_r = 0.9;        // saturation guard
};

/// Median R over the window; refuses windows whose trend exceeds 10% of the
/// level per decade (curve still rising or already ramping).
FitResult plateau_height(const Curve& curve, const FitPolicy& policy = {});

/// Least-squares slope Gamma of R vs t over the detected linear window
/// (R between ramp_lower_factor x plateau estimate and ramp_upper).
FitResult ramp_rate(const Curve& curve, const FitPolicy& policy = {});

/// Intersection of the fitted linear ramp with the fitted logarithmic tail.
FitResult crossover_time(const Curve& curve, const FitPolicy& policy = {});

/// Slope b of R vs ln t over the detected stable window at t >= window_from
/// (pass the fitted crossover time to stay beyond the ramp).
FitResult log_slope(const Curve& curve, double window_from = 0.0, const FitPolicy& policy = {});

/// Rescale curves for a plateau collapse: R -> R / T0^exponent.
std::vector<Curve> collapse_plateau(const std::vector<Curve>& curves,
                                    const std::vector<double>& base_periods, double exponent);

/// Rescale curves for a ramp collapse: (t, R) -> (t eps T0, R / (eps T0)).
std::vector<Curve> collapse_ramp(const std::vector<Curve>& curves,
                                 const std::vector<double>& epsilons,
                                 const std::vector<double>& base_periods);

/// Sup distance between rescaled curves over [x_lo, x_hi] (interpolated in
/// log x), divided by the curves' value range over the window.
double collapse_sup_distance(const std::vector<Curve>& rescaled, double x_lo, double x_hi,
                             int samples = 64);

/// Least-squares slope of log y vs log x, with its standard error.
FitResult fit_exponent(const std::vector<double>& x, const std::vector<double>& y);

/// Plain least squares y = a + b x; returns (b, a, stderr of b, rms resid).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_err = 0.0;
  double rms_residual = 0.0;
};
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fibdd::analysis
