#include <doctest.h>

#include <cmath>

#include "fibdd/analysis.hpp"

using namespace fibdd::analysis;

namespace {

/// Geometric time grid resembling the stroboscopic Fibonacci times.
std::vector<double> geometric_times(double lo, double hi, double ratio = 1.3) {
  std::vector<double> t;
  for (double x = lo; x <= hi; x *= ratio) t.push_back(x);
  return t;
}

Curve from_function(const std::vector<double>& times, double (*f)(double)) {
  Curve c;
  c.t = times;
  for (double t : times) c.r.push_back(f(t));
  return c;
}

}  // namespace

TEST_CASE("plateau: constant curve returns the constant; rising curve refused") {
  Curve flat;
  flat.t = geometric_times(0.5, 1000.0);
  const double level = 3.0 * 0.04 * 0.04;  // c T0^2 with c = 3, T0 = 0.2
  for (double t : flat.t) flat.r.push_back(level);
  const auto fit = plateau_height(flat);
  CHECK(fit.value == doctest::Approx(level).epsilon(1e-12));
  CHECK(fit.stderr_ == doctest::Approx(0.0));

  const auto rising = from_function(geometric_times(0.5, 1000.0),
                                    +[](double t) { return 1e-3 * t; });
  CHECK_THROWS_WITH_AS(plateau_height(rising), doctest::Contains("still rising"), FitError);
}

TEST_CASE("ramp: synthetic linear slope recovered to high precision") {
  const auto curve = from_function(geometric_times(1.0, 2e5, 1.25),
                                   +[](double t) { return 3e-6 * t; });
  const auto fit = ramp_rate(curve);
  CHECK(fit.value == doctest::Approx(3e-6).epsilon(1e-6));
  CHECK(fit.stderr_ < 1e-8);
}

TEST_CASE("ramp: flat curve has no linear window") {
  Curve flat;
  flat.t = geometric_times(0.5, 1e4);
  for (double t : flat.t) flat.r.push_back(0.01);
  CHECK_THROWS_WITH_AS(ramp_rate(flat), doctest::Contains("no linear window"), FitError);
}

namespace {

constexpr double kGamma = 1e-4;
constexpr double kBreak = 1000.0;   // crossover of the synthetic piecewise curve
double piecewise_linear_log(double t) {
  // Linear up to the break, then continuous logarithmic growth with a
  // distinctly smaller slope (a slope-matched junction would make the two
  // fitted lines tangent and the intersection ill-conditioned).
  const double b = 0.35 * kGamma * kBreak;
  const double a = kGamma * kBreak - b * std::log(kBreak);
  return t <= kBreak ? kGamma * t : a + b * std::log(t);
}

}  // namespace

TEST_CASE("crossover: synthetic piecewise curve breaks near 10^3") {
  const auto curve = from_function(geometric_times(1.0, 1e6, 1.18), &piecewise_linear_log);
  const auto fit = crossover_time(curve);
  CHECK(fit.value > 800.0);
  CHECK(fit.value < 1250.0);
}

TEST_CASE("crossover: saturating random-noise curve has no log segment") {
  const auto curve = from_function(geometric_times(1.0, 1e6, 1.18),
                                   +[](double t) { return 1.0 - std::exp(-1e-4 * t); });
  CHECK_THROWS_WITH_AS(crossover_time(curve), doctest::Contains("missing log segment"), FitError);
}

TEST_CASE("log slope: pure logarithm recovered within 5%") {
  const auto curve = from_function(geometric_times(10.0, 1e6, 1.22),
                                   +[](double t) { return 0.05 + 0.01 * std::log(t); });
  const auto fit = log_slope(curve, 20.0);
  CHECK(fit.value == doctest::Approx(0.01).epsilon(0.05));

  // A window pushed against the end of the data is refused.
  CHECK_THROWS_WITH_AS(log_slope(curve, 0.9e6), doctest::Contains("window too short"), FitError);
}

TEST_CASE("collapse transforms: identity and plateau/ramp modes") {
  Curve base;
  base.t = geometric_times(1.0, 1e4);
  for (double t : base.t) base.r.push_back(0.01 * std::log(1.0 + t));

  const auto same = collapse_ramp({base}, {1.0}, {1.0});
  CHECK(same[0].t == base.t);
  CHECK(same[0].r == base.r);
  const auto same2 = collapse_plateau({base}, {0.37}, 0.0);
  CHECK(same2[0].r == base.r);

  // Two synthetic plateau curves c T0^2 collapse to identical constants.
  std::vector<Curve> plateaus;
  std::vector<double> periods = {0.1, 0.4};
  for (double t0 : periods) {
    Curve c;
    c.t = geometric_times(1.0, 1e3);
    for (double t : c.t) c.r.push_back(2.5 * t0 * t0);
    plateaus.push_back(c);
  }
  const auto collapsed = collapse_plateau(plateaus, periods, 2.0);
  for (std::size_t k = 0; k < collapsed[0].r.size(); ++k)
    CHECK(collapsed[0].r[k] == doctest::Approx(collapsed[1].r[k]).epsilon(1e-12));

  // Ramp mode: R = Gamma t with Gamma = c (eps T0)^2 collapses onto y = c x.
  std::vector<Curve> ramps;
  std::vector<double> epsilons = {0.01, 0.04};
  std::vector<double> periods2 = {0.2, 0.05};
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    Curve c;
    c.t = geometric_times(1.0, 1e6, 1.35);
    const double gamma = 4.0 * std::pow(epsilons[k] * periods2[k], 2);
    for (double t : c.t) c.r.push_back(gamma * t);
    ramps.push_back(c);
  }
  const auto rescaled = collapse_ramp(ramps, epsilons, periods2);
  CHECK(collapse_sup_distance(rescaled, 1e-2, 1.0) < 1e-9);
}

TEST_CASE("fitters are scale equivariant once the policy scales along") {
  // The window thresholds are dimensional constants; rescaling data and
  // policy together must rescale every fitted value exactly.
  const auto curve = from_function(geometric_times(1.0, 1e6, 1.2), &piecewise_linear_log);
  const double st = 7.0, sr = 0.25;
  Curve scaled;
  for (std::size_t k = 0; k < curve.t.size(); ++k) {
    scaled.t.push_back(st * curve.t[k]);
    scaled.r.push_back(sr * curve.r[k]);
  }
  FitPolicy policy;  // default thresholds for the base curve
  FitPolicy policy_scaled = policy;
  policy_scaled.transient_time *= st;
  policy_scaled.plateau_lo *= st;
  policy_scaled.plateau_hi *= st;
  policy_scaled.ramp_upper *= sr;
  policy_scaled.log_max_r *= sr;

  const auto gamma = ramp_rate(curve, policy);
  const auto gamma_scaled = ramp_rate(scaled, policy_scaled);
  CHECK(gamma_scaled.value == doctest::Approx(gamma.value * sr / st).epsilon(1e-9));

  const auto tau = crossover_time(curve, policy);
  const auto tau_scaled = crossover_time(scaled, policy_scaled);
  CHECK(tau_scaled.value == doctest::Approx(tau.value * st).epsilon(1e-6));

  const auto b = log_slope(curve, tau.value, policy);
  const auto b_scaled = log_slope(scaled, tau_scaled.value, policy_scaled);
  CHECK(b_scaled.value == doctest::Approx(b.value * sr).epsilon(1e-9));
}

TEST_CASE("exponent fitter on exact power laws") {
  std::vector<double> x, y;
  for (double v : {0.02, 0.04, 0.08, 0.16, 0.32}) {
    x.push_back(v);
    y.push_back(1.7 * std::pow(v, 2.0));
  }
  const auto fit = fit_exponent(x, y);
  CHECK(fit.value == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(fit.stderr_ < 1e-9);
}

TEST_CASE("determinism: identical inputs give identical fits") {
  const auto curve = from_function(geometric_times(1.0, 1e6, 1.2), &piecewise_linear_log);
  const auto a = crossover_time(curve);
  const auto b = crossover_time(curve);
  CHECK(a.value == b.value);
  CHECK(a.stderr_ == b.stderr_);
}
