#include "fibdd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fibdd::analysis {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct WindowPoints {
  std::vector<double> t, r;
  std::vector<std::size_t> idx;
};

WindowPoints points_in_time_window(const Curve& c, double lo, double hi) {
  WindowPoints w;
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    if (c.t[k] >= lo && c.t[k] <= hi) {
      w.t.push_back(c.t[k]);
      w.r.push_back(c.r[k]);
      w.idx.push_back(k);
    }
  }
  return w;
}

/// Rough plateau level for the ramp gate: the smallest R in the decade right
/// after the microscopic transient. The stroboscopic wiggle sits on top of
/// the plateau, so the window minimum tracks the flat level while staying
/// below the early ramp.
double plateau_estimate(const Curve& c, const FitPolicy& policy) {
  double best = std::numeric_limits<double>::infinity();
  int count = 0;
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    if (c.t[k] < policy.transient_time || c.t[k] > 10.0 * policy.transient_time) continue;
    best = std::min(best, c.r[k]);
    ++count;
  }
  if (count < 2) throw FitError("plateau not detected (too little data past the transient)");
  return best;
}

/// Centered local slopes dR/d ln t on the interior points of a curve.
struct LocalSlopes {
  std::vector<double> t, s;
  std::vector<std::size_t> idx;
};

LocalSlopes local_log_slopes(const Curve& c, double t_min) {
  LocalSlopes out;
  for (std::size_t k = 1; k + 1 < c.t.size(); ++k) {
    if (c.t[k - 1] <= 0.0 || c.t[k] < t_min) continue;
    const double dl = std::log(c.t[k + 1]) - std::log(c.t[k - 1]);
    if (dl <= 0.0) continue;
    out.t.push_back(c.t[k]);
    out.s.push_back((c.r[k + 1] - c.r[k - 1]) / dl);
    out.idx.push_back(k);
  }
  return out;
}

/// Light smoothing against the stroboscopic wiggle: centered 3-point mean.
std::vector<double> smooth3(const std::vector<double>& v) {
  if (v.size() < 3) return v;
  std::vector<double> out(v.size());
  out.front() = v.front();
  out.back() = v.back();
  for (std::size_t k = 1; k + 1 < v.size(); ++k)
    out[k] = (v[k - 1] + v[k] + v[k + 1]) / 3.0;
  return out;
}

struct LogWindow {
  std::size_t first = 0, last = 0;  // indices into the curve
  LineFit fit;                      // R = a + b ln t
  bool found = false;
};

/// Trailing window where the curve grows logarithmically: R = a + b ln t fits
/// with b > 0 and beats a straight line in t over the same window (a genuine
/// log segment bends on a linear axis once it spans a decade or more).
LogWindow detect_log_window(const Curve& c, const FitPolicy& policy, double t_min) {
  LogWindow out;
  const double t_end = c.t.empty() ? 0.0 : c.t.back();
  const double start_floor = std::max(t_min, policy.transient_time);

  // Prefer the widest window (everything past t_min), falling back to
  // trailing stretches when the early part is not yet logarithmic.
  const double full = start_floor > 0.0 ? std::log10(t_end / start_floor) : 6.0;
  for (double decades : {full, 2.5, 2.0, 1.5, 1.0, policy.log_min_decades}) {
    if (decades <= 0.0) continue;
    const double t_from = std::max(start_floor, t_end / std::pow(10.0, decades));
    std::vector<double> t, lt, r;
    std::size_t first = c.t.size(), last = 0;
    for (std::size_t k = 0; k < c.t.size(); ++k) {
      if (c.t[k] < t_from || c.t[k] <= 0.0) continue;
      if (c.r[k] > policy.log_max_r) continue;
      if (first == c.t.size()) first = k;
      last = k;
      t.push_back(c.t[k]);
      lt.push_back(std::log(c.t[k]));
      r.push_back(c.r[k]);
    }
    if (t.size() < static_cast<std::size_t>(policy.min_window_points) + 1) continue;
    if (std::log10(t.back() / t.front()) < policy.log_min_decades) continue;

    const auto rs = smooth3(r);
    const LineFit log_fit = least_squares(lt, rs);
    const LineFit lin_fit = least_squares(t, rs);
    if (log_fit.slope <= 0.0) continue;
    const double range = *std::max_element(rs.begin(), rs.end()) -
                         *std::min_element(rs.begin(), rs.end());
    if (range <= 0.0) continue;
    if (log_fit.rms_residual > 0.35 * range) continue;
    if (log_fit.rms_residual >= lin_fit.rms_residual) continue;

    out.fit = least_squares(lt, r);  // final fit on the raw values
    out.fit.slope_err = log_fit.slope_err;
    out.first = first;
    out.last = last;
    out.found = out.fit.slope > 0.0;
    if (out.found) return out;
  }
  return out;
}

struct RampWindow {
  std::size_t first = 0, last = 0;
  LineFit fit;  // R = a + Gamma t
  double plateau = 0.0;
};

RampWindow detect_ramp(const Curve& c, const FitPolicy& policy) {
  if (c.t.size() < 6) throw FitError("no linear window found (too few points)");
  const double plateau = plateau_estimate(c, policy);
  const double lo = policy.ramp_lower_factor * plateau;

  // Candidate points: past the transient, between 2x plateau and the cap.
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < c.t.size(); ++k) {
    if (c.t[k] < policy.transient_time) continue;
    if (c.r[k] <= lo || c.r[k] >= policy.ramp_upper) continue;
    idx.push_back(k);
  }
  if (idx.size() < static_cast<std::size_t>(policy.min_window_points))
    throw FitError("no linear window found");

  // The linear segment is the contiguous run of approximately constant local
  // slope dR/dt; in the log tail that slope decays as 1/t, so runs spanning
  // most of a decade separate the two cleanly. Among stable runs take the
  // steepest (the tail's residual runs are always shallower).
  std::vector<double> g(idx.size(), 0.0);
  for (std::size_t j = 0; j + 1 < idx.size(); ++j)
    g[j] = (c.r[idx[j + 1]] - c.r[idx[j]]) / (c.t[idx[j + 1]] - c.t[idx[j]]);
  if (idx.size() >= 2) g.back() = g[idx.size() - 2];

  struct Run {
    std::size_t a, b;
    double slope;
  };
  std::vector<Run> runs;
  const double ratio_cap = 3.5;
  std::size_t a = 0;
  while (a < g.size()) {
    if (g[a] <= 0.0) {
      ++a;
      continue;
    }
    double gmin = g[a], gmax = g[a];
    std::size_t b = a;
    while (b + 1 < g.size() && g[b + 1] > 0.0) {
      const double lo_next = std::min(gmin, g[b + 1]);
      const double hi_next = std::max(gmax, g[b + 1]);
      if (hi_next / lo_next > ratio_cap) break;
      gmin = lo_next;
      gmax = hi_next;
      ++b;
    }
    if (b > a) runs.push_back({a, b, 0.0});
    a = b + 1;
  }

  const double min_decades = 0.8;
  RampWindow out;
  bool found = false;
  for (auto& run : runs) {
    // g[j] is the forward slope out of point j, so the run covers b+1 points.
    const std::size_t stop = std::min(run.b + 1, idx.size() - 1);
    const std::size_t count = stop - run.a + 1;
    if (count < static_cast<std::size_t>(policy.min_window_points)) continue;
    if (std::log10(c.t[idx[stop]] / c.t[idx[run.a]]) < min_decades) continue;
    // A linear segment grows substantially across a decade; a slow log tail
    // that happens to have a locally stable slope does not.
    if (c.r[idx[stop]] < 1.6 * c.r[idx[run.a]]) continue;
    std::vector<double> t, r;
    for (std::size_t j = run.a; j <= stop; ++j) {
      t.push_back(c.t[idx[j]]);
      r.push_back(c.r[idx[j]]);
    }
    const LineFit fit = least_squares(t, r);
    if (fit.slope <= 0.0) continue;
    if (!found || fit.slope > out.fit.slope) {
      out.first = idx[run.a];
      out.last = idx[stop];
      out.fit = fit;
      found = true;
    }
  }
  if (!found) throw FitError("no linear window found");
  out.plateau = plateau;
  return out;
}

}  // namespace

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("least_squares: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / double(n), my = sy / double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double resid = y[k] - (f.intercept + f.slope * x[k]);
    ss += resid * resid;
  }
  f.rms_residual = std::sqrt(ss / double(n));
  f.slope_err = (n > 2) ? std::sqrt(ss / double(n - 2) / sxx) : 0.0;
  return f;
}

FitResult plateau_height(const Curve& curve, const FitPolicy& policy) {
  const WindowPoints w = points_in_time_window(curve, policy.plateau_lo, policy.plateau_hi);
  if (w.t.size() < 3) throw FitError("plateau not detected (window has too few points)");
  const double level = median_of(w.r);
  if (level <= 0.0) throw FitError("plateau not detected (level is zero)");

  std::vector<double> lt;
  for (double t : w.t) lt.push_back(std::log10(t));
  const LineFit trend = least_squares(lt, w.r);
  if (std::abs(trend.slope) > policy.plateau_slope_limit * level)
    throw FitError("plateau not detected (curve still rising)");

  FitResult out;
  out.value = level;
  double ss = 0;
  for (double r : w.r) ss += (r - level) * (r - level);
  out.residual_norm = std::sqrt(ss / double(w.r.size()));
  out.stderr_ = out.residual_norm / std::sqrt(double(w.r.size()));
  out.window_lo = policy.plateau_lo;
  out.window_hi = policy.plateau_hi;
  return out;
}

FitResult ramp_rate(const Curve& curve, const FitPolicy& policy) {
  const RampWindow ramp = detect_ramp(curve, policy);
  FitResult out;
  out.value = ramp.fit.slope;
  out.stderr_ = ramp.fit.slope_err;
  out.residual_norm = ramp.fit.rms_residual;
  out.window_lo = curve.t[ramp.first];
  out.window_hi = curve.t[ramp.last];
  return out;
}

FitResult crossover_time(const Curve& curve, const FitPolicy& policy) {
  const RampWindow ramp = detect_ramp(curve, policy);
  const LogWindow logw = detect_log_window(curve, policy, curve.t[ramp.last]);
  if (!logw.found) throw FitError("missing log segment");

  // Solve a_r + Gamma tau = a_l + b ln tau. The difference is convex with a
  // minimum at b/Gamma; the physical crossover is the larger root.
  const double gamma = ramp.fit.slope, a_r = ramp.fit.intercept;
  const double b = logw.fit.slope, a_l = logw.fit.intercept;
  const auto gap = [&](double t) { return a_r + gamma * t - (a_l + b * std::log(t)); };
  const double t_star = std::max(b / gamma, curve.t[ramp.first]);
  double tau;
  if (gap(t_star) > 0.0) {
    // The fitted lines never cross: the ramp extrapolation rides above the
    // log line everywhere. Their closest approach is at gamma = b/t, the
    // slope-matching time -- the degenerate limit of the intersection.
    tau = std::clamp(b / gamma, curve.t[ramp.first], curve.t.back());
  } else {
    double hi = t_star;
    const double t_end = curve.t.back() * 100.0;
    while (gap(hi) < 0.0 && hi < t_end) hi *= 2.0;
    if (gap(hi) < 0.0) throw FitError("missing log segment (no crossover before the horizon)");
    double lo = hi / 2.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (gap(mid) < 0.0 ? lo : hi) = mid;
    }
    tau = 0.5 * (lo + hi);
  }

  FitResult out;
  out.value = tau;
  // First-order propagation of the two slope uncertainties.
  const double denom = std::abs(gamma - b / tau);
  out.stderr_ = denom > 0.0 ? (ramp.fit.slope_err + logw.fit.slope_err) / denom : 0.0;
  out.window_lo = curve.t[ramp.first];
  out.window_hi = curve.t[logw.last];
  out.residual_norm = std::max(ramp.fit.rms_residual, logw.fit.rms_residual);
  return out;
}

FitResult log_slope(const Curve& curve, double window_from, const FitPolicy& policy) {
  const double from = std::max(window_from, policy.transient_time);
  if (window_from > 0.0 && curve.t.back() < 10.0 * window_from)
    throw FitError("window too short (need t_max >= 10 tau)");
  const LogWindow logw = detect_log_window(curve, policy, from);
  if (!logw.found) throw FitError("window too short (no stable log segment)");
  FitResult out;
  out.value = logw.fit.slope;
  out.stderr_ = logw.fit.slope_err;
  out.residual_norm = logw.fit.rms_residual;
  out.window_lo = curve.t[logw.first];
  out.window_hi = curve.t[logw.last];
  return out;
}

std::vector<Curve> collapse_plateau(const std::vector<Curve>& curves,
                                    const std::vector<double>& base_periods, double exponent) {
  if (curves.size() != base_periods.size())
    throw std::invalid_argument("collapse_plateau: one base period per curve");
  std::vector<Curve> out = curves;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double scale = std::pow(base_periods[c], exponent);
    for (auto& r : out[c].r) r /= scale;
  }
  return out;
}

std::vector<Curve> collapse_ramp(const std::vector<Curve>& curves,
                                 const std::vector<double>& epsilons,
                                 const std::vector<double>& base_periods) {
  if (curves.size() != epsilons.size() || curves.size() != base_periods.size())
    throw std::invalid_argument("collapse_ramp: one (eps, T0) per curve");
  std::vector<Curve> out = curves;
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double s = epsilons[c] * base_periods[c];
    for (auto& t : out[c].t) t *= s;
    for (auto& r : out[c].r) r /= s;
  }
  return out;
}

namespace {

double interp_log_x(const Curve& c, double x) {
  // Linear interpolation in log x; clamps outside the range.
  if (x <= c.t.front()) return c.r.front();
  if (x >= c.t.back()) return c.r.back();
  const auto it = std::upper_bound(c.t.begin(), c.t.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - c.t.begin());
  const double f = (std::log(x) - std::log(c.t[k - 1])) / (std::log(c.t[k]) - std::log(c.t[k - 1]));
  return c.r[k - 1] + f * (c.r[k] - c.r[k - 1]);
}

}  // namespace

double collapse_sup_distance(const std::vector<Curve>& rescaled, double x_lo, double x_hi,
                             int samples) {
  if (rescaled.size() < 2) throw std::invalid_argument("collapse distance needs >= 2 curves");
  if (!(x_hi > x_lo) || x_lo <= 0.0) throw std::invalid_argument("bad collapse window");
  double sup = 0.0;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (int s = 0; s < samples; ++s) {
    const double x = x_lo * std::pow(x_hi / x_lo, double(s) / double(samples - 1));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : rescaled) {
      const double v = interp_log_x(c, x);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sup = std::max(sup, hi - lo);
    vmin = std::min(vmin, lo);
    vmax = std::max(vmax, hi);
  }
  const double range = vmax - vmin;
  return range > 0.0 ? sup / range : 0.0;
}

FitResult fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_exponent: need >= 2 points");
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0))
      throw std::invalid_argument("fit_exponent: data must be positive");
    lx.push_back(std::log(x[k]));
    ly.push_back(std::log(y[k]));
  }
  const LineFit f = least_squares(lx, ly);
  FitResult out;
  out.value = f.slope;
  out.stderr_ = f.slope_err;
  out.residual_norm = f.rms_residual;
  out.window_lo = *std::min_element(x.begin(), x.end());
  out.window_hi = *std::max_element(x.begin(), x.end());
  return out;
}

}  // namespace fibdd::analysis
