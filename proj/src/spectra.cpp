#include "fibdd/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace fibdd::spectra {

namespace {

/// Breakpoint form: f~(w) = (1/(i w)) sum_k c_k e^{i w tau_k} with
/// c_0 = -s_1, c_k = s_k - s_{k+1} at interior breakpoints, c_M = s_M.
struct JumpSeries {
  std::vector<double> tau;
  std::vector<double> coef;

  explicit JumpSeries(const drive::Waveform& w) {
    const std::size_t segments = w.signs.size();
    if (segments == 0 || w.breakpoints.size() != segments + 1)
      throw std::invalid_argument("exact_fourier: empty or inconsistent waveform");
    tau.reserve(segments + 1);
    coef.reserve(segments + 1);
    tau.push_back(w.breakpoints.front());
    coef.push_back(-double(w.signs.front()));
    for (std::size_t k = 1; k < segments; ++k) {
      const double c = double(w.signs[k - 1] - w.signs[k]);
      if (c != 0.0) {
        tau.push_back(w.breakpoints[k]);
        coef.push_back(c);
      }
    }
    tau.push_back(w.breakpoints.back());
    coef.push_back(double(w.signs.back()));
  }
};

}  // namespace

Complex exact_fourier(const drive::Waveform& w, double omega) {
  if (w.signs.empty()) throw std::invalid_argument("exact_fourier: empty waveform");
  if (omega == 0.0) {
    double area = 0.0;
    for (std::size_t m = 0; m < w.signs.size(); ++m)
      area += double(w.signs[m]) * (w.breakpoints[m + 1] - w.breakpoints[m]);
    return area;
  }
  const JumpSeries jumps(w);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < jumps.tau.size(); ++k)
    sum += jumps.coef[k] * std::exp(Complex(0.0, omega * jumps.tau[k]));
  return sum / Complex(0.0, omega);
}

SpectrumSeries spectrum_scan(const drive::Waveform& w, const std::vector<double>& grid) {
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!(grid[k] > grid[k - 1]))
      throw std::invalid_argument("spectrum_scan: grid must be strictly increasing");
  SpectrumSeries s;
  s.duration = w.duration();
  s.omega = grid;
  s.density.resize(grid.size());
  const JumpSeries jumps(w);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double omega = grid[g];
    Complex sum = 0.0;
    if (omega == 0.0) {
      sum = exact_fourier(w, 0.0);
    } else {
      for (std::size_t k = 0; k < jumps.tau.size(); ++k)
        sum += jumps.coef[k] * std::exp(Complex(0.0, omega * jumps.tau[k]));
      sum /= Complex(0.0, omega);
    }
    s.density[g] = std::norm(sum) / s.duration;
  }
  return s;
}

std::vector<double> default_grid(double base_period, int points) {
  if (points < 100) throw std::invalid_argument("default_grid: too few points");
  const double lo = 1e-3 / base_period;
  const double hi = 20.0 / base_period;
  std::set<double> grid;
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < points; ++k)
    grid.insert(lo * std::exp(ratio * double(k) / double(points - 1)));
  // Tenfold densification in a 4% window around pi/(T0 phi^n).
  const double local_step = ratio / double(points - 1);
  for (int n = 0; n <= 4; ++n) {
    const double peak = M_PI / (base_period * std::pow(golden_ratio, n));
    if (peak < lo || peak > hi) continue;
    const double fine = local_step / 10.0;
    for (double x = peak * std::exp(-0.02); x <= peak * std::exp(0.02); x *= std::exp(fine))
      grid.insert(x);
  }
  return {grid.begin(), grid.end()};
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

SpectrumFeatures extract_features(const SpectrumSeries& series, double band_lo, double band_hi) {
  if (series.omega.size() < 8)
    throw std::invalid_argument("extract_features: spectrum too short");
  SpectrumFeatures out;
  out.duration = series.duration;

  std::vector<std::size_t> band;
  for (std::size_t k = 0; k < series.omega.size(); ++k)
    if (series.omega[k] >= band_lo && series.omega[k] <= band_hi) band.push_back(k);
  if (band.size() < 16) throw std::invalid_argument("extract_features: band too sparse");

  // First pass: the median over the band is already floor-dominated (peaks
  // occupy a vanishing fraction of the grid).
  std::vector<double> band_vals;
  band_vals.reserve(band.size());
  for (auto k : band) band_vals.push_back(series.density[k]);
  double floor0 = median(band_vals);

  // Peaks: local maxima above 5x the floor, searched over the whole grid.
  const auto& s = series.density;
  std::vector<Peak> peaks;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    if (s[k] < 5.0 * floor0) continue;
    if (!(s[k] >= s[k - 1] && s[k] > s[k + 1])) continue;
    // Climb down both flanks to half maximum for the width.
    const double half = 0.5 * s[k];
    std::size_t l = k, r = k;
    while (l > 0 && s[l] > half) --l;
    while (r + 1 < s.size() && s[r] > half) ++r;
    Peak p;
    p.position = series.omega[k];
    p.height = s[k];
    p.width_resolved = (s[l] <= half && s[r] <= half && r > l);
    if (p.width_resolved) {
      // Linear interpolation to the half-maximum crossings.
      const auto cross = [&](std::size_t a, std::size_t b) {
        const double d = s[b] - s[a];
        const double f = (d == 0.0) ? 0.5 : (half - s[a]) / d;
        return series.omega[a] + f * (series.omega[b] - series.omega[a]);
      };
      p.width = cross(r - 1, r) - cross(l, l + 1);
    } else {
      p.width = 0.0;
    }
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.height > b.height; });

  // Second pass: recompute the floor with peak neighborhoods excluded.
  std::vector<double> off_peak;
  for (auto k : band) {
    const double omega = series.omega[k];
    bool excluded = false;
    for (const auto& p : peaks) {
      const double zone = std::max(3.0 * p.width, 0.01 * p.position);
      if (std::abs(omega - p.position) < zone) {
        excluded = true;
        break;
      }
    }
    if (!excluded) off_peak.push_back(series.density[k]);
  }
  out.floor_level = off_peak.size() >= 8 ? median(off_peak) : floor0;
  out.peaks = std::move(peaks);
  return out;
}

std::vector<SpectrumFeatures> feature_extract(const std::vector<SpectrumSeries>& series,
                                              double band_lo, double band_hi) {
  std::vector<SpectrumFeatures> out;
  out.reserve(series.size());
  for (const auto& s : series) out.push_back(extract_features(s, band_lo, band_hi));
  return out;
}

double band_weight(const drive::Waveform& w, double omega_max, int points_per_oscillation) {
  if (!(omega_max > 0.0)) throw std::invalid_argument("band_weight: need omega_max > 0");
  const double t = w.duration();
  const JumpSeries jumps(w);

  // Resolve the e^{i w t} oscillation of |f~|^2.
  const double step = 2.0 * M_PI / (t * double(points_per_oscillation));
  const long long n = std::max<long long>(512, static_cast<long long>(omega_max / step) + 1);
  const double d_omega = omega_max / double(n);

  // Accumulate G(w) = sum_k c_k e^{i w tau_k} over the grid with one complex
  // rotation per (breakpoint, grid) pair.
  std::vector<Complex> g(n + 1, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < jumps.tau.size(); ++k) {
    const Complex rot = std::exp(Complex(0.0, d_omega * jumps.tau[k]));
    Complex phase(1.0, 0.0);
    const double c = jumps.coef[k];
    for (long long i = 0; i <= n; ++i) {
      g[i] += c * phase;
      phase *= rot;
    }
  }

  // |f~(0)|^2 is the squared area; elsewhere |G|^2 / w^2.
  std::vector<double> integrand(n + 1);
  integrand[0] = std::norm(exact_fourier(w, 0.0));
  for (long long i = 1; i <= n; ++i) {
    const double omega = d_omega * double(i);
    integrand[i] = std::norm(g[i]) / (omega * omega);
  }
  double integral = 0.5 * (integrand[0] + integrand[n]);
  for (long long i = 1; i < n; ++i) integral += integrand[i];
  integral *= d_omega;

  // Symmetric band (f is real), normalized by Plancherel's t.
  return 2.0 * integral / (2.0 * M_PI * t);
}

}  // namespace fibdd::spectra
