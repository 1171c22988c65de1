#pragma once

#include <vector>

#include "fibdd/drive.hpp"
#include "fibdd/types.hpp"

namespace fibdd::spectra {

/// Exact transform of a piecewise +-1 waveform:
/// f~(w) = sum_m s_m (e^{i w t_{m+1}} - e^{i w t_m}) / (i w), and the plain
/// integral at w = 0. Closed form per segment; no sampling grid, no aliasing.
Complex exact_fourier(const drive::Waveform& w, double omega);

/// S(w) = |f~(w)|^2 / duration on a frequency grid.
struct SpectrumSeries {
  std::vector<double> omega;
  std::vector<double> density;
  double duration = 0.0;
};

SpectrumSeries spectrum_scan(const drive::Waveform& w, const std::vector<double>& grid);

/// Log-spaced grid on (1e-3, 20)/T0, densified tenfold around the
/// quasiperiodic peak positions pi/(T0 phi^n).
std::vector<double> default_grid(double base_period, int points = 40000);

struct Peak {
  double position = 0.0;
  double height = 0.0;
  double width = 0.0;  // full width at half maximum
  bool width_resolved = true;
};

struct SpectrumFeatures {
  double duration = 0.0;
  double floor_level = 0.0;
  std::vector<Peak> peaks;  // sorted by height, tallest first
};

/// Floor = median of S off-peak inside [band_lo, band_hi]; peaks are local
/// maxima above 5x the floor. Unresolved widths are flagged, not fatal.
SpectrumFeatures extract_features(const SpectrumSeries& series, double band_lo, double band_hi);

std::vector<SpectrumFeatures> feature_extract(const std::vector<SpectrumSeries>& series,
                                              double band_lo, double band_hi);

/// (1/2pi) int_{-W}^{W} |f~|^2 dw divided by the duration; 1 when the band
/// captures everything (Plancherel, |f| = 1). Trapezoid on a linear grid
/// fine enough for the 2pi/t oscillation.
double band_weight(const drive::Waveform& w, double omega_max, int points_per_oscillation = 8);

}  // namespace fibdd::spectra
