#include <doctest.h>

#include <cmath>

#include "fibdd/drive.hpp"
#include "fibdd/fibrec.hpp"
#include "fibdd/spectra.hpp"

using namespace fibdd;
using namespace fibdd::spectra;

namespace {

drive::Waveform make_wave(int ns, int nf, double t0, drive::NoiseKind kind, double eps,
                          long long boundaries, std::vector<int> label) {
  drive::ProtocolSpec proto{.num_drives = ns, .num_layers = nf, .base_period = t0};
  drive::NoiseModel noise{.kind = kind, .epsilon = eps, .seed = 7};
  return drive::waveform(drive::realize_schedule(proto, noise, boundaries), std::move(label));
}

}  // namespace

TEST_CASE("zero-frequency amplitude is the signed area") {
  // Label (0): the waveform never flips, f = +1 on [0, t].
  const auto flat = make_wave(1, 1, 1.0, drive::NoiseKind::Ideal, 0.0, 10, {0});
  CHECK(exact_fourier(flat, 0.0).real() == doctest::Approx(10.0).epsilon(1e-14));
  const auto series = spectrum_scan(flat, {1e-9});
  CHECK(series.density[0] == doctest::Approx(10.0).epsilon(1e-5));  // S(0,t) = t
}

TEST_CASE("ideal square wave: odd harmonic amplitude and even harmonic zero") {
  const int m = 50;  // periods
  const auto sq = make_wave(1, 1, 1.0, drive::NoiseKind::Ideal, 0.0, 2 * m, {1});
  const double t = 2.0 * m;
  const double amp = std::abs(exact_fourier(sq, M_PI));
  CHECK(amp == doctest::Approx(4.0 * m / M_PI).epsilon(1e-12));
  const auto series = spectrum_scan(sq, {M_PI});
  CHECK(series.density[0] == doctest::Approx(4.0 * t / (M_PI * M_PI)).epsilon(1e-12));

  CHECK(std::abs(exact_fourier(sq, 2.0 * M_PI)) < 1e-10);

  // Line spectrum: harmonic towers dwarf the gaps between them.
  const double at_harmonic = std::norm(exact_fourier(sq, M_PI));
  const double off_harmonic = std::norm(exact_fourier(sq, 1.5 * M_PI));
  CHECK(at_harmonic / off_harmonic > 1e3);
}

TEST_CASE("spectrum is invariant under a global sign flip") {
  auto wave = make_wave(1, 1, 1.0, drive::NoiseKind::Fibonacci, 0.15, 55, {1});
  auto flipped = wave;
  for (auto& s : flipped.signs) s = -s;
  for (double omega : {0.3, 1.1, 2.9}) {
    CHECK(std::norm(exact_fourier(wave, omega)) ==
          doctest::Approx(std::norm(exact_fourier(flipped, omega))).epsilon(1e-12));
  }
}

TEST_CASE("plancherel: a 50/T0 band captures a half-density waveform to 2%") {
  // n_f = 2 cancels the even boundaries, so the flips arrive at half density.
  const long long n = fibrec::fibonacci(12);
  const auto wave = make_wave(1, 2, 1.0, drive::NoiseKind::Fibonacci, 0.1, n, {1});
  const double captured = band_weight(wave, 50.0);
  CHECK(captured == doctest::Approx(1.0).epsilon(0.02));
  CHECK(captured <= 1.0 + 1e-6);
}

TEST_CASE("fibonacci spectrum: carrier plus the allowed golden satellites") {
  // Writing peak positions as h pi + 2 pi (m + n/phi) with odd h and integer
  // m, n, the positions pi/phi^k carry weight only for k = 0 mod 3 (else n
  // would be half-integer). The tallest satellite is pi/phi^3 = pi - 2pi/phi^2.
  const long long n = fibrec::fibonacci(16);
  const auto wave = make_wave(1, 1, 1.0, drive::NoiseKind::Fibonacci, 0.1, n, {1});
  const auto grid = default_grid(1.0, 8000);
  const auto series = spectrum_scan(wave, grid);
  const auto features = extract_features(series, 0.5, 2.0);
  REQUIRE(!features.peaks.empty());

  CHECK(features.peaks[0].position == doctest::Approx(M_PI).epsilon(1e-3));

  const auto nearest = [&](double target) {
    double best = 1e9;
    for (const auto& p : features.peaks)
      if (std::abs(p.position - target) < std::abs(best - target)) best = p.position;
    return best;
  };
  const double phi = golden_ratio;
  CHECK(nearest(M_PI / (phi * phi * phi)) ==
        doctest::Approx(M_PI / (phi * phi * phi)).epsilon(0.005));
  CHECK(nearest(M_PI - 2 * M_PI / (phi * phi * phi)) ==
        doctest::Approx(M_PI - 2 * M_PI / (phi * phi * phi)).epsilon(0.005));

  // The forbidden member pi/phi of the naive family has no prominent peak.
  const double off = std::abs(nearest(M_PI / phi) - M_PI / phi) / (M_PI / phi);
  CHECK(off > 0.02);
}

TEST_CASE("fibonacci noise floor: the excess over the ideal leakage scales as epsilon^2") {
  // The ideal square wave already leaks ~1/t between its harmonics, so the
  // epsilon^2 law applies to the noise-induced excess; the band tops out at
  // omega = 1 to stay in the linear-response regime at epsilon = 0.2.
  const long long n = fibrec::fibonacci(16);
  const auto grid = default_grid(1.0, 8000);
  const double base =
      extract_features(spectrum_scan(make_wave(1, 1, 1.0, drive::NoiseKind::Ideal, 0.0, n, {1}),
                                     grid), 0.5, 1.0)
          .floor_level;
  const auto excess = [&](double eps) {
    const auto f = extract_features(
        spectrum_scan(make_wave(1, 1, 1.0, drive::NoiseKind::Fibonacci, eps, n, {1}), grid), 0.5,
        1.0);
    return f.floor_level - base;
  };
  const double ratio = excess(0.2) / excess(0.05);
  CHECK(ratio > 16.0 / 2.2);
  CHECK(ratio < 16.0 * 2.2);
}

TEST_CASE("feature extraction on a synthetic floor-plus-peak spectrum") {
  SpectrumSeries s;
  s.duration = 100.0;
  const double peak_pos = 1.3, peak_height = 50.0, sigma = 0.01;
  for (int k = 0; k < 3000; ++k) {
    const double omega = 0.1 + 3.0 * k / 2999.0;
    s.omega.push_back(omega);
    const double bump = peak_height * std::exp(-0.5 * std::pow((omega - peak_pos) / sigma, 2));
    s.density.push_back(1.0 + bump);
  }
  const auto f = extract_features(s, 0.5, 2.0);
  CHECK(f.floor_level == doctest::Approx(1.0).epsilon(0.05));
  REQUIRE(!f.peaks.empty());
  CHECK(f.peaks[0].position == doctest::Approx(peak_pos).epsilon(0.01));
  CHECK(f.peaks[0].height == doctest::Approx(peak_height + 1.0).epsilon(0.05));
  // Gaussian FWHM = 2 sqrt(2 ln 2) sigma.
  CHECK(f.peaks[0].width == doctest::Approx(2.3548 * sigma).epsilon(0.2));
}

TEST_CASE("scan rejects a non-increasing grid") {
  const auto wave = make_wave(1, 1, 1.0, drive::NoiseKind::Ideal, 0.0, 4, {1});
  CHECK_THROWS_AS(spectrum_scan(wave, {1.0, 1.0}), std::invalid_argument);
}
