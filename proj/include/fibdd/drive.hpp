#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibdd/types.hpp"

namespace fibdd::drive {

/// Polyfractal drive protocol: X_i (i = 1..num_drives) is applied in fractal
/// layer j (j = 1..num_layers) at boundaries m that are multiples of
/// 2^{(j-1) num_drives + i - 1}; boundary m sits at time m * base_period in
/// the ideal schedule.
struct ProtocolSpec {
  int num_drives = 1;   // n_s
  int num_layers = 1;   // n_f
  double base_period = 0.1;  // T0

  long long boundary_period(int drive_i, int layer_j) const {
    return 1ll << ((layer_j - 1) * num_drives + drive_i - 1);
  }
  long long cycle_boundaries() const { return 1ll << (num_drives * num_layers); }
  double floquet_period() const { return double(cycle_boundaries()) * base_period; }
  void validate() const;
};

enum class NoiseKind { Ideal, Synchronous, Asynchronous, Fibonacci };

std::string to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

struct NoiseModel {
  NoiseKind kind = NoiseKind::Ideal;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Long/short Fibonacci intervals; chosen so the mean boundary spacing stays
/// at base_period.
double fibonacci_long(double base_period, double epsilon);   // T+ = T0 (1 + eps/phi)
double fibonacci_short(double base_period, double epsilon);  // T- = T0 (1 - eps)

/// Drive indices applied at boundary m >= 1, after mod-2 reduction over all
/// (drive, layer) pairs (an operator appearing an even number of times drops
/// out since X_i^2 = 1). Bit i-1 of the mask flags X_i.
std::uint8_t ideal_boundary_mask(const ProtocolSpec& proto, long long m);
std::vector<int> ideal_boundary_ops(const ProtocolSpec& proto, long long m);

/// One realized drive schedule: interval durations (time order) and the
/// reduced operator set at the boundary terminating each interval. Noise
/// perturbs durations only; the operator pattern is always the ideal one.
struct ScheduleRealization {
  std::vector<double> durations;
  std::vector<std::uint8_t> boundary_ops;
  double total_time = 0.0;

  long long boundaries() const { return static_cast<long long>(durations.size()); }
};

ScheduleRealization realize_schedule(const ProtocolSpec& proto, const NoiseModel& noise,
                                     long long n_boundaries);

/// Piecewise +-1 waveform f_eps(t) for one parity label eps: the sign flips
/// at a boundary iff the drives with eps_i = 1 act there an odd number of
/// times. Starts at +1.
struct Waveform {
  std::vector<double> breakpoints;  // size = segments + 1, starts at 0
  std::vector<int> signs;           // +-1 per segment
  std::vector<int> parity_label;

  double duration() const { return breakpoints.empty() ? 0.0 : breakpoints.back(); }
};

Waveform waveform(const ScheduleRealization& schedule, const std::vector<int>& parity_label);

/// Export as two-column text (breakpoint_time, sign of the segment starting
/// there; the final breakpoint repeats the last sign).
std::string waveform_to_text(const Waveform& w);

/// n_f* = round(log((1/n_s) log2(1/(T0 h)))), floored at 1.
int optimal_fractal_layers(double base_period, double local_scale, int num_drives);

}  // namespace fibdd::drive
