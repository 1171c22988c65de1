#include "fibdd/drive.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fibdd/fibrec.hpp"
#include "fibdd/rng.hpp"

namespace fibdd::drive {

void ProtocolSpec::validate() const {
  if (num_drives < 1 || num_drives > 2)
    throw std::invalid_argument("protocol: num_drives must be 1 or 2");
  if (num_layers < 1 || num_layers > 2)
    throw std::invalid_argument("protocol: num_layers must be 1 or 2");
  if (!(base_period > 0.0)) throw std::invalid_argument("protocol: base_period must be > 0");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Ideal: return "ideal";
    case NoiseKind::Synchronous: return "synchronous";
    case NoiseKind::Asynchronous: return "asynchronous";
    case NoiseKind::Fibonacci: return "fibonacci";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "ideal") return NoiseKind::Ideal;
  if (name == "synchronous") return NoiseKind::Synchronous;
  if (name == "asynchronous") return NoiseKind::Asynchronous;
  if (name == "fibonacci") return NoiseKind::Fibonacci;
  throw std::invalid_argument("unknown noise kind: " + name);
}

void NoiseModel::validate() const {
  if (epsilon < 0.0) throw std::invalid_argument("noise: epsilon must be >= 0");
  const bool random_kind = kind == NoiseKind::Synchronous || kind == NoiseKind::Asynchronous;
  if (random_kind && epsilon >= 0.5)
    throw std::invalid_argument("noise: epsilon too large for the truncation windows");
  if (kind == NoiseKind::Fibonacci && epsilon >= 1.0)
    throw std::invalid_argument("noise: fibonacci epsilon must be < 1");
}

double fibonacci_long(double base_period, double epsilon) {
  return base_period * (1.0 + epsilon / golden_ratio);
}

double fibonacci_short(double base_period, double epsilon) {
  return base_period * (1.0 - epsilon);
}

std::uint8_t ideal_boundary_mask(const ProtocolSpec& proto, long long m) {
  if (m < 1) throw std::invalid_argument("boundary index must be >= 1");
  std::uint8_t mask = 0;
  for (int j = 1; j <= proto.num_layers; ++j)
    for (int i = 1; i <= proto.num_drives; ++i)
      if (m % proto.boundary_period(i, j) == 0) mask ^= std::uint8_t(1u << (i - 1));
  return mask;
}

std::vector<int> ideal_boundary_ops(const ProtocolSpec& proto, long long m) {
  const std::uint8_t mask = ideal_boundary_mask(proto, m);
  std::vector<int> ops;
  for (int i = 1; i <= proto.num_drives; ++i)
    if (mask & (1u << (i - 1))) ops.push_back(i);
  return ops;
}

ScheduleRealization realize_schedule(const ProtocolSpec& proto, const NoiseModel& noise,
                                     long long n_boundaries) {
  proto.validate();
  noise.validate();
  if (n_boundaries < 1) throw std::invalid_argument("schedule needs at least one boundary");

  const double t0 = proto.base_period;
  ScheduleRealization s;
  s.durations.reserve(n_boundaries);
  s.boundary_ops.reserve(n_boundaries);

  switch (noise.kind) {
    case NoiseKind::Ideal: {
      s.durations.assign(n_boundaries, t0);
      break;
    }
    case NoiseKind::Synchronous: {
      if (noise.epsilon == 0.0) {
        s.durations.assign(n_boundaries, t0);
        break;
      }
      // Boundary m lands at m*T0 + g_m with g_m ~ N(0, eps*T0) truncated to
      // |g| <= 0.45 T0, which keeps the boundary times strictly increasing.
      Rng rng(noise.seed);
      double prev = 0.0;
      for (long long m = 1; m <= n_boundaries; ++m) {
        const double g = rng.truncated_gaussian(noise.epsilon * t0, 0.45 * t0);
        const double t = double(m) * t0 + g;
        s.durations.push_back(t - prev);
        prev = t;
      }
      break;
    }
    case NoiseKind::Asynchronous: {
      if (noise.epsilon == 0.0) {
        s.durations.assign(n_boundaries, t0);
        break;
      }
      // Each interval is T0 + N(0, eps*T0), floored at 0.05 T0; deviations
      // from the ideal clock accrue diffusively.
      Rng rng(noise.seed);
      for (long long m = 1; m <= n_boundaries; ++m) {
        const double d = t0 + rng.gaussian(noise.epsilon * t0);
        s.durations.push_back(std::max(d, 0.05 * t0));
      }
      break;
    }
    case NoiseKind::Fibonacci: {
      const auto word = fibrec::fib_word_prefix(n_boundaries);
      const double t_plus = fibonacci_long(t0, noise.epsilon);
      const double t_minus = fibonacci_short(t0, noise.epsilon);
      for (long long m = 0; m < n_boundaries; ++m)
        s.durations.push_back(word[m] > 0 ? t_plus : t_minus);
      break;
    }
  }

  for (long long m = 1; m <= n_boundaries; ++m)
    s.boundary_ops.push_back(ideal_boundary_mask(proto, m));
  double total = 0.0;
  for (double d : s.durations) total += d;
  s.total_time = total;
  return s;
}

Waveform waveform(const ScheduleRealization& schedule, const std::vector<int>& parity_label) {
  std::uint8_t label_mask = 0;
  for (std::size_t i = 0; i < parity_label.size(); ++i)
    if (parity_label[i]) label_mask |= std::uint8_t(1u << i);

  Waveform w;
  w.parity_label = parity_label;
  w.breakpoints.reserve(schedule.durations.size() + 1);
  w.signs.reserve(schedule.durations.size());
  w.breakpoints.push_back(0.0);
  int sign = +1;
  double t = 0.0;
  for (std::size_t m = 0; m < schedule.durations.size(); ++m) {
    w.signs.push_back(sign);
    t += schedule.durations[m];
    w.breakpoints.push_back(t);
    if (std::popcount(std::uint32_t(schedule.boundary_ops[m] & label_mask)) & 1) sign = -sign;
  }
  return w;
}

std::string waveform_to_text(const Waveform& w) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i + 1 < w.breakpoints.size(); ++i)
    os << w.breakpoints[i] << " " << w.signs[i] << "\n";
  if (!w.breakpoints.empty())
    os << w.breakpoints.back() << " " << (w.signs.empty() ? 1 : w.signs.back()) << "\n";
  return os.str();
}

int optimal_fractal_layers(double base_period, double local_scale, int num_drives) {
  const double x = base_period * local_scale;
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error("optimal_fractal_layers: need 0 < T0 * h < 1");
  if (num_drives < 1) throw std::invalid_argument("optimal_fractal_layers: num_drives >= 1");
  const double inner = std::log2(1.0 / x) / double(num_drives);
  if (!(inner > 0.0)) return 1;
  const double n = std::round(std::log(inner));
  return std::max(1, static_cast<int>(n));
}

}  // namespace fibdd::drive
