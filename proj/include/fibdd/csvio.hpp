#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibdd/evolve.hpp"
#include "fibdd/spectra.hpp"

namespace fibdd::io {

/// FNV-1a over a canonical config rendering; embedded in every output file
/// so analyze runs can refuse mixing curves from different configurations.
std::uint64_t fnv1a(const std::string& text);
std::string canonical_config_text(const evolve::ExperimentConfig& config);
std::string config_hash(const evolve::ExperimentConfig& config);

/// CSV layout: one '#' comment line carrying the config hash, then a header
/// row, then data. Deterministic bytes for a given curve.
void write_relaxation_csv(const std::string& path, const evolve::RelaxationCurve& curve);

struct LoadedCurve {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  std::string hash;
};
LoadedCurve read_relaxation_csv(const std::string& path);

void write_meta_json(const std::string& path, const evolve::RelaxationCurve& curve);

void write_spectrum_csv(const std::string& path, const spectra::SpectrumSeries& series,
                        const std::string& hash);

void write_text_file(const std::string& path, const std::string& text);

inline constexpr const char* code_version = "fibdd 0.1.0";

}  // namespace fibdd::io
