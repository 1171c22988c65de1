#include "fibdd/csvio.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fibdd::io {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string canonical_config_text(const evolve::ExperimentConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "single_spin=" << c.single_spin << ";L=" << c.chain.length << ";V=" << c.chain.quartic
     << ";n_s=" << c.proto.num_drives << ";n_f=" << c.proto.num_layers
     << ";T0=" << c.proto.base_period << ";noise=" << drive::to_string(c.noise.kind)
     << ";eps=" << c.noise.epsilon << ";seed=" << c.noise.seed << ";max_depth=" << c.max_depth
     << ";max_boundaries=" << c.max_boundaries << ";ppd=" << c.points_per_decade << ";obs=";
  for (int o : c.observables) os << o << ",";
  return os.str();
}

std::string config_hash(const evolve::ExperimentConfig& config) {
  std::ostringstream os;
  os << std::hex << std::setfill('0') << std::setw(16) << fnv1a(canonical_config_text(config));
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
}

void write_relaxation_csv(const std::string& path, const evolve::RelaxationCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "# config=" << config_hash(curve.config) << "\n";
  os << "time";
  for (const auto& n : curve.names) os << "," << n;
  os << "\n";
  for (std::size_t k = 0; k < curve.times.size(); ++k) {
    os << curve.times[k];
    for (const auto& column : curve.values) os << "," << column[k];
    os << "\n";
  }
  write_text_file(path, os.str());
}

LoadedCurve read_relaxation_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open curve file: " + path);
  LoadedCurve curve;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("config=");
      if (pos != std::string::npos) curve.hash = line.substr(pos + 7);
      continue;
    }
    std::stringstream row(line);
    std::string cell;
    if (!header_done) {
      bool first = true;
      while (std::getline(row, cell, ',')) {
        if (!first) curve.names.push_back(cell);
        first = false;
      }
      curve.values.resize(curve.names.size());
      header_done = true;
      continue;
    }
    std::vector<double> nums;
    while (std::getline(row, cell, ',')) nums.push_back(std::stod(cell));
    if (nums.size() != curve.names.size() + 1)
      throw std::runtime_error("malformed curve row in " + path);
    curve.times.push_back(nums[0]);
    for (std::size_t k = 0; k < curve.names.size(); ++k) curve.values[k].push_back(nums[k + 1]);
  }
  if (curve.times.empty()) throw std::runtime_error("no data rows in " + path);
  return curve;
}

void write_meta_json(const std::string& path, const evolve::RelaxationCurve& curve) {
  nlohmann::json j;
  j["version"] = code_version;
  j["config_hash"] = config_hash(curve.config);
  j["config"] = {
      {"single_spin", curve.config.single_spin},
      {"chain", {{"length", curve.config.chain.length}, {"quartic", curve.config.chain.quartic}}},
      {"protocol",
       {{"num_drives", curve.config.proto.num_drives},
        {"num_layers", curve.config.proto.num_layers},
        {"base_period", curve.config.proto.base_period}}},
      {"noise",
       {{"kind", drive::to_string(curve.config.noise.kind)},
        {"epsilon", curve.config.noise.epsilon},
        {"seed", curve.config.noise.seed}}},
      {"max_depth", curve.config.max_depth},
      {"max_boundaries", curve.config.max_boundaries},
      {"points_per_decade", curve.config.points_per_decade},
      {"observables", curve.config.observables},
  };
  j["run"] = {
      {"engine", curve.info.engine},
      {"trace_scope", curve.info.trace_scope},
      {"sector_dim", curve.info.sector_dim},
      {"drift_checks", curve.info.drift_checks},
      {"reunitarizations", curve.info.reunitarizations},
      {"worst_drift", curve.info.worst_drift},
      {"t_plus", curve.info.t_plus},
      {"t_minus", curve.info.t_minus},
  };
  const auto now = std::chrono::system_clock::now();
  j["written_at_unix"] = std::chrono::duration_cast<std::chrono::seconds>(
                             now.time_since_epoch())
                             .count();
  write_text_file(path, j.dump(2) + "\n");
}

void write_spectrum_csv(const std::string& path, const spectra::SpectrumSeries& series,
                        const std::string& hash) {
  std::ostringstream os;
  os.precision(17);
  os << "# config=" << hash << "\n";
  os << "omega,S\n";
  for (std::size_t k = 0; k < series.omega.size(); ++k)
    os << series.omega[k] << "," << series.density[k] << "\n";
  write_text_file(path, os.str());
}

}  // namespace fibdd::io
