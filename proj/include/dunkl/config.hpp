#pragma once

// Experiment configuration: a small sectioned key-value text format with a
// canonical serialization whose digest fingerprints reports.
//
//   [system]
//   kind = rank1 | product | A | B | D | I2
//   param = 2            # n for A/B/D, m for I2; ignored otherwise
//   dim = 1              # required for rank1/product; derived otherwise
//   multiplicities = 1, 1/2
//   [process]
//   x0 = 1               # comma list, d entries; rationals or decimals
//   T = 1
//   dt = 0.001
//   [mc]
//   n_paths = 10000
//   seed = 12345
//   threads = 0          # 0 = hardware
//   [symbolic]
//   n_max = 8
//   [output]
//   dir = out
//
// '#' starts a comment; keys not listed above are rejected.

#include <cstdint>
#include <string>
#include <vector>

#include "dunkl/rational.hpp"
#include "dunkl/rootsys.hpp"

namespace dunkl {

struct ExperimentConfig {
  SystemSpec system;
  std::vector<Rat> x0;
  Rat T{1};
  Rat dt{Rat(1, 1000)};
  std::size_t n_paths = 10000;
  uint64_t seed = 12345;
  int threads = 0;
  int n_max = 8;
  std::string output_dir = "out";

  std::vector<double> x0_double() const {
    std::vector<double> out;
    for (const auto& c : x0) out.push_back(to_double(c));
    return out;
  }
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: fixed section and key order, rationals in lowest terms.
std::string serialize_config(const ExperimentConfig& config);
// FNV-1a digest of the canonical serialization, as 16 hex characters.
std::string config_digest(const ExperimentConfig& config);

// Builds the configured root system (exact kinds only; I2(m) outside
// {2, 4} is rejected here and served by the float builder in tests).
RootSystem<Q2> build_configured_system(const ExperimentConfig& config);

}  // namespace dunkl
