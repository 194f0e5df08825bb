#include "dunkl/config.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dunkl/rng.hpp"

namespace dunkl {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

SystemKind parse_kind(const std::string& s) {
  if (s == "rank1") return SystemKind::Rank1;
  if (s == "product" || s == "product_of_rank1") return SystemKind::ProductRank1;
  if (s == "A") return SystemKind::TypeA;
  if (s == "B") return SystemKind::TypeB;
  if (s == "D") return SystemKind::TypeD;
  if (s == "I2") return SystemKind::Dihedral;
  throw std::invalid_argument("unknown root system kind: " + s);
}

std::string kind_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::Rank1:
      return "rank1";
    case SystemKind::ProductRank1:
      return "product";
    case SystemKind::TypeA:
      return "A";
    case SystemKind::TypeB:
      return "B";
    case SystemKind::TypeD:
      return "D";
    case SystemKind::Dihedral:
      return "I2";
  }
  return "?";
}

int expected_dim(const SystemSpec& spec) {
  switch (spec.kind) {
    case SystemKind::Rank1:
      return 1;
    case SystemKind::ProductRank1:
      return spec.dim;
    case SystemKind::TypeA:
      return spec.param + 1;
    case SystemKind::TypeB:
    case SystemKind::TypeD:
      return spec.param;
    case SystemKind::Dihedral:
      return 2;
  }
  return 0;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos || section.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!sections[section].emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": duplicate key " + key);
    }
  }

  ExperimentConfig config;
  auto take = [&](const std::string& sec, const std::string& key) -> std::string {
    auto s = sections.find(sec);
    if (s == sections.end()) return "";
    auto k = s->second.find(key);
    if (k == s->second.end()) return "";
    std::string v = k->second;
    s->second.erase(k);
    return v;
  };

  if (auto v = take("system", "kind"); !v.empty()) config.system.kind = parse_kind(v);
  if (auto v = take("system", "param"); !v.empty()) config.system.param = std::stoi(v);
  if (auto v = take("system", "dim"); !v.empty()) config.system.dim = std::stoi(v);
  if (auto v = take("system", "multiplicities"); !v.empty()) {
    config.system.mult.per_orbit.clear();
    for (const auto& item : split_list(v)) config.system.mult.per_orbit.push_back(parse_rational(item));
  }
  config.system.dim = expected_dim(config.system);
  if (auto v = take("process", "x0"); !v.empty()) {
    config.x0.clear();
    for (const auto& item : split_list(v)) config.x0.push_back(parse_rational(item));
  }
  if (auto v = take("process", "T"); !v.empty()) config.T = parse_rational(v);
  if (auto v = take("process", "dt"); !v.empty()) config.dt = parse_rational(v);
  if (auto v = take("mc", "n_paths"); !v.empty()) config.n_paths = std::stoull(v);
  if (auto v = take("mc", "seed"); !v.empty()) config.seed = std::stoull(v);
  if (auto v = take("mc", "threads"); !v.empty()) config.threads = std::stoi(v);
  if (auto v = take("symbolic", "n_max"); !v.empty()) config.n_max = std::stoi(v);
  if (auto v = take("output", "dir"); !v.empty()) config.output_dir = v;

  for (const auto& [sec, kv] : sections) {
    for (const auto& [key, value] : kv) {
      throw std::invalid_argument("unknown config key [" + sec + "] " + key);
    }
  }

  if (config.x0.empty()) config.x0.assign(config.system.dim, Rat(1));
  if (static_cast<int>(config.x0.size()) != config.system.dim) {
    throw std::invalid_argument("x0 has " + std::to_string(config.x0.size()) + " entries, expected " +
                                std::to_string(config.system.dim));
  }
  if (config.T <= 0 || config.dt <= 0) throw std::invalid_argument("T and dt must be positive");
  if (config.n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (config.n_paths == 0) throw std::invalid_argument("n_paths must be positive");
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "[system]\n";
  out << "kind = " << kind_name(config.system.kind) << "\n";
  out << "param = " << config.system.param << "\n";
  out << "dim = " << config.system.dim << "\n";
  out << "multiplicities = ";
  for (std::size_t i = 0; i < config.system.mult.per_orbit.size(); ++i) {
    if (i) out << ", ";
    out << to_string(config.system.mult.per_orbit[i]);
  }
  out << "\n[process]\n";
  out << "x0 = ";
  for (std::size_t i = 0; i < config.x0.size(); ++i) {
    if (i) out << ", ";
    out << to_string(config.x0[i]);
  }
  out << "\n";
  out << "T = " << to_string(config.T) << "\n";
  out << "dt = " << to_string(config.dt) << "\n";
  out << "[mc]\n";
  out << "n_paths = " << config.n_paths << "\n";
  out << "seed = " << config.seed << "\n";
  out << "threads = " << config.threads << "\n";
  out << "[symbolic]\n";
  out << "n_max = " << config.n_max << "\n";
  out << "[output]\n";
  out << "dir = " << config.output_dir << "\n";
  return out.str();
}

std::string config_digest(const ExperimentConfig& config) {
  std::string canon = serialize_config(config);
  uint64_t h = fnv1a64(canon.data(), canon.size());
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xF];
    h >>= 4;
  }
  return out;
}

RootSystem<Q2> build_configured_system(const ExperimentConfig& config) {
  return build_root_system(config.system);
}

}  // namespace dunkl
