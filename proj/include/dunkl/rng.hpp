#pragma once

// Counter-based random streams (Philox4x32-10). Every path owns an
// independent stream derived from (master seed, path index), so results do
// not depend on thread scheduling. A grid-indexed variant keys draws to
// positions on a fixed reference grid, which couples runs at different
// step sizes through the same underlying noise.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dunkl {

struct PhiloxBlock {
  uint32_t v[4];
};

inline PhiloxBlock philox4x32(uint32_t c0, uint32_t c1, uint32_t c2, uint32_t c3, uint32_t k0, uint32_t k1) {
  constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    uint64_t p0 = static_cast<uint64_t>(M0) * c0;
    uint64_t p1 = static_cast<uint64_t>(M1) * c2;
    uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
    uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
    uint32_t n0 = hi1 ^ c1 ^ k0;
    uint32_t n1 = lo1;
    uint32_t n2 = hi0 ^ c3 ^ k1;
    uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += W0;
    k1 += W1;
  }
  return PhiloxBlock{{c0, c1, c2, c3}};
}

inline double u01_from_bits(uint32_t hi, uint32_t lo) {
  uint64_t bits = (static_cast<uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Sequential per-path stream.
class PathRng {
 public:
  PathRng(uint64_t seed, uint64_t path) : seed_(seed), path_(path) {}

  double uniform() {
    if (have_ == 0) refill();
    --have_;
    return buf_[have_];
  }

  double normal() {
    if (have_normal_) {
      have_normal_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586477 * u2;
    spare_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
  }

  // Marsaglia-Tsang; alpha > 0, unit scale.
  double gamma(double alpha) {
    if (!(alpha > 0)) throw std::invalid_argument("gamma shape must be positive");
    if (alpha < 1.0) {
      double u = uniform();
      return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    double d = alpha - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform();
      double x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
      if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  void refill() {
    PhiloxBlock b = philox4x32(static_cast<uint32_t>(ctr_), static_cast<uint32_t>(ctr_ >> 32),
                               static_cast<uint32_t>(path_), static_cast<uint32_t>(path_ >> 32),
                               static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32));
    ++ctr_;
    buf_[0] = u01_from_bits(b.v[0], b.v[1]);
    buf_[1] = u01_from_bits(b.v[2], b.v[3]);
    have_ = 2;
  }

  uint64_t seed_, path_;
  uint64_t ctr_ = 0;
  double buf_[2] = {0, 0};
  int have_ = 0;
  double spare_ = 0;
  bool have_normal_ = false;
};

// Stateless draws addressed by (cell, slot) on a reference grid. A cell is
// a fine-grid substep index; slots separate the purposes within a cell.
class GridNoise {
 public:
  GridNoise(uint64_t seed, uint64_t path) : seed_(seed), path_(path) {}

  double uniform_at(uint64_t cell, uint32_t slot) const {
    PhiloxBlock b = block(cell, slot);
    return u01_from_bits(b.v[0], b.v[1]);
  }

  double normal_at(uint64_t cell, uint32_t slot) const {
    PhiloxBlock b = block(cell, slot);
    double u1 = u01_from_bits(b.v[0], b.v[1]);
    double u2 = u01_from_bits(b.v[2], b.v[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  PhiloxBlock block(uint64_t cell, uint32_t slot) const {
    // slot folded into the high counter word; cell in the low words
    return philox4x32(static_cast<uint32_t>(cell), static_cast<uint32_t>(cell >> 32), slot,
                      static_cast<uint32_t>(path_) ^ static_cast<uint32_t>(path_ >> 32),
                      static_cast<uint32_t>(seed_), static_cast<uint32_t>(seed_ >> 32));
  }

  uint64_t seed_, path_;
};

// Deterministic 64-bit mix used to derive per-check seeds from the master
// seed and a label (FNV-1a).
inline uint64_t fnv1a64(const char* data, size_t len, uint64_t h = 14695981039346656037ull) {
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t derive_seed(uint64_t master, const std::string& label) {
  uint64_t h = fnv1a64(label.data(), label.size());
  return h ^ (master * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull);
}

}  // namespace dunkl
