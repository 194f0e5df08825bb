#pragma once

// Flattened double-precision form of exact polynomials for the Monte Carlo
// hot loops.

#include <cstdint>
#include <span>
#include <vector>

#include "dunkl/intertwine.hpp"
#include "dunkl/poly.hpp"

namespace dunkl {

struct CompiledPoly {
  struct Term {
    double c;
    std::vector<uint32_t> space;
    uint32_t time;
  };
  int dim = 0;
  std::vector<Term> terms;

  double eval(std::span<const double> x, double t = 0.0) const {
    double out = 0;
    for (const auto& term : terms) {
      double v = term.c;
      for (int i = 0; i < dim; ++i) {
        for (uint32_t e = 0; e < term.space[i]; ++e) v *= x[i];
      }
      for (uint32_t e = 0; e < term.time; ++e) v *= t;
      out += v;
    }
    return out;
  }
};

template <class K>
CompiledPoly compile(const Polynomial<K>& p) {
  CompiledPoly out;
  out.dim = p.dim();
  for (const auto& [m, c] : p.terms()) {
    out.terms.push_back({FieldOps<K>::to_double(c), m.space, m.time});
  }
  return out;
}

struct CompiledHermite {
  CompiledPoly Q;
  std::vector<CompiledPoly> grad;
  std::vector<CompiledPoly> jump_raw;  // divided differences, no sqrt(k)
  std::vector<double> sqrt_k;          // per root
};

template <class K>
CompiledHermite compile_hermite(const HermiteFamily<K>& fam, const RootSystem<K>& rs) {
  CompiledHermite out;
  out.Q = compile(fam.Q);
  for (const auto& g : fam.grad) out.grad.push_back(compile(g));
  for (const auto& j : fam.jump_raw) out.jump_raw.push_back(compile(j));
  for (const auto& k : rs.mult) out.sqrt_k.push_back(std::sqrt(to_double(k)));
  return out;
}

}  // namespace dunkl
