#pragma once

#include <cstdint>

#include "csbm/model.hpp"

namespace fixture {

inline csbm::ModelParams params(double a, double b, double c_tau, int N, int d = 40,
                                double tau = 0.25) {
  csbm::ModelSpec spec;
  spec.a = a;
  spec.b = b;
  spec.c_tau = c_tau;
  spec.tau = tau;
  spec.N = N;
  spec.d = d;
  return csbm::ModelParams::derive(spec);
}

// N = 12 splits into n = 4 labeled and m = 8 test nodes; q_m = log 8 keeps alpha < 1.
inline csbm::Dataset tiny(std::uint64_t seed, int d = 3, double a = 3.0, double b = 1.0,
                          double c_tau = 0.8) {
  return csbm::sample_csbm(params(a, b, c_tau, 12, d), seed);
}

}  // namespace fixture
