#pragma once

// Synthetic data planted on an embedded Gr(p, m) inside Gr(p, n) and
// perturbed along unit-speed geodesics.

#include <cstdint>
#include <vector>

#include "ngr/nested.hpp"

namespace ngr {

struct SynthConfig {
  Index num_points = 50;  // N
  Index ambient_dim = 10;  // n
  Index planted_dim = 3;   // m
  Index subspace_dim = 1;  // p
  double sigma = 0.0;      // geodesic perturbation length (radians)
  double b_std = 0.1;      // standard deviation of the entries of B
  std::uint64_t seed = 0;

  void validate() const;
};

template <FieldScalar S>
struct SynthData {
  std::vector<GrassmannPoint<S>> points;   // perturbed samples X_i
  std::vector<GrassmannPoint<S>> planted;  // Z_i in Gr(p, m)
  std::vector<GrassmannPoint<S>> clean;    // span(A Z_i + B) before perturbation
  NestedMap<S> ground_truth;
};

/// Z_i ~ uniform St(p, m), A ~ uniform St(m, n), B~ entries N(0, b_std^2);
/// X_i = Exp_{span(A Z_i + (I - A A^H) B~)}(sigma U_i) with U_i a unit
/// random horizontal direction. Deterministic per seed.
/// The reported ground truth is (A, B R^-1) where R^H R = I + B^H B: the
/// offset under which reconstruction reproduces the stored clean bases.
template <FieldScalar S>
SynthData<S> generate(const SynthConfig& config);

/// Two classes sharing one planted map: class c draws its Z_i around its
/// own random centre in Gr(p, m) (geodesic spread `class_spread`) before the
/// common embedding and perturbation. Labels are 0 and 1, alternating.
template <FieldScalar S>
struct LabeledSynthData {
  SynthData<S> data;
  std::vector<int> labels;
};

template <FieldScalar S>
LabeledSynthData<S> generate_two_class(const SynthConfig& config, double class_spread);

}  // namespace ngr
