#pragma once

#include "oclb/extension.hpp"
#include "oclb/types.hpp"

#include <cstdint>
#include <vector>

namespace oclb {

// A worst-case instance for horizon N: numbered triplets 0..N plus a
// star triplet describing the minimizer, generated from a stepsize
// schedule. Any first-order method that starts at x_0 = 0 and stays in
// the span of the gradients it has seen ends step N no closer than the
// schedule's guaranteed distance, and no lower than its guaranteed value.
struct HardInstance {
  ClassParams params;
  Schedule schedule;
  TripletSet triplets;
  int horizon = 0;

  Index dim() const { return triplets.dim(); }
};

// Builds the instance for a validated schedule over nonneg mu:
//   x_j = -sum_{t<j} delta_t e_t,   g_j = L gamma_j e_j,
//   f_j = L^2/(2(L-mu)) (2 gamma_j delta_j - gamma_j^2 - q sum_{t>=j} delta_t^2),
//   x_* = -sum_{t<=N} delta_t e_t,  g_* = 0,  f_* = 0.
// The ambient dimension is N+1, or pad_dim if larger (extra coordinates
// are zero). Throws std::invalid_argument on invalid schedules.
HardInstance build_hard_instance(const Schedule& schedule, Index pad_dim = 0);

ExtensionOracle make_oracle(const HardInstance& instance);

// Flat indices k whose shifted gradient w_k = g_k - mu x_k is linearly
// independent of {w_0, ..., w_j}. Rank decisions use singular values
// with threshold 1e-12 times the largest one.
std::vector<int> independent_beyond(const HardInstance& instance, int j);

// Checks every condition that makes the instance a certified worst case:
//   base_points, initial_radius, optimal_interpolation, chain_alignment,
//   chain_ordering, chain_separability, value_orthogonality, and (mu > 0)
//   distance_orthogonality.
ValidationReport validate_corollary1(const HardInstance& instance);

// Distance from the affine-free span of {w_0..w_{N-1}} to the minimizer,
// computed by orthogonal projection. Throws std::runtime_error unless it
// matches |x_N - x_*| (and hence delta_N) within 1e-10.
double span_distance_certificate(const HardInstance& instance);

// Samples the extension over span{w_0..w_{N-1}} and confirms no sampled
// value drops below f_N - 1e-9, while the projection of x_N attains f_N
// within 1e-8. Returns the certified value gap f_N - f_*.
double span_value_certificate(const HardInstance& instance,
                              const ExtensionOracle& oracle, int samples = 200,
                              std::uint64_t seed = 0,
                              ValidationReport* report = nullptr);

// Certifies the chain property of the extension's gradient field level by
// level: for y in span{w_0..w_{j-1}} (y = 0 when j = 0), the gradient must
// stay in span{w_0..w_j}, with relative residual at most 1e-8. Levels
// j >= 1 are sampled `trials` times each from a seeded Gaussian.
ValidationReport verify_zero_chain(const HardInstance& instance,
                                   const ExtensionOracle& oracle,
                                   int trials = 100, std::uint64_t seed = 0);

}  // namespace oclb
