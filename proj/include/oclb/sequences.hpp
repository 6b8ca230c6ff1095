#pragma once

#include "oclb/types.hpp"

#include <vector>

namespace oclb {

// Momentum-style scalar sequence used by the mu = 0 schedules:
// theta_0 = 1, interior terms solve theta^2 - theta = theta_{i-1}^2,
// and the final term solves theta^2 - theta = 2 theta_{N-1}^2.
// Returns theta_0..theta_N (N + 1 values).
std::vector<double> theta_sequence(int N);

// Contraction-factor sequence used by the strongly convex schedules,
// q = mu / L in (0, 1): lambda_0 = sqrt(q) and
//   lambda_{i+1} = lambda_i * (1 - sqrt(q - (1 - q) lambda_i^2)) / (1 + lambda_i^2).
// Returns lambda_0..lambda_N. Radicands that dip below zero by at most
// 1e-15 are clamped to zero; anything worse throws std::runtime_error.
std::vector<double> lambda_sequence(int N, double q);

// Schedule constructors for horizon N >= 0. The mu-zero variants require
// params.mu == 0; the strongly convex variants require params.mu > 0.
Schedule schedule_simple_muzero(int N, const ClassParams& params);
Schedule schedule_exact_muzero(int N, const ClassParams& params);
Schedule schedule_simple_sc(int N, const ClassParams& params);
Schedule schedule_exact_sc(int N, const ClassParams& params);

// Checks the three admissibility conditions of a schedule:
//   ordering:           0 <= q delta_i <= gamma_i <= delta_i
//   product_recursion:  gamma_{i+1} delta_{i+1} <= -(gamma_i - delta_i)(gamma_i - q delta_i)
//   radius:             sum_i delta_i^2 <= R_x^2
ValidationReport validate_schedule(const Schedule& schedule);

// Guaranteed final objective gap of any admissible schedule:
//   L^2 / (2 (L - mu)) * (2 gamma_N delta_N - gamma_N^2 - q delta_N^2).
// Throws std::invalid_argument if the schedule fails validation.
double risk_bound(const Schedule& schedule);

// Guaranteed final distance to the minimizer, delta_N. Only defined for
// mu > 0; throws std::invalid_argument otherwise or on invalid schedules.
double xrisk_bound(const Schedule& schedule);

}  // namespace oclb
