#pragma once

#include "oclb/extension.hpp"
#include "oclb/instance.hpp"
#include "oclb/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace oclb {

// Iterates of a first-order method: points[k] is the k-th query and
// responses[k] the oracle's answer there, k = 0..steps.
struct Trajectory {
  std::string method;
  std::vector<Vector> points;
  std::vector<OracleResponse> responses;

  int steps() const { return static_cast<int>(points.size()) - 1; }
};

// Produces the next point from the history seen so far (points and
// responses 0..k are populated when the rule is asked for point k+1).
using StepRule = std::function<Vector(int k, const Trajectory& so_far)>;

// Runs a first-order method from x_0 = 0 for `steps` oracle calls past
// the initial one. Aborts with std::runtime_error if an iterate leaves
// the ball of radius 1e6 R_x (divergence guard).
Trajectory run_method(const ExtensionOracle& oracle, int steps,
                      const StepRule& rule, std::string name);

// Gradient descent x_{k+1} = x_k - h grad. step_size <= 0 selects the
// classical h = 2 / (L + mu).
Trajectory run_gradient_descent(const ExtensionOracle& oracle, int steps,
                                double step_size = 0.0);

// Confirms the trajectory is information-respecting: x_0 = 0 and every
// x_k lies in the span of the shifted gradients g_t - mu x_t, t < k,
// within relative residual 1e-8.
ValidationReport audit_zero_respecting(const Trajectory& trajectory,
                                       const ClassParams& params);

// Final accuracy of a trajectory against the instance's certified floor.
struct BoundComparison {
  double final_distance = 0.0;      // |x_K - x_*|
  double final_value_gap = 0.0;     // V(x_K) - f_*
  double distance_floor = 0.0;      // NaN when mu = 0
  double value_floor = 0.0;
  double distance_ratio = 0.0;      // final_distance / distance_floor
  double value_ratio = 0.0;         // final_value_gap / value_floor
};

BoundComparison score_against_bounds(const Trajectory& trajectory,
                                     const HardInstance& instance);

}  // namespace oclb
