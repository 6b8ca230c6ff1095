#include "oclb/methods.hpp"

#include "oclb/sequences.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace oclb {

namespace {

constexpr double kDivergenceFactor = 1e6;
constexpr double kAuditTol = 1e-8;

}  // namespace

Trajectory run_method(const ExtensionOracle& oracle, int steps,
                      const StepRule& rule, std::string name) {
  if (steps < 0) {
    throw std::invalid_argument("step count must be nonnegative");
  }
  const double guard = kDivergenceFactor * oracle.params().R_x;

  Trajectory traj;
  traj.method = std::move(name);
  traj.points.reserve(static_cast<size_t>(steps) + 1);
  traj.responses.reserve(static_cast<size_t>(steps) + 1);

  traj.points.push_back(Vector::Zero(oracle.dim()));
  traj.responses.push_back(oracle.eval(traj.points.back()));
  for (int k = 0; k < steps; ++k) {
    Vector next = rule(k, traj);
    if (next.size() != oracle.dim()) {
      throw std::invalid_argument("step rule returned wrong dimension");
    }
    if (next.norm() > guard) {
      throw std::runtime_error("method diverged at step " +
                               std::to_string(k + 1) + ": |x| = " +
                               std::to_string(next.norm()));
    }
    traj.points.push_back(std::move(next));
    traj.responses.push_back(oracle.eval(traj.points.back()));
  }
  return traj;
}

Trajectory run_gradient_descent(const ExtensionOracle& oracle, int steps,
                                double step_size) {
  const double h = step_size > 0.0
                       ? step_size
                       : 2.0 / (oracle.params().L + oracle.params().mu);
  const StepRule rule = [h](int k, const Trajectory& so_far) {
    return Vector(so_far.points[static_cast<size_t>(k)] -
                  h * so_far.responses[static_cast<size_t>(k)].gradient);
  };
  return run_method(oracle, steps, rule, "gradient_descent");
}

ValidationReport audit_zero_respecting(const Trajectory& trajectory,
                                       const ClassParams& params) {
  ValidationReport report;
  if (trajectory.points.empty()) {
    report.add("start_at_origin", false, 0.0, "empty trajectory");
    return report;
  }
  const Index d = trajectory.points.front().size();
  const double x0 = trajectory.points.front().norm();
  report.add("start_at_origin", x0 <= kAuditTol, x0);

  // Orthonormal basis of the shifted gradients seen so far, grown by
  // Gram-Schmidt as iterates are replayed.
  Matrix basis(d, 0);
  for (size_t k = 1; k < trajectory.points.size(); ++k) {
    const Vector& prev_x = trajectory.points[k - 1];
    const OracleResponse& prev_r = trajectory.responses[k - 1];
    Vector w = prev_r.gradient - params.mu * prev_x;
    if (basis.cols() > 0) {
      w -= basis * (basis.transpose() * w);
      w -= basis * (basis.transpose() * w);  // second pass for orthogonality
    }
    if (w.norm() > 1e-14 * (1.0 + prev_r.gradient.norm())) {
      basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
      basis.col(basis.cols() - 1) = w / w.norm();
    }

    const Vector& x = trajectory.points[k];
    Vector resid = x;
    if (basis.cols() > 0) {
      resid -= basis * (basis.transpose() * x);
    }
    const double rel = resid.norm() / (1.0 + x.norm());
    report.add("in_span_step_" + std::to_string(k), rel <= kAuditTol, rel);
  }
  return report;
}

BoundComparison score_against_bounds(const Trajectory& trajectory,
                                     const HardInstance& instance) {
  if (trajectory.points.empty()) {
    throw std::invalid_argument("empty trajectory");
  }
  BoundComparison cmp;
  const Vector& last = trajectory.points.back();
  const Triplet& star = instance.triplets.star();
  cmp.final_distance = (last - star.x).norm();
  cmp.final_value_gap = trajectory.responses.back().value - star.f;

  cmp.value_floor = risk_bound(instance.schedule);
  cmp.value_ratio = cmp.final_value_gap / cmp.value_floor;
  if (instance.params.mu > 0.0) {
    cmp.distance_floor = xrisk_bound(instance.schedule);
    cmp.distance_ratio = cmp.final_distance / cmp.distance_floor;
  } else {
    cmp.distance_floor = std::numeric_limits<double>::quiet_NaN();
    cmp.distance_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  return cmp;
}

}  // namespace oclb
