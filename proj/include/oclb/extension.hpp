#pragma once

#include "oclb/types.hpp"

#include <vector>

namespace oclb {

// Result of maximizing the concave quadratic surrogate over the simplex.
struct SimplexQPResult {
  Vector alpha;                 // maximizer, one weight per flat triplet index
  double value = 0.0;           // attained surrogate value
  std::vector<int> active_set;  // flat indices with alpha > 0
  double kkt_residual = 0.0;    // stationarity gap of the accepted point
};

// Exact first-order oracle for the pointwise-maximum extension of a
// finite triplet family. For weights alpha on the simplex,
//
//   v(y, alpha) = L/2 |y|^2 - (L-mu)/2 |y - (sum_i alpha_i w_i)/(L-mu)|^2
//                 + sum_i alpha_i c_i,
//
// with shifted gradients w_i = g_i - mu x_i and offsets
// c_i = f_i + |g_i - L x_i|^2 / (2 (L-mu)) - L/2 |x_i|^2. The extension
// value at y is max over the simplex, and its gradient is
// mu y + sum_i alpha*_i w_i at any maximizer alpha*.
class ExtensionOracle {
 public:
  // The triplet family must satisfy mu < L; mu may be negative.
  ExtensionOracle(TripletSet triplets, ClassParams params);

  const TripletSet& triplets() const { return triplets_; }
  const ClassParams& params() const { return params_; }
  Index dim() const { return triplets_.dim(); }
  int index_count() const { return triplets_.total(); }

  const Matrix& shifted_gradients() const { return W_; }  // dim x count
  const Vector& offsets() const { return c_; }
  const Matrix& gram() const { return gram_; }

  // Surrogate value for explicit weights. alpha must have one entry per
  // flat index, sum to 1 within 1e-9, and have entries >= -1e-9.
  double v_quad(const Vector& y, const Vector& alpha) const;

  // Maximizes the surrogate over the simplex. Families of at most 20
  // triplets are solved by exact active-set enumeration; larger families
  // by an accelerated projected-gradient method with an exact polishing
  // step on the detected support. Throws std::runtime_error if no
  // candidate passes the stationarity test.
  SimplexQPResult maximize_simplex(const Vector& y) const;

  // Extension value and gradient at y.
  OracleResponse eval(const Vector& y) const;

 private:
  SimplexQPResult solve_enumeration(
      const Vector& b, const std::vector<long double>& vertex_values) const;
  SimplexQPResult solve_projected_gradient(const Vector& b) const;
  bool kkt_candidate(const Vector& b, Vector& alpha, SimplexQPResult& out) const;

  TripletSet triplets_;
  ClassParams params_;
  Matrix W_;        // columns are shifted gradients
  Vector c_;
  Matrix gram_;     // W^T W
  double gram_lmax_ = 0.0;
};

// Checks every ordered pair (i, j) of the family for consistency with
// some function in the class:
//   f_i - f_j - <g_j, x_i - x_j> >=
//     |g_i - g_j|^2 / (2L) + mu L / (2 (L-mu)) |x_i - x_j - (g_i - g_j)/L|^2.
// Residual reported is the worst scaled violation.
ValidationReport check_interpolation_conditions(const TripletSet& triplets,
                                                const ClassParams& params,
                                                double tol = kIneqSlack);

// Checks that the extension dominates each member tangent quadratic at y:
//   V(y) >= f_i + <g_i, y - x_i> + mu/2 |y - x_i|^2.
ValidationReport check_lower_quadratic(const ExtensionOracle& oracle,
                                       const Vector& y);

// Central-difference audit of the oracle gradient at y, using step
// h = eps^(1/3) (1 + |y|) per coordinate. Returns |g_fd - g| / (1 + |g|).
double gradient_fd_error(const ExtensionOracle& oracle, const Vector& y);

}  // namespace oclb
