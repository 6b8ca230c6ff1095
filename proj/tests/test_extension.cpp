#include "oclb/extension.hpp"

#include "oclb/instance.hpp"
#include "oclb/sequences.hpp"

#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <iterator>
#include <random>

using namespace oclb;

namespace {

Triplet make_triplet(std::initializer_list<double> x,
                     std::initializer_list<double> g, double f) {
  Triplet t;
  t.x = Eigen::Map<const Vector>(std::data(x), static_cast<Index>(x.size()));
  t.g = Eigen::Map<const Vector>(std::data(g), static_cast<Index>(g.size()));
  t.f = f;
  return t;
}

// Two touching parabola pieces on the line: observations of |.|-like
// shape that any smooth convex function matching them must interpolate.
TripletSet line_pair() {
  TripletSet ts(1);
  ts.add(make_triplet({0.0}, {-1.0}, 0.5));
  ts.add(make_triplet({2.0}, {1.0}, 0.5));
  return ts;
}

Vector random_point(std::mt19937_64& rng, Index dim, double radius) {
  std::uniform_real_distribution<double> box(-radius, radius);
  Vector y(dim);
  for (Index i = 0; i < dim; ++i) y[i] = box(rng);
  return y;
}

}  // namespace

TEST_CASE("surrogate value for explicit weights on the line pair") {
  const ExtensionOracle oracle(line_pair(), make_class(0.0, 1.0, 1.0));

  CHECK(oracle.offsets()[0] == doctest::Approx(1.0));
  CHECK(oracle.offsets()[1] == doctest::Approx(-1.0));

  Vector y(1);
  y[0] = 1.0;
  Vector alpha(2);
  alpha << 0.5, 0.5;
  CHECK(oracle.v_quad(y, alpha) == doctest::Approx(0.0).epsilon(1e-14));
  alpha << 1.0, 0.0;
  CHECK(oracle.v_quad(y, alpha) == doctest::Approx(-0.5));

  y[0] = 0.0;
  CHECK(oracle.v_quad(y, alpha) == doctest::Approx(0.5));

  // surrogate never exceeds the maximized value
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    y[0] = 4.0 * unit(rng) - 2.0;
    alpha[0] = unit(rng);
    alpha[1] = 1.0 - alpha[0];
    const SimplexQPResult qp = oracle.maximize_simplex(y);
    CHECK(oracle.v_quad(y, alpha) <= qp.value + 1e-12);
    CHECK(oracle.v_quad(y, qp.alpha) == doctest::Approx(qp.value).epsilon(1e-12));
  }
}

TEST_CASE("surrogate rejects weights off the simplex") {
  const ExtensionOracle oracle(line_pair(), make_class(0.0, 1.0, 1.0));
  Vector y(1);
  y[0] = 0.5;

  Vector bad(2);
  bad << 0.7, 0.7;
  CHECK_THROWS_AS(oracle.v_quad(y, bad), std::invalid_argument);
  bad << 1.5, -0.5;
  CHECK_THROWS_AS(oracle.v_quad(y, bad), std::invalid_argument);
  Vector short_alpha(1);
  short_alpha << 1.0;
  CHECK_THROWS_AS(oracle.v_quad(y, short_alpha), std::invalid_argument);
  Vector bad_y(2);
  bad_y << 0.0, 0.0;
  Vector ok(2);
  ok << 0.5, 0.5;
  CHECK_THROWS_AS(oracle.v_quad(bad_y, ok), std::invalid_argument);
}

TEST_CASE("maximizer weights on the line pair") {
  const ExtensionOracle oracle(line_pair(), make_class(0.0, 1.0, 1.0));
  Vector y(1);

  y[0] = 1.0;  // kink of the pointwise maximum: both members active
  const SimplexQPResult mid = oracle.maximize_simplex(y);
  CHECK(mid.value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(mid.alpha[0] == doctest::Approx(0.5));
  CHECK(mid.alpha[1] == doctest::Approx(0.5));
  CHECK(oracle.eval(y).gradient.norm() <= 1e-12);

  y[0] = 0.0;  // back at the first observation
  const SimplexQPResult left = oracle.maximize_simplex(y);
  CHECK(left.value == doctest::Approx(0.5));
  CHECK(left.alpha[0] == doctest::Approx(1.0));
  CHECK(left.active_set == std::vector<int>{0});
}

TEST_CASE("single observation at the origin gives the curvature floor") {
  TripletSet ts(2);
  ts.add(make_triplet({0.0, 0.0}, {0.0, 0.0}, 0.0));
  const ExtensionOracle oracle(std::move(ts), make_class(0.25, 1.0, 1.0));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Vector y = random_point(rng, 2, 2.0);
    const OracleResponse resp = oracle.eval(y);
    CHECK(resp.value == doctest::Approx(0.125 * y.squaredNorm()).epsilon(1e-13));
    CHECK((resp.gradient - 0.25 * y).norm() <= 1e-12);
  }
}

TEST_CASE("pairwise interpolation checker accepts and rejects") {
  const ClassParams p = make_class(0.0, 1.0, 1.0);
  CHECK(check_interpolation_conditions(line_pair(), p).all_passed());

  TripletSet bad(1);
  bad.add(make_triplet({0.0}, {-1.0}, 0.0));
  bad.add(make_triplet({1.0}, {1.0}, 0.0));
  const auto report = check_interpolation_conditions(bad, p);
  CHECK_FALSE(report.all_passed());
  CHECK(report.worst_residual() > 0.1);
}

TEST_CASE("stationarity certificates at random queries") {
  const ClassParams p = make_class(0.25, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(5, p));
  const ExtensionOracle oracle = make_oracle(inst);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Vector y = random_point(rng, oracle.dim(), 1.0);
    const SimplexQPResult qp = oracle.maximize_simplex(y);
    CHECK(qp.kkt_residual <= 1e-10);
    CHECK(std::abs(qp.alpha.sum() - 1.0) <= 1e-12);
    CHECK(qp.alpha.minCoeff() >= 0.0);
    for (int idx : qp.active_set) CHECK(qp.alpha[idx] > 0.0);
  }
}

TEST_CASE("gradient matches central differences") {
  const ClassParams p = make_class(0.1, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(6, p));
  const ExtensionOracle oracle = make_oracle(inst);

  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Vector y = random_point(rng, oracle.dim(), 1.0);
    worst = std::max(worst, gradient_fd_error(oracle, y));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("curvature pinched between the class extremes") {
  const ClassParams p = make_class(0.25, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(4, p));
  const ExtensionOracle oracle = make_oracle(inst);

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int t = 0; t < 50; ++t) {
    const Vector a = random_point(rng, oracle.dim(), 1.5);
    const Vector b = random_point(rng, oracle.dim(), 1.5);
    const double w = unit(rng);
    const Vector m = w * a + (1.0 - w) * b;

    const double va = oracle.eval(a).value;
    const double vb = oracle.eval(b).value;
    const double vm = oracle.eval(m).value;

    // V - mu/2 |.|^2 convex along the segment
    const double lower = (vm - 0.5 * p.mu * m.squaredNorm()) -
                         w * (va - 0.5 * p.mu * a.squaredNorm()) -
                         (1.0 - w) * (vb - 0.5 * p.mu * b.squaredNorm());
    CHECK(lower <= 1e-9);
    // L/2 |.|^2 - V convex along the segment
    const double upper = (0.5 * p.L * m.squaredNorm() - vm) -
                         w * (0.5 * p.L * a.squaredNorm() - va) -
                         (1.0 - w) * (0.5 * p.L * b.squaredNorm() - vb);
    CHECK(upper <= 1e-9);
  }
}

TEST_CASE("oracle outputs interpolate themselves") {
  const ClassParams p = make_class(0.1, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(5, p));
  const ExtensionOracle oracle = make_oracle(inst);

  TripletSet samples(oracle.dim());
  std::mt19937_64 rng(29);
  for (int t = 0; t < 50; ++t) {
    Triplet s;
    s.x = random_point(rng, oracle.dim(), 1.0);
    const OracleResponse resp = oracle.eval(s.x);
    s.g = resp.gradient;
    s.f = resp.value;
    samples.add(std::move(s));
  }
  CHECK(check_interpolation_conditions(samples, p, 1e-8).all_passed());
}

TEST_CASE("tangent quadratics never exceed the extension") {
  const ClassParams p = make_class(0.25, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(4, p));
  const ExtensionOracle oracle = make_oracle(inst);

  std::mt19937_64 rng(31);
  for (int t = 0; t < 25; ++t) {
    const Vector y = random_point(rng, oracle.dim(), 2.0);
    CHECK(check_lower_quadratic(oracle, y).all_passed());
  }
}

TEST_CASE("projected-gradient path agrees with enumeration") {
  // Same family twice: duplicated members push the index count past the
  // enumeration limit without changing the pointwise maximum.
  const ClassParams p = make_class(0.25, 1.0, 1.0);
  const HardInstance inst = build_hard_instance(schedule_exact_sc(13, p));
  const ExtensionOracle small = make_oracle(inst);
  REQUIRE(small.index_count() == 15);

  TripletSet padded(inst.dim());
  for (int i = 0; i <= inst.horizon; ++i) padded.add(inst.triplets.entry(i));
  for (int i : {0, 2, 3, 5, 7, 11}) padded.add(inst.triplets.entry(i));
  padded.set_star(inst.triplets.star());
  const ExtensionOracle large(std::move(padded), p);
  REQUIRE(large.index_count() == 21);

  std::mt19937_64 rng(37);
  for (int t = 0; t < 25; ++t) {
    const Vector y = random_point(rng, small.dim(), 1.0);
    const OracleResponse a = small.eval(y);
    const OracleResponse b = large.eval(y);
    CHECK(std::abs(a.value - b.value) <= 1e-9 * (1.0 + std::abs(a.value)));
    CHECK((a.gradient - b.gradient).norm() <= 1e-8 * (1.0 + a.gradient.norm()));
  }
}

TEST_CASE("weakly convex curvature is accepted") {
  TripletSet ts(1);
  ts.add(make_triplet({-1.0}, {-1.0}, 0.5));
  ts.add(make_triplet({1.0}, {1.0}, 0.5));
  const ClassParams p = make_class_relaxed(-0.5, 1.0, 1.0);
  const ExtensionOracle oracle(std::move(ts), p);

  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t) {
    const Vector y = random_point(rng, 1, 2.0);
    const OracleResponse resp = oracle.eval(y);
    CHECK(std::isfinite(resp.value));
    CHECK(check_lower_quadratic(oracle, y).all_passed());
    // the maximum of two concave branches has a kink at the crossover;
    // finite differences are only meaningful away from it
    if (std::abs(y[0]) > 0.05) CHECK(gradient_fd_error(oracle, y) <= 1e-5);
  }
  CHECK_THROWS_AS(make_class(-0.5, 1.0, 1.0), std::invalid_argument);
}
