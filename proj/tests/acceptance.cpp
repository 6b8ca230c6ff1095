// Acceptance suite: exercises the full pipeline end to end and prints one
// pass/fail line per criterion. Exit code 0 iff every criterion passes.
#include "oclb/extension.hpp"
#include "oclb/instance.hpp"
#include "oclb/methods.hpp"
#include "oclb/sequences.hpp"
#include "oclb/types.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace oclb;

namespace {

struct Tracker {
  bool ok = true;
  double worst = -std::numeric_limits<double>::infinity();

  // records a signed margin that must stay at or below `limit`
  void bound(double value, double limit) {
    worst = std::max(worst, value);
    ok = ok && value <= limit;
  }
  void require(bool cond) { ok = ok && cond; }
};

Vector box_sample(std::mt19937_64& rng, Index dim, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Vector y(dim);
  for (Index i = 0; i < dim; ++i) y[i] = u(rng);
  return y;
}

const std::vector<double> kQGrid = {0.01, 0.1, 0.25, 0.5};

std::vector<HardInstance> build_grid() {
  std::vector<HardInstance> grid;
  for (double q : kQGrid) {
    const ClassParams p = make_class(q, 1.0, 1.0);
    for (int N = 0; N <= 15; ++N) {
      grid.push_back(build_hard_instance(schedule_exact_sc(N, p)));
    }
  }
  const ClassParams flat = make_class(0.0, 1.0, 1.0);
  for (int N = 0; N <= 10; ++N) {
    grid.push_back(build_hard_instance(schedule_simple_muzero(N, flat)));
    grid.push_back(build_hard_instance(schedule_exact_muzero(N, flat)));
  }
  return grid;
}

bool criterion(int number, const std::string& label,
               const std::function<void(Tracker&)>& body) {
  Tracker t;
  std::string note;
  try {
    body(t);
  } catch (const std::exception& e) {
    t.ok = false;
    note = std::string(" [") + e.what() + "]";
  }
  std::printf("[%s] criterion %d: %s (worst %.3g)%s\n", t.ok ? "PASS" : "FAIL",
              number, label.c_str(), t.worst, note.c_str());
  return t.ok;
}

}  // namespace

int main() {
  bool all = true;

  all &= criterion(
      1, "simple flat-class risk matches its closed form and floor",
      [](Tracker& t) {
        const ClassParams p = make_class(0.0, 1.0, 1.0);
        for (int N = 1; N <= 20; ++N) {
          const double r = risk_bound(schedule_simple_muzero(N, p));
          const double n1 = N + 1.0;
          const double closed = (1.0 / (n1 * n1) - 0.25 / (n1 * n1 * n1)) / 2.0;
          t.bound(std::abs(r - closed) / closed, 1e-12);
          t.require(r >= 3.0 / (8.0 * n1 * n1));
        }
      });

  all &= criterion(
      2, "exact flat-class risk matches the momentum closed form",
      [](Tracker& t) {
        const ClassParams p = make_class(0.0, 1.0, 1.0);
        for (int N = 1; N <= 20; ++N) {
          const Schedule s = schedule_exact_muzero(N, p);
          const std::vector<double> theta = theta_sequence(N);
          const double closed = 1.0 / (2.0 * theta.back() * theta.back());
          t.bound(std::abs(risk_bound(s) - closed) / closed, 1e-10);

          double sq = 0.0;
          for (double d : s.delta) sq += d * d;
          t.bound(std::abs(sq - 1.0), 1e-10);

          for (int i = 0; i + 1 <= N; ++i) {
            const double lhs = s.gamma[i + 1] * s.delta[i + 1];
            const double rhs = -(s.gamma[i] - s.delta[i]) * s.gamma[i];
            t.bound(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)),
                    1e-12);
          }
        }
      });

  all &= criterion(
      3, "curved-class schedule invariants and bound domination",
      [](Tracker& t) {
        for (double q : kQGrid) {
          const ClassParams p = make_class(q, 1.0, 1.0);
          for (int N = 0; N <= 15; ++N) {
            const Schedule exact = schedule_exact_sc(N, p);
            const Schedule simple = schedule_simple_sc(N, p);
            t.require(validate_schedule(exact).all_passed());

            const std::vector<double> lam = lambda_sequence(N, q);
            const double target = lam.back() / std::sqrt(q);
            t.bound(std::abs(exact.delta.back() - target) / target, 1e-10);

            const double lower = (1.0 - std::sqrt(q)) / (1.0 + q);
            for (int i = 0; i < N; ++i) {
              t.bound(lower * lam[i] - lam[i + 1], 1e-14 * lam[i]);
              t.bound(lam[i + 1] - (1.0 - q) * lam[i], 1e-14 * lam[i]);
            }
            t.bound(xrisk_bound(simple) - xrisk_bound(exact),
                    1e-15 * xrisk_bound(simple));
          }
        }
      });

  const std::vector<HardInstance> grid = build_grid();
  std::vector<ExtensionOracle> oracles;
  oracles.reserve(grid.size());
  for (const HardInstance& inst : grid) oracles.push_back(make_oracle(inst));

  all &= criterion(
      4, "instances certified worst case with exact oracle playback",
      [&](Tracker& t) {
        for (size_t i = 0; i < grid.size(); ++i) {
          const HardInstance& inst = grid[i];
          const ValidationReport report = validate_corollary1(inst);
          t.require(report.all_passed());
          t.bound(report.worst_residual(), 1e-9);

          for (int idx = 0; idx < inst.triplets.total(); ++idx) {
            const Triplet& tr = inst.triplets.flat(idx);
            const OracleResponse resp = oracles[i].eval(tr.x);
            t.bound(std::abs(resp.value - tr.f), 1e-9);
            t.bound((resp.gradient - tr.g).norm(), 1e-8);
          }
        }
      });

  all &= criterion(
      5, "span distance and span value certificates", [&](Tracker& t) {
        for (size_t i = 0; i < grid.size(); ++i) {
          const HardInstance& inst = grid[i];
          const double dist = span_distance_certificate(inst);
          const double dn = inst.schedule.delta.back();
          t.bound(std::abs(dist - dn) / (1.0 + dn), 1e-10);

          ValidationReport report;
          span_value_certificate(inst, oracles[i], 200, 0, &report);
          t.require(report.all_passed());
          const ConditionCheck* attained = report.find("span_value_attained");
          t.require(attained != nullptr);
          if (attained != nullptr) t.bound(attained->residual, 1e-8);
        }
      });

  all &= criterion(
      6, "gradient chain certified per level, negative control fails",
      [&](Tracker& t) {
        for (size_t i = 0; i < grid.size(); ++i) {
          const ValidationReport report =
              verify_zero_chain(grid[i], oracles[i], 100, 0);
          t.require(report.all_passed());
          t.bound(report.worst_residual(), 1e-8);
        }

        HardInstance control = build_hard_instance(
            schedule_exact_sc(5, make_class(0.25, 1.0, 1.0)));
        std::mt19937_64 rng(1234);
        std::normal_distribution<double> gauss;
        for (int j = 0; j <= control.horizon; ++j) {
          Triplet tr = control.triplets.entry(j);
          Vector dir(control.dim());
          for (Index k = 0; k < dir.size(); ++k) dir[k] = gauss(rng);
          tr.g = tr.g.norm() * dir.normalized();
          control.triplets.replace(j, tr);
        }
        const ExtensionOracle bad = make_oracle(control);
        t.require(!verify_zero_chain(control, bad, 100, 0).all_passed());
      });

  all &= criterion(
      7, "oracle soundness: differencing, interpolation, stationarity",
      [&](Tracker& t) {
        for (size_t i = 0; i < grid.size(); ++i) {
          const HardInstance& inst = grid[i];
          const ExtensionOracle& oracle = oracles[i];
          std::mt19937_64 rng(0);

          for (int k = 0; k < 100; ++k) {
            const Vector y = box_sample(rng, inst.dim(), inst.params.R_x);
            t.bound(gradient_fd_error(oracle, y), 1e-5);
          }

          TripletSet samples(inst.dim());
          for (int k = 0; k < 50; ++k) {
            const Vector y = box_sample(rng, inst.dim(), inst.params.R_x);
            const SimplexQPResult qp = oracle.maximize_simplex(y);
            t.bound(qp.kkt_residual, 1e-10);
            Triplet tr;
            tr.x = y;
            tr.g = inst.params.mu * y + oracle.shifted_gradients() * qp.alpha;
            tr.f = qp.value;
            samples.add(std::move(tr));
          }
          const ValidationReport interp =
              check_interpolation_conditions(samples, inst.params, 1e-8);
          t.require(interp.all_passed());
          t.bound(interp.worst_residual(), 1e-8);
        }
      });

  all &= criterion(
      8, "gradient descent sandwiched between floor and classical rate",
      [](Tracker& t) {
        const ClassParams p = make_class(0.1, 1.0, 1.0);
        const HardInstance inst = build_hard_instance(schedule_exact_sc(10, p));
        const ExtensionOracle oracle = make_oracle(inst);
        const Trajectory traj = run_gradient_descent(oracle, 10);
        const BoundComparison score = score_against_bounds(traj, inst);

        t.bound(score.distance_floor - score.final_distance, 1e-9);
        const double rate = std::pow((1.0 - p.q()) / (1.0 + p.q()), 10);
        t.bound(score.final_distance - rate * p.R_x, 1e-9);
        t.require(audit_zero_respecting(traj, inst.params).all_passed());
      });

  std::printf("%s\n", all ? "acceptance: all criteria passed"
                          : "acceptance: FAILURES PRESENT");
  return all ? 0 : 1;
}
