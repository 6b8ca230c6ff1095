#include "oclb/instance.hpp"

#include "oclb/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace oclb {

namespace {

constexpr double kRankRel = 1e-12;   // singular-value cutoff, relative to largest
constexpr double kChainTol = 1e-8;   // gradient containment, relative
constexpr double kSpanDistTol = 1e-10;
constexpr double kSpanValueFloor = 1e-9;
constexpr double kSpanAttainTol = 1e-8;

void require_valid_schedule(const Schedule& schedule) {
  const ValidationReport report = validate_schedule(schedule);
  for (const auto& c : report.checks()) {
    if (!c.passed) {
      throw std::invalid_argument("schedule rejected: condition '" + c.name +
                                  "' fails with residual " +
                                  std::to_string(c.residual));
    }
  }
}

// Columns are the shifted gradients w_i = g_i - mu x_i over flat indices.
Matrix shifted_matrix(const HardInstance& inst) {
  const int n = inst.triplets.total();
  Matrix W(inst.dim(), n);
  for (int i = 0; i < n; ++i) {
    const Triplet& t = inst.triplets.flat(i);
    W.col(i) = t.g - inst.params.mu * t.x;
  }
  return W;
}

int numeric_rank(const Matrix& A) {
  if (A.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  const double cutoff = kRankRel * sv[0];
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  return rank;
}

// Orthonormal basis of the column space of the first `count` columns.
Matrix prefix_basis(const Matrix& W, int count) {
  if (count == 0) return Matrix(W.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(W.leftCols(count), Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return Matrix(W.rows(), 0);
  const double cutoff = kRankRel * sv[0];
  int rank = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

std::vector<int> independent_beyond_impl(const Matrix& W, int j) {
  const int n = static_cast<int>(W.cols());
  const int base_rank = numeric_rank(W.leftCols(j + 1));
  Matrix aug(W.rows(), j + 2);
  aug.leftCols(j + 1) = W.leftCols(j + 1);
  std::vector<int> out;
  for (int k = 0; k < n; ++k) {
    aug.col(j + 1) = W.col(k);
    if (numeric_rank(aug) > base_rank) out.push_back(k);
  }
  return out;
}

Vector gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(n);
  for (Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

}  // namespace

HardInstance build_hard_instance(const Schedule& schedule, Index pad_dim) {
  if (schedule.params.mu < 0.0) {
    throw std::invalid_argument("hard instances require mu >= 0");
  }
  require_valid_schedule(schedule);

  const int N = schedule.horizon();
  const Index d = std::max<Index>(N + 1, pad_dim);
  const double L = schedule.params.L;
  const double q = schedule.params.q();
  const double sigma = schedule.params.sigma();

  // Suffix sums tail[j] = sum_{t >= j} delta_t^2.
  std::vector<double> tail(static_cast<size_t>(N) + 2, 0.0);
  for (int j = N; j >= 0; --j) {
    const double dj = schedule.delta[static_cast<size_t>(j)];
    tail[static_cast<size_t>(j)] = tail[static_cast<size_t>(j) + 1] + dj * dj;
  }

  TripletSet ts(d);
  Vector x = Vector::Zero(d);
  for (int j = 0; j <= N; ++j) {
    const double gj = schedule.gamma[static_cast<size_t>(j)];
    const double dj = schedule.delta[static_cast<size_t>(j)];
    Triplet t;
    t.x = x;
    t.g = Vector::Zero(d);
    t.g[j] = L * gj;
    t.f = L * L / (2.0 * sigma) *
          (2.0 * gj * dj - gj * gj - q * tail[static_cast<size_t>(j)]);
    ts.add(std::move(t));
    x[j] = -dj;
  }
  Triplet star;
  star.x = x;
  star.g = Vector::Zero(d);
  star.f = 0.0;
  ts.set_star(std::move(star));

  return HardInstance{schedule.params, schedule, std::move(ts), N};
}

ExtensionOracle make_oracle(const HardInstance& instance) {
  return ExtensionOracle(instance.triplets, instance.params);
}

std::vector<int> independent_beyond(const HardInstance& instance, int j) {
  if (j < 0 || j > instance.horizon) {
    throw std::invalid_argument("prefix index out of range");
  }
  return independent_beyond_impl(shifted_matrix(instance), j);
}

ValidationReport validate_corollary1(const HardInstance& inst) {
  ValidationReport report;
  const TripletSet& ts = inst.triplets;
  const ClassParams& p = inst.params;
  const int N = inst.horizon;
  const int n = ts.total();  // N + 2 with the star entry
  const double L = p.L;
  const double mu = p.mu;
  const double sigma = p.sigma();

  const Matrix W = shifted_matrix(inst);
  const Matrix gram = W.transpose() * W;
  Vector c(n);
  for (int i = 0; i < n; ++i) {
    const Triplet& t = ts.flat(i);
    c[i] = t.f + (t.g - L * t.x).squaredNorm() / (2.0 * sigma) -
           0.5 * L * t.x.squaredNorm();
  }
  const Triplet& star = ts.star();

  report.add("base_points",
             ts.entry(0).x.norm() <= kEqAbs && star.g.norm() <= kEqAbs,
             std::max(ts.entry(0).x.norm(), star.g.norm()));

  {
    const double dist = (ts.entry(0).x - star.x).norm();
    const double viol = (dist - p.R_x) / (1.0 + p.R_x);
    report.add("initial_radius", viol <= kIneqSlack, viol,
               "distance " + std::to_string(dist));
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    std::string worst_label;
    for (int j = 0; j < n; ++j) {
      const Triplet& tj = ts.flat(j);
      const Vector d = star.x - tj.x;
      const double lhs = tj.g.squaredNorm() / (2.0 * L) +
                         mu * L / (2.0 * sigma) * (d + tj.g / L).squaredNorm();
      const double rhs = star.f - tj.f - tj.g.dot(d);
      const double viol = (lhs - rhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
      if (viol > worst) {
        worst = viol;
        worst_label = ts.flat_label(j);
      }
    }
    report.add("optimal_interpolation", worst <= kIneqSlack, worst,
               "worst member " + worst_label);
  }

  std::vector<std::vector<int>> beyond(static_cast<size_t>(std::max(N, 0)));
  for (int j = 0; j < N; ++j) {
    beyond[static_cast<size_t>(j)] = independent_beyond_impl(W, j);
  }

  {
    double worst = 0.0;
    std::string at;
    for (int j = 1; j < N; ++j) {
      for (int i = 0; i < j; ++i) {
        for (int k : beyond[static_cast<size_t>(j)]) {
          const double a = gram(i, j);
          const double b = gram(i, k);
          const double dev = std::abs(a - b) / (1.0 + std::abs(a));
          if (dev > worst) {
            worst = dev;
            at = "(i,j,k)=(" + std::to_string(i) + "," + std::to_string(j) +
                 "," + ts.flat_label(k) + ")";
          }
        }
      }
    }
    report.add("chain_alignment", worst <= kEqAbs, worst,
               at.empty() ? "vacuous" : "worst " + at);
  }

  {
    double worst = -std::numeric_limits<double>::infinity();
    std::string at;
    for (int j = 0; j < N; ++j) {
      for (int k : beyond[static_cast<size_t>(j)]) {
        for (int i = 0; i < n; ++i) {
          const double lhs = c[j] - gram(i, j) / sigma;
          const double rhs = c[k] - gram(i, k) / sigma;
          const double viol = (rhs - lhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
          if (viol > worst) {
            worst = viol;
            at = "(j,k,i)=(" + std::to_string(j) + "," + ts.flat_label(k) +
                 "," + ts.flat_label(i) + ")";
          }
        }
      }
    }
    if (std::isinf(worst)) {
      report.add("chain_ordering", true, 0.0, "vacuous");
    } else {
      report.add("chain_ordering", worst <= kIneqSlack, worst, "worst " + at);
    }
  }

  {
    // Separating certificates: either the chain axis e_j or the negated
    // tail direction -sum_{t>j} e_t must put w_j strictly above every
    // independent w_k.
    double worst_deficit = -std::numeric_limits<double>::infinity();
    std::string at;
    bool any = false;
    const Index d = inst.dim();
    for (int j = 0; j < N; ++j) {
      const auto& ks = beyond[static_cast<size_t>(j)];
      if (ks.empty()) continue;
      any = true;
      double axis = std::numeric_limits<double>::infinity();
      double tail = std::numeric_limits<double>::infinity();
      const double wj_axis = W(j, j);
      const double wj_tail = -W.col(j).segment(j + 1, d - j - 1).sum();
      for (int k : ks) {
        axis = std::min(axis, wj_axis - W(j, k));
        tail = std::min(
            tail, wj_tail + W.col(k).segment(j + 1, d - j - 1).sum());
      }
      const double margin = std::max(axis, tail);
      if (-margin > worst_deficit) {
        worst_deficit = -margin;
        at = "level " + std::to_string(j);
      }
    }
    if (!any) {
      report.add("chain_separability", true, 0.0, "vacuous");
    } else {
      report.add("chain_separability", worst_deficit < 0.0, worst_deficit,
                 "smallest margin at " + at);
    }
  }

  {
    const Triplet& tN = ts.entry(N);
    double worst = std::abs(tN.g.dot(tN.x)) / (1.0 + tN.g.norm() * tN.x.norm());
    for (int i = 0; i < N; ++i) {
      const double dev =
          std::abs(tN.g.dot(W.col(i))) / (1.0 + tN.g.norm() * W.col(i).norm());
      worst = std::max(worst, dev);
    }
    report.add("value_orthogonality", worst <= kEqAbs, worst);
  }

  if (mu > 0.0) {
    const Triplet& tN = ts.entry(N);
    const Vector r = tN.x - star.x;
    double worst = std::abs(r.dot(tN.x)) / (1.0 + r.norm() * tN.x.norm());
    for (int i = 0; i < N; ++i) {
      const double dev =
          std::abs(r.dot(W.col(i))) / (1.0 + r.norm() * W.col(i).norm());
      worst = std::max(worst, dev);
    }
    report.add("distance_orthogonality", worst <= kEqAbs, worst);
  }

  return report;
}

double span_distance_certificate(const HardInstance& inst) {
  const int N = inst.horizon;
  const Matrix W = shifted_matrix(inst);
  const Matrix Q = prefix_basis(W, N);
  const Vector& xs = inst.triplets.star().x;
  const Vector resid = xs - Q * (Q.transpose() * xs);
  const double dist = resid.norm();

  const double direct = (inst.triplets.entry(N).x - xs).norm();
  const double delta_last = inst.schedule.delta.back();
  if (std::abs(dist - direct) > kSpanDistTol * (1.0 + direct) ||
      std::abs(direct - delta_last) > kSpanDistTol * (1.0 + delta_last)) {
    throw std::runtime_error(
        "span distance certificate failed: projection distance " +
        std::to_string(dist) + " vs final-step distance " +
        std::to_string(direct));
  }
  return dist;
}

double span_value_certificate(const HardInstance& inst,
                              const ExtensionOracle& oracle, int samples,
                              std::uint64_t seed, ValidationReport* report) {
  const int N = inst.horizon;
  const Matrix W = shifted_matrix(inst);
  const Matrix Q = prefix_basis(W, N);
  const double f_N = inst.triplets.entry(N).f;
  const double f_star = inst.triplets.star().f;

  std::mt19937_64 rng(seed);
  double min_val = std::numeric_limits<double>::infinity();
  bool sampled = true;
  if (Q.cols() == 0) {
    min_val = oracle.eval(Vector::Zero(inst.dim())).value;
  } else if (samples <= 0) {
    sampled = false;
  } else {
    for (int s = 0; s < samples; ++s) {
      const Vector y = Q * (inst.params.R_x * gaussian(rng, Q.cols()));
      min_val = std::min(min_val, oracle.eval(y).value);
    }
  }

  const Vector& xN = inst.triplets.entry(N).x;
  const Vector attain = Q.cols() == 0 ? Vector(Vector::Zero(inst.dim()))
                                      : Vector(Q * (Q.transpose() * xN));
  const double attained = oracle.eval(attain).value;

  ValidationReport local;
  if (sampled) {
    local.add("span_value_floor", f_N - min_val <= kSpanValueFloor,
              f_N - min_val,
              "min of " + std::to_string(samples) + " samples");
  }
  local.add("span_value_attained",
            std::abs(attained - f_N) <= kSpanAttainTol,
            std::abs(attained - f_N));
  if (report != nullptr) {
    report->merge(local);
  } else if (!local.all_passed()) {
    throw std::runtime_error("span value certificate failed:\n" +
                             local.to_string());
  }
  return f_N - f_star;
}

ValidationReport verify_zero_chain(const HardInstance& inst,
                                   const ExtensionOracle& oracle, int trials,
                                   std::uint64_t seed) {
  ValidationReport report;
  const int N = inst.horizon;
  if (N == 0) {
    report.add("chain_levels", true, 0.0, "no chain levels at horizon 0");
    return report;
  }
  const Matrix W = shifted_matrix(inst);
  std::mt19937_64 rng(seed);

  for (int j = 0; j < N; ++j) {
    // Level 0 has a single admissible query (the origin); deeper levels
    // are sampled. trials <= 0 runs the origin level only.
    const int reps = (j == 0) ? 1 : trials;
    if (reps <= 0) continue;
    const Matrix Qin = prefix_basis(W, j);
    const Matrix Qout = prefix_basis(W, j + 1);
    double worst = 0.0;
    for (int t = 0; t < reps; ++t) {
      Vector y = Vector::Zero(inst.dim());
      if (j > 0) {
        y = Qin * (inst.params.R_x * gaussian(rng, Qin.cols()));
      }
      const Vector g = oracle.eval(y).gradient;
      const Vector out = g - Qout * (Qout.transpose() * g);
      worst = std::max(worst, out.norm() / (1.0 + g.norm()));
    }
    report.add("chain_level_" + std::to_string(j), worst <= kChainTol, worst,
               (j == 0 ? "origin only" : std::to_string(reps) + " samples"));
  }
  return report;
}

}  // namespace oclb
