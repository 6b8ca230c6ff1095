#include "oclb/extension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace oclb {

namespace {

// Stationarity acceptance threshold, relative to 1 + max |multiplier|.
constexpr double kKktTol = 1e-10;
// Entries of an exact support solve may round slightly negative.
constexpr double kFeasTol = 1e-12;
// Enumeration is exact and cheap up to this family size.
constexpr int kEnumerationLimit = 20;
// Duality-gap target for the projected-gradient fallback.
constexpr double kGapTol = 1e-12;
constexpr int kMaxIterations = 200000;

// Euclidean projection onto the probability simplex (sort based).
Vector project_simplex(const Vector& v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumsum += u[static_cast<size_t>(j)];
    const double trial = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - trial > 0.0) {
      tau = trial;
    }
  }
  Vector out(n);
  for (Index j = 0; j < n; ++j) {
    out[j] = std::max(v[j] - tau, 0.0);
  }
  return out;
}

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[static_cast<size_t>(i)] < n - (k - i)) {
      ++comb[static_cast<size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j) - 1] + 1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

ExtensionOracle::ExtensionOracle(TripletSet triplets, ClassParams params)
    : triplets_(std::move(triplets)), params_(params) {
  const int n = triplets_.total();
  if (n == 0) {
    throw std::invalid_argument("extension oracle needs at least one triplet");
  }
  const Index d = triplets_.dim();
  const double mu = params_.mu;
  const double L = params_.L;
  const double sigma = params_.sigma();

  W_.resize(d, n);
  c_.resize(n);
  for (int i = 0; i < n; ++i) {
    const Triplet& t = triplets_.flat(i);
    W_.col(i) = t.g - mu * t.x;
    const Vector shift = t.g - L * t.x;
    c_[i] = t.f + shift.squaredNorm() / (2.0 * sigma) -
            0.5 * L * t.x.squaredNorm();
  }
  gram_ = W_.transpose() * W_;
  if (n == 1) {
    gram_lmax_ = gram_(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram_, Eigen::EigenvaluesOnly);
    gram_lmax_ = es.eigenvalues().maxCoeff();
  }
}

double ExtensionOracle::v_quad(const Vector& y, const Vector& alpha) const {
  if (y.size() != dim()) {
    throw std::invalid_argument("query dimension mismatch");
  }
  if (alpha.size() != index_count()) {
    throw std::invalid_argument("weight vector has wrong length");
  }
  if (alpha.minCoeff() < -1e-9 || std::abs(alpha.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must lie on the simplex");
  }
  const double sigma = params_.sigma();
  const Vector mix = W_ * alpha;
  return 0.5 * params_.L * y.squaredNorm() -
         0.5 * sigma * (y - mix / sigma).squaredNorm() + c_.dot(alpha);
}

// Solves the equality-constrained stationarity system on a support and
// tests the result for feasibility and simplex-wide stationarity. On
// acceptance fills alpha, active_set and kkt_residual of `out`.
bool ExtensionOracle::kkt_candidate(const Vector& b, Vector& alpha,
                                    SimplexQPResult& out) const {
  const int n = index_count();
  const double sigma = params_.sigma();

  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (alpha[i] < -kFeasTol) return false;
    if (alpha[i] < 0.0) alpha[i] = 0.0;
    sum += alpha[i];
  }
  if (sum <= 0.0) return false;
  alpha /= sum;

  Vector s = b - (gram_ * alpha) / sigma;
  const double s_max = s.maxCoeff();
  double s_min_active = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) s_min_active = std::min(s_min_active, s[i]);
  }
  const double resid = s_max - s_min_active;
  const double scale = 1.0 + s.cwiseAbs().maxCoeff();
  if (resid > kKktTol * scale) return false;

  out.alpha = alpha;
  out.kkt_residual = resid;
  out.active_set.clear();
  for (Index i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) out.active_set.push_back(static_cast<int>(i));
  }
  return true;
}

namespace {

// Maximizer of b^T a - a^T G a / (2 sigma) restricted to a support, with
// the weights constrained to sum to one (Lagrangian system). Singular
// systems fall back to a least-squares solution.
void solve_support(const Matrix& gram, const Vector& b, double sigma,
                   const std::vector<int>& support, Vector& alpha_full) {
  const int c = static_cast<int>(support.size());
  alpha_full.setZero();
  if (c == 1) {
    alpha_full[support[0]] = 1.0;
    return;
  }
  Matrix M = Matrix::Zero(c + 1, c + 1);
  Vector rhs(c + 1);
  for (int a = 0; a < c; ++a) {
    for (int bb = 0; bb < c; ++bb) {
      M(a, bb) = gram(support[static_cast<size_t>(a)],
                      support[static_cast<size_t>(bb)]) / sigma;
    }
    M(a, c) = 1.0;
    M(c, a) = 1.0;
    rhs[a] = b[support[static_cast<size_t>(a)]];
  }
  rhs[c] = 1.0;

  Eigen::FullPivLU<Matrix> lu(M);
  Vector sol;
  if (lu.isInvertible()) {
    sol = lu.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    sol = cod.solve(rhs);
  }
  for (int a = 0; a < c; ++a) {
    alpha_full[support[static_cast<size_t>(a)]] = sol[a];
  }
}

}  // namespace

SimplexQPResult ExtensionOracle::solve_enumeration(
    const Vector& b, const std::vector<long double>& vertex_values) const {
  const int n = index_count();
  const double sigma = params_.sigma();
  Vector alpha(n);
  SimplexQPResult out;

  // Vertices can tie within double precision while their gradients still
  // differ, so among all single-index candidates that pass the
  // stationarity test the one with the largest extended-precision
  // tangent value wins.
  {
    SimplexQPResult cand;
    int best = -1;
    for (int j = 0; j < n; ++j) {
      alpha.setZero();
      alpha[j] = 1.0;
      if (kkt_candidate(b, alpha, cand) &&
          (best < 0 || vertex_values[j] > vertex_values[best])) {
        best = j;
        out = cand;
      }
    }
    if (best >= 0) return out;
  }

  for (int card = 2; card <= n; ++card) {
    std::vector<int> support(static_cast<size_t>(card));
    std::iota(support.begin(), support.end(), 0);
    do {
      solve_support(gram_, b, sigma, support, alpha);
      if (kkt_candidate(b, alpha, out)) {
        return out;
      }
    } while (next_combination(support, n));
  }
  throw std::runtime_error(
      "simplex maximization: no support passed the stationarity test");
}

SimplexQPResult ExtensionOracle::solve_projected_gradient(const Vector& b) const {
  const int n = index_count();
  const double sigma = params_.sigma();
  const double lip = std::max(gram_lmax_ / sigma, 1e-12);

  Vector alpha = Vector::Constant(n, 1.0 / n);
  Vector momentum = alpha;
  Vector grad(n), s(n), trial(n);
  double t = 1.0;
  SimplexQPResult out;

  // Tries exact stationarity solves on candidate supports. At the optimum
  // the active indices are a leading set of s = b - G alpha / sigma, so the
  // ranked sweep recovers badly scaled solutions that plain iteration
  // cannot reach; the mass thresholds cover ties the ranking misses.
  const auto polish = [&](const Vector& a) -> bool {
    s = b - (gram_ * a) / sigma;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return s[i] > s[j]; });
    std::vector<int> support;
    const int sweep = std::min(n, 40);
    for (int k = 0; k < sweep; ++k) {
      support.push_back(order[k]);
      solve_support(gram_, b, sigma, support, trial);
      if (kkt_candidate(b, trial, out)) return true;
    }
    for (double thr : {1e-8, 1e-10, 1e-12, -1.0}) {
      support.clear();
      for (Index i = 0; i < n; ++i) {
        if (a[i] > thr) support.push_back(static_cast<int>(i));
      }
      if (support.empty()) continue;
      solve_support(gram_, b, sigma, support, trial);
      if (kkt_candidate(b, trial, out)) return true;
    }
    return false;
  };

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    grad = (gram_ * momentum) / sigma - b;  // gradient of the negated objective
    Vector next = project_simplex(momentum - grad / lip);

    // Gradient-based adaptive restart.
    if ((momentum - next).dot(next - alpha) > 0.0) {
      t = 1.0;
      momentum = next;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      momentum = next + ((t - 1.0) / t_next) * (next - alpha);
      t = t_next;
    }
    alpha = next;

    if (iter % 25 == 0 || iter == kMaxIterations) {
      s = b - (gram_ * alpha) / sigma;
      const double gap = s.maxCoeff() - s.dot(alpha);
      const double scale = 1.0 + s.cwiseAbs().maxCoeff();
      if (gap <= kGapTol * scale) {
        if (polish(alpha)) return out;
        trial = alpha;
        if (kkt_candidate(b, trial, out)) return out;
      } else if (iter % 100 == 0 && polish(alpha)) {
        return out;
      }
    }
  }
  if (polish(alpha)) return out;
  trial = alpha;
  if (kkt_candidate(b, trial, out)) return out;
  throw std::runtime_error(
      "simplex maximization: projected gradient did not reach stationarity");
}

SimplexQPResult ExtensionOracle::maximize_simplex(const Vector& y) const {
  if (y.size() != dim()) {
    throw std::invalid_argument("query dimension mismatch");
  }
  const Vector b = W_.transpose() * y + c_;
  SimplexQPResult out;
  if (index_count() <= kEnumerationLimit) {
    // Tangent values recomputed from the raw data in long double; the
    // double-rounded entries of b are too coarse to order near-tied
    // vertices.
    const int n = index_count();
    const long double sig2 = 2.0L * static_cast<long double>(params_.sigma());
    std::vector<long double> vertex_values(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
      long double acc = static_cast<long double>(c_[j]);
      for (Index k = 0; k < y.size(); ++k) {
        acc += static_cast<long double>(W_(k, j)) *
               static_cast<long double>(y[k]);
      }
      acc -= static_cast<long double>(gram_(j, j)) / sig2;
      vertex_values[static_cast<size_t>(j)] = acc;
    }
    out = solve_enumeration(b, vertex_values);
  } else {
    out = solve_projected_gradient(b);
  }
  const double sigma = params_.sigma();
  out.value = 0.5 * params_.mu * y.squaredNorm() + b.dot(out.alpha) -
              out.alpha.dot(gram_ * out.alpha) / (2.0 * sigma);
  return out;
}

OracleResponse ExtensionOracle::eval(const Vector& y) const {
  SimplexQPResult qp = maximize_simplex(y);
  OracleResponse resp;
  resp.value = qp.value;
  resp.gradient = params_.mu * y + W_ * qp.alpha;
  return resp;
}

ValidationReport check_interpolation_conditions(const TripletSet& triplets,
                                                const ClassParams& params,
                                                double tol) {
  const int n = triplets.total();
  const double L = params.L;
  const double mu = params.mu;
  const double sigma = params.sigma();

  double worst = -std::numeric_limits<double>::infinity();
  std::string worst_pair = "none";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Triplet& ti = triplets.flat(i);
      const Triplet& tj = triplets.flat(j);
      const Vector dx = ti.x - tj.x;
      const Vector dg = ti.g - tj.g;
      const double lhs = ti.f - tj.f - tj.g.dot(dx);
      const double rhs = dg.squaredNorm() / (2.0 * L) +
                         mu * L / (2.0 * sigma) * (dx - dg / L).squaredNorm();
      const double viol = (rhs - lhs) / (1.0 + std::abs(lhs) + std::abs(rhs));
      if (viol > worst) {
        worst = viol;
        worst_pair = "(" + triplets.flat_label(i) + "," + triplets.flat_label(j) + ")";
      }
    }
  }
  ValidationReport report;
  if (n < 2) {
    report.add("pairwise_interpolation", true, 0.0, "fewer than two triplets");
  } else {
    report.add("pairwise_interpolation", worst <= tol, worst,
               "worst pair " + worst_pair);
  }
  return report;
}

ValidationReport check_lower_quadratic(const ExtensionOracle& oracle,
                                       const Vector& y) {
  const OracleResponse resp = oracle.eval(y);
  const double mu = oracle.params().mu;
  const int n = oracle.index_count();

  double worst = -std::numeric_limits<double>::infinity();
  std::string worst_label = "none";
  for (int i = 0; i < n; ++i) {
    const Triplet& t = oracle.triplets().flat(i);
    const Vector d = y - t.x;
    const double tangent = t.f + t.g.dot(d) + 0.5 * mu * d.squaredNorm();
    const double viol =
        (tangent - resp.value) / (1.0 + std::abs(tangent) + std::abs(resp.value));
    if (viol > worst) {
      worst = viol;
      worst_label = oracle.triplets().flat_label(i);
    }
  }
  ValidationReport report;
  report.add("tangent_domination", worst <= kEqAbs, worst,
             "worst member " + worst_label);
  return report;
}

double gradient_fd_error(const ExtensionOracle& oracle, const Vector& y) {
  const OracleResponse resp = oracle.eval(y);
  const double h =
      std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + y.norm());
  Vector fd(y.size());
  Vector probe = y;
  for (Index i = 0; i < y.size(); ++i) {
    probe[i] = y[i] + h;
    const double up = oracle.eval(probe).value;
    probe[i] = y[i] - h;
    const double down = oracle.eval(probe).value;
    probe[i] = y[i];
    fd[i] = (up - down) / (2.0 * h);
  }
  return (fd - resp.gradient).norm() / (1.0 + resp.gradient.norm());
}

}  // namespace oclb
