#include "oclb/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oclb {

namespace {

void require_horizon(int N) {
  if (N < 0) {
    throw std::invalid_argument("horizon must be nonnegative");
  }
}

void require_muzero(const ClassParams& p) {
  if (p.mu != 0.0) {
    throw std::invalid_argument("schedule requires mu == 0");
  }
}

void require_strongly_convex(const ClassParams& p) {
  if (p.mu <= 0.0) {
    throw std::invalid_argument("schedule requires mu > 0");
  }
}

// Square root with a small tolerance band for arguments that should be
// nonnegative but may round slightly below zero.
double safe_sqrt(double x, const char* what) {
  if (x < 0.0) {
    if (x < -1e-15) {
      std::ostringstream msg;
      msg << what << " is negative beyond tolerance: " << x;
      throw std::runtime_error(msg.str());
    }
    x = 0.0;
  }
  return std::sqrt(x);
}

}  // namespace

std::vector<double> theta_sequence(int N) {
  require_horizon(N);
  std::vector<double> theta(static_cast<size_t>(N) + 1);
  theta[0] = 1.0;
  for (int i = 1; i < N; ++i) {
    theta[i] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta[i - 1] * theta[i - 1]));
  }
  if (N >= 1) {
    theta[N] = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * theta[N - 1] * theta[N - 1]));
  }
  return theta;
}

std::vector<double> lambda_sequence(int N, double q) {
  require_horizon(N);
  if (!(q > 0.0) || !(q < 1.0)) {
    throw std::invalid_argument("lambda_sequence requires q in (0, 1)");
  }
  std::vector<double> lambda(static_cast<size_t>(N) + 1);
  lambda[0] = std::sqrt(q);
  for (int i = 0; i < N; ++i) {
    const double l2 = lambda[i] * lambda[i];
    const double root = safe_sqrt(q - (1.0 - q) * l2, "lambda radicand");
    lambda[i + 1] = lambda[i] * (1.0 - root) / (1.0 + l2);
  }
  return lambda;
}

Schedule schedule_simple_muzero(int N, const ClassParams& params) {
  require_horizon(N);
  require_muzero(params);
  Schedule s{Schedule::Kind::SimpleMuZero, params, {}, {}};
  s.gamma.resize(static_cast<size_t>(N) + 1);
  s.delta.resize(static_cast<size_t>(N) + 1);
  const double root = std::sqrt(static_cast<double>(N) + 1.0);
  for (int i = 0; i <= N; ++i) {
    s.delta[static_cast<size_t>(i)] = params.R_x / root;
    s.gamma[static_cast<size_t>(i)] = params.R_x / (2.0 * (i + 1.0) * root);
  }
  return s;
}

Schedule schedule_exact_muzero(int N, const ClassParams& params) {
  require_horizon(N);
  require_muzero(params);
  const std::vector<double> theta = theta_sequence(N);
  const double R2 = params.R_x * params.R_x;

  // Telescoping weights zeta_N..zeta_{N+1}; the last interior relation
  // zeta_N = theta_N / (theta_N - 1) * zeta_{N+1} is an indeterminate
  // 0/0 at N = 0, so the equivalent product form is used instead:
  // zeta_N = R^2 / (theta_N (2 theta_N - 1)).
  std::vector<double> zeta(static_cast<size_t>(N) + 2);
  const double thetaN = theta[static_cast<size_t>(N)];
  zeta[static_cast<size_t>(N) + 1] =
      (thetaN - 1.0) / (thetaN * thetaN * (2.0 * thetaN - 1.0)) * R2;
  zeta[static_cast<size_t>(N)] = R2 / (thetaN * (2.0 * thetaN - 1.0));
  for (int i = N - 1; i >= 0; --i) {
    const double th = theta[static_cast<size_t>(i)];
    zeta[static_cast<size_t>(i)] =
        2.0 * th / (2.0 * th - 1.0) * zeta[static_cast<size_t>(i) + 1];
  }

  Schedule s{Schedule::Kind::ExactMuZero, params, {}, {}};
  s.gamma.resize(static_cast<size_t>(N) + 1);
  s.delta.resize(static_cast<size_t>(N) + 1);
  for (int i = 0; i <= N; ++i) {
    const double gap = zeta[static_cast<size_t>(i)] - zeta[static_cast<size_t>(i) + 1];
    const double g = safe_sqrt(gap, "zeta gap");
    s.gamma[static_cast<size_t>(i)] = g;
    s.delta[static_cast<size_t>(i)] = zeta[static_cast<size_t>(i)] / g;
  }
  return s;
}

Schedule schedule_simple_sc(int N, const ClassParams& params) {
  require_horizon(N);
  require_strongly_convex(params);
  const double q = params.q();
  const double rq = std::sqrt(q);
  const double shrink = 1.0 - rq;
  const double c = std::sqrt(1.0 - shrink * shrink);

  Schedule s{Schedule::Kind::SimpleSC, params, {}, {}};
  s.gamma.resize(static_cast<size_t>(N) + 1);
  s.delta.resize(static_cast<size_t>(N) + 1);
  double factor = 1.0;
  for (int j = 0; j <= N; ++j) {
    const double d = c * factor * params.R_x;
    s.delta[static_cast<size_t>(j)] = d;
    s.gamma[static_cast<size_t>(j)] = rq * d;
    factor *= shrink;
  }
  return s;
}

Schedule schedule_exact_sc(int N, const ClassParams& params) {
  require_horizon(N);
  require_strongly_convex(params);
  const double q = params.q();
  const std::vector<double> lambda = lambda_sequence(N, q);
  const double rq = std::sqrt(q);

  // Grown inductively from the one-step schedule (gamma, delta) = (q, 1):
  // each extension rescales the strict past by sqrt(alpha), replaces the
  // current last pair with closed forms, and appends a fresh pair, so that
  // sum delta^2 = 1 and the final product gamma delta = lambda^2 hold
  // after every step.
  std::vector<double> gamma{q};
  std::vector<double> delta{1.0};
  for (int n = 0; n < N; ++n) {
    const double ln = lambda[static_cast<size_t>(n)];
    const double ln1 = lambda[static_cast<size_t>(n) + 1];
    const double root = safe_sqrt(q - (1.0 - q) * ln * ln, "extension radicand");
    const double alpha = safe_sqrt(q - ln1 * ln1, "extension numerator") / root;
    const double scale = std::sqrt(alpha);
    for (int t = 0; t < n; ++t) {
      gamma[static_cast<size_t>(t)] *= scale;
      delta[static_cast<size_t>(t)] *= scale;
    }
    gamma[static_cast<size_t>(n)] = safe_sqrt(q * ln * ln / root, "replaced gamma");
    delta[static_cast<size_t>(n)] =
        safe_sqrt(ln * ln * (q - ln1 * ln1) / (q * root), "replaced delta");
    gamma.push_back(rq * ln1);
    delta.push_back(ln1 / rq);
  }

  Schedule s{Schedule::Kind::ExactSC, params, std::move(gamma), std::move(delta)};
  for (auto& g : s.gamma) g *= params.R_x;
  for (auto& d : s.delta) d *= params.R_x;
  return s;
}

ValidationReport validate_schedule(const Schedule& schedule) {
  ValidationReport report;
  const auto& gamma = schedule.gamma;
  const auto& delta = schedule.delta;
  const double q = schedule.params.q();
  const double R2 = schedule.params.R_x * schedule.params.R_x;

  if (gamma.empty() || gamma.size() != delta.size()) {
    report.add("shape", false, 0.0, "gamma and delta must be nonempty and equal length");
    return report;
  }
  const int N = schedule.horizon();

  double worst_order = -std::numeric_limits<double>::infinity();
  int worst_order_idx = 0;
  for (int i = 0; i <= N; ++i) {
    const double g = gamma[static_cast<size_t>(i)];
    const double d = delta[static_cast<size_t>(i)];
    const double scale = 1.0 + std::abs(d);
    // Violation of the chain 0 <= q d <= g <= d, scaled per index.
    const double viol =
        std::max({-(q * d), q * d - g, g - d}) / scale;
    if (viol > worst_order) {
      worst_order = viol;
      worst_order_idx = i;
    }
  }
  report.add("ordering", worst_order <= kIneqSlack, worst_order,
             "worst index " + std::to_string(worst_order_idx));

  double worst_rec = -std::numeric_limits<double>::infinity();
  int worst_rec_idx = 0;
  for (int i = 0; i < N; ++i) {
    const double g = gamma[static_cast<size_t>(i)];
    const double d = delta[static_cast<size_t>(i)];
    const double lhs = gamma[static_cast<size_t>(i) + 1] * delta[static_cast<size_t>(i) + 1];
    const double rhs = -(g - d) * (g - q * d);
    const double viol = (lhs - rhs) / (1.0 + std::abs(rhs));
    if (viol > worst_rec) {
      worst_rec = viol;
      worst_rec_idx = i;
    }
  }
  if (N >= 1) {
    report.add("product_recursion", worst_rec <= kIneqSlack, worst_rec,
               "worst index " + std::to_string(worst_rec_idx));
  } else {
    report.add("product_recursion", true, 0.0, "no consecutive pairs");
  }

  double sum_sq = 0.0;
  for (double d : delta) sum_sq += d * d;
  const double radius_viol = (sum_sq - R2) / (1.0 + R2);
  report.add("radius", radius_viol <= kIneqSlack, radius_viol,
             "sum delta^2 = " + std::to_string(sum_sq));
  return report;
}

namespace {

void require_valid(const Schedule& schedule) {
  const ValidationReport report = validate_schedule(schedule);
  if (!report.all_passed()) {
    for (const auto& c : report.checks()) {
      if (!c.passed) {
        throw std::invalid_argument("invalid schedule: condition '" + c.name +
                                    "' fails with residual " +
                                    std::to_string(c.residual));
      }
    }
  }
}

}  // namespace

double risk_bound(const Schedule& schedule) {
  require_valid(schedule);
  const double L = schedule.params.L;
  const double q = schedule.params.q();
  const double gN = schedule.gamma.back();
  const double dN = schedule.delta.back();
  return L * L / (2.0 * schedule.params.sigma()) *
         (2.0 * gN * dN - gN * gN - q * dN * dN);
}

double xrisk_bound(const Schedule& schedule) {
  if (schedule.params.mu <= 0.0) {
    throw std::invalid_argument("distance bound requires mu > 0");
  }
  require_valid(schedule);
  return schedule.delta.back();
}

}  // namespace oclb
