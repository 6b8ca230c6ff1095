#include "oclb/cli.hpp"

#include "oclb/extension.hpp"
#include "oclb/instance.hpp"
#include "oclb/io.hpp"
#include "oclb/methods.hpp"
#include "oclb/sequences.hpp"
#include "oclb/types.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace oclb {

namespace {

// Writes to a file when a path is given, otherwise to stdout.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) {
        throw ValidationError("cannot open '" + path + "' for writing");
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

Schedule make_schedule(const ClassParams& params, int N, const std::string& variant) {
  if (variant != "simple" && variant != "exact") {
    throw ValidationError("variant must be 'simple' or 'exact'");
  }
  if (params.mu == 0.0) {
    return variant == "simple" ? schedule_simple_muzero(N, params)
                               : schedule_exact_muzero(N, params);
  }
  return variant == "simple" ? schedule_simple_sc(N, params)
                             : schedule_exact_sc(N, params);
}

struct MaxFormBounds {
  double risk = 0.0;
  double xrisk = 0.0;           // 0 when mu == 0
  const char* dominant = "";    // which branch attains the max
};

// Closed-form floor on the final accuracy of any information-respecting
// method after N steps: the larger of the geometric strongly convex
// branch and the momentum-sequence branch.
MaxFormBounds max_form_bounds(const ClassParams& params, int N) {
  MaxFormBounds out;
  const double L = params.L;
  const double R2 = params.R_x * params.R_x;
  const double thetaN = theta_sequence(N).back();
  const double branch_theta = L * R2 / (2.0 * thetaN * thetaN);

  double branch_sc = 0.0;
  if (params.mu > 0.0) {
    const double q = params.q();
    const double rq = std::sqrt(q);
    branch_sc = 2.0 * q * (2.0 - rq) / (1.0 + rq) *
                std::pow(1.0 - rq, 2.0 * N) * (L * R2 / 2.0);
    out.xrisk = lambda_sequence(N, q).back() / rq * params.R_x;
  }
  out.risk = std::max(branch_sc, branch_theta);
  out.dominant = branch_sc >= branch_theta ? "sc" : "muzero";
  return out;
}

int cmd_bound(double mu, double L, double R_x, int N, const std::string& variant,
              const std::string& out_path) {
  if (variant != "simple" && variant != "exact" && variant != "all") {
    throw ValidationError("variant must be 'simple', 'exact' or 'all'");
  }
  const ClassParams params = make_class(mu, L, R_x);
  OutputTarget out(out_path);
  std::ostream& os = out.stream();
  os << "N,variant,risk_bound,xrisk_bound\n";

  const bool sc = params.mu > 0.0;
  const auto row = [&](const std::string& name, const Schedule& s) {
    os << N << ',' << name << ',' << format_sig(risk_bound(s)) << ','
       << (sc ? format_sig(xrisk_bound(s)) : std::string()) << '\n';
  };
  if (variant == "simple" || variant == "all") {
    row("simple", make_schedule(params, N, "simple"));
  }
  if (variant == "exact" || variant == "all") {
    row("exact", make_schedule(params, N, "exact"));
  }
  if (variant == "all") {
    const MaxFormBounds mf = max_form_bounds(params, N);
    os << N << ",max_form," << format_sig(mf.risk) << ','
       << (sc ? format_sig(mf.xrisk) : std::string()) << '\n';
  }
  return 0;
}

int cmd_forge(double mu, double L, double R_x, int N, const std::string& variant,
              const std::string& out_path, Index pad_dim) {
  const ClassParams params = make_class(mu, L, R_x);
  const Schedule schedule = make_schedule(params, N, variant);
  const HardInstance instance = build_hard_instance(schedule, pad_dim);

  const ValidationReport report = validate_corollary1(instance);
  if (!report.all_passed()) {
    std::cerr << "instance failed validation:\n" << report.to_string();
    return 1;
  }
  save_instance(out_path, instance);
  std::cout << "wrote " << out_path << ": horizon " << N << ", dim "
            << instance.dim() << ", value floor "
            << format_sig(risk_bound(schedule));
  if (params.mu > 0.0) {
    std::cout << ", distance floor " << format_sig(xrisk_bound(schedule));
  }
  std::cout << '\n';
  return 0;
}

int cmd_verify(const std::string& in_path, int trials, std::uint64_t seed) {
  const HardInstance instance = load_instance(in_path);
  const ExtensionOracle oracle = make_oracle(instance);
  bool ok = true;

  const auto section = [&](const char* name, const ValidationReport& report) {
    std::cout << "== " << name << " ==\n" << report.to_string();
    ok = ok && report.all_passed();
  };

  section("schedule", validate_schedule(instance.schedule));
  section("interpolation",
          check_interpolation_conditions(instance.triplets, instance.params));
  section("worst_case_conditions", validate_corollary1(instance));

  {
    ValidationReport report;
    double worst_value = 0.0;
    double worst_grad = 0.0;
    for (int i = 0; i < instance.triplets.total(); ++i) {
      const Triplet& t = instance.triplets.flat(i);
      const OracleResponse resp = oracle.eval(t.x);
      worst_value = std::max(worst_value, std::abs(resp.value - t.f));
      worst_grad = std::max(worst_grad, (resp.gradient - t.g).norm());
    }
    report.add("label_values", worst_value <= 1e-9, worst_value);
    report.add("label_gradients", worst_grad <= 1e-8, worst_grad);
    section("oracle_exactness", report);
  }

  {
    ValidationReport report;
    try {
      const double dist = span_distance_certificate(instance);
      report.add("span_distance", true, 0.0,
                 "distance " + format_sig(dist));
    } catch (const std::runtime_error& e) {
      report.add("span_distance", false, 0.0, e.what());
    }
    span_value_certificate(instance, oracle, 2 * trials, seed, &report);
    section("span_certificates", report);
  }

  section("chain", verify_zero_chain(instance, oracle, trials, seed));

  if (trials > 0) {
    ValidationReport report;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-instance.params.R_x,
                                               instance.params.R_x);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      Vector y(instance.dim());
      for (Index i = 0; i < y.size(); ++i) y[i] = box(rng);
      worst = std::max(worst, gradient_fd_error(oracle, y));
    }
    report.add("gradient_fd", worst <= 1e-5, worst,
               std::to_string(trials) + " points");
    section("gradient_audit", report);
  }

  std::cout << (ok ? "VERIFY PASS" : "VERIFY FAIL") << '\n';
  return ok ? 0 : 1;
}

int cmd_run(const std::string& in_path, const std::string& method, int steps,
            double step_size, const std::string& out_path) {
  const HardInstance instance = load_instance(in_path);
  const ExtensionOracle oracle = make_oracle(instance);
  if (method != "gd") {
    throw ValidationError("unknown method '" + method + "' (available: gd)");
  }
  const int K = steps >= 0 ? steps : instance.horizon;
  const Trajectory traj = run_gradient_descent(oracle, K, step_size);
  const BoundComparison cmp = score_against_bounds(traj, instance);
  const ValidationReport audit = audit_zero_respecting(traj, instance.params);

  OutputTarget out(out_path);
  std::ostream& os = out.stream();
  const Triplet& star = instance.triplets.star();
  os << "k,distance,value_gap\n";
  for (size_t k = 0; k < traj.points.size(); ++k) {
    os << k << ',' << format_sig((traj.points[k] - star.x).norm()) << ','
       << format_sig(traj.responses[k].value - star.f) << '\n';
  }
  os << "# method=" << traj.method << '\n';
  os << "# final_distance=" << format_sig(cmp.final_distance) << '\n';
  os << "# final_value_gap=" << format_sig(cmp.final_value_gap) << '\n';
  os << "# value_floor=" << format_sig(cmp.value_floor) << '\n';
  os << "# value_ratio=" << format_sig(cmp.value_ratio) << '\n';
  if (instance.params.mu > 0.0) {
    os << "# distance_floor=" << format_sig(cmp.distance_floor) << '\n';
    os << "# distance_ratio=" << format_sig(cmp.distance_ratio) << '\n';
  }
  os << "# zero_respecting=" << (audit.all_passed() ? "pass" : "fail") << '\n';
  return 0;
}

int cmd_table(const std::string& q_list, int N_max, double L, double R_x,
              const std::string& out_path) {
  std::vector<double> qs;
  std::stringstream ss(q_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      const double q = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      qs.push_back(q);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse q value '" + item + "'");
    }
  }
  if (qs.empty()) {
    throw ValidationError("q list is empty");
  }
  if (N_max < 0) {
    throw ValidationError("N-max must be nonnegative");
  }
  for (const double q : qs) {
    if (q < 0.0 || q >= 1.0) {
      throw ValidationError("q values must lie in [0, 1)");
    }
  }

  OutputTarget out(out_path);
  std::ostream& os = out.stream();
  os << "q,N,risk_simple,risk_exact,xrisk_simple,xrisk_exact,risk_max,"
        "dominant\n";
  for (const double q : qs) {
    const ClassParams params = make_class(q * L, L, R_x);
    for (int N = 0; N <= N_max; ++N) {
      const Schedule simple = make_schedule(params, N, "simple");
      const Schedule exact = make_schedule(params, N, "exact");
      const MaxFormBounds mf = max_form_bounds(params, N);
      os << format_sig(q) << ',' << N << ',' << format_sig(risk_bound(simple))
         << ',' << format_sig(risk_bound(exact)) << ',';
      if (params.mu > 0.0) {
        os << format_sig(xrisk_bound(simple)) << ','
           << format_sig(xrisk_bound(exact));
      } else {
        os << ',';
      }
      os << ',' << format_sig(mf.risk) << ',' << mf.dominant << '\n';
    }
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"builds, certifies and exercises worst-case instances for "
               "smooth (strongly) convex first-order minimization"};
  app.require_subcommand(1);
  int rc = 0;

  double mu = 0.0, L = 1.0, R_x = 1.0;
  int N = 1;
  std::string variant = "all";
  std::string out_path;

  CLI::App* bound = app.add_subcommand(
      "bound", "print guaranteed accuracy floors for a class and horizon");
  bound->add_option("--mu", mu, "strong convexity modulus")->required();
  bound->add_option("--L", L, "smoothness constant")->capture_default_str();
  bound->add_option("--Rx", R_x, "initial distance radius")->capture_default_str();
  bound->add_option("--N", N, "number of oracle calls")->required();
  bound->add_option("--variant", variant, "simple, exact or all")->capture_default_str();
  bound->add_option("--out", out_path, "write CSV here instead of stdout");
  bound->callback([&] { rc = cmd_bound(mu, L, R_x, N, variant, out_path); });

  double f_mu = 0.0, f_L = 1.0, f_Rx = 1.0;
  int f_N = 1;
  std::string f_variant = "exact";
  std::string f_out;
  Index f_pad = 0;

  CLI::App* forge = app.add_subcommand(
      "forge", "build a worst-case instance file from a stepsize schedule");
  forge->add_option("--mu", f_mu, "strong convexity modulus")->required();
  forge->add_option("--L", f_L, "smoothness constant")->capture_default_str();
  forge->add_option("--Rx", f_Rx, "initial distance radius")->capture_default_str();
  forge->add_option("--N", f_N, "number of oracle calls")->required();
  forge->add_option("--variant", f_variant, "simple or exact")->capture_default_str();
  forge->add_option("--out", f_out, "output instance file")->required();
  forge->add_option("--pad-dim", f_pad,
                    "embed in this many dimensions (zero padded)")->capture_default_str();
  forge->callback(
      [&] { rc = cmd_forge(f_mu, f_L, f_Rx, f_N, f_variant, f_out, f_pad); });

  std::string v_in;
  int v_trials = 100;
  std::uint64_t v_seed = 0;

  CLI::App* verify = app.add_subcommand(
      "verify", "re-certify every condition of an instance file");
  verify->add_option("--in", v_in, "instance file")->required();
  verify->add_option("--trials", v_trials,
                     "samples per randomized check (0 = exact checks only)")->capture_default_str();
  verify->add_option("--seed", v_seed, "sampling seed")->capture_default_str();
  verify->callback([&] { rc = cmd_verify(v_in, v_trials, v_seed); });

  std::string r_in, r_method = "gd", r_out;
  int r_steps = -1;
  double r_step_size = 0.0;

  CLI::App* run = app.add_subcommand(
      "run", "run a first-order method against an instance");
  run->add_option("--in", r_in, "instance file")->required();
  run->add_option("--method", r_method, "iteration rule (gd)")->capture_default_str();
  run->add_option("--steps", r_steps,
                  "oracle calls past the first (default: the horizon)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--step-size", r_step_size,
                  "gd stepsize (default 2 / (L + mu))");
  run->add_option("--out", r_out, "write CSV here instead of stdout");
  run->callback(
      [&] { rc = cmd_run(r_in, r_method, r_steps, r_step_size, r_out); });

  std::string t_qs = "0,0.01,0.1,0.25";
  int t_Nmax = 10;
  double t_L = 1.0, t_Rx = 1.0;
  std::string t_out;

  CLI::App* table = app.add_subcommand(
      "table", "tabulate accuracy floors over a grid of classes");
  table->add_option("--q-list", t_qs, "comma separated mu/L ratios")->capture_default_str();
  table->add_option("--N-max", t_Nmax, "largest horizon")->capture_default_str();
  table->add_option("--L", t_L, "smoothness constant")->capture_default_str();
  table->add_option("--Rx", t_Rx, "initial distance radius")->capture_default_str();
  table->add_option("--out", t_out, "write CSV here instead of stdout");
  table->callback([&] { rc = cmd_table(t_qs, t_Nmax, t_L, t_Rx, t_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return rc;
}

}  // namespace oclb
