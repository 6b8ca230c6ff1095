#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oclb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Tolerances shared by the validators. Equality checks accept
// |a - b| <= kEqAbs + kEqRel * max(|a|, |b|); inequality checks
// accept violations up to kIneqSlack * (1 + scale of the data).
inline constexpr double kEqAbs = 1e-10;
inline constexpr double kEqRel = 1e-10;
inline constexpr double kIneqSlack = 1e-9;

bool nearly_equal(double a, double b, double abs_tol = kEqAbs,
                  double rel_tol = kEqRel);

// Parameters of a smooth strongly convex function class: curvature
// bounds 0 <= mu < L and an initial-distance radius R_x > 0.
struct ClassParams {
  double mu = 0.0;
  double L = 1.0;
  double R_x = 1.0;

  double q() const { return mu / L; }     // inverse condition number
  double sigma() const { return L - mu; } // curvature gap
};

// Validates and returns the parameter pack. Throws std::invalid_argument
// when mu < 0, L <= mu, R_x <= 0, or any value is not finite.
ClassParams make_class(double mu, double L, double R_x);

// As make_class but permits negative mu (weakly convex classes). Used by
// the extension oracle, which stays well defined for any mu < L.
ClassParams make_class_relaxed(double mu, double L, double R_x);

// One first-order observation: a point, a gradient at it, and a value.
struct Triplet {
  Vector x;
  Vector g;
  double f = 0.0;
};

// An indexed family of triplets over a fixed ambient dimension:
// numbered entries 0..N plus an optional distinguished star entry.
// All vectors must share the ambient dimension; mutators enforce it.
class TripletSet {
 public:
  explicit TripletSet(Index dim);

  Index dim() const { return dim_; }

  // Appends an entry with the next free numeric label.
  void add(Triplet t);
  void set_star(Triplet t);

  // Replaces an existing entry (same dimension checks as add).
  void replace(int label, Triplet t);
  void replace_star(Triplet t);

  int size() const { return static_cast<int>(entries_.size()); }
  bool has_star() const { return star_.has_value(); }
  // Total number of triplets including the star entry if present.
  int total() const { return size() + (has_star() ? 1 : 0); }

  const Triplet& entry(int label) const;
  const Triplet& star() const;

  // Flat view: entries 0..size()-1 followed by the star entry (if any)
  // at flat index size(). Flat indices are what the oracle works with.
  const Triplet& flat(int idx) const;
  // Printable label for a flat index: "0", "1", ..., or "*".
  std::string flat_label(int idx) const;

 private:
  void check(const Triplet& t) const;

  Index dim_ = 0;
  std::vector<Triplet> entries_;
  std::optional<Triplet> star_;
};

// A stepsize schedule (gamma_i, delta_i), i = 0..N, tagged with the
// construction that produced it and the class it was built for.
struct Schedule {
  enum class Kind { SimpleMuZero, ExactMuZero, SimpleSC, ExactSC, Custom };

  Kind kind = Kind::Custom;
  ClassParams params;
  std::vector<double> gamma;
  std::vector<double> delta;

  int horizon() const { return static_cast<int>(gamma.size()) - 1; }
};

std::string_view to_string(Schedule::Kind kind);
Schedule::Kind schedule_kind_from_string(std::string_view name);

// First-order oracle output at a query point.
struct OracleResponse {
  double value = 0.0;
  Vector gradient;
};

// Outcome of one named condition check. For inequality conditions the
// residual is the signed violation (<= 0 means satisfied with margin);
// for equality conditions it is the absolute deviation.
struct ConditionCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

class ValidationReport {
 public:
  void add(std::string name, bool passed, double residual,
           std::string detail = {});
  void merge(const ValidationReport& other);

  bool all_passed() const;
  // Largest signed residual across checks (-inf for an empty report).
  double worst_residual() const;
  const std::vector<ConditionCheck>& checks() const { return checks_; }
  const ConditionCheck* find(std::string_view name) const;

  // One line per check: "[ok|FAIL] name residual=... detail".
  std::string to_string() const;

 private:
  std::vector<ConditionCheck> checks_;
};

}  // namespace oclb
