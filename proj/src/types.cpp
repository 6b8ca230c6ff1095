#include "oclb/types.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace oclb {

bool nearly_equal(double a, double b, double abs_tol, double rel_tol) {
  const double diff = std::abs(a - b);
  return diff <= abs_tol + rel_tol * std::max(std::abs(a), std::abs(b));
}

namespace {

ClassParams checked_params(double mu, double L, double R_x, bool allow_negative_mu) {
  if (!std::isfinite(mu) || !std::isfinite(L) || !std::isfinite(R_x)) {
    throw std::invalid_argument("class parameters must be finite");
  }
  if (!allow_negative_mu && mu < 0.0) {
    throw std::invalid_argument("mu must be nonnegative");
  }
  if (L <= mu) {
    throw std::invalid_argument("L must exceed mu");
  }
  if (R_x <= 0.0) {
    throw std::invalid_argument("R_x must be positive");
  }
  return ClassParams{mu, L, R_x};
}

}  // namespace

ClassParams make_class(double mu, double L, double R_x) {
  return checked_params(mu, L, R_x, /*allow_negative_mu=*/false);
}

ClassParams make_class_relaxed(double mu, double L, double R_x) {
  return checked_params(mu, L, R_x, /*allow_negative_mu=*/true);
}

TripletSet::TripletSet(Index dim) : dim_(dim) {
  if (dim <= 0) {
    throw std::invalid_argument("triplet set dimension must be positive");
  }
}

void TripletSet::check(const Triplet& t) const {
  if (t.x.size() != dim_ || t.g.size() != dim_) {
    throw std::invalid_argument("triplet dimension mismatch");
  }
  if (!t.x.allFinite() || !t.g.allFinite() || !std::isfinite(t.f)) {
    throw std::invalid_argument("triplet contains non-finite values");
  }
}

void TripletSet::add(Triplet t) {
  check(t);
  entries_.push_back(std::move(t));
}

void TripletSet::set_star(Triplet t) {
  check(t);
  star_ = std::move(t);
}

void TripletSet::replace(int label, Triplet t) {
  check(t);
  entries_.at(static_cast<size_t>(label)) = std::move(t);
}

void TripletSet::replace_star(Triplet t) {
  if (!star_) {
    throw std::invalid_argument("triplet set has no star entry");
  }
  check(t);
  star_ = std::move(t);
}

const Triplet& TripletSet::entry(int label) const {
  return entries_.at(static_cast<size_t>(label));
}

const Triplet& TripletSet::star() const {
  if (!star_) {
    throw std::invalid_argument("triplet set has no star entry");
  }
  return *star_;
}

const Triplet& TripletSet::flat(int idx) const {
  if (idx >= 0 && idx < size()) {
    return entries_[static_cast<size_t>(idx)];
  }
  if (idx == size() && star_) {
    return *star_;
  }
  throw std::out_of_range("flat triplet index out of range");
}

std::string TripletSet::flat_label(int idx) const {
  if (idx >= 0 && idx < size()) {
    return std::to_string(idx);
  }
  if (idx == size() && star_) {
    return "*";
  }
  throw std::out_of_range("flat triplet index out of range");
}

std::string_view to_string(Schedule::Kind kind) {
  switch (kind) {
    case Schedule::Kind::SimpleMuZero: return "simple_muzero";
    case Schedule::Kind::ExactMuZero: return "exact_muzero";
    case Schedule::Kind::SimpleSC: return "simple_sc";
    case Schedule::Kind::ExactSC: return "exact_sc";
    case Schedule::Kind::Custom: return "custom";
  }
  throw std::logic_error("unknown schedule kind");
}

Schedule::Kind schedule_kind_from_string(std::string_view name) {
  if (name == "simple_muzero") return Schedule::Kind::SimpleMuZero;
  if (name == "exact_muzero") return Schedule::Kind::ExactMuZero;
  if (name == "simple_sc") return Schedule::Kind::SimpleSC;
  if (name == "exact_sc") return Schedule::Kind::ExactSC;
  if (name == "custom") return Schedule::Kind::Custom;
  throw std::invalid_argument("unknown schedule kind: " + std::string(name));
}

void ValidationReport::add(std::string name, bool passed, double residual,
                           std::string detail) {
  checks_.push_back({std::move(name), passed, residual, std::move(detail)});
}

void ValidationReport::merge(const ValidationReport& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks_) {
    if (!c.passed) return false;
  }
  return true;
}

double ValidationReport::worst_residual() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : checks_) {
    worst = std::max(worst, c.residual);
  }
  return worst;
}

const ConditionCheck* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& c : checks_) {
    out << (c.passed ? "[ok]   " : "[FAIL] ") << c.name
        << "  residual=" << c.residual;
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << '\n';
  }
  return out.str();
}

}  // namespace oclb
