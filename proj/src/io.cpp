#include "oclb/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <vector>

namespace oclb {

using nlohmann::json;

namespace {

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr, Index dim, const std::string& what) {
  if (!arr.is_array() || static_cast<Index>(arr.size()) != dim) {
    throw ValidationError(what + " must be an array of length " +
                          std::to_string(dim));
  }
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) {
    const auto& e = arr[static_cast<size_t>(i)];
    if (!e.is_number()) {
      throw ValidationError(what + " contains a non-numeric entry");
    }
    v[i] = e.get<double>();
  }
  return v;
}

double number_field(const json& obj, const char* key) {
  if (!obj.contains(key) || !obj[key].is_number()) {
    throw ValidationError(std::string("missing or non-numeric field '") +
                          key + "'");
  }
  return obj[key].get<double>();
}

}  // namespace

void save_instance(const std::string& path, const HardInstance& instance) {
  json doc;
  doc["params"] = {{"mu", instance.params.mu},
                   {"L", instance.params.L},
                   {"R_x", instance.params.R_x}};
  doc["schedule"] = {{"kind", std::string(to_string(instance.schedule.kind))},
                     {"gamma", instance.schedule.gamma},
                     {"delta", instance.schedule.delta}};
  doc["dim"] = instance.dim();

  json triplets = json::array();
  const TripletSet& ts = instance.triplets;
  for (int i = 0; i < ts.size(); ++i) {
    const Triplet& t = ts.entry(i);
    triplets.push_back({{"label", i},
                        {"x", vector_to_json(t.x)},
                        {"g", vector_to_json(t.g)},
                        {"f", t.f}});
  }
  const Triplet& star = ts.star();
  triplets.push_back({{"label", "*"},
                      {"x", vector_to_json(star.x)},
                      {"g", vector_to_json(star.g)},
                      {"f", star.f}});
  doc["triplets"] = std::move(triplets);

  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open '" + path + "' for writing");
  }
  out << doc.dump(2) << '\n';
  if (!out) {
    throw ValidationError("failed writing '" + path + "'");
  }
}

HardInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }

  if (!doc.contains("params") || !doc.contains("schedule") ||
      !doc.contains("dim") || !doc.contains("triplets")) {
    throw ValidationError(
        "instance file needs 'params', 'schedule', 'dim' and 'triplets'");
  }

  ClassParams params;
  try {
    params = make_class(number_field(doc["params"], "mu"),
                        number_field(doc["params"], "L"),
                        number_field(doc["params"], "R_x"));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("bad class parameters: ") + e.what());
  }

  const json& sj = doc["schedule"];
  if (!sj.contains("kind") || !sj["kind"].is_string() ||
      !sj.contains("gamma") || !sj.contains("delta")) {
    throw ValidationError("schedule needs 'kind', 'gamma' and 'delta'");
  }
  Schedule schedule;
  try {
    schedule.kind = schedule_kind_from_string(sj["kind"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  schedule.params = params;
  schedule.gamma = sj["gamma"].get<std::vector<double>>();
  schedule.delta = sj["delta"].get<std::vector<double>>();
  if (schedule.gamma.empty() || schedule.gamma.size() != schedule.delta.size()) {
    throw ValidationError("gamma and delta must be nonempty, equal-length arrays");
  }

  if (!doc["dim"].is_number_integer() || doc["dim"].get<Index>() <= 0) {
    throw ValidationError("'dim' must be a positive integer");
  }
  const Index dim = doc["dim"].get<Index>();

  const json& tj = doc["triplets"];
  if (!tj.is_array() || tj.size() < 2) {
    throw ValidationError("'triplets' must list the numbered entries and '*'");
  }
  const int N = static_cast<int>(tj.size()) - 2;
  std::vector<Triplet> numbered(static_cast<size_t>(N) + 1);
  std::set<int> seen;
  Triplet star;
  bool saw_star = false;
  for (const auto& item : tj) {
    if (!item.contains("label")) {
      throw ValidationError("triplet without a label");
    }
    Triplet t;
    t.x = vector_from_json(item.value("x", json::array()), dim, "triplet x");
    t.g = vector_from_json(item.value("g", json::array()), dim, "triplet g");
    t.f = number_field(item, "f");
    const json& label = item["label"];
    if (label.is_string() && label.get<std::string>() == "*") {
      if (saw_star) throw ValidationError("duplicate '*' label");
      saw_star = true;
      star = std::move(t);
    } else if (label.is_number_integer()) {
      const int idx = label.get<int>();
      if (idx < 0 || idx > N) {
        throw ValidationError("label " + std::to_string(idx) +
                              " outside 0.." + std::to_string(N));
      }
      if (!seen.insert(idx).second) {
        throw ValidationError("duplicate label " + std::to_string(idx));
      }
      numbered[static_cast<size_t>(idx)] = std::move(t);
    } else {
      throw ValidationError("labels must be integers or '*'");
    }
  }
  if (!saw_star) {
    throw ValidationError("missing '*' triplet");
  }
  if (static_cast<int>(seen.size()) != N + 1) {
    throw ValidationError("numbered labels must cover 0.." + std::to_string(N));
  }
  if (schedule.horizon() != N) {
    throw ValidationError("schedule length " +
                          std::to_string(schedule.horizon() + 1) +
                          " does not match triplet count " +
                          std::to_string(N + 1));
  }

  TripletSet ts(dim);
  try {
    for (auto& t : numbered) ts.add(std::move(t));
    ts.set_star(std::move(star));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return HardInstance{params, std::move(schedule), std::move(ts), N};
}

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace oclb
