#pragma once

#include "oclb/instance.hpp"
#include "oclb/types.hpp"

#include <stdexcept>
#include <string>

namespace oclb {

// Raised for malformed or inconsistent input files and user-supplied
// data; distinct from internal solver failures.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// JSON layout:
// {
//   "params":   {"mu": .., "L": .., "R_x": ..},
//   "schedule": {"kind": "exact_sc", "gamma": [..], "delta": [..]},
//   "dim":      3,
//   "triplets": [{"label": 0, "x": [..], "g": [..], "f": ..}, ...,
//                {"label": "*", ...}]
// }
// Numbered labels must be 0..N each exactly once, the star label exactly
// once, and all vectors must match "dim". Doubles round-trip bit-exactly.
void save_instance(const std::string& path, const HardInstance& instance);
HardInstance load_instance(const std::string& path);

// Shortest-width decimal with 17 significant digits, always '.' as the
// decimal separator. Round-trips any finite double.
std::string format_sig(double v);

}  // namespace oclb
