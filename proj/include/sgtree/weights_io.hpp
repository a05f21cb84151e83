#pragma once

// Weight-spec files:
//   {"family": "explicit", "weights": ["1", "0", "1"]}
//   {"family": "geometric", "params": {"p": "1/3"}}
//   {"family": "poisson", "params": {"lambda": "1"}}
//   {"family": "power", "params": {"beta": 3, "kmax": 20}}
// "kmax" is accepted by every parametric family and zeroes omega_k for k > kmax.

#include "sgtree/weights.hpp"

#include <string>
#include <string_view>

namespace sgt {

WeightSequence parse_weight_spec(std::string_view json_text);
WeightSequence load_weight_spec(const std::string& path);

std::string weight_spec_json(const WeightSequence& w);

}  // namespace sgt
