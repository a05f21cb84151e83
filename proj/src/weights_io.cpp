#include "sgtree/weights_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace sgt {

namespace {

using nlohmann::json;

Rational rational_field(const json& v, const char* name) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number_float()) {
    // shortest round-trip decimal, then exact
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return parse_rational(os.str());
  }
  throw InvariantError(std::string("parameter '") + name + "' must be a rational string or number");
}

std::optional<std::size_t> cutoff_field(const json& params) {
  if (!params.contains("kmax")) return std::nullopt;
  const json& v = params.at("kmax");
  if (!v.is_number_integer() || v.get<long long>() < 0) throw InvariantError("'kmax' must be a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

}  // namespace

WeightSequence parse_weight_spec(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvariantError(std::string("weight spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("family") || !doc.at("family").is_string()) {
    throw InvariantError("weight spec needs a string field 'family'");
  }
  const std::string family = doc.at("family").get<std::string>();
  const json params = doc.value("params", json::object());
  if (!params.is_object()) throw InvariantError("'params' must be an object");

  if (family == "explicit") {
    if (!doc.contains("weights") || !doc.at("weights").is_array()) {
      throw InvariantError("explicit family needs a 'weights' array");
    }
    std::vector<Rational> ws;
    for (const auto& v : doc.at("weights")) {
      try {
        ws.push_back(rational_field(v, "weights"));
      } catch (const std::invalid_argument& e) {
        throw InvariantError(e.what());
      }
    }
    return WeightSequence::explicit_list(std::move(ws));
  }
  auto require = [&](const char* name) -> const json& {
    if (!params.contains(name)) throw InvariantError(family + " family needs params." + name);
    return params.at(name);
  };
  if (family == "geometric") return WeightSequence::geometric(rational_field(require("p"), "p"), cutoff_field(params));
  if (family == "poisson") {
    return WeightSequence::poisson(rational_field(require("lambda"), "lambda"), cutoff_field(params));
  }
  if (family == "power") {
    const json& b = require("beta");
    double beta = b.is_string() ? to_long_double(parse_rational(b.get<std::string>()))
                                : (b.is_number() ? b.get<double>() : -1.0);
    return WeightSequence::power(beta, cutoff_field(params));
  }
  throw InvariantError("unknown weight family '" + family + "'");
}

WeightSequence load_weight_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight spec '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_weight_spec(ss.str());
}

std::string weight_spec_json(const WeightSequence& w) {
  json doc;
  doc["family"] = family_name(w.family());
  json params = json::object();
  switch (w.family()) {
    case Family::explicit_list: {
      json arr = json::array();
      for (std::size_t k = 0; k <= *w.max_index(); ++k) arr.push_back(to_fraction_string(w.kernel_exact(k)));
      doc["weights"] = arr;
      break;
    }
    case Family::geometric: params["p"] = to_fraction_string(w.parameter()); break;
    case Family::poisson: params["lambda"] = to_fraction_string(w.parameter()); break;
    case Family::power: params["beta"] = w.beta(); break;
  }
  if (w.cutoff()) params["kmax"] = *w.cutoff();
  if (!params.empty()) doc["params"] = params;
  return doc.dump();
}

}  // namespace sgt
