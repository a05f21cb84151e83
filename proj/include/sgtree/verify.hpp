#pragma once

// Exact self-checks shared by the CLI `verify` command and the acceptance
// suite. Reports carry exact rationals as "p/q" strings.

#include "sgtree/weights.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace sgt {

struct CheckResult {
  std::string name;
  bool passed = false;
  nlohmann::json report;
};

/// [x^n] T equals the exhaustive planted weight sum, 1 <= n <= n_max (<= 14).
CheckResult verify_series_oracle(const WeightSequence& w, std::size_t n_max);
/// [x^n] Z_U equals the exhaustive unrooted weight sum, 2 <= n <= n_max (<= 10).
CheckResult verify_unrooted_oracle(const WeightSequence& w, std::size_t n_max);
/// Split conditional independence, 2 <= n <= n_max (<= 10).
CheckResult verify_split_independence(const WeightSequence& w, std::size_t n_max);
/// Exact TV(U_n, S_n) for admissible n <= n_max and P(sigma_n != id) up to
/// sym_max, each with the decay envelope test.
CheckResult verify_tv_decay(const WeightSequence& w, std::size_t n_max, std::size_t sym_max = 200);

/// Ratio estimate of the radius of T/x at `order` against tau / Phi(tau)
/// (absolute error), and [x^n] g^2 / [x^n] g against 2 g(rho) (relative).
CheckResult verify_subexp(const WeightSequence& w, std::size_t order, double rho_tol = 1e-6, double comp_tol = 0.01);
/// Dispatch by name: series-oracle, unrooted-oracle, split-independence, tv-decay, subexp
/// (n_max is the series order for subexp).
CheckResult run_check(const std::string& name, const WeightSequence& w, std::size_t n_max);
const std::vector<std::string>& check_names();

/// Decay envelope of positive values v_i at sizes n_i: least squares of log v
/// on n over `points`, shifted up to bound every point. Passes when the
/// fitted slope is negative; monotonicity of the last three values is
/// reported alongside.
struct EnvelopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double upper_intercept = 0.0;
  double rate = 0.0;  // c = -slope
  std::size_t points = 0;
  bool tail_decreasing = false;
  bool ok() const { return points >= 2 && slope < 0.0; }
};
EnvelopeFit envelope_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace sgt
