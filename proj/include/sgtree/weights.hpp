#pragma once

// Weight sequences w = (omega_k), their generating function Phi, span,
// exponential tilting and the canonical offspring distribution xi.

#include "sgtree/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sgt {

enum class Family { explicit_list, geometric, poisson, power };

std::string family_name(Family f);

/// A weight sequence of the form
///
///     omega_k = (scale * base^k * f(k))^exponent,   k = 0, 1, 2, ...
///
/// where f is the family kernel: an explicit list, p^k (geometric),
/// lambda^k / k! (poisson) or (k+1)^-beta (power). The optional cutoff
/// zeroes every weight with k > cutoff. The (scale, base) pair carries
/// exponential tilting and the exponent carries the omega^d sequences used
/// by the symmetry series. Values are immutable after construction.
class WeightSequence {
 public:
  static WeightSequence explicit_list(std::vector<Rational> weights);
  static WeightSequence geometric(Rational p, std::optional<std::size_t> cutoff = {});
  static WeightSequence poisson(Rational lambda, std::optional<std::size_t> cutoff = {});
  /// beta need not be an integer; only integer beta yields exact weights.
  static WeightSequence power(double beta, std::optional<std::size_t> cutoff = {});

  Family family() const { return family_; }
  const Rational& parameter() const { return param_; }
  double beta() const { return beta_; }
  std::optional<std::size_t> cutoff() const { return cutoff_; }
  const Rational& scale() const { return scale_; }
  const Rational& base() const { return base_; }
  unsigned exponent() const { return exponent_; }

  /// Largest index with a possibly non-zero weight; empty for infinite support.
  std::optional<std::size_t> max_index() const;
  bool finite_support() const { return max_index().has_value(); }

  /// True when every weight is an exact rational.
  bool exact() const;

  bool positive(std::size_t k) const;
  Rational weight_exact(std::size_t k) const;
  long double weight(std::size_t k) const;
  long double log_weight(std::size_t k) const;

  /// gcd of {k : omega_k > 0}; gcd(0, m) = m so omega_0 does not constrain it.
  /// Only indices below `horizon` are inspected for infinite support.
  std::size_t support_gcd(std::size_t horizon = 64) const;

  /// omega_0 > 0 and omega_k > 0 for some k >= 2.
  bool has_branching() const;

  /// Radius of convergence of Phi; +infinity when Phi is entire.
  long double radius() const;
  std::optional<Rational> radius_exact() const;

  /// omega_k * a * b^k.
  WeightSequence tilted(const Rational& a, const Rational& b) const;
  /// omega_k^d.
  WeightSequence powered(unsigned d) const;

  std::string describe() const;

  /// Exact kernel value before scale, base and exponent are applied.
  Rational kernel_exact(std::size_t k) const;

  /// The single-vertex sequence omega = (1); placeholder for aggregates.
  WeightSequence() = default;

 private:
  void validate() const;
  long double kernel_log(std::size_t k) const;

  Family family_ = Family::explicit_list;
  std::vector<Rational> list_{Rational(1)};
  Rational param_ = 0;
  double beta_ = 0.0;
  std::optional<std::size_t> cutoff_;
  Rational scale_ = 1;
  Rational base_ = 1;
  unsigned exponent_ = 1;
};

/// Strict span: rejects omega_0 = 0 and sequences without any omega_k > 0, k >= 2.
std::size_t compute_span(const WeightSequence& w);

/// Interval-valued tau together with a working double.
struct TauBracket {
  long double value = 0.0L;
  long double lower = 0.0L;
  long double upper = 0.0L;
  std::optional<Rational> exact;
};

enum class Criticality { critical, subcritical };

struct OffspringDistribution {
  TauBracket tau;
  long double phi_tau = 0.0L;
  long double mu = 0.0L;
  long double nu = 0.0L;  // may be +infinity
  long double sigma2 = 0.0L;  // may be +infinity
  long double sigma2_finite_difference = std::numeric_limits<long double>::quiet_NaN();
  Criticality criticality = Criticality::critical;
  bool tau_at_radius = false;

  /// pi_k = omega_k tau^k / Phi(tau) for k < pi.size(); the remaining mass
  /// is reported by tail().
  std::vector<long double> pi;
  /// Exact pi_k when tau and all weights are rational.
  std::vector<Rational> pi_exact;

  long double pmf(std::size_t k) const;
  /// P(xi >= k), computed from the family's closed-form or bounded tail.
  long double tail(std::size_t k) const;

  WeightSequence source;
  std::size_t tabulated = 0;
};

/// Builds xi for a sequence satisfying the standing assumptions.
/// `table_size` controls how many pi_k are tabulated (at least the support
/// that matters for the caller, e.g. the tree size).
OffspringDistribution offspring_distribution(const WeightSequence& w,
                                             std::size_t table_size = 256);

/// Probability law used to drive conditioned Galton-Watson sampling. This is
/// the offspring distribution when it exists and otherwise (sequences
/// without branching, such as (1,1)) the finite-support law pi_k ~ omega_k,
/// which induces the same size-conditioned tree laws.
OffspringDistribution proposal_law(const WeightSequence& w, std::size_t table_size);

/// Phi, Phi' and Psi at t in double precision (t below the radius).
long double phi_value(const WeightSequence& w, long double t);
long double phi_derivative(const WeightSequence& w, long double t);
long double psi_value(const WeightSequence& w, long double t);

/// Exact Phi(t) for finite-support rational sequences.
Rational phi_exact(const WeightSequence& w, const Rational& t);

/// tilt(w, a, b): omega_k -> a b^k omega_k.
WeightSequence tilt(const WeightSequence& w, const Rational& a, const Rational& b);

}  // namespace sgt
