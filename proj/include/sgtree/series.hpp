#pragma once

// Truncated exact power series: the planted-tree fixed point T = x Phi(T),
// its omega^d variants, the symmetry series R_v and R_e, and the unrooted
// series Z_U = L + R_v + R_e.

#include "sgtree/weights.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sgt {

struct SeriesTable {
  std::string label;
  std::size_t truncation = 0;
  std::vector<Rational> coeffs;  // index = power of x, size truncation + 1

  const Rational& operator[](std::size_t n) const { return coeffs.at(n); }
};

/// Integer form of the planted series. With omega_k = c_k / (D V^k) the
/// coefficients satisfy [x^n]T = t_n / (D^n V^(n-1)) for integers t_n, so the
/// fixed point runs without rational normalisation.
class PlantedSeries {
 public:
  PlantedSeries(const WeightSequence& w, std::size_t order);

  std::size_t order() const { return t_.size() - 1; }
  const std::vector<Integer>& numerators() const { return t_; }
  const Integer& D() const { return D_; }
  const Integer& V() const { return V_; }

  Rational coeff(std::size_t n) const;
  long double log_coeff(std::size_t n) const;  // -inf when zero

  /// [x^m] T^j as an exact rational (m <= order()).
  Rational power_coeff(std::size_t j, std::size_t m) const;
  /// Integer numerators of T^j: [x^m] T^j = P_j[m] / (D^m V^(m-j)).
  const std::vector<Integer>& power_numerators(std::size_t j) const;

 private:
  void ensure_powers(std::size_t j) const;

  Integer D_, V_;
  std::vector<Integer> t_;
  mutable std::vector<std::vector<Integer>> powers_;  // powers_[j] = t^j
};

SeriesTable planted_series(const WeightSequence& w, unsigned d, std::size_t order);
SeriesTable symmetry_series_vertex(const WeightSequence& w, std::size_t order);
SeriesTable symmetry_series_edge(const WeightSequence& w, std::size_t order);
/// Labelled part L_n = [x^n] T^2 / (2(n-1)), n >= 2.
SeriesTable labelled_series(const WeightSequence& w, std::size_t order);
/// Z_U; the n = 0, 1 coefficients are left at zero (single vertices are excluded).
SeriesTable unrooted_series(const WeightSequence& w, std::size_t order);

struct UnrootedDecomposition {
  SeriesTable labelled, vertex, edge, total;
};
UnrootedDecomposition unrooted_decomposition(const WeightSequence& w, std::size_t order);

/// One summand of [x^n] R_v: phi(d)/d * omega_{jd-1}/j * [x^m] (T^{omega^d})^j with m = (n-1)/d.
struct VertexTerm {
  unsigned d = 0;
  std::size_t j = 0;
  Rational weight;
};
std::vector<VertexTerm> vertex_terms(const WeightSequence& w, std::size_t n);

/// P(sigma_n != id) = (R_v + R_e) / Z_U at n; empty when [x^n] Z_U = 0.
std::optional<Rational> symmetry_probability(const WeightSequence& w, std::size_t n);
std::vector<std::optional<Rational>> symmetry_probabilities(const WeightSequence& w, std::size_t order);

/// All 2 <= n <= n_max with a positive-weight unrooted tree of size n.
std::vector<std::size_t> admissible_sizes(const WeightSequence& w, std::size_t n_max);

// ---------------------------------------------------------------------------
// Subexponentiality diagnostics.

struct SubexpDiagnostics {
  std::size_t span = 1;
  std::vector<std::size_t> lattice;        // k with g_k > 0 and g_{k+d} > 0
  std::vector<long double> ratio_sequence;  // g_k / g_{k+d}
  std::vector<long double> convolution_ratio;  // (g*g)_k / g_k on the lattice
  long double last_ratio = 0.0L;            // (g_k / g_{k+d})^(1/d) at the largest k
  long double estimated_rho = 0.0L;         // Richardson-extrapolated
};

/// Throws std::invalid_argument when fewer than 3 lattice coefficients are non-zero.
SubexpDiagnostics subexp_diagnostics(const SeriesTable& g, std::size_t span);

/// f given as a non-constant polynomial with rational coefficients.
struct PolynomialFunction {
  std::vector<Rational> coeffs;  // f(z) = sum coeffs[i] z^i
  long double value(long double z) const;
  long double derivative(long double z) const;
};

struct CompositionReport {
  long double g_at_rho = 0.0L;
  long double target = 0.0L;  // f'(g(rho))
  std::vector<std::size_t> n;
  std::vector<long double> ratio;  // [x^n] f(g) / [x^n] g
  long double final_ratio = 0.0L;
  long double relative_error = 0.0L;
};

CompositionReport composition_asymptotic_check(const PolynomialFunction& f, const SeriesTable& g,
                                               std::size_t span, long double g_at_rho);

/// g = T/x shifted down by one; g(rho) = Phi(tau).
SeriesTable tree_series_over_x(const WeightSequence& w, std::size_t order);

/// Richardson 3-point extrapolation of r_k = L + a/k + b/k^2 + ... evaluated
/// at k, k+h, k+2h.
long double richardson3(long double k, long double h, long double r0, long double r1, long double r2);

}  // namespace sgt
