#pragma once

// Graph statistics of sampled trees and the Monte Carlo limit-law checks.

#include "sgtree/enumerate.hpp"
#include "sgtree/sample.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sgt {

struct SampleReport {
  std::size_t n = 0;
  std::size_t diameter = 0;
  std::size_t height_from_center = 0;
  std::map<std::uint32_t, std::uint64_t> degree_hist;
  std::uint32_t max_degree = 0;
  std::uint32_t second_max_degree = 0;
  /// (radius, code) -> count, one code per radius for a uniform vertex.
  std::map<std::pair<unsigned, std::string>, std::uint64_t> neighborhood_codes;
};

/// Diameter by double BFS.
std::size_t diameter(const UnrootedPlaneTree& u);

/// Canonical code of the plane ball of radius l + 1 around v, with the
/// outermost layer kept as bare leaves. l = 0 encodes the degree of v.
/// The code is the minimal rotation over the corners of v.
std::string neighborhood_code(const UnrootedPlaneTree& u, std::uint32_t v, unsigned l);

/// Radii 0..max_radius are censused at a vertex drawn from rng.
/// census = false skips the neighbourhood codes (costly around hubs).
SampleReport measure(const UnrootedPlaneTree& u, RngStream& rng, unsigned max_radius = 2, bool census = true);

/// Running totals over many reports; merge() is associative.
struct StatsSummary {
  std::size_t samples = 0;
  std::size_t n = 0;
  double diameter_sum = 0.0;
  double diameter_sq_sum = 0.0;
  std::map<std::size_t, std::uint64_t> diameter_hist;
  std::map<std::uint32_t, std::uint64_t> degree_hist;
  std::map<std::pair<unsigned, std::string>, std::uint64_t> neighborhood_codes;

  void add(const SampleReport& r);
  void merge(const StatsSummary& other);
  double mean_diameter() const;
  double sd_diameter() const;
};

enum class SamplerMode { exact, approx, planted, pair };

SamplerMode parse_sampler_mode(const std::string& s);
std::string sampler_mode_name(SamplerMode m);

/// Draws `count` trees; sample i uses base.fork(i), so results do not depend
/// on `threads`. fn may be called concurrently for different indices.
/// Planted and pair modes hand over the planted tree (resp. the joined pair)
/// viewed as an unrooted plane tree.
void for_each_sample(const WeightSequence& w, std::size_t n, std::size_t count, SamplerMode mode,
                     const RngStream& base, unsigned threads,
                     const std::function<void(std::size_t, const UnrootedPlaneTree&, RngStream&)>& fn);

/// Sampler for U_n used by the checks: exact up to the exact sampler's cap,
/// the approximation S_n beyond it.
SamplerMode default_unrooted_mode(std::size_t n);

// --- goodness of fit -------------------------------------------------------

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  std::size_t cells = 0;           // after merging
  std::size_t unexpected_atoms = 0;  // observed outside the support
};

/// Pearson chi-square. Cells with expected count below 5 are pooled, smallest
/// first. Any observation outside the support gives p = 0.
ChiSquareResult chi_square_gof(const std::map<Word, std::uint64_t>& observed, const ExactLaw& law);

/// Anderson-Darling normality test with estimated mean and variance
/// (modified statistic and its approximate p-value).
struct NormalityResult {
  double a2 = 0.0;
  double a2_star = 0.0;
  double p_value = 1.0;
};
NormalityResult anderson_darling_normal(std::vector<double> x);

/// 1/2 sum |p_hat - p| over the union of supports.
double empirical_tv(const std::map<Word, std::uint64_t>& observed, const std::map<Word, long double>& law);

/// P(T = t) = omega(t) rho^|t| / T(rho), rho = tau / Phi(tau), for |t| <= max_size.
std::map<Word, long double> boltzmann_law(const WeightSequence& w, std::size_t max_size);

// --- checks ------------------------------------------------------------------

struct DegreeCltReport {
  std::uint32_t d = 0;
  std::size_t n = 0;
  std::size_t batches = 0;
  SamplerMode mode = SamplerMode::approx;
  double p_d = 0.0;  // P(xi = d - 1)
  double mean_fraction = 0.0;  // mean of N_d / n
  double mean_abs_deviation = 0.0;  // mean of |N_d / n - p_d|
  std::vector<double> standardized;  // (N_d - n p_d) / sqrt(n)
  double mean_z = 0.0;
  double sd_z = 0.0;
  NormalityResult normality;
  bool mean_within_band = false;  // |mean_z| <= 4 sd_z / sqrt(batches)
  bool normal = false;            // p >= alpha
  bool passed() const { return mean_within_band && normal; }
};

DegreeCltReport degree_clt_check(const WeightSequence& w, std::uint32_t d, std::size_t n, std::size_t batches,
                                 const RngStream& rng, unsigned threads = 1, double alpha = 0.01);

struct DiameterTailReport {
  std::size_t n = 0;
  std::size_t samples = 0;
  SamplerMode mode = SamplerMode::approx;
  double mean_diameter = 0.0;
  double sd_diameter = 0.0;
  /// x -> P_hat(D >= x) for x = 0 .. max observed + 1.
  std::vector<std::pair<std::size_t, double>> exceedance;
  /// Least squares log P_hat = A - B x^2 / n over the upper tail:
  /// 10 / samples <= P_hat <= 1/2.
  double fit_a = 0.0;
  double fit_b = 0.0;
  double r2 = 0.0;
  double upper_a = 0.0;  // smallest A making the line an upper bound
  std::size_t fit_points = 0;
  /// Same fit over every x with P_hat >= 10 / samples, including the bulk
  /// where P_hat is 1 or nearly so. Reported, not used for passed().
  double r2_full = 0.0;
  double fit_b_full = 0.0;
  bool passed() const { return fit_b > 0.0 && r2 > 0.95; }
};

DiameterTailReport diameter_tail_check(const WeightSequence& w, std::size_t n, std::size_t samples,
                                       const RngStream& rng, unsigned threads = 1);

struct MaxDegreeReport {
  std::size_t n = 0;
  std::size_t samples = 0;
  SamplerMode mode = SamplerMode::approx;
  double nu = 0.0;
  double median_ratio = 0.0;         // median Delta / n
  double median_second_ratio = 0.0;  // median Delta_2 / Delta
  double mean_second_ratio = 0.0;
  bool bounded = true;  // Delta <= n - 1 on every sample
  bool passed(double tol = 0.05) const;
};

MaxDegreeReport max_degree_check(const WeightSequence& w, std::size_t n, std::size_t samples, const RngStream& rng,
                                 unsigned threads = 1);

struct NeighborhoodCensusReport {
  unsigned radius = 0;
  std::vector<std::size_t> sizes;
  std::size_t samples = 0;
  std::vector<std::map<std::string, double>> census;  // per size
  std::vector<double> tv_consecutive;
  bool decreasing = true;
  bool passed() const { return decreasing; }
};

NeighborhoodCensusReport neighborhood_census_check(const WeightSequence& w, unsigned radius,
                                                   const std::vector<std::size_t>& sizes, std::size_t samples,
                                                   const RngStream& rng, unsigned threads = 1);

}  // namespace sgt
