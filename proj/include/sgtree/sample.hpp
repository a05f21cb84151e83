#pragma once

// Random generation: size-conditioned Galton-Watson trees and forests via
// conditioned i.i.d. sums and the cycle lemma, the pair split, and the exact
// and approximate unrooted samplers.

#include "sgtree/series.hpp"
#include "sgtree/trees.hpp"
#include "sgtree/weights.hpp"

#include <boost/random/mersenne_twister.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sgt {

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic random stream. fork(i) gives the i-th independent child, so
/// batches can be split across threads without changing results.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  RngStream fork(std::uint64_t index) const;

  boost::random::mt19937_64& engine() { return engine_; }
  double uniform();  // [0, 1)
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound)

 private:
  std::uint64_t seed_, stream_, key_;
  boost::random::mt19937_64 engine_;
};

class SamplerExhausted : public std::runtime_error {
 public:
  SamplerExhausted(const std::string& what, double rate) : std::runtime_error(what), acceptance_rate(rate) {}
  double acceptance_rate;
};

struct SamplerOptions {
  std::size_t max_attempts = 5'000'000;  // per draw
};

/// n i.i.d. draws from a law proportional to omega_k t^k, conditioned on
/// summing to n - k_trees, rotated by the cycle lemma into a k-forest word.
/// Any t gives the same conditioned law; t is chosen for efficiency. When the
/// law is subcritical with an infinite (heavy) tail a one-big-jump proposal
/// is mixed in with exact acceptance ratios.
class ConditionedSumSampler {
 public:
  ConditionedSumSampler(const WeightSequence& w, std::size_t n, std::size_t k_trees, SamplerOptions opt = {});
  ~ConditionedSumSampler();
  ConditionedSumSampler(ConditionedSumSampler&&) noexcept;
  ConditionedSumSampler& operator=(ConditionedSumSampler&&) noexcept;

  /// Concatenated words of the k trees.
  Word sample(RngStream& rng);
  /// Split a forest word into its trees.
  static std::vector<PlantedTree> split_forest(const Word& w, std::size_t k);

  std::size_t n() const;
  std::size_t trees() const;
  bool uses_big_jump() const;
  std::size_t big_jump_threshold() const;
  double acceptance_rate() const;  // accepted / attempts so far

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Planted tree of size n with P(t) ~ omega(t).
PlantedTree sample_conditioned_gw(const WeightSequence& w, std::size_t n, RngStream& rng);
/// (T1, T2) with |T1| + |T2| = n and P ~ omega(T1) omega(T2).
std::pair<PlantedTree, PlantedTree> sample_pair_split(const WeightSequence& w, std::size_t n, RngStream& rng);

/// Reusable sampler for U_n via Z_U = L + R_v + R_e.
class UnrootedExactSampler {
 public:
  static constexpr std::size_t kMaxSize = 512;
  UnrootedExactSampler(const WeightSequence& w, std::size_t n, SamplerOptions opt = {});
  ~UnrootedExactSampler();
  UnrootedExactSampler(UnrootedExactSampler&&) noexcept;

  UnrootedPlaneTree sample(RngStream& rng);
  /// Which branch produced the last sample: 0 labelled, 1 vertex, 2 edge.
  int last_branch() const;
  /// Branch probabilities (L, R_v, R_e) / Z_U.
  std::vector<long double> branch_probabilities() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// S_n: pair split joined at the roots. The smaller tree (first on ties) is V_n.
class UnrootedApproxSampler {
 public:
  UnrootedApproxSampler(const WeightSequence& w, std::size_t n, SamplerOptions opt = {});

  UnrootedPlaneTree sample(RngStream& rng);
  /// Same draw, keeping the two planted trees; V_n comes first.
  std::pair<PlantedTree, PlantedTree> sample_pair(RngStream& rng);

 private:
  ConditionedSumSampler pair_;
};

UnrootedPlaneTree sample_unrooted_exact(const WeightSequence& w, std::size_t n, RngStream& rng);
UnrootedPlaneTree sample_unrooted_approx(const WeightSequence& w, std::size_t n, RngStream& rng);

}  // namespace sgt
