#pragma once

// Exhaustive oracles for small sizes: all planted and unrooted trees, exact
// conditioned laws and exact total-variation distances.

#include "sgtree/trees.hpp"
#include "sgtree/weights.hpp"

#include <map>
#include <vector>

namespace sgt {

constexpr std::size_t kMaxEnumeratePlanted = 14;
constexpr std::size_t kMaxEnumerateUnrooted = 10;

/// Atoms are words: planted codes, canonical unrooted codes, or the
/// concatenation of two planted codes for ordered pairs (Lukasiewicz words are
/// prefix-free, so concatenation is unambiguous).
struct ExactLaw {
  std::map<Word, Rational> probs;

  Rational total() const;
  bool operator==(const ExactLaw&) const = default;
};

/// All valid words of length n in lexicographic order. With `w`, words of zero
/// weight are pruned during generation.
std::vector<PlantedTree> enumerate_planted(std::size_t n);
std::vector<PlantedTree> enumerate_planted(std::size_t n, const WeightSequence& w);

/// One representative per isomorphism class, ordered by canonical code.
std::vector<UnrootedPlaneTree> enumerate_unrooted(std::size_t n);
std::vector<Word> enumerate_unrooted_codes(std::size_t n);

ExactLaw exact_law_planted(const WeightSequence& w, std::size_t n);
ExactLaw exact_law_unrooted(const WeightSequence& w, std::size_t n);
/// Law of S_n: split size a ~ [x^a]T [x^(n-a)]T, independent T_a and T_(n-a),
/// roots joined, canonicalised.
ExactLaw exact_law_approx(const WeightSequence& w, std::size_t n);
/// Law of the ordered pair (T^(1), T^(2)) obtained by splitting T*_n.
ExactLaw exact_law_pair(const WeightSequence& w, std::size_t n);

Rational tv_distance(const ExactLaw& p, const ExactLaw& q);

struct SplitIndependenceReport {
  std::size_t n = 0;
  std::size_t size_classes = 0;
  std::size_t atoms = 0;
  std::size_t mismatches = 0;
  bool ok() const { return mismatches == 0; }
};
/// Compares the law of (T^(1), T^(2)) given sizes (a, n-a) with the product
/// of the independent conditioned laws, atom by atom.
SplitIndependenceReport split_independence_check(const WeightSequence& w, std::size_t n);

}  // namespace sgt
