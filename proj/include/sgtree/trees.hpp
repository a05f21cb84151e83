#pragma once

// Planted plane trees (preorder out-degree words) and unrooted plane trees
// (cyclic neighbour orders), with corner rooting, root splitting and
// canonical codes.

#include "sgtree/weights.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sgt {

using Word = std::vector<std::uint32_t>;

/// Preorder out-degree word. Valid iff the partial sums of (code_i - 1) stay
/// >= 0 before the last entry and reach -1 at the end.
struct PlantedTree {
  Word code;

  std::size_t size() const { return code.size(); }
  bool operator==(const PlantedTree&) const = default;
  auto operator<=>(const PlantedTree&) const = default;
};

bool is_lukasiewicz(const Word& code);
/// Throws std::invalid_argument for invalid words.
PlantedTree make_planted(Word code);

class UnrootedPlaneTree {
 public:
  /// Adjacency lists in cyclic order. Validates symmetry, connectivity and acyclicity.
  explicit UnrootedPlaneTree(const std::vector<std::vector<std::uint32_t>>& adjacency);

  /// Root becomes vertex 0 with neighbours = its children in order; any
  /// other vertex lists its parent first, then its children.
  static UnrootedPlaneTree from_planted(const PlantedTree& t);
  /// Joins the roots of a and b with an edge; equal to from_planted(join_at_root(a, b)).
  static UnrootedPlaneTree join(const PlantedTree& a, const PlantedTree& b);

  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t corners() const { return nbrs_.size(); }
  std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
  /// i-th neighbour of v in cyclic order.
  std::uint32_t neighbor(std::uint32_t v, std::uint32_t i) const { return nbrs_[offsets_[v] + i]; }
  std::uint32_t corner_owner(std::size_t c) const;

  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& neighbors() const { return nbrs_; }
  /// reverse_[e] is the flat index of the entry (w -> v) for e = (v -> w).
  const std::vector<std::uint32_t>& reverse() const { return reverse_; }

 private:
  UnrootedPlaneTree() = default;
  void build_reverse();

  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> nbrs_;
  std::vector<std::uint32_t> reverse_;
};

/// Corner c is the flat neighbour index: vertex corner_owner(c) becomes the
/// root and its neighbours, starting at that entry, become the children.
PlantedTree corner_root(const UnrootedPlaneTree& u, std::size_t corner);

/// Lexicographically least corner rooting.
Word canonicalize(const UnrootedPlaneTree& u);
/// Number of corners whose rooting equals the rooting at corner 0.
std::size_t automorphism_count(const UnrootedPlaneTree& u);

std::pair<PlantedTree, PlantedTree> split_at_root(const PlantedTree& t);
PlantedTree join_at_root(const PlantedTree& t1, const PlantedTree& t2);

struct CenterInfo {
  bool vertex_centered = true;
  std::uint32_t a = 0;  // centre vertex, or first endpoint of the centre edge
  std::uint32_t b = 0;  // second endpoint (== a when vertex-centred)
};
CenterInfo center_classify(const UnrootedPlaneTree& u);

Rational tree_weight(const PlantedTree& t, const WeightSequence& w);
Rational tree_weight(const UnrootedPlaneTree& u, const WeightSequence& w);
long double log_tree_weight(const PlantedTree& t, const WeightSequence& w);

/// Wire format: "2,0,0" for planted trees and "U:" + canonical word for unrooted ones.
std::string to_wire(const PlantedTree& t);
std::string to_wire(const UnrootedPlaneTree& u);
std::string word_string(const Word& w);
PlantedTree parse_planted(std::string_view text);
UnrootedPlaneTree parse_unrooted(std::string_view text);

/// Subtree sizes in preorder for a valid word.
std::vector<std::uint32_t> subtree_sizes(const Word& code);

}  // namespace sgt
