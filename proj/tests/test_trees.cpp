#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "sgtree/trees.hpp"

#include <algorithm>

using namespace sgt;

namespace {

std::vector<Word> all_words(std::size_t n) {
  std::vector<Word> out;
  oracle::words(n, out);
  return out;
}

}  // namespace

TEST_CASE("lukasiewicz words") {
  CHECK(is_lukasiewicz({0}));
  CHECK(is_lukasiewicz({2, 0, 0}));
  CHECK(is_lukasiewicz({1, 2, 0, 0}));
  CHECK_FALSE(is_lukasiewicz({}));
  CHECK_FALSE(is_lukasiewicz({0, 0}));
  CHECK_FALSE(is_lukasiewicz({2, 0}));
  CHECK_FALSE(is_lukasiewicz({1, 0, 0}));
  CHECK_THROWS(make_planted({1}));
  CHECK(make_planted({1, 0}).size() == 2);
}

TEST_CASE("subtree sizes") {
  CHECK(subtree_sizes({2, 1, 0, 0}) == std::vector<std::uint32_t>{4, 2, 1, 1});
}

TEST_CASE("from_planted matches the reference adjacency") {
  for (std::size_t n = 1; n <= 7; ++n) {
    for (auto& w : all_words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto adj = oracle::adjacency(w);
      REQUIRE(u.size() == n);
      CHECK(u.corners() == 2 * (n - 1));
      for (std::uint32_t v = 0; v < n; ++v) {
        REQUIRE(u.degree(v) == adj[v].size());
        for (std::uint32_t i = 0; i < u.degree(v); ++i) CHECK(u.neighbor(v, i) == adj[v][i]);
      }
      // reverse index is an involution onto the twin entry
      const auto& rev = u.reverse();
      for (std::size_t e = 0; e < u.corners(); ++e) {
        CHECK(rev[rev[e]] == e);
        CHECK(u.neighbors()[rev[e]] == u.corner_owner(e));
      }
      if (n > 1) CHECK(corner_root(u, 0).code == w);
    }
  }
}

TEST_CASE("adjacency validation") {
  CHECK_THROWS(UnrootedPlaneTree({{1}, {0}, {}}));     // disconnected
  CHECK_THROWS(UnrootedPlaneTree({{1, 2}, {0, 2}, {0, 1}}));  // cycle
  CHECK_THROWS(UnrootedPlaneTree({{1}, {}}));          // not symmetric
  CHECK_NOTHROW(UnrootedPlaneTree({{1, 2}, {0}, {0}}));
}

TEST_CASE("corner rooting agrees with the reference rooting") {
  for (std::size_t n = 2; n <= 7; ++n) {
    for (auto& w : all_words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto adj = oracle::adjacency(w);
      for (std::size_t c = 0; c < u.corners(); ++c) {
        const auto v = u.corner_owner(c);
        const std::size_t i = c - u.offsets()[v];
        CHECK(corner_root(u, c).code == oracle::root_at(adj, v, i));
      }
    }
  }
}

TEST_CASE("canonical code is the minimum over corners and is rooting invariant") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (auto& w : all_words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto adj = oracle::adjacency(w);
      const Word canon = canonicalize(u);
      CHECK(canon == oracle::canonical(adj));
      for (std::size_t c = 0; c < u.corners(); ++c)
        CHECK(canonicalize(UnrootedPlaneTree::from_planted(corner_root(u, c))) == canon);
    }
  }
}

TEST_CASE("automorphism count") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (auto& w : all_words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto adj = oracle::adjacency(w);
      const auto base = oracle::root_at(adj, 0, 0);
      std::size_t aut = 0;
      for (std::uint32_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < adj[v].size(); ++i) aut += oracle::root_at(adj, v, i) == base;
      CHECK(automorphism_count(u) == aut);
      CHECK(u.corners() % aut == 0);
    }
  }
  // star with 4 leaves
  CHECK(automorphism_count(UnrootedPlaneTree::from_planted(make_planted({4, 0, 0, 0, 0}))) == 4);
  CHECK(automorphism_count(UnrootedPlaneTree::from_planted(make_planted({1, 0}))) == 2);
  CHECK(automorphism_count(UnrootedPlaneTree::from_planted(make_planted({1, 1, 0}))) == 2);
  CHECK(automorphism_count(UnrootedPlaneTree::from_planted(make_planted({2, 1, 0, 0}))) == 2);  // path
  CHECK(automorphism_count(UnrootedPlaneTree::from_planted(make_planted({3, 1, 0, 0, 0}))) == 1);
}

TEST_CASE("split and join at the root are inverse") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (auto& w : all_words(n)) {
      auto t = make_planted(w);
      auto [a, b] = split_at_root(t);
      CHECK(a.size() + b.size() == n);
      CHECK(join_at_root(a, b) == t);
      CHECK(canonicalize(UnrootedPlaneTree::join(a, b)) == canonicalize(UnrootedPlaneTree::from_planted(t)));
    }
  }
  // first child subtree, then the root with the rest
  auto [a, b] = split_at_root(make_planted({2, 0, 1, 0}));
  CHECK(a.code == Word{0});
  CHECK(b.code == Word{1, 1, 0});
  CHECK_THROWS(split_at_root(make_planted({0})));
}

TEST_CASE("centre agrees with eccentricities") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (auto& w : all_words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto ecc = oracle::eccentricities(oracle::adjacency(w));
      const auto m = *std::min_element(ecc.begin(), ecc.end());
      std::vector<std::uint32_t> centre;
      for (std::uint32_t v = 0; v < n; ++v)
        if (ecc[v] == m) centre.push_back(v);
      auto c = center_classify(u);
      CHECK(c.vertex_centered == (centre.size() == 1));
      std::vector<std::uint32_t> got{c.a};
      if (!c.vertex_centered) got.push_back(c.b);
      std::sort(got.begin(), got.end());
      CHECK(got == centre);
    }
  }
}

TEST_CASE("tree weights") {
  auto w = WeightSequence::geometric(Rational(1, 3));
  auto t = make_planted({2, 0, 1, 0});
  CHECK(tree_weight(t, w) == Rational(1, 9) * Rational(1, 3));
  // unrooted: omega_{deg - 1} per vertex, so rooting does not matter
  auto u = UnrootedPlaneTree::from_planted(t);
  for (std::size_t c = 0; c < u.corners(); ++c)
    CHECK(tree_weight(UnrootedPlaneTree::from_planted(corner_root(u, c)), w) == tree_weight(u, w));
  CHECK(tree_weight(u, w) == Rational(1, 9));  // two vertices of degree 2
  CHECK(static_cast<double>(log_tree_weight(t, w)) == doctest::Approx(std::log(1.0 / 27)));
  CHECK(tree_weight(t, WeightSequence::explicit_list({1, 0, 1})) == 0);
}

TEST_CASE("wire format") {
  auto t = make_planted({2, 0, 0});
  CHECK(to_wire(t) == "2,0,0");
  CHECK(parse_planted("2,0,0") == t);
  CHECK(word_string({3, 0, 1, 0, 0}) == "3,0,1,0,0");
  auto u = UnrootedPlaneTree::from_planted(make_planted({1, 2, 0, 0}));
  CHECK(to_wire(u) == "U:1,2,0,0");
  CHECK(canonicalize(parse_unrooted("U:3,0,0,0")) == canonicalize(u));
  CHECK_THROWS(parse_unrooted("1,2,0,0"));
  CHECK_THROWS(parse_planted("2,0"));
  CHECK_THROWS(parse_planted("a,b"));
  CHECK_THROWS(parse_planted(""));
}
