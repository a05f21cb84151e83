#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "sgtree/enumerate.hpp"

using namespace sgt;

namespace {

std::vector<WeightSequence> sequences() {
  return {WeightSequence::geometric(Rational(1)), WeightSequence::explicit_list({1, 0, 1}),
          WeightSequence::explicit_list({1, 1}), WeightSequence::geometric(Rational(1, 3)),
          WeightSequence::power(3.0, 20), WeightSequence::explicit_list({1, 2, 0, 3})};
}

Rational planted_weight(const WeightSequence& w, const Word& code) {
  Rational p = 1;
  for (auto d : code) p *= w.weight_exact(d);
  return p;
}

Rational unrooted_weight(const WeightSequence& w, const std::vector<std::vector<std::uint32_t>>& adj) {
  Rational p = 1;
  for (auto& nb : adj) p *= w.weight_exact(nb.size() - 1);
  return p;
}

std::map<Word, Rational> normalise(std::map<Word, Rational> m) {
  Rational z = 0;
  for (auto& [k, v] : m) z += v;
  std::map<Word, Rational> out;
  for (auto& [k, v] : m)
    if (v != 0) out[k] = v / z;
  return out;
}

std::vector<Word> words(std::size_t n) {
  std::vector<Word> ws;
  oracle::words(n, ws);
  return ws;
}

// Two planted trees with an edge between their roots.
std::vector<std::vector<std::uint32_t>> joined(const Word& a, const Word& b) {
  auto A = oracle::adjacency(a);
  auto B = oracle::adjacency(b);
  const auto off = static_cast<std::uint32_t>(A.size());
  for (auto& nb : B) {
    for (auto& x : nb) x += off;
    A.push_back(nb);
  }
  A[0].insert(A[0].begin(), off);
  A[off].insert(A[off].begin(), 0);
  return A;
}

std::map<Word, Rational> reference_unrooted(const WeightSequence& w, std::size_t n) {
  std::map<Word, Rational> m;
  for (auto& c : oracle::unrooted_classes(n)) m[c] = unrooted_weight(w, oracle::adjacency(c));
  return normalise(m);
}

std::map<Word, Rational> reference_approx(const WeightSequence& w, std::size_t n) {
  std::map<Word, Rational> m;
  for (std::size_t a = 1; a < n; ++a)
    for (auto& x : words(a))
      for (auto& y : words(n - a)) m[oracle::canonical(joined(x, y))] += planted_weight(w, x) * planted_weight(w, y);
  return normalise(m);
}

Rational reference_tv(const std::map<Word, Rational>& p, const std::map<Word, Rational>& q) {
  std::set<Word> keys;
  for (auto& [k, v] : p) keys.insert(k);
  for (auto& [k, v] : q) keys.insert(k);
  Rational s = 0;
  for (auto& k : keys) {
    Rational a = p.count(k) ? p.at(k) : Rational(0);
    Rational b = q.count(k) ? q.at(k) : Rational(0);
    s += abs(Rational(a - b));
  }
  return s / 2;
}

std::size_t first_tree_size(const Word& pair) {
  long need = 1;
  for (std::size_t i = 0; i < pair.size(); ++i) {
    need += static_cast<long>(pair[i]) - 1;
    if (need == 0) return i + 1;
  }
  return 0;
}

}  // namespace

TEST_CASE("planted enumeration") {
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430};
  for (std::size_t n = 1; n <= 9; ++n) {
    auto ts = enumerate_planted(n);
    REQUIRE(ts.size() == catalan[n - 1]);
    auto ref = words(n);
    std::sort(ref.begin(), ref.end());
    for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ts[i].code == ref[i]);
  }
  // pruning keeps exactly the positive-weight words
  auto w = WeightSequence::explicit_list({1, 0, 1});
  for (std::size_t n = 1; n <= 9; ++n) {
    std::size_t positive = 0;
    for (auto& x : words(n)) positive += planted_weight(w, x) > 0;
    auto ts = enumerate_planted(n, w);
    CHECK(ts.size() == positive);
    for (auto& t : ts) CHECK(planted_weight(w, t.code) > 0);
  }
}

TEST_CASE("unrooted enumeration") {
  for (std::size_t n = 2; n <= 9; ++n) {
    auto codes = enumerate_unrooted_codes(n);
    auto ref = oracle::unrooted_classes(n);
    CHECK(codes == std::vector<Word>(ref.begin(), ref.end()));
    CHECK(enumerate_unrooted(n).size() == codes.size());
  }
}

TEST_CASE("exact planted law") {
  for (auto& w : sequences()) {
    for (std::size_t n = 1; n <= 8; ++n) {
      std::map<Word, Rational> ref;
      for (auto& x : words(n)) ref[x] = planted_weight(w, x);
      bool any = false;
      for (auto& [k, v] : ref) any |= v > 0;
      if (!any) {
        CHECK_THROWS(exact_law_planted(w, n));
        continue;
      }
      auto law = exact_law_planted(w, n);
      CHECK(law.total() == 1);
      CHECK(law.probs == normalise(ref));
    }
  }
}

TEST_CASE("exact unrooted law") {
  auto one = WeightSequence::geometric(Rational(1));
  auto u5 = exact_law_unrooted(one, 5);
  REQUIRE(u5.probs.size() == 3);
  for (auto& [k, v] : u5.probs) CHECK(v == Rational(1, 3));

  for (auto& w : sequences()) {
    for (std::size_t n = 2; n <= 8; ++n) {
      auto ref = reference_unrooted(w, n);
      if (ref.empty()) continue;
      CAPTURE(w.describe());
      CAPTURE(n);
      CHECK(exact_law_unrooted(w, n).probs == ref);
    }
  }
}

TEST_CASE("law of the approximation") {
  auto one = WeightSequence::geometric(Rational(1));
  auto s4 = exact_law_approx(one, 4);
  CHECK(s4.probs.at({1, 2, 0, 0}) == Rational(2, 5));  // star
  CHECK(s4.probs.at({1, 1, 1, 0}) == Rational(3, 5));  // path
  for (auto& w : sequences()) {
    for (std::size_t n = 2; n <= 8; ++n) {
      auto ref = reference_approx(w, n);
      if (ref.empty()) continue;
      CAPTURE(w.describe());
      CAPTURE(n);
      CHECK(exact_law_approx(w, n).probs == ref);
    }
  }
}

TEST_CASE("pair law") {
  auto one = WeightSequence::geometric(Rational(1));
  auto pair = exact_law_pair(one, 4);
  CHECK(pair.total() == 1);
  std::map<std::size_t, Rational> sizes;
  for (auto& [k, v] : pair.probs) sizes[first_tree_size(k)] += v;
  CHECK(sizes[1] == Rational(2, 5));
  CHECK(sizes[2] == Rational(1, 5));
  CHECK(sizes[3] == Rational(2, 5));

  for (auto& w : sequences()) {
    for (std::size_t n = 2; n <= 8; ++n) {
      std::map<Word, Rational> ref;
      for (std::size_t a = 1; a < n; ++a)
        for (auto& x : words(a))
          for (auto& y : words(n - a)) {
            Word xy = x;
            xy.insert(xy.end(), y.begin(), y.end());
            ref[xy] = planted_weight(w, x) * planted_weight(w, y);
          }
      ref = normalise(ref);
      if (ref.empty()) continue;
      CHECK(exact_law_pair(w, n).probs == ref);
    }
  }
}

TEST_CASE("total variation") {
  auto one = WeightSequence::geometric(Rational(1));
  auto u = exact_law_unrooted(one, 6);
  CHECK(tv_distance(u, u) == 0);
  ExactLaw a, b;
  a.probs[{0}] = 1;
  b.probs[{1, 0}] = 1;
  CHECK(tv_distance(a, b) == 1);

  CHECK(tv_distance(exact_law_unrooted(one, 4), exact_law_approx(one, 4)) == Rational(1, 10));

  for (auto& w : sequences()) {
    for (std::size_t n = 2; n <= 8; ++n) {
      auto ru = reference_unrooted(w, n);
      if (ru.empty()) continue;
      CHECK(tv_distance(exact_law_unrooted(w, n), exact_law_approx(w, n)) == reference_tv(ru, reference_approx(w, n)));
    }
  }
  // only paths: both laws are a point mass
  for (std::size_t n = 2; n <= 9; ++n) {
    auto w = WeightSequence::explicit_list({1, 1});
    CHECK(tv_distance(exact_law_unrooted(w, n), exact_law_approx(w, n)) == 0);
  }
}

TEST_CASE("split independence") {
  for (auto& w : sequences()) {
    for (std::size_t n = 2; n <= 8; ++n) {
      if (reference_approx(w, n).empty()) continue;
      auto r = split_independence_check(w, n);
      CAPTURE(w.describe());
      CAPTURE(n);
      CHECK(r.ok());
      CHECK(r.atoms > 0);
    }
  }
}

TEST_CASE("size caps") {
  CHECK_THROWS(enumerate_planted(kMaxEnumeratePlanted + 1));
  CHECK_THROWS(enumerate_unrooted(kMaxEnumerateUnrooted + 1));
}
