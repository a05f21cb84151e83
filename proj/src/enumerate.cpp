#include "sgtree/enumerate.hpp"

#include "sgtree/series.hpp"

#include <functional>
#include <set>
#include <stdexcept>

namespace sgt {

Rational ExactLaw::total() const {
  Rational s = 0;
  for (const auto& [k, p] : probs) s += p;
  return s;
}

namespace {

void generate(std::size_t n, const WeightSequence* w, std::vector<PlantedTree>& out) {
  Word cur;
  cur.reserve(n);
  // open = number of unfilled child slots, counting the root slot
  std::function<void(std::size_t)> rec = [&](std::size_t open) {
    const std::size_t i = cur.size();
    const std::size_t left_after = n - i - 1;
    if (i + 1 == n) {
      // last vertex must be a leaf closing the only open slot
      if (open == 1 && (!w || w->positive(0))) {
        cur.push_back(0);
        out.push_back(PlantedTree{cur});
        cur.pop_back();
      }
      return;
    }
    // after choosing d: open' = open - 1 + d, need 1 <= open' <= left_after
    for (std::size_t d = 0; open - 1 + d <= left_after; ++d) {
      if (open - 1 + d < 1) continue;
      if (w && !w->positive(d)) continue;
      cur.push_back(static_cast<std::uint32_t>(d));
      rec(open - 1 + d);
      cur.pop_back();
    }
  };
  if (n == 0) return;
  rec(1);
}

void check_planted_cap(std::size_t n) {
  if (n < 1 || n > kMaxEnumeratePlanted) {
    throw std::invalid_argument("planted enumeration supports 1 <= n <= " + std::to_string(kMaxEnumeratePlanted));
  }
}

void check_unrooted_cap(std::size_t n) {
  if (n < 2 || n > kMaxEnumerateUnrooted) {
    throw std::invalid_argument("unrooted enumeration supports 2 <= n <= " + std::to_string(kMaxEnumerateUnrooted));
  }
}

void normalize(ExactLaw& law, const char* what, std::size_t n) {
  Rational z = law.total();
  if (z == 0) throw InvariantError(std::string(what) + ": no positive-weight tree of size " + std::to_string(n));
  for (auto& [k, p] : law.probs) {
    p /= z;
    p.canonicalize();
  }
}

Word concat(const Word& a, const Word& b) {
  Word c = a;
  c.insert(c.end(), b.begin(), b.end());
  return c;
}

}  // namespace

std::vector<PlantedTree> enumerate_planted(std::size_t n) {
  check_planted_cap(n);
  std::vector<PlantedTree> out;
  generate(n, nullptr, out);
  return out;
}

std::vector<PlantedTree> enumerate_planted(std::size_t n, const WeightSequence& w) {
  check_planted_cap(n);
  std::vector<PlantedTree> out;
  generate(n, &w, out);
  return out;
}

std::vector<Word> enumerate_unrooted_codes(std::size_t n) {
  check_unrooted_cap(n);
  std::set<Word> codes;
  std::vector<PlantedTree> all;
  generate(n, nullptr, all);
  for (const auto& t : all) {
    // every canonical code starts with 1; skip the rest early
    if (t.code[0] != 1) continue;
    codes.insert(canonicalize(UnrootedPlaneTree::from_planted(t)));
  }
  return {codes.begin(), codes.end()};
}

std::vector<UnrootedPlaneTree> enumerate_unrooted(std::size_t n) {
  std::vector<UnrootedPlaneTree> out;
  for (const auto& c : enumerate_unrooted_codes(n)) out.push_back(UnrootedPlaneTree::from_planted(PlantedTree{c}));
  return out;
}

ExactLaw exact_law_planted(const WeightSequence& w, std::size_t n) {
  check_planted_cap(n);
  ExactLaw law;
  for (const auto& t : enumerate_planted(n, w)) law.probs[t.code] = tree_weight(t, w);
  normalize(law, "planted law", n);
  return law;
}

ExactLaw exact_law_unrooted(const WeightSequence& w, std::size_t n) {
  check_unrooted_cap(n);
  ExactLaw law;
  for (const auto& c : enumerate_unrooted_codes(n)) {
    Rational q = tree_weight(UnrootedPlaneTree::from_planted(PlantedTree{c}), w);
    if (q > 0) law.probs[c] = q;
  }
  normalize(law, "unrooted law", n);
  return law;
}

ExactLaw exact_law_approx(const WeightSequence& w, std::size_t n) {
  check_unrooted_cap(n);
  SeriesTable t = planted_series(w, 1, n);
  Rational z = 0;
  for (std::size_t a = 1; a < n; ++a) z += t[a] * t[n - a];
  if (z == 0) throw InvariantError("approximate law: no positive-weight tree of size " + std::to_string(n));
  ExactLaw law;
  for (std::size_t a = 1; a < n; ++a) {
    Rational pa = t[a] * t[n - a] / z;
    if (pa == 0) continue;
    ExactLaw la = exact_law_planted(w, a);
    ExactLaw lb = exact_law_planted(w, n - a);
    for (const auto& [c1, p1] : la.probs) {
      for (const auto& [c2, p2] : lb.probs) {
        // the smaller (first on ties) tree is V_n; joining is symmetric
        Word code = canonicalize(UnrootedPlaneTree::join(PlantedTree{c1}, PlantedTree{c2}));
        law.probs[code] += pa * p1 * p2;
      }
    }
  }
  for (auto& [k, p] : law.probs) p.canonicalize();
  return law;
}

ExactLaw exact_law_pair(const WeightSequence& w, std::size_t n) {
  check_planted_cap(n);
  if (n < 2) throw std::invalid_argument("pair law needs n >= 2");
  ExactLaw law;
  // T*_n: planted trees whose root carries omega_{d+ - 1}
  for (const auto& t : enumerate_planted(n)) {
    if (t.code[0] == 0) continue;
    Rational q = w.positive(t.code[0] - 1) ? w.weight_exact(t.code[0] - 1) : Rational(0);
    for (std::size_t i = 1; i < t.size() && q != 0; ++i) q *= w.positive(t.code[i]) ? w.weight_exact(t.code[i]) : 0;
    if (q == 0) continue;
    auto [t1, t2] = split_at_root(t);
    law.probs[concat(t1.code, t2.code)] += q;
  }
  normalize(law, "pair law", n);
  return law;
}

Rational tv_distance(const ExactLaw& p, const ExactLaw& q) {
  Rational s = 0;
  auto i = p.probs.begin();
  auto j = q.probs.begin();
  while (i != p.probs.end() || j != q.probs.end()) {
    if (j == q.probs.end() || (i != p.probs.end() && i->first < j->first)) {
      s += abs(i->second);
      ++i;
    } else if (i == p.probs.end() || j->first < i->first) {
      s += abs(j->second);
      ++j;
    } else {
      s += abs(i->second - j->second);
      ++i;
      ++j;
    }
  }
  s /= 2;
  s.canonicalize();
  return s;
}

SplitIndependenceReport split_independence_check(const WeightSequence& w, std::size_t n) {
  SplitIndependenceReport rep;
  rep.n = n;
  ExactLaw pair = exact_law_pair(w, n);
  // group by first-component size
  std::map<std::size_t, ExactLaw> by_size;
  for (const auto& [code, p] : pair.probs) {
    // first component ends where its Lukasiewicz walk first hits -1
    long long s = 0;
    std::size_t a = 0;
    for (; a < code.size(); ++a) {
      s += static_cast<long long>(code[a]) - 1;
      if (s == -1) break;
    }
    by_size[a + 1].probs[code] = p;
  }
  rep.size_classes = by_size.size();
  for (auto& [a, cond] : by_size) {
    normalize(cond, "conditioned pair law", n);
    ExactLaw la = exact_law_planted(w, a);
    ExactLaw lb = exact_law_planted(w, n - a);
    ExactLaw product;
    for (const auto& [c1, p1] : la.probs) {
      for (const auto& [c2, p2] : lb.probs) product.probs[concat(c1, c2)] = p1 * p2;
    }
    for (auto& [k, p] : product.probs) p.canonicalize();
    rep.atoms += product.probs.size();
    for (const auto& [k, p] : product.probs) {
      auto it = cond.probs.find(k);
      if (it == cond.probs.end() || it->second != p) ++rep.mismatches;
    }
    for (const auto& [k, p] : cond.probs) {
      if (!product.probs.count(k)) ++rep.mismatches;
    }
  }
  return rep;
}

}  // namespace sgt
