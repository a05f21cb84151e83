#include "sgtree/trees.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace sgt {

bool is_lukasiewicz(const Word& code) {
  if (code.empty()) return false;
  long long s = 0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    s += static_cast<long long>(code[i]) - 1;
    if (i + 1 < code.size() && s < 0) return false;
  }
  return s == -1;
}

PlantedTree make_planted(Word code) {
  if (!is_lukasiewicz(code)) throw std::invalid_argument("not a valid preorder out-degree word: " + word_string(code));
  return PlantedTree{std::move(code)};
}

std::vector<std::uint32_t> subtree_sizes(const Word& code) {
  const std::size_t n = code.size();
  std::vector<std::uint32_t> size(n, 1);
  // process in reverse preorder with a stack of completed subtree roots
  std::vector<std::uint32_t> st;
  st.reserve(n);
  for (std::size_t i = n; i-- > 0;) {
    for (std::uint32_t c = 0; c < code[i]; ++c) {
      size[i] += size[st.back()];
      st.pop_back();
    }
    st.push_back(static_cast<std::uint32_t>(i));
  }
  return size;
}

// ---------------------------------------------------------------------------

UnrootedPlaneTree::UnrootedPlaneTree(const std::vector<std::vector<std::uint32_t>>& adjacency) {
  const std::size_t n = adjacency.size();
  if (n == 0) throw std::invalid_argument("empty tree");
  offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + static_cast<std::uint32_t>(adjacency[v].size());
  if (offsets_[n] != 2 * (n - 1)) throw std::invalid_argument("a tree on n vertices has 2(n-1) neighbour entries");
  nbrs_.reserve(offsets_[n]);
  for (std::size_t v = 0; v < n; ++v) {
    for (auto w : adjacency[v]) {
      if (w >= n || w == v) throw std::invalid_argument("bad neighbour index");
      nbrs_.push_back(w);
    }
  }
  build_reverse();
  // connectivity
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> queue{0};
  seen[0] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    auto v = queue[h];
    for (auto e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      if (!seen[nbrs_[e]]) {
        seen[nbrs_[e]] = 1;
        queue.push_back(nbrs_[e]);
      }
    }
  }
  if (queue.size() != n) throw std::invalid_argument("adjacency is not connected");
}

void UnrootedPlaneTree::build_reverse() {
  const std::size_t m = nbrs_.size();
  struct Entry {
    std::uint32_t lo, hi, idx;
    bool forward;
  };
  std::vector<Entry> es;
  es.reserve(m);
  for (std::uint32_t v = 0; v + 1 < offsets_.size(); ++v) {
    for (auto e = offsets_[v]; e < offsets_[v + 1]; ++e) {
      auto w = nbrs_[e];
      es.push_back({std::min(v, w), std::max(v, w), e, v < w});
    }
  }
  std::sort(es.begin(), es.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.lo, x.hi, x.forward) < std::tie(y.lo, y.hi, y.forward);
  });
  reverse_.assign(m, 0);
  for (std::size_t i = 0; i < m; i += 2) {
    if (i + 1 >= m || es[i].lo != es[i + 1].lo || es[i].hi != es[i + 1].hi || es[i].forward == es[i + 1].forward ||
        (i + 2 < m && es[i + 2].lo == es[i].lo && es[i + 2].hi == es[i].hi)) {
      throw std::invalid_argument("adjacency must list every edge exactly once in each direction");
    }
    reverse_[es[i].idx] = es[i + 1].idx;
    reverse_[es[i + 1].idx] = es[i].idx;
  }
}

UnrootedPlaneTree UnrootedPlaneTree::from_planted(const PlantedTree& t) {
  const Word& code = t.code;
  if (!is_lukasiewicz(code)) throw std::invalid_argument("invalid planted tree");
  const std::size_t n = code.size();
  UnrootedPlaneTree u;
  u.offsets_.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) u.offsets_[v + 1] = u.offsets_[v] + code[v] + (v == 0 ? 0 : 1);
  u.nbrs_.assign(u.offsets_[n], 0);
  u.reverse_.assign(u.offsets_[n], 0);
  std::vector<std::uint32_t> fill(u.offsets_.begin(), u.offsets_.end() - 1);
  std::vector<std::uint32_t> st;  // vertices with children still to come
  std::vector<std::uint32_t> left(n, 0);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (v > 0) {
      auto p = st.back();
      auto ep = fill[p]++;
      auto ev = fill[v]++;
      u.nbrs_[ep] = v;
      u.nbrs_[ev] = p;
      u.reverse_[ep] = ev;
      u.reverse_[ev] = ep;
      if (--left[p] == 0) st.pop_back();
    }
    left[v] = code[v];
    if (code[v] > 0) st.push_back(v);
  }
  return u;
}

UnrootedPlaneTree UnrootedPlaneTree::join(const PlantedTree& a, const PlantedTree& b) {
  return from_planted(join_at_root(a, b));
}

std::uint32_t UnrootedPlaneTree::corner_owner(std::size_t c) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), static_cast<std::uint32_t>(c));
  return static_cast<std::uint32_t>(it - offsets_.begin() - 1);
}

// ---------------------------------------------------------------------------

namespace {

void corner_walk(const UnrootedPlaneTree& u, std::size_t corner, Word& out) {
  const auto& off = u.offsets();
  const auto& nb = u.neighbors();
  const auto& rev = u.reverse();
  out.clear();
  out.reserve(u.size());
  struct Frame {
    std::uint32_t vertex, entry, remaining;
  };
  std::vector<Frame> st;
  const std::uint32_t root = u.corner_owner(corner);
  out.push_back(u.degree(root));
  st.push_back({root, static_cast<std::uint32_t>(corner), u.degree(root)});
  while (!st.empty()) {
    Frame& f = st.back();
    if (f.remaining == 0) {
      st.pop_back();
      continue;
    }
    const std::uint32_t e = f.entry;
    f.entry = e + 1 == off[f.vertex + 1] ? off[f.vertex] : e + 1;
    --f.remaining;
    const std::uint32_t w = nb[e];
    const std::uint32_t back = rev[e];
    const std::uint32_t d = u.degree(w) - 1;
    out.push_back(d);
    std::uint32_t next = back + 1 == off[w + 1] ? off[w] : back + 1;
    st.push_back({w, next, d});
  }
}

}  // namespace

PlantedTree corner_root(const UnrootedPlaneTree& u, std::size_t corner) {
  if (u.size() < 2) throw std::invalid_argument("corner rooting needs n >= 2");
  if (corner >= u.corners()) throw std::out_of_range("corner index out of range");
  PlantedTree t;
  corner_walk(u, corner, t.code);
  return t;
}

Word canonicalize(const UnrootedPlaneTree& u) {
  if (u.size() == 1) return Word{0};
  // the least word starts with 1, so only leaf corners compete
  Word best, cur;
  for (std::size_t c = 0; c < u.corners(); ++c) {
    if (u.degree(u.corner_owner(c)) != 1) continue;
    corner_walk(u, c, cur);
    if (best.empty() || cur < best) best.swap(cur);
  }
  return best;
}

std::size_t automorphism_count(const UnrootedPlaneTree& u) {
  if (u.size() < 2) return 1;
  Word ref, cur;
  corner_walk(u, 0, ref);
  std::size_t count = 0;
  for (std::size_t c = 0; c < u.corners(); ++c) {
    corner_walk(u, c, cur);
    if (cur == ref) ++count;
  }
  return count;
}

std::pair<PlantedTree, PlantedTree> split_at_root(const PlantedTree& t) {
  const Word& w = t.code;
  if (w.size() < 2) throw std::invalid_argument("split_at_root needs a tree with at least 2 vertices");
  long long need = 1;
  std::size_t end = 1;
  for (; end < w.size(); ++end) {
    need += static_cast<long long>(w[end]) - 1;
    if (need == 0) break;
  }
  PlantedTree t1{Word(w.begin() + 1, w.begin() + static_cast<std::ptrdiff_t>(end) + 1)};
  PlantedTree t2;
  t2.code.reserve(w.size() - t1.size());
  t2.code.push_back(w[0] - 1);
  t2.code.insert(t2.code.end(), w.begin() + static_cast<std::ptrdiff_t>(end) + 1, w.end());
  return {std::move(t1), std::move(t2)};
}

PlantedTree join_at_root(const PlantedTree& t1, const PlantedTree& t2) {
  PlantedTree t;
  t.code.reserve(t1.size() + t2.size());
  t.code.push_back(t2.code.at(0) + 1);
  t.code.insert(t.code.end(), t1.code.begin(), t1.code.end());
  t.code.insert(t.code.end(), t2.code.begin() + 1, t2.code.end());
  return t;
}

CenterInfo center_classify(const UnrootedPlaneTree& u) {
  const std::size_t n = u.size();
  if (n < 2) throw std::invalid_argument("center_classify needs n >= 2");
  std::vector<std::uint32_t> deg(n);
  std::vector<std::uint32_t> layer, next;
  for (std::uint32_t v = 0; v < n; ++v) {
    deg[v] = u.degree(v);
    if (deg[v] == 1) layer.push_back(v);
  }
  std::vector<char> removed(n, 0);
  std::size_t remaining = n;
  while (remaining > 2) {
    next.clear();
    for (auto v : layer) {
      removed[v] = 1;
      --remaining;
    }
    for (auto v : layer) {
      for (std::uint32_t i = 0; i < u.degree(v); ++i) {
        auto w = u.neighbor(v, i);
        if (removed[w]) continue;
        if (--deg[w] == 1) next.push_back(w);
      }
    }
    layer.swap(next);
  }
  CenterInfo c;
  std::vector<std::uint32_t> left;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (!removed[v]) left.push_back(v);
  }
  c.a = left[0];
  c.b = left.size() == 2 ? left[1] : left[0];
  c.vertex_centered = left.size() == 1;
  return c;
}

Rational tree_weight(const PlantedTree& t, const WeightSequence& w) {
  Rational r = 1;
  for (auto d : t.code) {
    if (!w.positive(d)) return 0;
    r *= w.weight_exact(d);
  }
  return r;
}

Rational tree_weight(const UnrootedPlaneTree& u, const WeightSequence& w) {
  Rational r = 1;
  for (std::uint32_t v = 0; v < u.size(); ++v) {
    if (u.degree(v) == 0) throw std::invalid_argument("unrooted weight undefined for an isolated vertex");
    auto k = u.degree(v) - 1;
    if (!w.positive(k)) return 0;
    r *= w.weight_exact(k);
  }
  return r;
}

long double log_tree_weight(const PlantedTree& t, const WeightSequence& w) {
  long double s = 0.0L;
  for (auto d : t.code) s += w.log_weight(d);
  return s;
}

std::string word_string(const Word& w) {
  std::string s;
  s.reserve(w.size() * 2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s.push_back(',');
    s += std::to_string(w[i]);
  }
  return s;
}

std::string to_wire(const PlantedTree& t) { return word_string(t.code); }
std::string to_wire(const UnrootedPlaneTree& u) { return "U:" + word_string(canonicalize(u)); }

PlantedTree parse_planted(std::string_view text) {
  Word w;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\n' || text[i] == '\r')) ++i;
    if (i >= text.size()) break;
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
    if (ec != std::errc()) throw std::invalid_argument("malformed tree word");
    w.push_back(v);
    i = static_cast<std::size_t>(p - text.data());
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i < text.size()) {
      if (text[i] != ',' && text[i] != '\n' && text[i] != '\r') throw std::invalid_argument("malformed tree word");
      ++i;
    }
  }
  return make_planted(std::move(w));
}

UnrootedPlaneTree parse_unrooted(std::string_view text) {
  if (text.substr(0, 2) != "U:") throw std::invalid_argument("unrooted trees use the 'U:' prefix");
  return UnrootedPlaneTree::from_planted(parse_planted(text.substr(2)));
}

}  // namespace sgt
