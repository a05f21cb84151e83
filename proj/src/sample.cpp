#include "sgtree/sample.hpp"

#include <boost/random/binomial_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sgt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), key_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))),
      engine_(key_) {}

RngStream RngStream::fork(std::uint64_t index) const { return RngStream(key_, index); }

double RngStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

// ---------------------------------------------------------------------------

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
constexpr std::size_t kExplicit = 64;

long double log_add(long double a, long double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  long double m = std::max(a, b);
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

long double log_binom_pmf(long long m, long double q, long long j) {
  if (j < 0 || j > m) return kNegInf;
  if (q <= 0.0L) return j == 0 ? 0.0L : kNegInf;
  if (q >= 1.0L) return j == m ? 0.0L : kNegInf;
  return std::lgamma(static_cast<long double>(m) + 1.0L) - std::lgamma(static_cast<long double>(j) + 1.0L) -
         std::lgamma(static_cast<long double>(m - j) + 1.0L) + static_cast<long double>(j) * std::log(q) +
         static_cast<long double>(m - j) * std::log1p(-q);
}

/// A probability law on [0, U) with log-weights lw[k] + theta k.
struct Law {
  std::size_t U = 0;
  std::vector<long double> p;  // normalised
  long double log_norm = 0.0L;  // log sum_k exp(lw[k] + theta k) over [0, U)
  long double theta = 0.0L;
  long double mean = 0.0L;

  // multinomial plan
  struct Cat {
    std::uint32_t value;
    long double cond;  // P(cat | not an earlier category)
  };
  std::vector<Cat> cats;
  long double tail_cond = 0.0L;  // P(tail | none of cats)
  std::vector<long double> tail_cdf;  // over [kExplicit, U), normalised to 1
  std::size_t tail_start = 0;
  long double tail_mass = 0.0L;
};

Law make_law(const std::vector<long double>& lw, std::size_t U, long double theta) {
  Law L;
  L.U = U;
  L.theta = theta;
  L.p.assign(U, 0.0L);
  long double mx = kNegInf;
  for (std::size_t k = 0; k < U; ++k) {
    if (lw[k] == kNegInf) continue;
    mx = std::max(mx, lw[k] + theta * static_cast<long double>(k));
  }
  long double z = 0.0L, m1 = 0.0L;
  for (std::size_t k = 0; k < U; ++k) {
    if (lw[k] == kNegInf) continue;
    L.p[k] = std::exp(lw[k] + theta * static_cast<long double>(k) - mx);
    z += L.p[k];
  }
  for (std::size_t k = 0; k < U; ++k) {
    L.p[k] /= z;
    m1 += static_cast<long double>(k) * L.p[k];
  }
  L.log_norm = mx + std::log(z);
  L.mean = m1;
  return L;
}

long double law_mean(const std::vector<long double>& lw, std::size_t U, long double theta) {
  long double mx = kNegInf;
  for (std::size_t k = 0; k < U; ++k) {
    if (lw[k] != kNegInf) mx = std::max(mx, lw[k] + theta * static_cast<long double>(k));
  }
  long double z = 0.0L, m1 = 0.0L;
  for (std::size_t k = 0; k < U; ++k) {
    if (lw[k] == kNegInf) continue;
    long double e = std::exp(lw[k] + theta * static_cast<long double>(k) - mx);
    z += e;
    m1 += static_cast<long double>(k) * e;
  }
  return m1 / z;
}

/// theta with mean = target on [0, U); nullopt when the target is out of reach.
std::optional<long double> match_mean(const std::vector<long double>& lw, std::size_t U, long double target) {
  std::size_t top = 0;
  for (std::size_t k = 0; k < U; ++k) {
    if (lw[k] != kNegInf) top = k;
  }
  if (static_cast<long double>(top) < target) return std::nullopt;
  if (static_cast<long double>(top) == target) return 64.0L;
  long double lo = -1.0L, hi = 1.0L;
  while (law_mean(lw, U, lo) > target && lo > -4096.0L) lo *= 2.0L;
  while (law_mean(lw, U, hi) < target && hi < 4096.0L) hi *= 2.0L;
  for (int it = 0; it < 80; ++it) {
    long double mid = 0.5L * (lo + hi);
    (law_mean(lw, U, mid) < target ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

/// Sequential-binomial plan over `values` followed by an aggregated tail
/// [tail_start, U); `rest` is the mass left to the pivot pair.
void plan(Law& L, const std::vector<std::uint32_t>& values, bool with_tail, long double rest) {
  std::vector<long double> mass;
  for (auto v : values) mass.push_back(L.p[v]);
  L.tail_start = std::min(kExplicit, L.U);
  L.tail_mass = 0.0L;
  L.tail_cdf.clear();
  if (with_tail && L.U > kExplicit) {
    long double acc = 0.0L;
    for (std::size_t k = kExplicit; k < L.U; ++k) {
      acc += L.p[k];
      L.tail_cdf.push_back(acc);
    }
    L.tail_mass = acc;
    if (acc > 0.0L) {
      for (auto& c : L.tail_cdf) c /= acc;
    }
  }
  long double suffix = rest + L.tail_mass;
  std::vector<long double> suf(values.size() + 1, 0.0L);
  suf[values.size()] = suffix;
  for (std::size_t i = values.size(); i-- > 0;) suf[i] = suf[i + 1] + mass[i];
  L.cats.clear();
  for (std::size_t i = 0; i < values.size(); ++i) {
    L.cats.push_back({values[i], suf[i] > 0.0L ? std::min(1.0L, mass[i] / suf[i]) : 0.0L});
  }
  L.tail_cond = suffix > 0.0L ? std::min(1.0L, L.tail_mass / suffix) : 0.0L;
}

}  // namespace

struct ConditionedSumSampler::Impl {
  std::size_t n = 0, k = 0, s = 0;
  SamplerOptions opt;
  std::vector<long double> lw;  // log omega_k + k log t0, k in [0, s]
  std::uint32_t g = 0;          // pivot value paired with 0

  // small branch
  Law small;
  long double q = 0.0L;            // P(g | {0, g}) under the small law
  long double log_mbin = 0.0L;
  std::vector<std::uint32_t> small_values;  // "other" explicit categories

  // big-jump branch
  bool big = false;
  std::size_t L = 0;
  Law base;  // untilted law on [0, s]
  long double log_pistar = 0.0L;
  long double p_big = 0.0L;
  std::vector<long double> log_pi;  // log base.p

  std::uint64_t attempts = 0, accepted = 0;

  // scratch
  std::vector<std::uint64_t> counts;
  std::vector<std::uint32_t> tail_vals;
  Word seq;

  void setup(const WeightSequence& w);
  long double small_branch_cost(std::size_t Lc, Law* out_law, long double* out_q, long double* out_mbin,
                                std::vector<std::uint32_t>* out_values);
  bool try_small(RngStream& rng);
  bool try_big(RngStream& rng);
  Word finish(RngStream& rng);
  std::uint32_t draw_tail(const Law& law, RngStream& rng) const;
};

std::uint32_t ConditionedSumSampler::Impl::draw_tail(const Law& law, RngStream& rng) const {
  double u = rng.uniform();
  auto it = std::lower_bound(law.tail_cdf.begin(), law.tail_cdf.end(), static_cast<long double>(u));
  if (it == law.tail_cdf.end()) --it;
  return static_cast<std::uint32_t>(law.tail_start + static_cast<std::size_t>(it - law.tail_cdf.begin()));
}

long double ConditionedSumSampler::Impl::small_branch_cost(std::size_t Lc, Law* out_law, long double* out_q,
                                                            long double* out_mbin,
                                                            std::vector<std::uint32_t>* out_values) {
  const long double target = static_cast<long double>(s) / static_cast<long double>(n);
  auto theta = match_mean(lw, Lc, target);
  if (!theta) return std::numeric_limits<long double>::infinity();
  Law law = make_law(lw, Lc, *theta);
  if (g >= Lc || law.p[g] <= 0.0L) return std::numeric_limits<long double>::infinity();
  const long double qq = law.p[g] / (law.p[0] + law.p[g]);
  std::vector<std::uint32_t> values;
  std::size_t kmin_other = 0;
  for (std::size_t v = 1; v < std::min(Lc, kExplicit); ++v) {
    if (v == g || law.p[v] <= 0.0L) continue;
    values.push_back(static_cast<std::uint32_t>(v));
  }
  for (std::size_t v = 1; v < Lc; ++v) {
    if (v != g && law.p[v] > 0.0L) {
      kmin_other = v;
      break;
    }
  }
  std::size_t m_lo = n;
  if (kmin_other > 0) m_lo = n - std::min(n, s / kmin_other);
  long double mbin = kNegInf;
  for (std::size_t m = m_lo; m <= n; ++m) {
    long long mode = static_cast<long long>(std::floor((static_cast<long double>(m) + 1.0L) * qq));
    for (long long j = std::max<long long>(0, mode - 1); j <= std::min<long long>(static_cast<long long>(m), mode + 1);
         ++j) {
      mbin = std::max(mbin, log_binom_pmf(static_cast<long long>(m), qq, j));
    }
  }
  // C_B = exp(n log M_L(theta) - theta s) relative to the base law on [0, s]
  long double log_ml = law.log_norm - base.log_norm;
  long double cost = static_cast<long double>(n) * log_ml - law.theta * static_cast<long double>(s) + mbin;
  if (out_law) {
    plan(law, values, true, law.p[0] + law.p[g]);
    *out_law = std::move(law);
    *out_q = qq;
    *out_mbin = mbin;
    *out_values = std::move(values);
  }
  return cost;
}

void ConditionedSumSampler::Impl::setup(const WeightSequence& w) {
  s = n - k;
  lw.assign(s + 1, kNegInf);
  for (std::size_t v = 0; v <= s; ++v) lw[v] = w.log_weight(v);
  if (lw[0] == kNegInf) throw InvariantError("omega_0 must be positive");
  if (s == 0) return;
  for (std::size_t v = 1; v <= s; ++v) {
    if (lw[v] != kNegInf) {
      g = static_cast<std::uint32_t>(v);
      break;
    }
  }
  if (g == 0) throw InvariantError("no forest of the requested size has positive weight");

  // Heavy-tailed subcritical laws: evaluate at the radius and allow one big jump.
  bool heavy = false;
  if (!w.finite_support() && w.family() == Family::power && w.has_branching()) {
    OffspringDistribution xi = offspring_distribution(w, 2);
    heavy = xi.tau_at_radius;
    if (heavy) {
      const long double lt = std::log(xi.tau.value);
      for (std::size_t v = 0; v <= s; ++v) {
        if (lw[v] != kNegInf) lw[v] += static_cast<long double>(v) * lt;
      }
    }
  }
  base = make_law(lw, s + 1, 0.0L);

  if (!heavy) {
    small_branch_cost(s + 1, &small, &q, &log_mbin, &small_values);
    if (small.p.empty()) throw InvariantError("no forest of the requested size has positive weight");
    return;
  }

  log_pi.assign(s + 1, kNegInf);
  for (std::size_t v = 0; v <= s; ++v) {
    if (base.p[v] > 0.0L) log_pi[v] = std::log(base.p[v]);
  }
  // L on a geometric grid; cost of the big branch is n pi*(L)
  std::vector<long double> suffix_max(s + 2, kNegInf);
  for (std::size_t v = s + 1; v-- > 0;) suffix_max[v] = std::max(suffix_max[v + 1], log_pi[v]);
  long double best = std::numeric_limits<long double>::infinity();
  std::size_t bestL = s + 1;
  std::vector<std::size_t> grid;
  for (long double x = static_cast<long double>(g) + 1.0L; x < static_cast<long double>(s + 1); x *= 1.12L) {
    std::size_t c = static_cast<std::size_t>(x);
    if (grid.empty() || c != grid.back()) grid.push_back(c);
  }
  grid.push_back(s + 1);
  for (std::size_t Lc : grid) {
    long double cb = small_branch_cost(Lc, nullptr, nullptr, nullptr, nullptr);
    long double ca = Lc <= s ? std::log(static_cast<long double>(n)) + suffix_max[Lc] : kNegInf;
    long double tot = log_add(ca, cb);
    if (tot < best) {
      best = tot;
      bestL = Lc;
    }
  }
  L = bestL;
  big = L <= s;
  long double cb = small_branch_cost(L, &small, &q, &log_mbin, &small_values);
  if (big) {
    log_pistar = suffix_max[L];
    long double ca = std::log(static_cast<long double>(n)) + log_pistar;
    p_big = std::exp(ca - log_add(ca, cb));
    // the big branch draws n-1 values from the base law over every category
    std::vector<std::uint32_t> all;
    for (std::size_t v = 0; v < std::min(s + 1, kExplicit); ++v) {
      if (base.p[v] > 0.0L) all.push_back(static_cast<std::uint32_t>(v));
    }
    plan(base, all, true, 0.0L);
  }
}

bool ConditionedSumSampler::Impl::try_small(RngStream& rng) {
  const Law& law = small;
  counts.assign(law.cats.size(), 0);
  tail_vals.clear();
  long long r = static_cast<long long>(n);
  std::size_t sum = 0;
  for (std::size_t i = 0; i < law.cats.size() && r > 0; ++i) {
    const auto& c = law.cats[i];
    long long x = 0;
    if (c.cond >= 1.0L) {
      x = r;
    } else if (c.cond > 0.0L) {
      boost::random::binomial_distribution<long long, double> bd(r, static_cast<double>(c.cond));
      x = bd(rng.engine());
    }
    counts[i] = static_cast<std::uint64_t>(x);
    r -= x;
    sum += static_cast<std::size_t>(x) * c.value;
    if (sum > s) return false;
  }
  if (r > 0 && law.tail_cond > 0.0L) {
    long long x = r;
    if (law.tail_cond < 1.0L) {
      boost::random::binomial_distribution<long long, double> bd(r, static_cast<double>(law.tail_cond));
      x = bd(rng.engine());
    }
    r -= x;
    for (long long i = 0; i < x; ++i) {
      auto v = draw_tail(law, rng);
      sum += v;
      if (sum > s) return false;
      tail_vals.push_back(v);
    }
  }
  // pivot: the remaining r draws are 0 or g
  const std::size_t rem = s - sum;
  if (rem % g != 0) return false;
  const long long jstar = static_cast<long long>(rem / g);
  if (jstar > r) return false;
  long double la = log_binom_pmf(r, q, jstar) - log_mbin;
  if (std::log(static_cast<long double>(rng.uniform())) >= la) return false;

  seq.clear();
  for (std::size_t i = 0; i < law.cats.size(); ++i) seq.insert(seq.end(), counts[i], law.cats[i].value);
  seq.insert(seq.end(), tail_vals.begin(), tail_vals.end());
  seq.insert(seq.end(), static_cast<std::size_t>(jstar), g);
  seq.insert(seq.end(), static_cast<std::size_t>(r - jstar), 0u);
  return true;
}

bool ConditionedSumSampler::Impl::try_big(RngStream& rng) {
  const Law& law = base;
  counts.assign(law.cats.size(), 0);
  tail_vals.clear();
  long long r = static_cast<long long>(n) - 1;
  std::size_t sum = 0;
  for (std::size_t i = 0; i < law.cats.size() && r > 0; ++i) {
    const auto& c = law.cats[i];
    long long x = 0;
    if (c.cond >= 1.0L) {
      x = r;
    } else if (c.cond > 0.0L) {
      boost::random::binomial_distribution<long long, double> bd(r, static_cast<double>(c.cond));
      x = bd(rng.engine());
    }
    counts[i] = static_cast<std::uint64_t>(x);
    r -= x;
    sum += static_cast<std::size_t>(x) * c.value;
    if (sum + L > s) return false;
  }
  for (long long i = 0; i < r; ++i) {
    auto v = draw_tail(law, rng);
    sum += v;
    if (sum + L > s) return false;
    tail_vals.push_back(v);
  }
  const std::size_t J = s - sum;
  if (J < L || log_pi[J] == kNegInf) return false;
  // accept with 1 / (pi*(L) sum_{x_i >= L} 1 / pi(x_i))
  long double lsum = -log_pi[J];
  for (std::size_t i = 0; i < law.cats.size(); ++i) {
    if (counts[i] && law.cats[i].value >= L) {
      lsum = log_add(lsum, std::log(static_cast<long double>(counts[i])) - log_pi[law.cats[i].value]);
    }
  }
  for (auto v : tail_vals) {
    if (v >= L) lsum = log_add(lsum, -log_pi[v]);
  }
  long double la = -(log_pistar + lsum);
  if (std::log(static_cast<long double>(rng.uniform())) >= la) return false;

  seq.clear();
  for (std::size_t i = 0; i < law.cats.size(); ++i) seq.insert(seq.end(), counts[i], law.cats[i].value);
  seq.insert(seq.end(), tail_vals.begin(), tail_vals.end());
  seq.push_back(static_cast<std::uint32_t>(J));
  return true;
}

Word ConditionedSumSampler::Impl::finish(RngStream& rng) {
  // uniform arrangement of the accepted multiset
  for (std::size_t i = seq.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(seq[i - 1], seq[j]);
  }
  // cycle lemma: good rotations start right after the first hitting times of
  // levels min, ..., min + k - 1 of the walk sum (x_i - 1)
  long long walk = 0, mn = 0;
  for (auto x : seq) {
    walk += static_cast<long long>(x) - 1;
    mn = std::min(mn, walk);
  }
  std::vector<std::size_t> hit(k, 0);
  std::vector<char> seen(k, 0);
  walk = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    walk += static_cast<long long>(seq[i]) - 1;
    long long lvl = walk - mn;
    if (lvl >= 0 && lvl < static_cast<long long>(k) && !seen[static_cast<std::size_t>(lvl)]) {
      seen[static_cast<std::size_t>(lvl)] = 1;
      hit[static_cast<std::size_t>(lvl)] = i + 1;
    }
  }
  std::size_t start = hit[static_cast<std::size_t>(rng.below(k))] % seq.size();
  Word out;
  out.reserve(seq.size());
  out.insert(out.end(), seq.begin() + static_cast<std::ptrdiff_t>(start), seq.end());
  out.insert(out.end(), seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(start));
  return out;
}

ConditionedSumSampler::ConditionedSumSampler(const WeightSequence& w, std::size_t n, std::size_t k_trees,
                                             SamplerOptions opt)
    : impl_(std::make_unique<Impl>()) {
  if (k_trees == 0 || n < k_trees) throw std::invalid_argument("need 1 <= k_trees <= n");
  impl_->n = n;
  impl_->k = k_trees;
  impl_->opt = opt;
  impl_->setup(w);
}

ConditionedSumSampler::~ConditionedSumSampler() = default;
ConditionedSumSampler::ConditionedSumSampler(ConditionedSumSampler&&) noexcept = default;
ConditionedSumSampler& ConditionedSumSampler::operator=(ConditionedSumSampler&&) noexcept = default;

Word ConditionedSumSampler::sample(RngStream& rng) {
  Impl& m = *impl_;
  if (m.s == 0) return Word(m.n, 0);
  for (std::size_t a = 0; a < m.opt.max_attempts; ++a) {
    ++m.attempts;
    bool ok = (m.big && rng.uniform() < static_cast<double>(m.p_big)) ? m.try_big(rng) : m.try_small(rng);
    if (ok) {
      ++m.accepted;
      return m.finish(rng);
    }
  }
  throw SamplerExhausted("conditioned sampler exhausted its retry budget of " + std::to_string(m.opt.max_attempts) +
                             " attempts (acceptance rate " + std::to_string(acceptance_rate()) + ")",
                         acceptance_rate());
}

std::vector<PlantedTree> ConditionedSumSampler::split_forest(const Word& w, std::size_t k) {
  std::vector<PlantedTree> out;
  std::size_t start = 0;
  long long need = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (need == 0) {
      start = i;
      need = 1;
    }
    need += static_cast<long long>(w[i]) - 1;
    if (need == 0) out.push_back(PlantedTree{Word(w.begin() + static_cast<std::ptrdiff_t>(start),
                                                  w.begin() + static_cast<std::ptrdiff_t>(i) + 1)});
  }
  if (out.size() != k || need != 0) throw std::logic_error("forest word does not split into the expected trees");
  return out;
}

std::size_t ConditionedSumSampler::n() const { return impl_->n; }
std::size_t ConditionedSumSampler::trees() const { return impl_->k; }
bool ConditionedSumSampler::uses_big_jump() const { return impl_->big; }
std::size_t ConditionedSumSampler::big_jump_threshold() const { return impl_->L; }
double ConditionedSumSampler::acceptance_rate() const {
  return impl_->attempts ? static_cast<double>(impl_->accepted) / static_cast<double>(impl_->attempts) : 1.0;
}

PlantedTree sample_conditioned_gw(const WeightSequence& w, std::size_t n, RngStream& rng) {
  ConditionedSumSampler s(w, n, 1);
  return PlantedTree{s.sample(rng)};
}

std::pair<PlantedTree, PlantedTree> sample_pair_split(const WeightSequence& w, std::size_t n, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("pair split needs n >= 2");
  ConditionedSumSampler s(w, n, 2);
  auto trees = ConditionedSumSampler::split_forest(s.sample(rng), 2);
  return {std::move(trees[0]), std::move(trees[1])};
}

// ---------------------------------------------------------------------------

struct UnrootedExactSampler::Impl {
  WeightSequence w;
  std::size_t n = 0;
  SamplerOptions opt;
  long double p_labelled = 0.0L, p_vertex = 0.0L, p_edge = 0.0L;
  std::vector<VertexTerm> terms;
  std::vector<long double> term_cdf;
  std::unique_ptr<ConditionedSumSampler> pair, edge;
  std::map<std::pair<unsigned, std::size_t>, std::unique_ptr<ConditionedSumSampler>> vertex;
  int last = 0;
};

UnrootedExactSampler::UnrootedExactSampler(const WeightSequence& w, std::size_t n, SamplerOptions opt)
    : impl_(std::make_unique<Impl>()) {
  if (n < 2 || n > kMaxSize) {
    throw std::invalid_argument("exact unrooted sampler supports 2 <= n <= " + std::to_string(kMaxSize));
  }
  Impl& m = *impl_;
  m.w = w;
  m.n = n;
  m.opt = opt;
  UnrootedDecomposition dec = unrooted_decomposition(w, n);
  const Rational& z = dec.total[n];
  if (z == 0) throw InvariantError("no positive-weight unrooted tree of size " + std::to_string(n));
  m.p_labelled = to_long_double(dec.labelled[n] / z);
  m.p_vertex = to_long_double(dec.vertex[n] / z);
  m.p_edge = to_long_double(dec.edge[n] / z);
  if (dec.labelled[n] > 0) m.pair = std::make_unique<ConditionedSumSampler>(w, n, 2, opt);
  if (dec.edge[n] > 0) m.edge = std::make_unique<ConditionedSumSampler>(w.powered(2), n / 2, 1, opt);
  if (dec.vertex[n] > 0) {
    m.terms = vertex_terms(w, n);
    long double acc = 0.0L;
    for (const auto& t : m.terms) {
      acc += to_long_double(t.weight / dec.vertex[n]);
      m.term_cdf.push_back(acc);
    }
  }
}

UnrootedExactSampler::~UnrootedExactSampler() = default;
UnrootedExactSampler::UnrootedExactSampler(UnrootedExactSampler&&) noexcept = default;

UnrootedPlaneTree UnrootedExactSampler::sample(RngStream& rng) {
  Impl& m = *impl_;
  const long double u = static_cast<long double>(rng.uniform());
  if (u < m.p_labelled || (!m.edge && m.terms.empty())) {
    m.last = 0;
    auto trees = ConditionedSumSampler::split_forest(m.pair->sample(rng), 2);
    return UnrootedPlaneTree::join(trees[0], trees[1]);
  }
  if (u < m.p_labelled + m.p_edge || m.terms.empty()) {
    m.last = 2;
    PlantedTree p{m.edge->sample(rng)};
    return UnrootedPlaneTree::join(p, p);
  }
  m.last = 1;
  const long double v = static_cast<long double>(rng.uniform()) * m.term_cdf.back();
  std::size_t i = static_cast<std::size_t>(std::upper_bound(m.term_cdf.begin(), m.term_cdf.end(), v) - m.term_cdf.begin());
  if (i >= m.terms.size()) i = m.terms.size() - 1;
  const VertexTerm& t = m.terms[i];
  auto key = std::make_pair(t.d, t.j);
  auto it = m.vertex.find(key);
  if (it == m.vertex.end()) {
    it = m.vertex
             .emplace(key, std::make_unique<ConditionedSumSampler>(m.w.powered(t.d), (m.n - 1) / t.d, t.j, m.opt))
             .first;
  }
  Word forest = it->second->sample(rng);
  Word code;
  code.reserve(m.n);
  code.push_back(static_cast<std::uint32_t>(t.j * t.d));
  for (unsigned r = 0; r < t.d; ++r) code.insert(code.end(), forest.begin(), forest.end());
  return UnrootedPlaneTree::from_planted(PlantedTree{std::move(code)});
}

int UnrootedExactSampler::last_branch() const { return impl_->last; }

std::vector<long double> UnrootedExactSampler::branch_probabilities() const {
  return {impl_->p_labelled, impl_->p_vertex, impl_->p_edge};
}

UnrootedApproxSampler::UnrootedApproxSampler(const WeightSequence& w, std::size_t n, SamplerOptions opt)
    : pair_(w, n, 2, opt) {
  if (n < 2) throw std::invalid_argument("approximate sampler needs n >= 2");
}

std::pair<PlantedTree, PlantedTree> UnrootedApproxSampler::sample_pair(RngStream& rng) {
  auto trees = ConditionedSumSampler::split_forest(pair_.sample(rng), 2);
  if (trees[1].size() < trees[0].size()) std::swap(trees[0], trees[1]);
  return {std::move(trees[0]), std::move(trees[1])};
}

UnrootedPlaneTree UnrootedApproxSampler::sample(RngStream& rng) {
  auto [v, t] = sample_pair(rng);
  return UnrootedPlaneTree::join(v, t);
}

UnrootedPlaneTree sample_unrooted_exact(const WeightSequence& w, std::size_t n, RngStream& rng) {
  return UnrootedExactSampler(w, n).sample(rng);
}

UnrootedPlaneTree sample_unrooted_approx(const WeightSequence& w, std::size_t n, RngStream& rng) {
  return UnrootedApproxSampler(w, n).sample(rng);
}

}  // namespace sgt
