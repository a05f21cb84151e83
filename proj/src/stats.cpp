#include "sgtree/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace sgt {

namespace {

// Farthest vertex from src and its distance.
std::pair<std::uint32_t, std::size_t> bfs_far(const UnrootedPlaneTree& u, std::uint32_t src,
                                              std::vector<std::uint32_t>& dist, std::vector<std::uint32_t>& queue) {
  const auto& off = u.offsets();
  const auto& nb = u.neighbors();
  const std::uint32_t unseen = std::numeric_limits<std::uint32_t>::max();
  std::fill(dist.begin(), dist.end(), unseen);
  queue.clear();
  queue.push_back(src);
  dist[src] = 0;
  std::uint32_t last = src;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    std::uint32_t v = queue[h];
    last = v;
    for (std::uint32_t e = off[v]; e < off[v + 1]; ++e) {
      if (dist[nb[e]] == unseen) {
        dist[nb[e]] = dist[v] + 1;
        queue.push_back(nb[e]);
      }
    }
  }
  return {last, dist[last]};
}

// Word of the ball below the directed entry e = (parent -> v), depth counted from the centre.
void encode_below(const UnrootedPlaneTree& u, std::uint32_t e, unsigned depth, unsigned limit, Word& out) {
  const auto& off = u.offsets();
  const auto& nb = u.neighbors();
  const auto& rev = u.reverse();
  const std::uint32_t v = nb[e];
  if (depth == limit) {
    out.push_back(0);
    return;
  }
  const std::uint32_t deg = off[v + 1] - off[v];
  out.push_back(deg - 1);
  const std::uint32_t back = rev[e] - off[v];
  for (std::uint32_t i = 1; i < deg; ++i) encode_below(u, off[v] + (back + i) % deg, depth + 1, limit, out);
}

double median(std::vector<double> x) {
  if (x.empty()) return 0.0;
  std::sort(x.begin(), x.end());
  const std::size_t m = x.size() / 2;
  return x.size() % 2 ? x[m] : 0.5 * (x[m - 1] + x[m]);
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, worst = 0.0;
  std::size_t points = 0;
};

// Least squares of log p against u over the points with p <= hi.
LineFit fit_line(const std::vector<double>& us, const std::vector<double>& ps, double hi) {
  LineFit f;
  std::vector<double> u, y;
  for (std::size_t i = 0; i < us.size(); ++i) {
    if (ps[i] <= hi) {
      u.push_back(us[i]);
      y.push_back(std::log(ps[i]));
    }
  }
  f.points = u.size();
  if (u.size() < 3) return f;
  const double k = static_cast<double>(u.size());
  const double mu = std::accumulate(u.begin(), u.end(), 0.0) / k;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
  double suu = 0.0, suy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suy += (u[i] - mu) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = suu > 0.0 ? suy / suu : 0.0;
  f.intercept = my - f.slope * mu;
  double ssr = 0.0;
  f.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double res = y[i] - (f.intercept + f.slope * u[i]);
    ssr += res * res;
    f.worst = std::max(f.worst, res);
  }
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 0.0;
  return f;
}

OffspringDistribution critical_law(const WeightSequence& w, const char* who) {
  OffspringDistribution xi = offspring_distribution(w, 64);
  if (xi.criticality != Criticality::critical) {
    throw InvariantError(std::string(who) + ": requires a critical offspring law (mu = 1)");
  }
  if (!std::isfinite(static_cast<double>(xi.sigma2))) {
    throw InvariantError(std::string(who) + ": requires finite offspring variance");
  }
  return xi;
}

}  // namespace

std::size_t diameter(const UnrootedPlaneTree& u) {
  if (u.size() <= 1) return 0;
  std::vector<std::uint32_t> dist(u.size()), queue;
  queue.reserve(u.size());
  auto a = bfs_far(u, 0, dist, queue).first;
  return bfs_far(u, a, dist, queue).second;
}

std::string neighborhood_code(const UnrootedPlaneTree& u, std::uint32_t v, unsigned l) {
  if (v >= u.size()) throw std::out_of_range("vertex out of range");
  const auto& off = u.offsets();
  const std::uint32_t deg = off[v + 1] - off[v];
  std::vector<Word> kids(deg);
  for (std::uint32_t i = 0; i < deg; ++i) encode_below(u, off[v] + i, 1, l + 1, kids[i]);
  // minimal rotation of the child words
  auto less_rot = [&](std::uint32_t a, std::uint32_t b) {
    for (std::uint32_t i = 0; i < deg; ++i) {
      const Word& x = kids[(a + i) % deg];
      const Word& y = kids[(b + i) % deg];
      if (x != y) return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    }
    return false;
  };
  std::uint32_t best = 0;
  for (std::uint32_t r = 1; r < deg; ++r) {
    if (less_rot(r, best)) best = r;
  }
  Word code{deg};
  for (std::uint32_t i = 0; i < deg; ++i) {
    const Word& k = kids[(best + i) % deg];
    code.insert(code.end(), k.begin(), k.end());
  }
  return word_string(code);
}

SampleReport measure(const UnrootedPlaneTree& u, RngStream& rng, unsigned max_radius, bool census) {
  SampleReport r;
  r.n = u.size();
  r.diameter = diameter(u);
  r.height_from_center = (r.diameter + 1) / 2;
  for (std::uint32_t v = 0; v < u.size(); ++v) {
    const std::uint32_t d = u.degree(v);
    ++r.degree_hist[d];
    if (d > r.max_degree) {
      r.second_max_degree = r.max_degree;
      r.max_degree = d;
    } else if (d > r.second_max_degree) {
      r.second_max_degree = d;
    }
  }
  if (census && u.size() > 0) {
    const auto v = static_cast<std::uint32_t>(rng.below(u.size()));
    for (unsigned l = 0; l <= max_radius; ++l) ++r.neighborhood_codes[{l, neighborhood_code(u, v, l)}];
  }
  return r;
}

void StatsSummary::add(const SampleReport& r) {
  ++samples;
  n = r.n;
  const double d = static_cast<double>(r.diameter);
  diameter_sum += d;
  diameter_sq_sum += d * d;
  ++diameter_hist[r.diameter];
  for (const auto& [k, c] : r.degree_hist) degree_hist[k] += c;
  for (const auto& [k, c] : r.neighborhood_codes) neighborhood_codes[k] += c;
}

void StatsSummary::merge(const StatsSummary& o) {
  samples += o.samples;
  if (o.n) n = o.n;
  diameter_sum += o.diameter_sum;
  diameter_sq_sum += o.diameter_sq_sum;
  for (const auto& [k, c] : o.diameter_hist) diameter_hist[k] += c;
  for (const auto& [k, c] : o.degree_hist) degree_hist[k] += c;
  for (const auto& [k, c] : o.neighborhood_codes) neighborhood_codes[k] += c;
}

double StatsSummary::mean_diameter() const { return samples ? diameter_sum / static_cast<double>(samples) : 0.0; }

double StatsSummary::sd_diameter() const {
  if (samples < 2) return 0.0;
  const double m = mean_diameter();
  const double s = static_cast<double>(samples);
  return std::sqrt(std::max(0.0, (diameter_sq_sum - s * m * m) / (s - 1.0)));
}

SamplerMode parse_sampler_mode(const std::string& s) {
  if (s == "exact") return SamplerMode::exact;
  if (s == "approx") return SamplerMode::approx;
  if (s == "planted") return SamplerMode::planted;
  if (s == "pair") return SamplerMode::pair;
  throw std::invalid_argument("unknown sampler mode '" + s + "'");
}

std::string sampler_mode_name(SamplerMode m) {
  switch (m) {
    case SamplerMode::exact: return "exact";
    case SamplerMode::approx: return "approx";
    case SamplerMode::planted: return "planted";
    case SamplerMode::pair: return "pair";
  }
  return "?";
}

SamplerMode default_unrooted_mode(std::size_t n) {
  return n <= UnrootedExactSampler::kMaxSize ? SamplerMode::exact : SamplerMode::approx;
}

void for_each_sample(const WeightSequence& w, std::size_t n, std::size_t count, SamplerMode mode,
                     const RngStream& base, unsigned threads,
                     const std::function<void(std::size_t, const UnrootedPlaneTree&, RngStream&)>& fn) {
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  auto worker = [&](unsigned t) {
    std::function<UnrootedPlaneTree(RngStream&)> draw;
    std::unique_ptr<UnrootedExactSampler> ex;
    std::unique_ptr<UnrootedApproxSampler> ap;
    std::unique_ptr<ConditionedSumSampler> cs;
    switch (mode) {
      case SamplerMode::exact:
        ex = std::make_unique<UnrootedExactSampler>(w, n);
        draw = [&](RngStream& r) { return ex->sample(r); };
        break;
      case SamplerMode::approx:
        ap = std::make_unique<UnrootedApproxSampler>(w, n);
        draw = [&](RngStream& r) { return ap->sample(r); };
        break;
      case SamplerMode::planted:
        cs = std::make_unique<ConditionedSumSampler>(w, n, 1);
        draw = [&](RngStream& r) { return UnrootedPlaneTree::from_planted(PlantedTree{cs->sample(r)}); };
        break;
      case SamplerMode::pair:
        cs = std::make_unique<ConditionedSumSampler>(w, n, 2);
        draw = [&](RngStream& r) {
          auto trees = ConditionedSumSampler::split_forest(cs->sample(r), 2);
          return UnrootedPlaneTree::join(trees[0], trees[1]);
        };
        break;
    }
    for (std::size_t i = t; i < count; i += threads) {
      RngStream r = base.fork(i);
      UnrootedPlaneTree u = draw(r);
      fn(i, u, r);
    }
  };

  if (threads == 1) {
    worker(0);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        worker(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

ChiSquareResult chi_square_gof(const std::map<Word, std::uint64_t>& observed, const ExactLaw& law) {
  ChiSquareResult res;
  double total = 0.0;
  for (const auto& [k, c] : observed) {
    total += static_cast<double>(c);
    auto it = law.probs.find(k);
    if (it == law.probs.end() || it->second == 0) ++res.unexpected_atoms;
  }
  if (res.unexpected_atoms) {
    res.p_value = 0.0;
    return res;
  }
  std::vector<std::pair<double, double>> cells;  // (expected, observed)
  for (const auto& [k, p] : law.probs) {
    if (p == 0) continue;
    auto it = observed.find(k);
    cells.emplace_back(static_cast<double>(to_long_double(p)) * total,
                       it == observed.end() ? 0.0 : static_cast<double>(it->second));
  }
  std::sort(cells.begin(), cells.end());
  std::vector<std::pair<double, double>> merged;
  std::pair<double, double> pool{0.0, 0.0};
  for (const auto& c : cells) {
    pool.first += c.first;
    pool.second += c.second;
    if (pool.first >= 5.0) {
      merged.push_back(pool);
      pool = {0.0, 0.0};
    }
  }
  if (pool.first > 0.0) {
    if (merged.empty()) {
      merged.push_back(pool);
    } else {
      merged.back().first += pool.first;
      merged.back().second += pool.second;
    }
  }
  res.cells = merged.size();
  for (const auto& [e, o] : merged) res.statistic += (o - e) * (o - e) / e;
  if (merged.size() < 2) return res;
  res.df = merged.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(res.df));
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  return res;
}

NormalityResult anderson_darling_normal(std::vector<double> x) {
  NormalityResult r;
  const std::size_t n = x.size();
  if (n < 8) throw std::invalid_argument("Anderson-Darling needs at least 8 observations");
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) {
    r.a2 = r.a2_star = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  std::sort(x.begin(), x.end());
  boost::math::normal N;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = boost::math::cdf(N, (x[i] - mean) / sd);
    double hi = boost::math::cdf(boost::math::complement(N, (x[n - 1 - i] - mean) / sd));
    lo = std::max(lo, 1e-300);
    hi = std::max(hi, 1e-300);
    s += (2.0 * static_cast<double>(i) + 1.0) * (std::log(lo) + std::log(hi));
  }
  const double nn = static_cast<double>(n);
  r.a2 = -nn - s / nn;
  const double a = r.a2 * (1.0 + 0.75 / nn + 2.25 / (nn * nn));
  r.a2_star = a;
  if (a >= 0.6) {
    r.p_value = std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  } else if (a >= 0.34) {
    r.p_value = std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  } else if (a >= 0.2) {
    r.p_value = 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  } else {
    r.p_value = 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
  }
  r.p_value = std::clamp(r.p_value, 0.0, 1.0);
  return r;
}

double empirical_tv(const std::map<Word, std::uint64_t>& observed, const std::map<Word, long double>& law) {
  long double total = 0.0L;
  for (const auto& [k, c] : observed) total += static_cast<long double>(c);
  long double tv = 0.0L;
  for (const auto& [k, p] : law) {
    auto it = observed.find(k);
    long double ph = it == observed.end() || total == 0.0L ? 0.0L : static_cast<long double>(it->second) / total;
    tv += std::fabs(ph - p);
  }
  for (const auto& [k, c] : observed) {
    if (!law.count(k)) tv += static_cast<long double>(c) / total;
  }
  return static_cast<double>(tv / 2.0L);
}

std::map<Word, long double> boltzmann_law(const WeightSequence& w, std::size_t max_size) {
  OffspringDistribution xi = offspring_distribution(w, 64);
  const long double tau = xi.tau.value;
  const long double log_rho = std::log(tau) - std::log(xi.phi_tau);
  std::map<Word, long double> out;
  for (std::size_t k = 1; k <= max_size; ++k) {
    for (const auto& t : enumerate_planted(k, w)) {
      out[t.code] = std::exp(log_tree_weight(t, w) + static_cast<long double>(k) * log_rho - std::log(tau));
    }
  }
  return out;
}

DegreeCltReport degree_clt_check(const WeightSequence& w, std::uint32_t d, std::size_t n, std::size_t batches,
                                 const RngStream& rng, unsigned threads, double alpha) {
  if (d == 0) throw std::invalid_argument("degree must be at least 1");
  OffspringDistribution xi = critical_law(w, "degree_clt_check");
  DegreeCltReport r;
  r.d = d;
  r.n = n;
  r.batches = batches;
  r.mode = default_unrooted_mode(n);
  r.p_d = static_cast<double>(xi.pmf(d - 1));
  std::vector<std::uint64_t> counts(batches, 0);
  for_each_sample(w, n, batches, r.mode, rng, threads, [&](std::size_t i, const UnrootedPlaneTree& u, RngStream&) {
    std::uint64_t c = 0;
    for (std::uint32_t v = 0; v < u.size(); ++v) c += u.degree(v) == d;
    counts[i] = c;
  });
  const double nn = static_cast<double>(n);
  double sum_f = 0.0, sum_dev = 0.0;
  for (auto c : counts) {
    const double f = static_cast<double>(c) / nn;
    sum_f += f;
    sum_dev += std::fabs(f - r.p_d);
    r.standardized.push_back((static_cast<double>(c) - nn * r.p_d) / std::sqrt(nn));
  }
  const double b = static_cast<double>(batches);
  r.mean_fraction = sum_f / b;
  r.mean_abs_deviation = sum_dev / b;
  r.mean_z = std::accumulate(r.standardized.begin(), r.standardized.end(), 0.0) / b;
  double ss = 0.0;
  for (double z : r.standardized) ss += (z - r.mean_z) * (z - r.mean_z);
  r.sd_z = batches > 1 ? std::sqrt(ss / (b - 1.0)) : 0.0;
  r.mean_within_band = std::fabs(r.mean_z) <= 4.0 * r.sd_z / std::sqrt(b);
  if (batches >= 8) {
    r.normality = anderson_darling_normal(r.standardized);
    r.normal = r.normality.p_value >= alpha;
  }
  return r;
}

DiameterTailReport diameter_tail_check(const WeightSequence& w, std::size_t n, std::size_t samples,
                                       const RngStream& rng, unsigned threads) {
  critical_law(w, "diameter_tail_check");
  DiameterTailReport r;
  r.n = n;
  r.samples = samples;
  r.mode = default_unrooted_mode(n);
  std::vector<std::size_t> diam(samples, 0);
  for_each_sample(w, n, samples, r.mode, rng, threads,
                  [&](std::size_t i, const UnrootedPlaneTree& u, RngStream&) { diam[i] = diameter(u); });
  const double s = static_cast<double>(samples);
  double sum = 0.0, sq = 0.0;
  std::size_t mx = 0;
  for (auto d : diam) {
    sum += static_cast<double>(d);
    sq += static_cast<double>(d) * static_cast<double>(d);
    mx = std::max(mx, d);
  }
  r.mean_diameter = sum / s;
  r.sd_diameter = samples > 1 ? std::sqrt(std::max(0.0, (sq - s * r.mean_diameter * r.mean_diameter) / (s - 1.0))) : 0.0;

  std::vector<std::uint64_t> hist(mx + 2, 0);
  for (auto d : diam) ++hist[d];
  std::uint64_t above = samples;  // #{D >= x}
  std::vector<double> us, ys;
  for (std::size_t x = 0; x <= mx + 1; ++x) {
    const double p = static_cast<double>(above) / s;
    r.exceedance.emplace_back(x, p);
    if (p >= 10.0 / s) {
      us.push_back(static_cast<double>(x) * static_cast<double>(x) / static_cast<double>(n));
      ys.push_back(p);
    }
    if (x <= mx) above -= hist[x];
  }
  auto tail = [&](double hi, double& b, double& r2) {
    LineFit f = fit_line(us, ys, hi);
    b = -f.slope;
    r2 = f.r2;
    return f;
  };
  tail(1.0, r.fit_b_full, r.r2_full);
  LineFit f = tail(0.5, r.fit_b, r.r2);
  r.fit_points = f.points;
  r.fit_a = f.intercept;
  r.upper_a = f.intercept + std::max(0.0, f.worst);
  return r;
}

bool MaxDegreeReport::passed(double tol) const {
  return bounded && std::fabs(median_ratio - (1.0 - nu)) <= tol;
}

MaxDegreeReport max_degree_check(const WeightSequence& w, std::size_t n, std::size_t samples, const RngStream& rng,
                                 unsigned threads) {
  if (w.family() != Family::power) throw InvariantError("max_degree_check: requires a power-law weight family");
  OffspringDistribution xi = offspring_distribution(w, 64);
  if (xi.criticality != Criticality::subcritical) {
    throw InvariantError("max_degree_check: requires a subcritical offspring law (mu < 1)");
  }
  MaxDegreeReport r;
  r.n = n;
  r.samples = samples;
  r.nu = static_cast<double>(xi.nu);
  r.mode = default_unrooted_mode(n);
  std::vector<double> ratio(samples), second(samples);
  std::vector<char> ok(samples, 1);
  for_each_sample(w, n, samples, r.mode, rng, threads, [&](std::size_t i, const UnrootedPlaneTree& u, RngStream&) {
    std::uint32_t a = 0, b = 0;
    for (std::uint32_t v = 0; v < u.size(); ++v) {
      const std::uint32_t d = u.degree(v);
      if (d > a) {
        b = a;
        a = d;
      } else if (d > b) {
        b = d;
      }
    }
    ratio[i] = static_cast<double>(a) / static_cast<double>(n);
    second[i] = static_cast<double>(b) / static_cast<double>(a);
    ok[i] = a <= n - 1;
  });
  r.bounded = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  r.median_ratio = median(ratio);
  r.median_second_ratio = median(second);
  r.mean_second_ratio = std::accumulate(second.begin(), second.end(), 0.0) / static_cast<double>(samples);
  return r;
}

NeighborhoodCensusReport neighborhood_census_check(const WeightSequence& w, unsigned radius,
                                                   const std::vector<std::size_t>& sizes, std::size_t samples,
                                                   const RngStream& rng, unsigned threads) {
  critical_law(w, "neighborhood_census_check");
  if (radius > 3) throw std::invalid_argument("neighbourhood radius must be at most 3");
  NeighborhoodCensusReport r;
  r.radius = radius;
  r.sizes = sizes;
  r.samples = samples;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    std::vector<std::string> codes(samples);
    for_each_sample(w, sizes[si], samples, default_unrooted_mode(sizes[si]), rng.fork(si), threads,
                    [&](std::size_t i, const UnrootedPlaneTree& u, RngStream& rs) {
                      codes[i] = neighborhood_code(u, static_cast<std::uint32_t>(rs.below(u.size())), radius);
                    });
    std::map<std::string, double> freq;
    for (const auto& c : codes) freq[c] += 1.0 / static_cast<double>(samples);
    r.census.push_back(std::move(freq));
  }
  for (std::size_t i = 1; i < r.census.size(); ++i) {
    double tv = 0.0;
    const auto& a = r.census[i - 1];
    const auto& b = r.census[i];
    for (const auto& [k, p] : a) {
      auto it = b.find(k);
      tv += std::fabs(p - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [k, p] : b) {
      if (!a.count(k)) tv += p;
    }
    r.tv_consecutive.push_back(tv / 2.0);
  }
  for (std::size_t i = 1; i < r.tv_consecutive.size(); ++i) {
    if (!(r.tv_consecutive[i] < r.tv_consecutive[i - 1])) r.decreasing = false;
  }
  return r;
}

}  // namespace sgt
