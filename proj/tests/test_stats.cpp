#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracle.hpp"
#include "sgtree/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

using namespace sgt;

namespace {

std::vector<Word> words(std::size_t n) {
  std::vector<Word> ws;
  oracle::words(n, ws);
  return ws;
}

// Ball around v cut at depth `depth`, children starting at neighbour i.
Word ball(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t v, std::size_t i, unsigned depth) {
  Word out;
  std::function<void(std::uint32_t, std::uint32_t, unsigned)> rec = [&](std::uint32_t x, std::uint32_t parent,
                                                                      unsigned level) {
    const auto& nb = adj[x];
    if (level == depth) {
      out.push_back(0);
      return;
    }
    const std::size_t d = nb.size();
    const std::size_t start = static_cast<std::size_t>(std::find(nb.begin(), nb.end(), parent) - nb.begin());
    out.push_back(static_cast<std::uint32_t>(d - 1));
    for (std::size_t k = 1; k < d; ++k) rec(nb[(start + k) % d], x, level + 1);
  };
  const auto& nb = adj[v];
  out.push_back(static_cast<std::uint32_t>(nb.size()));
  for (std::size_t k = 0; k < nb.size(); ++k) rec(nb[(i + k) % nb.size()], v, 1);
  return out;
}

std::string reference_code(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t v, unsigned l) {
  Word best;
  for (std::size_t i = 0; i < std::max<std::size_t>(adj[v].size(), 1); ++i) {
    auto b = ball(adj, v, i, l + 1);
    if (best.empty() || b < best) best = b;
  }
  return word_string(best);
}

}  // namespace

TEST_CASE("diameter against eccentricities") {
  for (std::size_t n = 1; n <= 8; ++n) {
    for (auto& w : words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto ecc = oracle::eccentricities(oracle::adjacency(w));
      CHECK(diameter(u) == *std::max_element(ecc.begin(), ecc.end()));
    }
  }
  CHECK(diameter(UnrootedPlaneTree::from_planted(make_planted({1, 1, 1, 1, 0}))) == 4);
  CHECK(diameter(UnrootedPlaneTree::from_planted(make_planted({4, 0, 0, 0, 0}))) == 2);
}

TEST_CASE("neighbourhood codes against a depth-limited rooting") {
  for (std::size_t n = 2; n <= 8; ++n) {
    for (auto& w : words(n)) {
      auto u = UnrootedPlaneTree::from_planted(make_planted(w));
      auto adj = oracle::adjacency(w);
      for (std::uint32_t v = 0; v < n; ++v)
        for (unsigned l = 0; l <= 2; ++l) CHECK(neighborhood_code(u, v, l) == reference_code(adj, v, l));
    }
  }
  auto star = UnrootedPlaneTree::from_planted(make_planted({3, 0, 0, 0}));
  CHECK(neighborhood_code(star, 0, 0) == "3,0,0,0");
  CHECK(neighborhood_code(star, 1, 0) == "1,0");
  CHECK(neighborhood_code(star, 1, 1) == "1,2,0,0");
  CHECK_THROWS(neighborhood_code(star, 9, 0));
}

TEST_CASE("measure") {
  auto u = UnrootedPlaneTree::from_planted(make_planted({3, 1, 0, 0, 2, 0, 0}));
  RngStream r(1, 1);
  auto rep = measure(u, r, 2);
  CHECK(rep.n == 7);
  CHECK(rep.diameter == 4);
  CHECK(rep.height_from_center == 2);
  CHECK(rep.max_degree == 3);
  CHECK(rep.second_max_degree == 3);
  std::uint64_t total = 0, ends = 0;
  for (auto& [d, c] : rep.degree_hist) {
    total += c;
    ends += d * c;
  }
  CHECK(total == 7);
  CHECK(ends == 12);
  CHECK(rep.neighborhood_codes.size() == 3);
  CHECK(measure(u, r, 2, false).neighborhood_codes.empty());
  // odd diameter: the centre is an edge
  auto p = measure(UnrootedPlaneTree::from_planted(make_planted({1, 1, 1, 0})), r, 0);
  CHECK(p.diameter == 3);
  CHECK(p.height_from_center == 2);
}

TEST_CASE("summary merge is associative") {
  auto w = WeightSequence::geometric(Rational(1));
  std::vector<SampleReport> reps;
  RngStream base(5, 0);
  for_each_sample(w, 30, 9, SamplerMode::exact, base, 1, [&](std::size_t, const UnrootedPlaneTree& u, RngStream& rs) {
    reps.push_back(measure(u, rs));
  });
  StatsSummary a, b, c, all;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    all.add(reps[i]);
    (i < 3 ? a : i < 6 ? b : c).add(reps[i]);
  }
  StatsSummary left = a, right = b;
  left.merge(b);
  left.merge(c);
  right.merge(c);
  StatsSummary r2 = a;
  r2.merge(right);
  for (auto* s : {&left, &r2}) {
    CHECK(s->samples == all.samples);
    CHECK(s->diameter_hist == all.diameter_hist);
    CHECK(s->degree_hist == all.degree_hist);
    CHECK(s->neighborhood_codes == all.neighborhood_codes);
    CHECK(s->mean_diameter() == doctest::Approx(all.mean_diameter()));
  }
}

TEST_CASE("sampling does not depend on the thread count") {
  auto w = WeightSequence::geometric(Rational(1, 3));
  for (auto mode : {SamplerMode::exact, SamplerMode::approx, SamplerMode::planted, SamplerMode::pair}) {
    std::vector<Word> one(40), four(40);
    RngStream base(77, 3);
    for_each_sample(w, 25, 40, mode, base, 1,
                    [&](std::size_t i, const UnrootedPlaneTree& u, RngStream&) { one[i] = canonicalize(u); });
    for_each_sample(w, 25, 40, mode, base, 4,
                    [&](std::size_t i, const UnrootedPlaneTree& u, RngStream&) { four[i] = canonicalize(u); });
    CHECK(one == four);
  }
}

TEST_CASE("sampler modes") {
  for (auto m : {SamplerMode::exact, SamplerMode::approx, SamplerMode::planted, SamplerMode::pair})
    CHECK(parse_sampler_mode(sampler_mode_name(m)) == m);
  CHECK_THROWS(parse_sampler_mode("fast"));
  CHECK(default_unrooted_mode(512) == SamplerMode::exact);
  CHECK(default_unrooted_mode(513) == SamplerMode::approx);
}

TEST_CASE("chi-square") {
  ExactLaw law;
  law.probs[{0}] = Rational(1, 2);
  law.probs[{1, 0}] = Rational(1, 4);
  law.probs[{2, 0, 0}] = Rational(1, 4);
  std::map<Word, std::uint64_t> obs{{{0}, 520}, {{1, 0}, 230}, {{2, 0, 0}, 250}};
  auto r = chi_square_gof(obs, law);
  const double stat = 20.0 * 20 / 500 + 20.0 * 20 / 250 + 0.0;
  CHECK(r.statistic == doctest::Approx(stat));
  CHECK(r.df == 2);
  boost::math::chi_squared d(2);
  CHECK(r.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(d, stat))));

  // small cells are pooled
  law.probs.clear();
  law.probs[{0}] = Rational(998, 1000);
  law.probs[{1, 0}] = Rational(1, 1000);
  law.probs[{2, 0, 0}] = Rational(1, 1000);
  auto pooled = chi_square_gof({{{0}, 999}, {{1, 0}, 1}}, law);
  CHECK(pooled.cells == 1);

  auto bad = chi_square_gof({{{3, 0, 0, 0}, 1}}, law);
  CHECK(bad.unexpected_atoms == 1);
  CHECK(bad.p_value == 0.0);
}

TEST_CASE("anderson-darling") {
  std::vector<double> normal, expo;
  boost::math::normal nd;
  boost::math::exponential ed;
  for (int i = 1; i <= 400; ++i) {
    normal.push_back(boost::math::quantile(nd, (i - 0.5) / 400));
    expo.push_back(boost::math::quantile(ed, (i - 0.5) / 400));
  }
  CHECK(anderson_darling_normal(normal).p_value > 0.5);
  CHECK(anderson_darling_normal(expo).p_value < 0.01);
  CHECK_THROWS(anderson_darling_normal({1, 2, 3}));
  CHECK(anderson_darling_normal(std::vector<double>(20, 1.0)).p_value == 0.0);
}

TEST_CASE("empirical tv") {
  std::map<Word, long double> law{{{0}, 0.5L}, {{1, 0}, 0.5L}};
  CHECK(empirical_tv({{{0}, 5}, {{1, 0}, 5}}, law) == doctest::Approx(0.0));
  CHECK(empirical_tv({{{0}, 10}}, law) == doctest::Approx(0.5));
  CHECK(empirical_tv({{{2, 0, 0}, 10}}, law) == doctest::Approx(1.0));
}

TEST_CASE("boltzmann law for omega = 1") {
  // rho = 1/4, T(rho) = 1/2: P(t) = 2 * 4^-|t|
  auto law = boltzmann_law(WeightSequence::geometric(Rational(1)), 6);
  CHECK(static_cast<double>(law.at({0})) == doctest::Approx(0.5));
  CHECK(static_cast<double>(law.at({1, 0})) == doctest::Approx(0.125));
  CHECK(static_cast<double>(law.at({2, 0, 0})) == doctest::Approx(2.0 / 64));
  std::size_t atoms = 0;
  long double mass = 0;
  for (auto& [k, p] : law) {
    ++atoms;
    mass += p;
  }
  CHECK(atoms == 1 + 1 + 2 + 5 + 14 + 42);
  long double ref = 0;
  const int catalan[] = {1, 1, 2, 5, 14, 42};
  for (int k = 1; k <= 6; ++k) ref += 2.0L * catalan[k - 1] * std::pow(0.25L, k);
  CHECK(static_cast<double>(mass) == doctest::Approx(static_cast<double>(ref)));
}

TEST_CASE("degree clt report") {
  auto rep = degree_clt_check(WeightSequence::geometric(Rational(1)), 1, 2000, 60, RngStream(3, 0));
  CHECK(rep.p_d == doctest::Approx(0.5));
  CHECK(rep.standardized.size() == 60);
  CHECK(std::abs(rep.mean_fraction - 0.5) < 0.01);
  CHECK(rep.mean_abs_deviation < 0.03);
  // N_1 / n - p_d = z / sqrt(n)
  double mad = 0;
  for (double z : rep.standardized) mad += std::abs(z) / std::sqrt(2000.0);
  CHECK(rep.mean_abs_deviation == doctest::Approx(mad / 60));
  auto again = degree_clt_check(WeightSequence::geometric(Rational(1)), 1, 2000, 60, RngStream(3, 0), 3);
  CHECK(again.standardized == rep.standardized);
}

TEST_CASE("diameter tail report") {
  auto rep = diameter_tail_check(WeightSequence::geometric(Rational(1)), 400, 3000, RngStream(4, 0));
  REQUIRE_FALSE(rep.exceedance.empty());
  CHECK(rep.exceedance.front().second == doctest::Approx(1.0));
  for (std::size_t i = 1; i < rep.exceedance.size(); ++i)
    CHECK(rep.exceedance[i].second <= rep.exceedance[i - 1].second);
  CHECK(rep.exceedance.back().second == 0.0);
  CHECK(rep.fit_b > 0.0);
  CHECK(rep.fit_points >= 3);
  CHECK(rep.upper_a >= rep.fit_a);
  // mean diameter of order sqrt(n)
  CHECK(rep.mean_diameter / std::sqrt(400.0) > 1.0);
  CHECK(rep.mean_diameter / std::sqrt(400.0) < 4.0);
}

TEST_CASE("max degree report") {
  auto rep = max_degree_check(WeightSequence::power(3.0), 2000, 100, RngStream(5, 0));
  CHECK(rep.nu == doctest::Approx(0.368433).epsilon(1e-5));
  CHECK(rep.bounded);
  CHECK(std::abs(rep.median_ratio - (1 - rep.nu)) < 0.1);
  CHECK(rep.median_second_ratio < 0.2);
  CHECK_THROWS(max_degree_check(WeightSequence::geometric(Rational(1)), 100, 10, RngStream(5, 0)));
}

TEST_CASE("neighbourhood census") {
  auto rep = neighborhood_census_check(WeightSequence::geometric(Rational(1)), 0, {50, 200, 800}, 2000,
                                       RngStream(6, 0));
  REQUIRE(rep.census.size() == 3);
  REQUIRE(rep.tv_consecutive.size() == 2);
  // radius 0 is the degree law: P(deg 1) -> 1/2
  CHECK(std::abs(rep.census[2].at("1,0") - 0.5) < 0.05);
  for (auto& c : rep.census) {
    double s = 0;
    for (auto& [k, p] : c) s += p;
    CHECK(s == doctest::Approx(1.0));
  }
}
