#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sgtree/certified.hpp"
#include "sgtree/weights.hpp"
#include "sgtree/weights_io.hpp"

#include <boost/math/special_functions/zeta.hpp>

#include <cmath>
#include <fstream>

using namespace sgt;

namespace {

WeightSequence ones() { return WeightSequence::geometric(Rational(1)); }
WeightSequence binary() { return WeightSequence::explicit_list({1, 0, 1}); }

// Psi(t) = t Phi'(t) / Phi(t) by direct summation, for the bisection oracle.
long double psi_direct(const WeightSequence& w, long double t, std::size_t K) {
  long double s = 0, ds = 0;
  for (std::size_t k = 0; k <= K; ++k) {
    const long double a = w.weight(k) * std::pow(t, static_cast<long double>(k));
    s += a;
    ds += k * a;
  }
  return ds / s;
}

}  // namespace

TEST_CASE("explicit weights and accessors") {
  auto w = binary();
  CHECK(w.family() == Family::explicit_list);
  CHECK(w.weight_exact(0) == 1);
  CHECK(w.weight_exact(1) == 0);
  CHECK(w.weight_exact(2) == 1);
  CHECK(w.weight_exact(7) == 0);
  CHECK(w.max_index() == std::optional<std::size_t>(2));
  CHECK(w.exact());
  CHECK(w.has_branching());
  CHECK_FALSE(WeightSequence::explicit_list({1, 1}).has_branching());
  CHECK(std::isinf(static_cast<double>(w.radius())));
}

TEST_CASE("parametric families") {
  auto g = WeightSequence::geometric(Rational(1, 3));
  CHECK(g.weight_exact(3) == Rational(1, 27));
  CHECK_FALSE(g.finite_support());
  CHECK(static_cast<double>(g.radius()) == doctest::Approx(3.0));

  auto p = WeightSequence::poisson(Rational(2));
  CHECK(p.weight_exact(3) == Rational(4, 3));

  auto b = WeightSequence::power(3.0);
  CHECK(b.weight_exact(1) == Rational(1, 8));
  CHECK(b.weight_exact(3) == Rational(1, 64));
  CHECK(static_cast<double>(b.radius()) == doctest::Approx(1.0));

  auto bt = WeightSequence::power(3.0, 20);
  CHECK(bt.positive(20));
  CHECK_FALSE(bt.positive(21));
  CHECK(bt.max_index() == std::optional<std::size_t>(20));
}

TEST_CASE("span") {
  CHECK(compute_span(ones()) == 1);
  CHECK(compute_span(binary()) == 2);
  CHECK(compute_span(WeightSequence::explicit_list({1, 0, 0, 1})) == 3);
  CHECK(compute_span(WeightSequence::explicit_list({1, 0, 1, 0, 1})) == 2);
  CHECK(compute_span(WeightSequence::explicit_list({1, 0, 1, 1})) == 1);
  // no branching, or no leaves
  CHECK_THROWS(compute_span(WeightSequence::explicit_list({1, 1})));
  CHECK_THROWS(compute_span(WeightSequence::explicit_list({0, 1, 1})));
}

TEST_CASE("invalid sequences are rejected") {
  CHECK_THROWS(WeightSequence::explicit_list({}));
  CHECK_THROWS(WeightSequence::explicit_list({Rational(-1), 1}));
  CHECK_THROWS(WeightSequence::geometric(Rational(-1)));
  CHECK_THROWS(WeightSequence::poisson(Rational(-1)));
}

TEST_CASE("tilt") {
  auto t = tilt(binary(), Rational(1, 2), Rational(1));
  CHECK(t.weight_exact(0) == Rational(1, 2));
  CHECK(t.weight_exact(1) == 0);
  CHECK(t.weight_exact(2) == Rational(1, 2));

  auto g = tilt(ones(), Rational(3), Rational(1, 2));
  for (std::size_t k = 0; k < 6; ++k) CHECK(g.weight_exact(k) == 3 * pow_rational(Rational(1, 2), k));
}

TEST_CASE("powered weights") {
  auto p = WeightSequence::geometric(Rational(1, 3)).powered(2);
  CHECK(p.weight_exact(2) == Rational(1, 81));
  auto b = WeightSequence::power(3.0, 20).powered(3);
  CHECK(b.weight_exact(1) == Rational(1, 512));
  CHECK_FALSE(b.positive(21));
}

TEST_CASE("offspring law of the binary sequence") {
  auto xi = offspring_distribution(binary(), 8);
  REQUIRE(xi.tau.exact.has_value());
  CHECK(*xi.tau.exact == 1);
  CHECK(xi.criticality == Criticality::critical);
  CHECK(static_cast<double>(xi.pmf(0)) == doctest::Approx(0.5));
  CHECK(static_cast<double>(xi.pmf(1)) == doctest::Approx(0.0));
  CHECK(static_cast<double>(xi.pmf(2)) == doctest::Approx(0.5));
  CHECK(static_cast<double>(xi.mu) == doctest::Approx(1.0));
  CHECK(static_cast<double>(xi.sigma2) == doctest::Approx(1.0));
  REQUIRE(xi.pi_exact.size() >= 3);
  CHECK(xi.pi_exact[0] == Rational(1, 2));
  CHECK(xi.pi_exact[2] == Rational(1, 2));
}

TEST_CASE("offspring law of omega = 1 is geometric(1/2)") {
  auto xi = offspring_distribution(ones(), 32);
  CHECK(static_cast<double>(xi.tau.value) == doctest::Approx(0.5));
  CHECK(static_cast<double>(xi.phi_tau) == doctest::Approx(2.0));
  CHECK(static_cast<double>(xi.sigma2) == doctest::Approx(2.0));
  for (std::size_t k = 0; k < 10; ++k)
    CHECK(static_cast<double>(xi.pmf(k)) == doctest::Approx(std::ldexp(1.0, -static_cast<int>(k) - 1)));
  CHECK(static_cast<double>(xi.tail(5)) == doctest::Approx(std::ldexp(1.0, -5)));
}

TEST_CASE("closed-form tau") {
  auto g = offspring_distribution(WeightSequence::geometric(Rational(1, 3)), 8);
  REQUIRE(g.tau.exact.has_value());
  CHECK(*g.tau.exact == Rational(3, 2));
  auto p = offspring_distribution(WeightSequence::poisson(Rational(1)), 8);
  CHECK(static_cast<double>(p.tau.value) == doctest::Approx(1.0));
  CHECK(static_cast<double>(p.sigma2) == doctest::Approx(1.0));
  CHECK(static_cast<double>(p.pmf(2)) == doctest::Approx(std::exp(-1.0) / 2));
}

TEST_CASE("power law beta = 3 is subcritical with nu from zeta values") {
  auto xi = offspring_distribution(WeightSequence::power(3.0), 64);
  CHECK(xi.criticality == Criticality::subcritical);
  CHECK(xi.tau_at_radius);
  const double z2 = boost::math::zeta(2.0), z3 = boost::math::zeta(3.0);
  // Phi(1) = zeta(3), Phi'(1) = zeta(2) - zeta(3)
  CHECK(static_cast<double>(xi.nu) == doctest::Approx((z2 - z3) / z3).epsilon(1e-12));
  CHECK(static_cast<double>(xi.mu) == doctest::Approx((z2 - z3) / z3).epsilon(1e-12));
  CHECK(std::isinf(static_cast<double>(xi.sigma2)));
}

TEST_CASE("truncated power law: certified tau agrees with a plain bisection") {
  auto w = WeightSequence::power(3.0, 20);
  auto xi = offspring_distribution(w, 32);
  CHECK(xi.criticality == Criticality::critical);
  CHECK(xi.tau.lower <= xi.tau.value);
  CHECK(xi.tau.value <= xi.tau.upper);
  CHECK(static_cast<double>(xi.tau.upper - xi.tau.lower) < 1e-20);

  long double lo = 1, hi = 100;
  for (int i = 0; i < 200; ++i) {
    const long double mid = (lo + hi) / 2;
    (psi_direct(w, mid, 20) < 1 ? lo : hi) = mid;
  }
  CHECK(static_cast<double>(fabsl(lo - xi.tau.value)) < 1e-15);
  CHECK(static_cast<double>(xi.mu) == doctest::Approx(1.0).epsilon(1e-12));

  long double s = 0;
  for (std::size_t k = 0; k <= 20; ++k) s += xi.pmf(k);
  CHECK(static_cast<double>(s) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("phi helpers") {
  CHECK(static_cast<double>(phi_value(ones(), 0.5L)) == doctest::Approx(2.0));
  CHECK(static_cast<double>(phi_derivative(ones(), 0.5L)) == doctest::Approx(4.0));
  CHECK(static_cast<double>(psi_value(binary(), 1.0L)) == doctest::Approx(1.0));
  CHECK(phi_exact(binary(), Rational(1, 2)) == Rational(5, 4));
}

TEST_CASE("proposal law for a sequence without branching") {
  auto law = proposal_law(WeightSequence::explicit_list({1, 1}), 4);
  CHECK(static_cast<double>(law.pmf(0)) == doctest::Approx(0.5));
  CHECK(static_cast<double>(law.pmf(1)) == doctest::Approx(0.5));
}

TEST_CASE("weight spec files") {
  auto w = parse_weight_spec(R"({"family": "explicit", "weights": ["1", "0", "1"]})");
  CHECK(w.weight_exact(2) == 1);
  auto g = parse_weight_spec(R"({"family": "geometric", "params": {"p": "1/3"}})");
  CHECK(g.weight_exact(1) == Rational(1, 3));
  auto p = parse_weight_spec(R"({"family": "power", "params": {"beta": 3, "kmax": 20}})");
  CHECK(p.cutoff() == std::optional<std::size_t>(20));

  // round trip
  auto again = parse_weight_spec(weight_spec_json(p));
  for (std::size_t k = 0; k < 25; ++k) CHECK(again.weight_exact(k) == p.weight_exact(k));

  CHECK_THROWS(parse_weight_spec("{"));
  CHECK_THROWS(parse_weight_spec(R"({"family": "nope"})"));
  CHECK_THROWS(parse_weight_spec(R"({"family": "explicit", "weights": ["-1", "1"]})"));
  CHECK_THROWS(parse_weight_spec(R"({"family": "geometric", "params": {}})"));
  CHECK_THROWS(load_weight_spec("/nonexistent/weights.json"));
}

TEST_CASE("load from file") {
  const std::string path = "test_weights_tmp.json";
  {
    std::ofstream f(path);
    f << R"({"family": "poisson", "params": {"lambda": "1/2"}})";
  }
  auto w = load_weight_spec(path);
  CHECK(w.weight_exact(2) == Rational(1, 8));
  std::remove(path.c_str());
}
