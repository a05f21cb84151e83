#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sgtree/verify.hpp"

#include <cmath>

using namespace sgt;

TEST_CASE("exact checks pass on the standard sequences") {
  for (auto& w : {WeightSequence::geometric(Rational(1)), WeightSequence::explicit_list({1, 0, 1}),
                  WeightSequence::explicit_list({1, 1}), WeightSequence::geometric(Rational(1, 3))}) {
    CAPTURE(w.describe());
    CHECK(verify_series_oracle(w, 10).passed);
    CHECK(verify_unrooted_oracle(w, 8).passed);
    CHECK(verify_split_independence(w, 8).passed);
  }
}

TEST_CASE("size caps are enforced") {
  auto w = WeightSequence::geometric(Rational(1));
  CHECK_THROWS(verify_series_oracle(w, 15));
  CHECK_THROWS(verify_unrooted_oracle(w, 11));
  CHECK_THROWS(run_check("no-such-check", w, 5));
}

TEST_CASE("dispatch by name") {
  auto w = WeightSequence::geometric(Rational(1));
  for (const auto& name : check_names()) {
    const std::size_t n = name == "subexp" ? 400 : 7;
    auto r = run_check(name, w, n);
    CHECK(r.name == name);
    CHECK(r.passed);
    CHECK(r.report.is_object());
  }
}

TEST_CASE("tv decay") {
  auto r = verify_tv_decay(WeightSequence::geometric(Rational(1)), 10, 100);
  CHECK(r.passed);
  // TV(U_4, S_4) = 1/10 for omega = 1
  bool seen = false;
  for (auto& row : r.report["rows"])
    if (row["n"] == 4) {
      CHECK(row["tv"] == "1/10");
      seen = true;
    }
  CHECK(seen);

  // only paths: nothing decays
  auto paths = verify_tv_decay(WeightSequence::explicit_list({1, 1}), 10, 50);
  CHECK_FALSE(paths.passed);
}

TEST_CASE("envelope fit") {
  std::vector<std::pair<double, double>> pts;
  for (int n = 1; n <= 5; ++n) pts.emplace_back(n, 3.0 * std::exp(-0.5 * n));
  auto f = envelope_fit(pts);
  CHECK(f.slope == doctest::Approx(-0.5));
  CHECK(f.rate == doctest::Approx(0.5));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.upper_intercept == doctest::Approx(std::log(3.0)));
  CHECK(f.points == 5);
  CHECK(f.tail_decreasing);
  CHECK(f.ok());

  // noisy: the upper line bounds every point
  pts = {{1, 0.5}, {2, 0.1}, {3, 0.2}, {4, 0.01}};
  f = envelope_fit(pts);
  for (auto& [x, y] : pts) CHECK(std::log(y) <= f.upper_intercept + f.slope * x + 1e-12);
  CHECK_FALSE(f.tail_decreasing);
  CHECK(f.ok());

  CHECK_FALSE(envelope_fit({{1, 0.5}}).ok());
  CHECK_FALSE(envelope_fit({{1, 0.1}, {2, 0.2}}).ok());
}

TEST_CASE("subexponential diagnostics") {
  auto r = verify_subexp(WeightSequence::explicit_list({1, 0, 1}), 400);
  CHECK(r.passed);
  CHECK(r.report["span"] == 2);
  CHECK(r.report["rho"].get<double>() == doctest::Approx(0.5));
  CHECK(r.report["composition_target"].get<double>() == doctest::Approx(4.0));
  CHECK_FALSE(verify_subexp(WeightSequence::geometric(Rational(1)), 20).passed);
}
