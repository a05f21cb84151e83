#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sgtree/sgtree.h"

#include <json.hpp>

#include <string>

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  sgt_string_free(s);
  return out;
}

sgt_weights* weights(const char* spec) {
  sgt_weights* w = nullptr;
  REQUIRE(sgt_weights_from_json(spec, &w) == SGT_OK);
  return w;
}

const char* kOnes = R"({"family": "geometric", "params": {"p": "1"}})";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(sgt_version()) == "0.1.0");
  CHECK(std::string(sgt_status_name(SGT_OK)) == "ok");
  CHECK(std::string(sgt_status_name(SGT_ERR_INVARIANT)) == "invariant violation");
}

TEST_CASE("weights round trip and errors") {
  sgt_weights* w = nullptr;
  CHECK(sgt_weights_from_json("{", &w) == SGT_ERR_INVARIANT);  // malformed spec
  CHECK(w == nullptr);
  CHECK(std::string(sgt_last_error()).size() > 0);
  CHECK(sgt_weights_from_json(R"({"family": "explicit", "weights": ["-1"]})", &w) != SGT_OK);
  CHECK(sgt_weights_from_file("/nonexistent.json", &w) == SGT_ERR_IO);
  CHECK(sgt_weights_from_json(kOnes, nullptr) == SGT_ERR_INVALID_ARGUMENT);

  w = weights(R"({"family": "explicit", "weights": ["1", "0", "1"]})");
  size_t span = 0;
  CHECK(sgt_weights_span(w, &span) == SGT_OK);
  CHECK(span == 2);
  char* s = nullptr;
  CHECK(sgt_weights_describe(w, &s) == SGT_OK);
  CHECK(take(s).find("explicit") != std::string::npos);
  CHECK(sgt_offspring_json(w, 4, &s) == SGT_OK);
  auto j = nlohmann::json::parse(take(s));
  CHECK(j.is_object());
  sgt_weights_free(w);

  w = weights(R"({"family": "explicit", "weights": ["1", "1"]})");
  CHECK(sgt_weights_span(w, &span) == SGT_ERR_INVARIANT);
  sgt_weights_free(w);
}

TEST_CASE("series") {
  auto* w = weights(kOnes);
  char* s = nullptr;
  CHECK(sgt_series_coeff(w, "ZU", 1, 6, &s) == SGT_OK);
  CHECK(take(s) == "6/1");
  CHECK(sgt_series_coeff(w, "T", 1, 5, &s) == SGT_OK);
  CHECK(take(s) == "14/1");
  CHECK(sgt_series_coeff(w, "Re", 1, 2, &s) == SGT_OK);
  CHECK(take(s) == "1/2");
  CHECK(sgt_series_coeff(w, "Rv", 1, 3, &s) == SGT_OK);
  CHECK(take(s) == "1/2");
  CHECK(sgt_series_coeff(w, "nope", 1, 3, &s) == SGT_ERR_INVALID_ARGUMENT);
  CHECK(sgt_series_json(w, "T", 1, 4, &s) == SGT_OK);
  CHECK(nlohmann::json::parse(take(s)) == nlohmann::json({"0/1", "1/1", "1/1", "2/1", "5/1"}));
  CHECK(sgt_symmetry_probability(w, 2, &s) == SGT_OK);
  CHECK(take(s) == "1/2");
  CHECK(sgt_subexp_json(w, 400, &s) == SGT_OK);
  auto j = nlohmann::json::parse(take(s));
  CHECK(j["rho"].get<double>() == doctest::Approx(0.25));
  sgt_weights_free(w);

  w = weights(R"({"family": "explicit", "weights": ["1", "0", "1"]})");
  CHECK(sgt_symmetry_probability(w, 3, &s) == SGT_ERR_INVARIANT);
  sgt_weights_free(w);
}

TEST_CASE("sampling through handles is deterministic") {
  auto* w = weights(kOnes);
  sgt_sampler* sa = nullptr;
  sgt_sampler* sb = nullptr;
  REQUIRE(sgt_sampler_new(w, 20, SGT_MODE_EXACT, &sa) == SGT_OK);
  REQUIRE(sgt_sampler_new(w, 20, SGT_MODE_EXACT, &sb) == SGT_OK);
  sgt_rng* ra = nullptr;
  sgt_rng* rb = nullptr;
  REQUIRE(sgt_rng_new(1, 2, &ra) == SGT_OK);
  REQUIRE(sgt_rng_new(1, 2, &rb) == SGT_OK);
  for (int i = 0; i < 20; ++i) {
    char* x = nullptr;
    char* y = nullptr;
    REQUIRE(sgt_sampler_draw(sa, ra, &x) == SGT_OK);
    REQUIRE(sgt_sampler_draw(sb, rb, &y) == SGT_OK);
    const std::string a = take(x), b = take(y);
    CHECK(a == b);
    CHECK(a.rfind("U:", 0) == 0);
  }
  char* rep = nullptr;
  REQUIRE(sgt_sampler_draw_report(sa, ra, 1, &rep) == SGT_OK);
  auto j = nlohmann::json::parse(take(rep));
  CHECK(j["n"] == 20);
  CHECK(j["neighborhood"].contains("0"));
  double rate = 0;
  CHECK(sgt_sampler_acceptance_rate(sa, &rate) == SGT_OK);

  sgt_rng* child = nullptr;
  REQUIRE(sgt_rng_fork(ra, 5, &child) == SGT_OK);
  char* m = nullptr;
  CHECK(sgt_measure("U:1,2,0,0", child, 0, &m) == SGT_OK);
  auto mj = nlohmann::json::parse(take(m));
  CHECK(mj["diameter"] == 2);
  CHECK(mj["max_degree"] == 3);
  CHECK(sgt_measure("U:1,2", child, 0, &m) == SGT_ERR_INVALID_ARGUMENT);

  sgt_sampler* planted = nullptr;
  REQUIRE(sgt_sampler_new(w, 9, SGT_MODE_PLANTED, &planted) == SGT_OK);
  char* p = nullptr;
  REQUIRE(sgt_sampler_draw(planted, ra, &p) == SGT_OK);
  CHECK(take(p).rfind("U:", 0) == std::string::npos);

  sgt_sampler* bad = nullptr;
  CHECK(sgt_sampler_new(w, 600, SGT_MODE_EXACT, &bad) == SGT_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);

  sgt_sampler_free(planted);
  sgt_rng_free(child);
  sgt_rng_free(ra);
  sgt_rng_free(rb);
  sgt_sampler_free(sa);
  sgt_sampler_free(sb);
  sgt_weights_free(w);
}

TEST_CASE("checks") {
  auto* w = weights(kOnes);
  int passed = -1;
  char* s = nullptr;
  CHECK(sgt_verify(w, "series-oracle", 8, &passed, &s) == SGT_OK);
  CHECK(passed == 1);
  take(s);
  CHECK(sgt_verify(w, "bogus", 8, &passed, &s) == SGT_ERR_INVALID_ARGUMENT);

  CHECK(sgt_check_degree_clt(w, 1, 500, 20, 1, 0, 2, &passed, &s) == SGT_OK);
  auto j = nlohmann::json::parse(take(s));
  CHECK(j["p_d"].get<double>() == doctest::Approx(0.5));

  const size_t sizes[] = {20, 40};
  CHECK(sgt_check_neighborhood(w, 1, sizes, 2, 200, 1, 0, 1, &passed, &s) == SGT_OK);
  take(s);
  CHECK(sgt_check_max_degree(w, 100, 10, 1, 0, 1, &passed, &s) == SGT_ERR_INVARIANT);
  sgt_weights_free(w);
}

TEST_CASE("null handles") {
  char* s = nullptr;
  CHECK(sgt_series_coeff(nullptr, "T", 1, 3, &s) == SGT_ERR_INVALID_ARGUMENT);
  sgt_weights_free(nullptr);
  sgt_sampler_free(nullptr);
  sgt_rng_free(nullptr);
  sgt_string_free(nullptr);
}
