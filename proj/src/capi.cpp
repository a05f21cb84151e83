#include "sgtree/sgtree.h"

#include "sgtree/enumerate.hpp"
#include "sgtree/sample.hpp"
#include "sgtree/series.hpp"
#include "sgtree/stats.hpp"
#include "sgtree/verify.hpp"
#include "sgtree/weights_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

using nlohmann::json;

struct sgt_weights {
  sgt::WeightSequence w;
};

struct sgt_rng {
  sgt::RngStream r;
};

struct sgt_sampler {
  sgt::WeightSequence w;
  std::size_t n = 0;
  sgt_mode mode = SGT_MODE_EXACT;
  std::unique_ptr<sgt::UnrootedExactSampler> exact;
  std::unique_ptr<sgt::UnrootedApproxSampler> approx;
  std::unique_ptr<sgt::ConditionedSumSampler> conditioned;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

sgt_status fail(sgt_status st, const std::string& msg) {
  g_last_error = msg;
  return st;
}

template <class F>
sgt_status guard(F&& f) {
  try {
    f();
    return SGT_OK;
  } catch (const sgt::InvariantError& e) {
    return fail(SGT_ERR_INVARIANT, e.what());
  } catch (const sgt::SamplerExhausted& e) {
    return fail(SGT_ERR_SAMPLER_EXHAUSTED, e.what());
  } catch (const json::exception& e) {
    return fail(SGT_ERR_INVALID_ARGUMENT, std::string("json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SGT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(SGT_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(SGT_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(SGT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SGT_ERR_INTERNAL, "unknown error");
  }
}

#define SGT_REQUIRE(cond, what)                                    \
  do {                                                             \
    if (!(cond)) return fail(SGT_ERR_INVALID_ARGUMENT, what);      \
  } while (0)

std::string frac(const sgt::Rational& q) { return sgt::to_fraction_string(q); }

double num(long double x) { return static_cast<double>(x); }

json finite_or_null(long double x) {
  if (std::isfinite(static_cast<double>(x))) return num(x);
  return nullptr;
}

sgt::SeriesTable series_by_label(const sgt::WeightSequence& w, const std::string& label, unsigned d,
                                 std::size_t order) {
  if (label == "T") {
    if (d != 1) throw std::invalid_argument("label T takes d = 1; use Td for omega^d");
    return sgt::planted_series(w, 1, order);
  }
  if (label == "Td") {
    if (d == 0) throw std::invalid_argument("d must be positive");
    return sgt::planted_series(w, d, order);
  }
  if (label == "Rv") return sgt::symmetry_series_vertex(w, order);
  if (label == "Re") return sgt::symmetry_series_edge(w, order);
  if (label == "L") return sgt::labelled_series(w, order);
  if (label == "ZU") return sgt::unrooted_series(w, order);
  throw std::invalid_argument("unknown series label '" + label + "' (T, Td, Rv, Re, L, ZU)");
}

json report_json(const sgt::SampleReport& r) {
  json deg = json::object();
  for (const auto& [d, c] : r.degree_hist) deg[std::to_string(d)] = c;
  json nb = json::object();
  for (const auto& [key, c] : r.neighborhood_codes) nb[std::to_string(key.first)] = key.second;
  return json{{"n", r.n},
              {"diameter", r.diameter},
              {"height_from_center", r.height_from_center},
              {"max_degree", r.max_degree},
              {"second_max_degree", r.second_max_degree},
              {"degree_hist", deg},
              {"neighborhood", nb}};
}

sgt::UnrootedPlaneTree parse_any(const std::string& wire) {
  if (wire.rfind("U:", 0) == 0) return sgt::parse_unrooted(wire);
  return sgt::UnrootedPlaneTree::from_planted(sgt::parse_planted(wire));
}

}  // namespace

extern "C" {

const char* sgt_version(void) { return "0.1.0"; }

const char* sgt_last_error(void) { return g_last_error.c_str(); }

const char* sgt_status_name(sgt_status st) {
  switch (st) {
    case SGT_OK: return "ok";
    case SGT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case SGT_ERR_INVARIANT: return "invariant violation";
    case SGT_ERR_SAMPLER_EXHAUSTED: return "sampler exhausted";
    case SGT_ERR_IO: return "i/o error";
    case SGT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void sgt_string_free(char* s) { std::free(s); }

sgt_status sgt_weights_from_json(const char* text, sgt_weights** out) {
  SGT_REQUIRE(text && out, "null argument");
  return guard([&] { *out = new sgt_weights{sgt::parse_weight_spec(text)}; });
}

sgt_status sgt_weights_from_file(const char* path, sgt_weights** out) {
  SGT_REQUIRE(path && out, "null argument");
  std::ifstream in(path);
  if (!in) return fail(SGT_ERR_IO, std::string("cannot open weights file '") + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sgt_weights_from_json(text.c_str(), out);
}

void sgt_weights_free(sgt_weights* w) { delete w; }

sgt_status sgt_weights_describe(const sgt_weights* w, char** out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] { *out = dup(w->w.describe()); });
}

sgt_status sgt_weights_span(const sgt_weights* w, size_t* out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] { *out = sgt::compute_span(w->w); });
}

sgt_status sgt_offspring_json(const sgt_weights* w, size_t table, char** out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] {
    sgt::OffspringDistribution xi = sgt::offspring_distribution(w->w, std::max<size_t>(table, 1));
    json pi = json::array();
    for (auto p : xi.pi) pi.push_back(num(p));
    json j{{"weights", w->w.describe()},
           {"tau", num(xi.tau.value)},
           {"tau_lower", num(xi.tau.lower)},
           {"tau_upper", num(xi.tau.upper)},
           {"phi_tau", num(xi.phi_tau)},
           {"mu", num(xi.mu)},
           {"nu", finite_or_null(xi.nu)},
           {"sigma2", finite_or_null(xi.sigma2)},
           {"criticality", xi.criticality == sgt::Criticality::critical ? "critical" : "subcritical"},
           {"tau_at_radius", xi.tau_at_radius},
           {"pi", pi}};
    if (xi.tau.exact) j["tau_exact"] = frac(*xi.tau.exact);
    *out = dup(j.dump());
  });
}

sgt_status sgt_series_coeff(const sgt_weights* w, const char* label, unsigned d, size_t n, char** out) {
  SGT_REQUIRE(w && label && out, "null argument");
  return guard([&] { *out = dup(frac(series_by_label(w->w, label, d, n)[n])); });
}

sgt_status sgt_series_json(const sgt_weights* w, const char* label, unsigned d, size_t order, char** out) {
  SGT_REQUIRE(w && label && out, "null argument");
  return guard([&] {
    sgt::SeriesTable t = series_by_label(w->w, label, d, order);
    json a = json::array();
    for (const auto& c : t.coeffs) a.push_back(frac(c));
    *out = dup(a.dump());
  });
}

sgt_status sgt_symmetry_probability(const sgt_weights* w, size_t n, char** out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] {
    auto p = sgt::symmetry_probability(w->w, n);
    if (!p) throw sgt::InvariantError("no positive-weight unrooted tree of size " + std::to_string(n));
    *out = dup(frac(*p));
  });
}

sgt_status sgt_subexp_json(const sgt_weights* w, size_t order, char** out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] {
    const std::size_t span = sgt::compute_span(w->w);
    sgt::SeriesTable g = sgt::tree_series_over_x(w->w, order);
    sgt::SubexpDiagnostics dg = sgt::subexp_diagnostics(g, span);
    sgt::OffspringDistribution xi = sgt::offspring_distribution(w->w, 2);
    const long double rho = xi.tau.value / xi.phi_tau;
    sgt::PolynomialFunction f{{sgt::Rational(0), sgt::Rational(0), sgt::Rational(1)}};
    sgt::CompositionReport cr = sgt::composition_asymptotic_check(f, g, span, xi.phi_tau);
    json j{{"weights", w->w.describe()},
           {"order", order},
           {"span", span},
           {"rho", num(rho)},
           {"rho_estimate", num(dg.estimated_rho)},
           {"rho_last_ratio", num(dg.last_ratio)},
           {"rho_relative_error", num(std::fabs(dg.estimated_rho - rho) / rho)},
           {"g_at_rho", num(cr.g_at_rho)},
           {"composition_target", num(cr.target)},
           {"composition_ratio", num(cr.final_ratio)},
           {"composition_relative_error", num(cr.relative_error)}};
    *out = dup(j.dump());
  });
}

sgt_status sgt_rng_new(uint64_t seed, uint64_t stream, sgt_rng** out) {
  SGT_REQUIRE(out, "null argument");
  return guard([&] { *out = new sgt_rng{sgt::RngStream(seed, stream)}; });
}

sgt_status sgt_rng_fork(const sgt_rng* parent, uint64_t index, sgt_rng** out) {
  SGT_REQUIRE(parent && out, "null argument");
  return guard([&] { *out = new sgt_rng{parent->r.fork(index)}; });
}

void sgt_rng_free(sgt_rng* r) { delete r; }

sgt_status sgt_sampler_new(const sgt_weights* w, size_t n, sgt_mode mode, sgt_sampler** out) {
  SGT_REQUIRE(w && out, "null argument");
  return guard([&] {
    auto s = std::make_unique<sgt_sampler>();
    s->w = w->w;
    s->n = n;
    s->mode = mode;
    switch (mode) {
      case SGT_MODE_EXACT: s->exact = std::make_unique<sgt::UnrootedExactSampler>(w->w, n); break;
      case SGT_MODE_APPROX: s->approx = std::make_unique<sgt::UnrootedApproxSampler>(w->w, n); break;
      case SGT_MODE_PLANTED:
        if (n == 0) throw std::invalid_argument("n must be positive");
        s->conditioned = std::make_unique<sgt::ConditionedSumSampler>(w->w, n, 1);
        break;
      case SGT_MODE_PAIR:
        if (n < 2) throw std::invalid_argument("pair mode needs n >= 2");
        s->conditioned = std::make_unique<sgt::ConditionedSumSampler>(w->w, n, 2);
        break;
      default: throw std::invalid_argument("unknown sampler mode");
    }
    *out = s.release();
  });
}

void sgt_sampler_free(sgt_sampler* s) { delete s; }

namespace {

// Draws one tree; planted modes keep the planted word for the wire form.
sgt::UnrootedPlaneTree draw_tree(sgt_sampler* s, sgt::RngStream& rng, std::string* wire) {
  switch (s->mode) {
    case SGT_MODE_EXACT: {
      auto u = s->exact->sample(rng);
      if (wire) *wire = sgt::to_wire(u);
      return u;
    }
    case SGT_MODE_APPROX: {
      auto u = s->approx->sample(rng);
      if (wire) *wire = sgt::to_wire(u);
      return u;
    }
    case SGT_MODE_PLANTED: {
      sgt::PlantedTree t{s->conditioned->sample(rng)};
      if (wire) *wire = sgt::to_wire(t);
      return sgt::UnrootedPlaneTree::from_planted(t);
    }
    case SGT_MODE_PAIR: {
      auto trees = sgt::ConditionedSumSampler::split_forest(s->conditioned->sample(rng), 2);
      if (wire) *wire = sgt::to_wire(sgt::join_at_root(trees[0], trees[1]));
      return sgt::UnrootedPlaneTree::join(trees[0], trees[1]);
    }
  }
  throw std::invalid_argument("unknown sampler mode");
}

}  // namespace

sgt_status sgt_sampler_draw(sgt_sampler* s, sgt_rng* rng, char** wire) {
  SGT_REQUIRE(s && rng && wire, "null argument");
  return guard([&] {
    std::string text;
    draw_tree(s, rng->r, &text);
    *wire = dup(text);
  });
}

sgt_status sgt_sampler_draw_report(sgt_sampler* s, sgt_rng* rng, unsigned max_radius, char** out) {
  SGT_REQUIRE(s && rng && out, "null argument");
  return guard([&] {
    auto u = draw_tree(s, rng->r, nullptr);
    *out = dup(report_json(sgt::measure(u, rng->r, max_radius)).dump());
  });
}

sgt_status sgt_sampler_acceptance_rate(const sgt_sampler* s, double* out) {
  SGT_REQUIRE(s && out, "null argument");
  return guard([&] {
    // the exact sampler owns several conditioned samplers; report 1 there
    *out = s->conditioned ? s->conditioned->acceptance_rate() : 1.0;
  });
}

sgt_status sgt_measure(const char* wire, sgt_rng* rng, unsigned max_radius, char** out) {
  SGT_REQUIRE(wire && rng && out, "null argument");
  return guard([&] { *out = dup(report_json(sgt::measure(parse_any(wire), rng->r, max_radius)).dump()); });
}

sgt_status sgt_verify(const sgt_weights* w, const char* check, size_t n_max, int* passed, char** out) {
  SGT_REQUIRE(w && check && passed && out, "null argument");
  return guard([&] {
    sgt::CheckResult r = sgt::run_check(check, w->w, n_max);
    *passed = r.passed ? 1 : 0;
    *out = dup(r.report.dump());
  });
}

sgt_status sgt_check_degree_clt(const sgt_weights* w, unsigned d, size_t n, size_t batches, uint64_t seed,
                                uint64_t stream, unsigned threads, int* passed, char** out) {
  SGT_REQUIRE(w && passed && out, "null argument");
  return guard([&] {
    auto r = sgt::degree_clt_check(w->w, d, n, batches, sgt::RngStream(seed, stream), threads);
    *passed = r.passed() ? 1 : 0;
    json j{{"check", "degree-clt"},
           {"weights", w->w.describe()},
           {"d", r.d},
           {"n", r.n},
           {"batches", r.batches},
           {"sampler", sgt::sampler_mode_name(r.mode)},
           {"p_d", r.p_d},
           {"mean_fraction", r.mean_fraction},
           {"mean_abs_deviation", r.mean_abs_deviation},
           {"mean_z", r.mean_z},
           {"sd_z", r.sd_z},
           {"anderson_darling", r.normality.a2_star},
           {"p_value", r.normality.p_value},
           {"mean_within_band", r.mean_within_band},
           {"passed", r.passed()}};
    *out = dup(j.dump());
  });
}

sgt_status sgt_check_diameter_tail(const sgt_weights* w, size_t n, size_t samples, uint64_t seed, uint64_t stream,
                                   unsigned threads, int* passed, char** out) {
  SGT_REQUIRE(w && passed && out, "null argument");
  return guard([&] {
    auto r = sgt::diameter_tail_check(w->w, n, samples, sgt::RngStream(seed, stream), threads);
    *passed = r.passed() ? 1 : 0;
    json ex = json::array();
    for (const auto& [x, p] : r.exceedance) ex.push_back({{"x", x}, {"x2_over_n", double(x) * double(x) / double(n)}, {"p", p}});
    json j{{"check", "diameter-tail"},
           {"weights", w->w.describe()},
           {"n", r.n},
           {"samples", r.samples},
           {"sampler", sgt::sampler_mode_name(r.mode)},
           {"mean_diameter", r.mean_diameter},
           {"sd_diameter", r.sd_diameter},
           {"mean_over_sqrt_n", r.mean_diameter / std::sqrt(double(n))},
           {"fit_a", r.fit_a},
           {"fit_b", r.fit_b},
           {"r2", r.r2},
           {"upper_a", r.upper_a},
           {"fit_points", r.fit_points},
           {"r2_full_range", r.r2_full},
           {"exceedance", ex},
           {"passed", r.passed()}};
    *out = dup(j.dump());
  });
}

sgt_status sgt_check_max_degree(const sgt_weights* w, size_t n, size_t samples, uint64_t seed, uint64_t stream,
                                unsigned threads, int* passed, char** out) {
  SGT_REQUIRE(w && passed && out, "null argument");
  return guard([&] {
    auto r = sgt::max_degree_check(w->w, n, samples, sgt::RngStream(seed, stream), threads);
    *passed = r.passed() ? 1 : 0;
    json j{{"check", "max-degree"},
           {"weights", w->w.describe()},
           {"n", r.n},
           {"samples", r.samples},
           {"sampler", sgt::sampler_mode_name(r.mode)},
           {"nu", r.nu},
           {"one_minus_nu", 1.0 - r.nu},
           {"median_ratio", r.median_ratio},
           {"median_second_ratio", r.median_second_ratio},
           {"mean_second_ratio", r.mean_second_ratio},
           {"bounded", r.bounded},
           {"passed", r.passed()}};
    *out = dup(j.dump());
  });
}

sgt_status sgt_check_neighborhood(const sgt_weights* w, unsigned radius, const size_t* sizes, size_t nsizes,
                                  size_t samples, uint64_t seed, uint64_t stream, unsigned threads, int* passed,
                                  char** out) {
  SGT_REQUIRE(w && sizes && passed && out, "null argument");
  return guard([&] {
    std::vector<std::size_t> sz(sizes, sizes + nsizes);
    auto r = sgt::neighborhood_census_check(w->w, radius, sz, samples, sgt::RngStream(seed, stream), threads);
    *passed = r.passed() ? 1 : 0;
    json census = json::array();
    for (std::size_t i = 0; i < r.census.size(); ++i) {
      json c = json::object();
      for (const auto& [code, p] : r.census[i]) c[code] = p;
      census.push_back({{"n", r.sizes[i]}, {"distinct", r.census[i].size()}, {"law", c}});
    }
    json j{{"check", "neighborhood-census"},
           {"weights", w->w.describe()},
           {"radius", r.radius},
           {"samples", r.samples},
           {"tv_consecutive", r.tv_consecutive},
           {"decreasing", r.decreasing},
           {"census", census},
           {"passed", r.passed()}};
    *out = dup(j.dump());
  });
}

}  // extern "C"
