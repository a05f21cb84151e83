#include "sgtree/verify.hpp"

#include "sgtree/enumerate.hpp"
#include "sgtree/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgt {

using nlohmann::json;

namespace {

void cap(std::size_t n_max, std::size_t limit, const char* what) {
  if (n_max > limit) {
    throw std::invalid_argument(std::string(what) + ": n_max above the enumeration cap " + std::to_string(limit));
  }
}

}  // namespace

EnvelopeFit envelope_fit(const std::vector<std::pair<double, double>>& pts) {
  EnvelopeFit f;
  f.points = pts.size();
  if (pts.size() < 2) return f;
  for (const auto& p : pts) {
    if (!(p.second > 0.0)) throw std::invalid_argument("envelope fit needs positive values");
  }
  const double k = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, v] : pts) {
    mx += x;
    my += std::log(v);
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, v] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (std::log(v) - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [x, v] : pts) worst = std::max(worst, std::log(v) - (f.intercept + f.slope * x));
  f.upper_intercept = f.intercept + std::max(0.0, worst);
  f.rate = -f.slope;
  const std::size_t m = pts.size();
  f.tail_decreasing = true;
  for (std::size_t i = m >= 3 ? m - 2 : 1; i < m; ++i) {
    if (!(pts[i].second < pts[i - 1].second)) f.tail_decreasing = false;
  }
  return f;
}

namespace {

json envelope_json(const EnvelopeFit& f) {
  return json{{"slope", f.slope},
              {"intercept", f.intercept},
              {"upper_intercept", f.upper_intercept},
              {"rate", f.rate},
              {"points", f.points},
              {"tail_decreasing", f.tail_decreasing},
              {"ok", f.ok()}};
}

}  // namespace

CheckResult verify_series_oracle(const WeightSequence& w, std::size_t n_max) {
  cap(n_max, 14, "series-oracle");
  CheckResult r{"series-oracle", true, json::object()};
  SeriesTable t = planted_series(w, 1, n_max);
  json rows = json::array();
  for (std::size_t n = 1; n <= n_max; ++n) {
    Rational sum = 0;
    std::size_t trees = 0;
    for (const auto& p : enumerate_planted(n, w)) {
      sum += tree_weight(p, w);
      ++trees;
    }
    const bool eq = sum == t[n];
    r.passed = r.passed && eq;
    rows.push_back({{"n", n},
                    {"series", to_fraction_string(t[n])},
                    {"oracle", to_fraction_string(sum)},
                    {"trees", trees},
                    {"equal", eq}});
  }
  r.report = {{"check", r.name}, {"weights", w.describe()}, {"n_max", n_max}, {"rows", rows}, {"passed", r.passed}};
  return r;
}

CheckResult verify_unrooted_oracle(const WeightSequence& w, std::size_t n_max) {
  cap(n_max, 10, "unrooted-oracle");
  CheckResult r{"unrooted-oracle", true, json::object()};
  UnrootedDecomposition dec = unrooted_decomposition(w, n_max);
  json rows = json::array();
  for (std::size_t n = 2; n <= n_max; ++n) {
    Rational sum = 0;
    std::size_t classes = 0;
    for (const auto& u : enumerate_unrooted(n)) {
      Rational x = tree_weight(u, w);
      if (x != 0) {
        sum += x;
        ++classes;
      }
    }
    const bool eq = sum == dec.total[n];
    r.passed = r.passed && eq;
    rows.push_back({{"n", n},
                    {"labelled", to_fraction_string(dec.labelled[n])},
                    {"vertex", to_fraction_string(dec.vertex[n])},
                    {"edge", to_fraction_string(dec.edge[n])},
                    {"series", to_fraction_string(dec.total[n])},
                    {"oracle", to_fraction_string(sum)},
                    {"classes", classes},
                    {"equal", eq}});
  }
  r.report = {{"check", r.name}, {"weights", w.describe()}, {"n_max", n_max}, {"rows", rows}, {"passed", r.passed}};
  return r;
}

CheckResult verify_split_independence(const WeightSequence& w, std::size_t n_max) {
  cap(n_max, 10, "split-independence");
  CheckResult r{"split-independence", true, json::object()};
  json rows = json::array();
  SeriesTable sq = planted_series(w, 1, n_max);
  for (std::size_t n = 2; n <= n_max; ++n) {
    Rational mass = 0;
    for (std::size_t a = 1; a < n; ++a) mass += sq[a] * sq[n - a];
    if (mass == 0) {
      rows.push_back({{"n", n}, {"admissible", false}});
      continue;
    }
    SplitIndependenceReport s = split_independence_check(w, n);
    r.passed = r.passed && s.ok();
    rows.push_back({{"n", n},
                    {"size_classes", s.size_classes},
                    {"atoms", s.atoms},
                    {"mismatches", s.mismatches},
                    {"equal", s.ok()}});
  }
  r.report = {{"check", r.name}, {"weights", w.describe()}, {"n_max", n_max}, {"rows", rows}, {"passed", r.passed}};
  return r;
}

CheckResult verify_tv_decay(const WeightSequence& w, std::size_t n_max, std::size_t sym_max) {
  cap(n_max, 10, "tv-decay");
  CheckResult r{"tv-decay", true, json::object()};
  json rows = json::array();
  std::vector<std::pair<double, double>> last3;
  const auto sizes = admissible_sizes(w, n_max);
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const std::size_t n = sizes[i];
    Rational tv = tv_distance(exact_law_unrooted(w, n), exact_law_approx(w, n));
    rows.push_back({{"n", n}, {"tv", to_fraction_string(tv)}, {"tv_float", static_cast<double>(to_long_double(tv))}});
    // zero TV sits below any envelope, so only positive values enter the fit
    if (i + 3 >= sizes.size() && tv > 0) last3.emplace_back(static_cast<double>(n), static_cast<double>(to_long_double(tv)));
  }
  json tv_json;
  bool tv_ok = false;
  if (last3.size() >= 2) {
    EnvelopeFit f = envelope_fit(last3);
    tv_ok = f.ok();
    tv_json = envelope_json(f);
  } else {
    tv_json = {{"ok", false}, {"assessable", false},
               {"reason", "fewer than two positive TV values among the last three admissible sizes"}};
  }

  // symmetry probability over the last half of the admissible sizes
  std::vector<std::pair<double, double>> sym;
  json sym_rows = json::array();
  auto probs = symmetry_probabilities(w, sym_max);
  for (std::size_t n = 2; n <= sym_max; ++n) {
    if (!probs[n] || *probs[n] == 0) continue;
    const double v = static_cast<double>(to_long_double(*probs[n]));
    sym.emplace_back(static_cast<double>(n), v);
  }
  json sym_json;
  bool sym_ok = false;
  if (sym.size() >= 3) {
    std::vector<std::pair<double, double>> half(sym.begin() + static_cast<std::ptrdiff_t>(sym.size() / 2), sym.end());
    EnvelopeFit f = envelope_fit(half);
    sym_ok = f.ok();
    sym_json = envelope_json(f);
    for (std::size_t n : {std::size_t{10}, std::size_t{25}, std::size_t{50}, std::size_t{100}, std::size_t{200}}) {
      if (n <= sym_max && probs[n]) sym_rows.push_back({{"n", n}, {"p", static_cast<double>(to_long_double(*probs[n]))}});
    }
  } else {
    sym_json = {{"ok", false}, {"assessable", false}, {"reason", "fewer than three sizes with a positive symmetry probability"}};
  }
  r.passed = tv_ok && sym_ok;
  r.report = {{"check", r.name},   {"weights", w.describe()}, {"n_max", n_max},  {"rows", rows},
              {"envelope", tv_json}, {"symmetry_max", sym_max}, {"symmetry", sym_rows}, {"symmetry_envelope", sym_json},
              {"passed", r.passed}};
  return r;
}

CheckResult verify_subexp(const WeightSequence& w, std::size_t order, double rho_tol, double comp_tol) {
  const std::size_t span = compute_span(w);
  const SeriesTable g = tree_series_over_x(w, order);
  const SubexpDiagnostics dg = subexp_diagnostics(g, span);
  const OffspringDistribution xi = offspring_distribution(w, 2);
  const long double rho = xi.tau.value / xi.phi_tau;
  const PolynomialFunction f{{Rational(0), Rational(0), Rational(1)}};
  const CompositionReport cr = composition_asymptotic_check(f, g, span, xi.phi_tau);
  const double rho_err = static_cast<double>(std::fabs(dg.estimated_rho - rho));
  CheckResult r;
  r.name = "subexp";
  r.passed = rho_err < rho_tol && static_cast<double>(cr.relative_error) < comp_tol;
  r.report = {{"order", order},
              {"span", span},
              {"rho", static_cast<double>(rho)},
              {"rho_estimate", static_cast<double>(dg.estimated_rho)},
              {"rho_last_ratio", static_cast<double>(dg.last_ratio)},
              {"rho_abs_error", rho_err},
              {"g_at_rho", static_cast<double>(cr.g_at_rho)},
              {"composition_target", static_cast<double>(cr.target)},
              {"composition_ratio", static_cast<double>(cr.final_ratio)},
              {"composition_relative_error", static_cast<double>(cr.relative_error)},
              {"passed", r.passed}};
  return r;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"series-oracle", "unrooted-oracle", "split-independence", "tv-decay",
                                                "subexp"};
  return names;
}

CheckResult run_check(const std::string& name, const WeightSequence& w, std::size_t n_max) {
  if (name == "series-oracle") return verify_series_oracle(w, n_max);
  if (name == "unrooted-oracle") return verify_unrooted_oracle(w, n_max);
  if (name == "split-independence") return verify_split_independence(w, n_max);
  if (name == "tv-decay") return verify_tv_decay(w, n_max);
  if (name == "subexp") return verify_subexp(w, n_max);
  throw std::invalid_argument("unknown check '" + name + "'");
}

}  // namespace sgt
