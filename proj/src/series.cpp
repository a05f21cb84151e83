#include "sgtree/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgt {

namespace {

long double log_integer(const Integer& z) {
  long e = 0;
  double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(static_cast<long double>(m)) + static_cast<long double>(e) * std::log(2.0L);
}

/// c = a * b truncated at `order`; entries below the valuations are skipped.
std::vector<Integer> multiply(const std::vector<Integer>& a, const std::vector<Integer>& b, std::size_t order) {
  std::vector<Integer> c(order + 1);
  std::size_t first_a = 0;
  while (first_a < a.size() && sgn(a[first_a]) == 0) ++first_a;
  for (std::size_t i = first_a; i < a.size() && i <= order; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) {
      if (sgn(b[j]) == 0) continue;
      mpz_addmul(c[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  return c;
}

}  // namespace

PlantedSeries::PlantedSeries(const WeightSequence& w, std::size_t order) {
  if (order < 1) throw std::invalid_argument("series order must be >= 1");
  t_.assign(order + 1, Integer(0));

  // omega_k V^k D integral
  Rational r = w.base();
  if (w.family() == Family::geometric || w.family() == Family::poisson) {
    r *= pow_rational(w.parameter(), w.exponent());
  }
  V_ = r.get_den();
  std::size_t kmax = order - 1;
  if (auto m = w.max_index()) kmax = std::min(kmax, *m);

  const bool geometric_fast = w.family() == Family::geometric && !w.cutoff() && w.parameter() > 0;
  if (geometric_fast) kmax = std::min<std::size_t>(kmax, 1);

  std::vector<Rational> q(kmax + 1);
  Integer vk = 1;
  D_ = 1;
  for (std::size_t k = 0; k <= kmax; ++k) {
    q[k] = w.weight_exact(k) * vk;
    q[k].canonicalize();
    D_ = lcm(D_, q[k].get_den());
    vk *= V_;
  }
  std::vector<Integer> c(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) {
    Rational s = q[k] * D_;
    s.canonicalize();
    if (s.get_den() != 1) throw std::logic_error("weight integerisation failed");
    c[k] = s.get_num();
  }

  t_[1] = c[0];
  if (geometric_fast) {
    // t = x c0 / (1 - U t)  =>  t_n = c0 [n = 1] + U (t^2)_n
    const Integer U = r.get_num();
    Integer acc;
    for (std::size_t n = 2; n <= order; ++n) {
      acc = 0;
      for (std::size_t i = 1; i < n; ++i) mpz_addmul(acc.get_mpz_t(), t_[i].get_mpz_t(), t_[n - i].get_mpz_t());
      t_[n] = U * acc;
    }
    return;
  }

  // Order-by-order fixed point with the powers table P_k = t^k.
  const std::size_t K = kmax;
  std::vector<std::vector<Integer>> P(K + 1);
  for (std::size_t k = 2; k <= K; ++k) P[k].assign(order + 1, Integer(0));
  Integer acc;
  for (std::size_t n = 2; n <= order; ++n) {
    const std::size_t m = n - 1;
    const std::size_t kk = std::min(K, m);
    for (std::size_t k = 2; k <= kk; ++k) {
      const std::vector<Integer>& prev = k == 2 ? t_ : P[k - 1];
      acc = 0;
      for (std::size_t i = 1; i + k - 1 <= m; ++i) {
        if (sgn(t_[i]) == 0 || sgn(prev[m - i]) == 0) continue;
        mpz_addmul(acc.get_mpz_t(), t_[i].get_mpz_t(), prev[m - i].get_mpz_t());
      }
      P[k][m] = acc;
    }
    acc = 0;
    for (std::size_t k = 1; k <= kk; ++k) {
      if (sgn(c[k]) == 0) continue;
      const Integer& pk = k == 1 ? t_[m] : P[k][m];
      if (sgn(pk) == 0) continue;
      mpz_addmul(acc.get_mpz_t(), c[k].get_mpz_t(), pk.get_mpz_t());
    }
    t_[n] = acc;
  }
}

Rational PlantedSeries::coeff(std::size_t n) const {
  if (n == 0 || sgn(t_.at(n)) == 0) return 0;
  Rational q(t_[n], pow_integer(D_, n) * pow_integer(V_, n - 1));
  q.canonicalize();
  return q;
}

long double PlantedSeries::log_coeff(std::size_t n) const {
  if (n == 0 || sgn(t_.at(n)) == 0) return -std::numeric_limits<long double>::infinity();
  return log_integer(t_[n]) - static_cast<long double>(n) * log_integer(D_) -
         static_cast<long double>(n - 1) * log_integer(V_);
}

void PlantedSeries::ensure_powers(std::size_t j) const {
  if (powers_.empty()) {
    std::vector<Integer> one(order() + 1, Integer(0));
    one[0] = 1;
    powers_.push_back(std::move(one));
  }
  while (powers_.size() <= j) powers_.push_back(multiply(powers_.back(), t_, order()));
}

const std::vector<Integer>& PlantedSeries::power_numerators(std::size_t j) const {
  ensure_powers(j);
  return powers_[j];
}

Rational PlantedSeries::power_coeff(std::size_t j, std::size_t m) const {
  if (m < j || m > order()) return 0;
  const Integer& p = power_numerators(j)[m];
  if (sgn(p) == 0) return 0;
  Rational q(p, pow_integer(D_, m) * pow_integer(V_, m - j));
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------

namespace {

SeriesTable make_table(std::string label, std::size_t order) {
  SeriesTable s;
  s.label = std::move(label);
  s.truncation = order;
  s.coeffs.assign(order + 1, Rational(0));
  return s;
}

std::size_t vertex_jmax(const WeightSequence& w, unsigned d, std::size_t m) {
  std::size_t jmax = m;
  if (auto K = w.max_index()) jmax = std::min(jmax, (*K + 1) / d);
  return jmax;
}

void add_vertex_terms(const WeightSequence& w, unsigned d, const PlantedSeries& sd, std::size_t m,
                      std::vector<VertexTerm>* terms, Rational* total) {
  const std::size_t jmax = vertex_jmax(w, d, m);
  const Rational phid(static_cast<long>(totient(d)), static_cast<long>(d));
  for (std::size_t j = 1; j <= jmax; ++j) {
    const std::size_t k = j * d - 1;
    if (!w.positive(k)) continue;
    Rational p = sd.power_coeff(j, m);
    if (p == 0) continue;
    Rational term = phid * w.weight_exact(k) * p / Rational(static_cast<long>(j));
    term.canonicalize();
    if (terms) terms->push_back(VertexTerm{d, j, term});
    if (total) *total += term;
  }
}

}  // namespace

SeriesTable planted_series(const WeightSequence& w, unsigned d, std::size_t order) {
  if (d == 0) throw std::invalid_argument("d must be >= 1");
  PlantedSeries s(d == 1 ? w : w.powered(d), order);
  SeriesTable out = make_table(d == 1 ? "T" : "T^" + std::to_string(d), order);
  for (std::size_t n = 1; n <= order; ++n) out.coeffs[n] = s.coeff(n);
  return out;
}

SeriesTable symmetry_series_vertex(const WeightSequence& w, std::size_t order) {
  SeriesTable out = make_table("Rv", order);
  if (order < 3) return out;
  for (unsigned d = 2; d + 1 <= order; ++d) {
    const std::size_t M = (order - 1) / d;
    if (M < 1) break;
    PlantedSeries sd(w.powered(d), M);
    for (std::size_t m = 1; m <= M; ++m) add_vertex_terms(w, d, sd, m, nullptr, &out.coeffs[m * d + 1]);
  }
  return out;
}

SeriesTable symmetry_series_edge(const WeightSequence& w, std::size_t order) {
  SeriesTable out = make_table("Re", order);
  if (order < 2) return out;
  PlantedSeries s2(w.powered(2), order / 2);
  for (std::size_t m = 1; 2 * m <= order; ++m) out.coeffs[2 * m] = s2.coeff(m) / 2;
  return out;
}

namespace {

SeriesTable labelled_from(const PlantedSeries& s, std::size_t order) {
  SeriesTable out = make_table("L", order);
  const auto& p2 = s.power_numerators(2);
  for (std::size_t n = 2; n <= order; ++n) {
    if (sgn(p2[n]) == 0) continue;
    Rational q(p2[n], pow_integer(s.D(), n) * pow_integer(s.V(), n - 2) * Integer(2 * (n - 1)));
    q.canonicalize();
    out.coeffs[n] = q;
  }
  return out;
}

}  // namespace

SeriesTable labelled_series(const WeightSequence& w, std::size_t order) {
  if (order < 2) return make_table("L", order);
  return labelled_from(PlantedSeries(w, order), order);
}

UnrootedDecomposition unrooted_decomposition(const WeightSequence& w, std::size_t order) {
  if (order < 2) throw std::invalid_argument("unrooted series needs order >= 2");
  UnrootedDecomposition out;
  out.labelled = labelled_series(w, order);
  out.vertex = symmetry_series_vertex(w, order);
  out.edge = symmetry_series_edge(w, order);
  out.total = make_table("ZU", order);
  for (std::size_t n = 2; n <= order; ++n) {
    out.total.coeffs[n] = out.labelled.coeffs[n] + out.vertex.coeffs[n] + out.edge.coeffs[n];
  }
  return out;
}

SeriesTable unrooted_series(const WeightSequence& w, std::size_t order) {
  return unrooted_decomposition(w, order).total;
}

std::vector<VertexTerm> vertex_terms(const WeightSequence& w, std::size_t n) {
  std::vector<VertexTerm> out;
  if (n < 3) return out;
  for (unsigned d = 2; d <= n - 1; ++d) {
    if ((n - 1) % d != 0) continue;
    const std::size_t m = (n - 1) / d;
    PlantedSeries sd(w.powered(d), m);
    add_vertex_terms(w, d, sd, m, &out, nullptr);
  }
  return out;
}

std::vector<std::optional<Rational>> symmetry_probabilities(const WeightSequence& w, std::size_t order) {
  UnrootedDecomposition u = unrooted_decomposition(w, order);
  std::vector<std::optional<Rational>> out(order + 1);
  for (std::size_t n = 2; n <= order; ++n) {
    if (u.total.coeffs[n] == 0) continue;
    Rational p = (u.vertex.coeffs[n] + u.edge.coeffs[n]) / u.total.coeffs[n];
    p.canonicalize();
    out[n] = p;
  }
  return out;
}

std::optional<Rational> symmetry_probability(const WeightSequence& w, std::size_t n) {
  if (n < 2) return std::nullopt;
  return symmetry_probabilities(w, n)[n];
}

std::vector<std::size_t> admissible_sizes(const WeightSequence& w, std::size_t n_max) {
  std::vector<std::size_t> out;
  if (n_max < 2) return out;
  SeriesTable z = unrooted_series(w, n_max);
  for (std::size_t n = 2; n <= n_max; ++n) {
    if (z.coeffs[n] > 0) out.push_back(n);
  }
  return out;
}

// ---------------------------------------------------------------------------

long double richardson3(long double k, long double h, long double r0, long double r1, long double r2) {
  const long double k1 = k + h, k2 = k + 2.0L * h;
  return (k * k * r0 - 2.0L * k1 * k1 * r1 + k2 * k2 * r2) / (2.0L * h * h);
}

namespace {

constexpr mp_bitcnt_t kMpfBits = 256;

std::vector<mpf_class> to_mpf(const SeriesTable& g) {
  std::vector<mpf_class> out;
  out.reserve(g.coeffs.size());
  for (const auto& q : g.coeffs) out.emplace_back(q, kMpfBits);
  return out;
}

long double to_ld(const mpf_class& f) {
  if (sgn(f) == 0) return 0.0L;
  long e = 0;
  double m = mpf_get_d_2exp(&e, f.get_mpf_t());
  return std::ldexp(static_cast<long double>(m), static_cast<int>(e));
}

}  // namespace

SubexpDiagnostics subexp_diagnostics(const SeriesTable& g, std::size_t span) {
  if (span == 0) throw std::invalid_argument("span must be positive");
  const std::size_t N = g.coeffs.size() ? g.coeffs.size() - 1 : 0;
  std::size_t nonzero = 0;
  for (const auto& q : g.coeffs) nonzero += q > 0 ? 1 : 0;
  if (nonzero < 3) throw std::invalid_argument("insufficient data: fewer than 3 non-zero coefficients");

  const std::vector<mpf_class> gf = to_mpf(g);
  SubexpDiagnostics out;
  out.span = span;
  for (std::size_t k = 0; k + span <= N; ++k) {
    if (sgn(gf[k]) <= 0 || sgn(gf[k + span]) <= 0) continue;
    mpf_class r(gf[k] / gf[k + span], kMpfBits);
    mpf_class conv(0, kMpfBits);
    for (std::size_t i = 0; i <= k; ++i) conv += gf[i] * gf[k - i];
    out.lattice.push_back(k);
    out.ratio_sequence.push_back(to_ld(r));
    out.convolution_ratio.push_back(to_ld(mpf_class(conv / gf[k], kMpfBits)));
  }
  if (out.lattice.size() < 3) throw std::invalid_argument("insufficient data: fewer than 3 lattice ratios");
  const std::size_t L = out.lattice.size();
  const long double d = static_cast<long double>(span);
  out.last_ratio = std::pow(out.ratio_sequence[L - 1], 1.0L / d);

  // three equally spaced lattice points at the top of the range
  std::size_t i2 = L - 1;
  std::size_t i1 = L, i0 = L;
  for (std::size_t i = i2; i-- > 0;) {
    if (i1 == L && out.lattice[i] + span == out.lattice[i2]) {
      i1 = i;
    } else if (i1 != L && out.lattice[i] + span == out.lattice[i1]) {
      i0 = i;
      break;
    }
  }
  if (i0 == L) {
    out.estimated_rho = out.last_ratio;
    return out;
  }
  // shift by one so k = 0 stays regular
  long double k0 = static_cast<long double>(out.lattice[i0]) + 1.0L;
  long double lim = richardson3(k0, d, out.ratio_sequence[i0], out.ratio_sequence[i1], out.ratio_sequence[i2]);
  out.estimated_rho = std::pow(lim, 1.0L / d);
  return out;
}

long double PolynomialFunction::value(long double z) const {
  long double acc = 0.0L;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + to_long_double(coeffs[i]);
  return acc;
}

long double PolynomialFunction::derivative(long double z) const {
  long double acc = 0.0L;
  for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * z + static_cast<long double>(i) * to_long_double(coeffs[i]);
  return acc;
}

CompositionReport composition_asymptotic_check(const PolynomialFunction& f, const SeriesTable& g,
                                               std::size_t span, long double g_at_rho) {
  bool constant = true;
  for (std::size_t i = 1; i < f.coeffs.size(); ++i) constant = constant && f.coeffs[i] == 0;
  if (constant) throw std::invalid_argument("f must be non-constant");
  if (span == 0) throw std::invalid_argument("span must be positive");

  const std::size_t N = g.coeffs.size() - 1;
  const std::vector<mpf_class> gf = to_mpf(g);
  // f(g) by Horner on truncated series
  std::vector<mpf_class> fg(N + 1, mpf_class(0, kMpfBits));
  for (std::size_t i = f.coeffs.size(); i-- > 0;) {
    std::vector<mpf_class> next(N + 1, mpf_class(0, kMpfBits));
    for (std::size_t a = 0; a <= N; ++a) {
      if (sgn(fg[a]) == 0) continue;
      for (std::size_t b = 0; a + b <= N; ++b) {
        if (sgn(gf[b]) != 0) next[a + b] += fg[a] * gf[b];
      }
    }
    next[0] += mpf_class(f.coeffs[i], kMpfBits);
    fg = std::move(next);
  }
  CompositionReport out;
  out.g_at_rho = g_at_rho;
  out.target = f.derivative(g_at_rho);
  for (std::size_t n = 1; n <= N; ++n) {
    if (sgn(gf[n]) <= 0) continue;
    out.n.push_back(n);
    out.ratio.push_back(to_ld(mpf_class(fg[n] / gf[n], kMpfBits)));
  }
  if (out.ratio.empty()) throw std::invalid_argument("insufficient data: g has no positive coefficients");
  out.final_ratio = out.ratio.back();
  out.relative_error = std::fabs(out.final_ratio - out.target) / std::fabs(out.target);
  return out;
}

SeriesTable tree_series_over_x(const WeightSequence& w, std::size_t order) {
  PlantedSeries s(w, order + 1);
  SeriesTable out = make_table("T/x", order);
  for (std::size_t k = 0; k <= order; ++k) out.coeffs[k] = s.coeff(k + 1);
  return out;
}

}  // namespace sgt
