#include "sgtree/weights.hpp"

#include "sgtree/certified.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sgt {

namespace {

constexpr long double kInf = std::numeric_limits<long double>::infinity();

bool is_integer_beta(double beta) { return beta >= 0.0 && std::floor(beta) == beta && beta < 64.0; }

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::explicit_list: return "explicit";
    case Family::geometric: return "geometric";
    case Family::poisson: return "poisson";
    case Family::power: return "power";
  }
  return "unknown";
}

WeightSequence WeightSequence::explicit_list(std::vector<Rational> weights) {
  while (!weights.empty() && weights.back() == 0) weights.pop_back();
  if (weights.empty()) throw InvariantError("weight list is empty or all zero");
  for (const auto& q : weights) {
    if (q < 0) throw InvariantError("weights must be non-negative");
  }
  WeightSequence w;
  w.family_ = Family::explicit_list;
  w.list_ = std::move(weights);
  w.validate();
  return w;
}

WeightSequence WeightSequence::geometric(Rational p, std::optional<std::size_t> cutoff) {
  if (p < 0) throw InvariantError("geometric parameter p must be non-negative");
  WeightSequence w;
  w.family_ = Family::geometric;
  w.param_ = std::move(p);
  w.cutoff_ = cutoff;
  w.validate();
  return w;
}

WeightSequence WeightSequence::poisson(Rational lambda, std::optional<std::size_t> cutoff) {
  if (lambda < 0) throw InvariantError("poisson parameter lambda must be non-negative");
  WeightSequence w;
  w.family_ = Family::poisson;
  w.param_ = std::move(lambda);
  w.cutoff_ = cutoff;
  w.validate();
  return w;
}

WeightSequence WeightSequence::power(double beta, std::optional<std::size_t> cutoff) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvariantError("power exponent beta must be finite and >= 0");
  WeightSequence w;
  w.family_ = Family::power;
  w.beta_ = beta;
  w.cutoff_ = cutoff;
  w.validate();
  return w;
}

void WeightSequence::validate() const {
  if (!positive(0)) throw InvariantError("omega_0 must be positive");
  if (!(radius() > 0.0L)) throw InvariantError("radius of convergence of Phi must be positive");
}

std::optional<std::size_t> WeightSequence::max_index() const {
  std::optional<std::size_t> m;
  switch (family_) {
    case Family::explicit_list: m = list_.size() - 1; break;
    case Family::geometric:
    case Family::poisson:
      if (param_ == 0) m = 0;
      break;
    case Family::power: break;
  }
  if (cutoff_) m = m ? std::min(*m, *cutoff_) : *cutoff_;
  return m;
}

bool WeightSequence::exact() const {
  return family_ != Family::power || is_integer_beta(beta_);
}

bool WeightSequence::positive(std::size_t k) const {
  auto m = max_index();
  if (m && k > *m) return false;
  switch (family_) {
    case Family::explicit_list: return list_[k] > 0;
    case Family::geometric:
    case Family::poisson: return k == 0 || param_ > 0;
    case Family::power: return true;
  }
  return false;
}

Rational WeightSequence::kernel_exact(std::size_t k) const {
  if (!positive(k)) return 0;
  switch (family_) {
    case Family::explicit_list: return list_[k];
    case Family::geometric: return pow_rational(param_, k);
    case Family::poisson: {
      Rational q = pow_rational(param_, k);
      Integer f;
      mpz_fac_ui(f.get_mpz_t(), k);
      q /= f;
      return q;
    }
    case Family::power: {
      if (!is_integer_beta(beta_)) throw std::logic_error("power weights with non-integer beta are not rational");
      Rational q(1);
      q.get_den() = pow_integer(Integer(static_cast<unsigned long>(k + 1)), static_cast<unsigned long>(beta_));
      return q;
    }
  }
  return 0;
}

long double WeightSequence::kernel_log(std::size_t k) const {
  if (!positive(k)) return -kInf;
  switch (family_) {
    case Family::explicit_list: return log_rational(list_[k]);
    case Family::geometric: return k == 0 ? 0.0L : static_cast<long double>(k) * log_rational(param_);
    case Family::poisson:
      return (k == 0 ? 0.0L : static_cast<long double>(k) * log_rational(param_)) -
             std::lgamma(static_cast<long double>(k) + 1.0L);
    case Family::power: return -static_cast<long double>(beta_) * std::log(static_cast<long double>(k) + 1.0L);
  }
  return -kInf;
}

Rational WeightSequence::weight_exact(std::size_t k) const {
  if (!positive(k)) return 0;
  Rational q = pow_rational(kernel_exact(k), exponent_);
  return scale_ * pow_rational(base_, k) * q;
}

long double WeightSequence::log_weight(std::size_t k) const {
  if (!positive(k)) return -kInf;
  return log_rational(scale_) + static_cast<long double>(k) * log_rational(base_) +
         static_cast<long double>(exponent_) * kernel_log(k);
}

long double WeightSequence::weight(std::size_t k) const {
  if (!positive(k)) return 0.0L;
  return std::exp(log_weight(k));
}

std::size_t WeightSequence::support_gcd(std::size_t horizon) const {
  auto m = max_index();
  std::size_t last = m ? *m : horizon;
  std::size_t g = 0;
  for (std::size_t k = 1; k <= last; ++k) {
    if (positive(k)) g = std::gcd(g, k);
    if (g == 1) break;
  }
  return g == 0 ? 1 : g;
}

bool WeightSequence::has_branching() const {
  if (!positive(0)) return false;
  auto m = max_index();
  if (!m) return true;
  for (std::size_t k = 2; k <= *m; ++k) {
    if (positive(k)) return true;
  }
  return false;
}

long double WeightSequence::radius() const {
  if (finite_support()) return kInf;
  long double kernel_radius = kInf;
  if (family_ == Family::geometric) kernel_radius = 1.0L / to_long_double(param_);
  if (family_ == Family::power) kernel_radius = 1.0L;
  if (!std::isfinite(kernel_radius)) return kInf;
  return std::pow(kernel_radius, static_cast<long double>(exponent_)) / to_long_double(base_);
}

std::optional<Rational> WeightSequence::radius_exact() const {
  if (finite_support() || family_ == Family::poisson) return std::nullopt;
  Rational kr = family_ == Family::geometric ? Rational(1 / param_) : Rational(1);
  return Rational(pow_rational(kr, exponent_) / base_);
}

WeightSequence WeightSequence::tilted(const Rational& a, const Rational& b) const {
  if (a <= 0 || b <= 0) throw InvariantError("tilting parameters must be positive");
  WeightSequence w = *this;
  w.scale_ *= a;
  w.base_ *= b;
  return w;
}

WeightSequence WeightSequence::powered(unsigned d) const {
  if (d == 0) throw std::invalid_argument("power of a weight sequence needs d >= 1");
  WeightSequence w = *this;
  w.scale_ = pow_rational(scale_, d);
  w.base_ = pow_rational(base_, d);
  w.exponent_ = exponent_ * d;
  return w;
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  os << family_name(family_);
  switch (family_) {
    case Family::explicit_list:
      os << "(";
      for (std::size_t i = 0; i < list_.size(); ++i) os << (i ? "," : "") << list_[i].get_str();
      os << ")";
      break;
    case Family::geometric: os << "(p=" << param_.get_str() << ")"; break;
    case Family::poisson: os << "(lambda=" << param_.get_str() << ")"; break;
    case Family::power: os << "(beta=" << beta_ << ")"; break;
  }
  if (cutoff_) os << "[k<=" << *cutoff_ << "]";
  if (scale_ != 1 || base_ != 1) os << "*tilt(" << scale_.get_str() << "," << base_.get_str() << ")";
  if (exponent_ != 1) os << "^" << exponent_;
  return os.str();
}

std::size_t compute_span(const WeightSequence& w) {
  if (!w.positive(0)) throw InvariantError("omega_0 must be positive");
  if (!w.has_branching()) throw InvariantError("some omega_k with k >= 2 must be positive");
  return w.support_gcd();
}

WeightSequence tilt(const WeightSequence& w, const Rational& a, const Rational& b) { return w.tilted(a, b); }

// ---------------------------------------------------------------------------
// Moment sums M_j(t) = sum_k k^j omega_k t^k.

namespace {

struct Moments {
  long double m0 = 0.0L, m1 = 0.0L, m2 = 0.0L;
};

/// sum_{m >= n} m^-s by Euler-Maclaurin; n >= 8 keeps the remainder far
/// below 1e-15 relative for s > 1.
long double zeta_tail(long double s, long double n) {
  long double ns = std::pow(n, -s);
  long double r = n * ns / (s - 1.0L) + ns / 2.0L;
  long double c1 = s * ns / n;
  long double c3 = s * (s + 1.0L) * (s + 2.0L) * ns / (n * n * n);
  long double c5 = s * (s + 1.0L) * (s + 2.0L) * (s + 3.0L) * (s + 4.0L) * ns / (n * n * n * n * n);
  return r + c1 / 12.0L - c3 / 720.0L + c5 / 30240.0L;
}

/// zeta(s) as partial sum plus Euler-Maclaurin tail.
long double zeta_sum(long double s) {
  constexpr int n = 64;
  long double acc = 0.0L;
  for (int m = n - 1; m >= 1; --m) acc += std::pow(static_cast<long double>(m), -s);
  return acc + zeta_tail(s, n);
}

Moments finite_moments(const WeightSequence& w, long double t, std::size_t last) {
  Moments out;
  for (std::size_t k = 0; k <= last; ++k) {
    if (!w.positive(k)) continue;
    long double term = std::exp(w.log_weight(k) + (k == 0 ? 0.0L : static_cast<long double>(k) * std::log(t)));
    long double kk = static_cast<long double>(k);
    out.m0 += term;
    out.m1 += kk * term;
    out.m2 += kk * kk * term;
  }
  return out;
}

Moments series_moments(const WeightSequence& w, long double t) {
  // Direct summation for infinite support strictly inside the disc.
  Moments out;
  long double lt = std::log(t);
  std::size_t stall = 0;
  for (std::size_t k = 0; k < 20'000'000; ++k) {
    long double lw = w.log_weight(k);
    long double term = std::exp(lw + (k == 0 ? 0.0L : static_cast<long double>(k) * lt));
    long double kk = static_cast<long double>(k);
    out.m0 += term;
    out.m1 += kk * term;
    out.m2 += kk * kk * term;
    if (k > 8 && kk * kk * term < 1e-22L * out.m2) {
      if (++stall > 16) return out;
    } else {
      stall = 0;
    }
  }
  throw std::runtime_error("moment series did not converge for " + w.describe());
}

Moments moments(const WeightSequence& w, long double t) {
  if (t <= 0.0L) return Moments{w.weight(0), 0.0L, 0.0L};
  if (auto m = w.max_index()) return finite_moments(w, t, *m);

  const long double a = to_long_double(w.scale());
  const long double d = static_cast<long double>(w.exponent());
  if (w.family() == Family::geometric) {
    long double u = to_long_double(w.base()) * std::pow(to_long_double(w.parameter()), d) * t;
    if (u >= 1.0L) return Moments{kInf, kInf, kInf};
    return Moments{a / (1.0L - u), a * u / ((1.0L - u) * (1.0L - u)),
                   a * u * (1.0L + u) / ((1.0L - u) * (1.0L - u) * (1.0L - u))};
  }
  if (w.family() == Family::poisson && w.exponent() == 1) {
    long double x = to_long_double(w.base()) * to_long_double(w.parameter()) * t;
    long double e = a * std::exp(x);
    return Moments{e, x * e, (x * x + x) * e};
  }
  if (w.family() == Family::power) {
    long double u = to_long_double(w.base()) * t;
    long double s = static_cast<long double>(w.beta()) * d;
    if (std::fabs(u - 1.0L) < 1e-15L) u = 1.0L;
    if (u > 1.0L) return Moments{kInf, kInf, kInf};
    if (u == 1.0L) {
      // sum_k k^j (k+1)^-s = sum_m (m-1)^j m^-s
      long double z0 = s > 1.0L ? zeta_sum(s) : kInf;
      long double z1 = s > 2.0L ? zeta_sum(s - 1.0L) : kInf;
      long double z2 = s > 3.0L ? zeta_sum(s - 2.0L) : kInf;
      Moments out;
      out.m0 = a * z0;
      out.m1 = s > 2.0L ? a * (z1 - z0) : kInf;
      out.m2 = s > 3.0L ? a * (z2 - 2.0L * z1 + z0) : kInf;
      return out;
    }
  }
  return series_moments(w, t);
}

}  // namespace

long double phi_value(const WeightSequence& w, long double t) { return moments(w, t).m0; }

long double phi_derivative(const WeightSequence& w, long double t) {
  if (t <= 0.0L) return w.weight(1);
  return moments(w, t).m1 / t;
}

long double psi_value(const WeightSequence& w, long double t) {
  if (t <= 0.0L) return 0.0L;
  Moments m = moments(w, t);
  if (!std::isfinite(m.m0)) return kInf;
  return m.m1 / m.m0;
}

Rational phi_exact(const WeightSequence& w, const Rational& t) {
  auto m = w.max_index();
  if (!m) throw std::logic_error("exact Phi needs finite support");
  Rational acc = 0;
  Rational tk = 1;
  for (std::size_t k = 0; k <= *m; ++k) {
    if (w.positive(k)) acc += w.weight_exact(k) * tk;
    tk *= t;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Offspring distribution.

namespace {

/// nu = lim_{t -> rho} Psi(t).
long double limit_nu(const WeightSequence& w) {
  if (auto m = w.max_index()) {
    for (std::size_t k = *m + 1; k-- > 0;) {
      if (w.positive(k)) return static_cast<long double>(k);
    }
    return 0.0L;
  }
  if (w.family() == Family::power) {
    long double s = static_cast<long double>(w.beta()) * w.exponent();
    if (s <= 2.0L) return kInf;
    long double z0 = zeta_sum(s);
    long double z1 = zeta_sum(s - 1.0L);
    return (z1 - z0) / z0;
  }
  return kInf;
}

TauBracket solve_tau_exact_finite(const WeightSequence& w) {
  // f(t) = sum (k-1) omega_k t^k is increasing on t > 0 with f(0) = -omega_0.
  const std::size_t last = *w.max_index();
  std::vector<Rational> c(last + 1);
  for (std::size_t k = 0; k <= last; ++k) c[k] = Rational(static_cast<long>(k) - 1) * w.weight_exact(k);
  auto f = [&](const Rational& t) {
    Rational acc = 0;
    for (std::size_t k = last + 1; k-- > 0;) acc = acc * t + c[k];
    return acc;
  };
  Rational lo = 0, hi = 1;
  int guard = 0;
  while (sgn(f(hi)) < 0) {
    lo = hi;
    hi *= 2;
    if (++guard > 4096) throw std::runtime_error("could not bracket tau");
  }
  TauBracket out;
  if (sgn(f(hi)) == 0) {
    out.exact = hi;
  } else {
    const Rational width = Rational(1, 1) / pow_rational(Rational(2), 80);
    while (hi - lo > width) {
      Rational mid = (lo + hi) / 2;
      int s = sgn(f(mid));
      if (s == 0) {
        out.exact = mid;
        break;
      }
      (s < 0 ? lo : hi) = mid;
    }
  }
  if (out.exact) {
    out.value = out.lower = out.upper = to_long_double(*out.exact);
  } else {
    out.lower = to_long_double(lo);
    out.upper = to_long_double(hi);
    out.value = to_long_double((lo + hi) / 2);
  }
  return out;
}

std::optional<TauBracket> solve_tau_closed_form(const WeightSequence& w) {
  if (w.finite_support()) return std::nullopt;
  Rational tau;
  if (w.family() == Family::geometric) {
    // Psi = u / (1 - u) with u = b p^d t, so Psi = 1 at u = 1/2.
    tau = Rational(1, 2) / (w.base() * pow_rational(w.parameter(), w.exponent()));
  } else if (w.family() == Family::poisson && w.exponent() == 1) {
    tau = 1 / (w.base() * w.parameter());
  } else {
    return std::nullopt;
  }
  TauBracket out;
  out.exact = tau;
  out.value = out.lower = out.upper = to_long_double(tau);
  return out;
}

}  // namespace

long double OffspringDistribution::pmf(std::size_t k) const {
  if (k < pi.size()) return pi[k];
  if (!source.positive(k)) return 0.0L;
  return std::exp(source.log_weight(k) + static_cast<long double>(k) * std::log(tau.value) - std::log(phi_tau));
}

long double OffspringDistribution::tail(std::size_t k) const {
  if (k == 0) return 1.0L;
  if (auto m = source.max_index()) {
    long double acc = 0.0L;
    for (std::size_t j = *m + 1; j-- > k;) acc += pmf(j);
    return acc;
  }
  if (source.family() == Family::geometric) {
    long double u = to_long_double(source.base()) *
                    std::pow(to_long_double(source.parameter()), static_cast<long double>(source.exponent())) *
                    tau.value;
    return std::pow(u, static_cast<long double>(k));
  }
  if (source.family() == Family::power && tau_at_radius) {
    // P(xi >= k) = sum_{m >= k+1} m^-s / zeta(s)
    long double s = static_cast<long double>(source.beta()) * source.exponent();
    long double n = static_cast<long double>(k + 1);
    long double acc = 0.0L;
    while (n < 64.0L) {
      acc += std::pow(n, -s);
      n += 1.0L;
    }
    return (acc + zeta_tail(s, n)) * to_long_double(source.scale()) / phi_tau;
  }
  // Light tails: sum forward until negligible.
  long double acc = 0.0L;
  for (std::size_t j = k;; ++j) {
    long double p = pmf(j);
    acc += p;
    if (j > k + 8 && p < 1e-24L * acc) break;
    if (j > k + 50'000'000) throw std::runtime_error("offspring tail did not converge");
  }
  return acc;
}

namespace {

void tabulate(OffspringDistribution& xi, std::size_t table_size) {
  const WeightSequence& w = xi.source;
  std::size_t n = table_size;
  if (auto m = w.max_index()) n = std::min(n, *m + 1);
  xi.tabulated = n;
  xi.pi.assign(n, 0.0L);
  const long double lt = std::log(xi.tau.value);
  const long double lphi = std::log(xi.phi_tau);
  for (std::size_t k = 0; k < n; ++k) {
    if (w.positive(k)) xi.pi[k] = std::exp(w.log_weight(k) + static_cast<long double>(k) * lt - lphi);
  }
  if (xi.tau.exact && w.finite_support() && w.exact()) {
    Rational phi = phi_exact(w, *xi.tau.exact);
    xi.pi_exact.resize(n);
    Rational tk = 1;
    for (std::size_t k = 0; k < n; ++k) {
      xi.pi_exact[k] = w.weight_exact(k) * tk / phi;
      tk *= *xi.tau.exact;
    }
  } else if (xi.tau.exact && w.exact() && w.family() == Family::geometric) {
    // pi_k = (1 - u) u^k with u = 1/2 at the root.
    xi.pi_exact.resize(n);
    for (std::size_t k = 0; k < n; ++k) xi.pi_exact[k] = Rational(1) / pow_rational(Rational(2), k + 1);
  }
}

void finish_moments(OffspringDistribution& xi) {
  const WeightSequence& w = xi.source;
  Moments m = moments(w, xi.tau.value);
  xi.phi_tau = m.m0;
  long double mean = m.m1 / m.m0;
  if (xi.tau_at_radius) {
    xi.mu = xi.nu;
  } else {
    xi.mu = 1.0L;
    (void)mean;
  }
  xi.criticality = xi.mu < 1.0L ? Criticality::subcritical : Criticality::critical;
  if (!std::isfinite(m.m2)) {
    xi.sigma2 = kInf;
  } else {
    xi.sigma2 = m.m2 / m.m0 - mean * mean;
  }
  // tau * Psi'(tau) by central differences, only strictly inside the disc.
  long double rho = w.radius();
  long double h = 1e-5L * xi.tau.value;
  if (!xi.tau_at_radius && xi.tau.value + h < rho) {
    long double up = psi_value(w, xi.tau.value + h);
    long double down = psi_value(w, xi.tau.value - h);
    xi.sigma2_finite_difference = xi.tau.value * (up - down) / (2.0L * h);
  }
}

}  // namespace

OffspringDistribution offspring_distribution(const WeightSequence& w, std::size_t table_size) {
  if (!w.positive(0)) throw InvariantError("omega_0 must be positive");
  if (!w.has_branching()) throw InvariantError("some omega_k with k >= 2 must be positive");

  OffspringDistribution xi;
  xi.source = w;
  xi.nu = limit_nu(w);

  if (w.finite_support() && w.exact()) {
    xi.tau = solve_tau_exact_finite(w);
  } else if (auto closed = solve_tau_closed_form(w)) {
    xi.tau = *closed;
  } else if (w.family() == Family::power && xi.nu < 1.0L) {
    xi.tau_at_radius = true;
    xi.tau.value = xi.tau.lower = xi.tau.upper = w.radius();
    if (auto r = w.radius_exact()) xi.tau.exact = *r;
  } else {
    xi.tau = certified_tau(w);
  }
  finish_moments(xi);
  tabulate(xi, table_size);
  return xi;
}

OffspringDistribution proposal_law(const WeightSequence& w, std::size_t table_size) {
  if (w.has_branching()) return offspring_distribution(w, table_size);
  auto m = w.max_index();
  if (!m) throw InvariantError("sequence without branching must have finite support");
  OffspringDistribution xi;
  xi.source = w;
  xi.tau.value = xi.tau.lower = xi.tau.upper = 1.0L;
  xi.tau.exact = Rational(1);
  xi.nu = limit_nu(w);
  Moments mo = finite_moments(w, 1.0L, *m);
  xi.phi_tau = mo.m0;
  xi.mu = mo.m1 / mo.m0;
  xi.sigma2 = mo.m2 / mo.m0 - xi.mu * xi.mu;
  xi.criticality = xi.mu < 1.0L ? Criticality::subcritical : Criticality::critical;
  tabulate(xi, table_size);
  return xi;
}

}  // namespace sgt
