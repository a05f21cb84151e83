#include "sgtree/certified.hpp"

#include <mpfr.h>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace sgt {

namespace {

constexpr mpfr_prec_t kPrec = 256;

struct Mp {
  mpfr_t v;
  Mp() { mpfr_init2(v, kPrec); mpfr_set_zero(v, 1); }
  Mp(const Mp& o) { mpfr_init2(v, kPrec); mpfr_set(v, o.v, MPFR_RNDN); }
  Mp& operator=(const Mp& o) { mpfr_set(v, o.v, MPFR_RNDN); return *this; }
  ~Mp() { mpfr_clear(v); }
};

/// Lower and upper bounds of omega_k.
void weight_bounds(const WeightSequence& w, std::size_t k, Mp& lo, Mp& hi) {
  if (!w.positive(k)) {
    mpfr_set_zero(lo.v, 1);
    mpfr_set_zero(hi.v, 1);
    return;
  }
  if (w.exact()) {
    Rational q = w.weight_exact(k);
    mpfr_set_q(lo.v, q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi.v, q.get_mpq_t(), MPFR_RNDU);
    return;
  }
  // power family with real beta: a b^k (k+1)^(-beta d)
  Rational ab = w.scale() * pow_rational(w.base(), k);
  Mp e, x;
  mpfr_set_d(e.v, -w.beta(), MPFR_RNDN);  // beta is a double, exact
  mpfr_mul_ui(e.v, e.v, w.exponent(), MPFR_RNDN);  // exact at 256 bits
  mpfr_set_ui(x.v, static_cast<unsigned long>(k + 1), MPFR_RNDN);
  mpfr_pow(lo.v, x.v, e.v, MPFR_RNDD);
  mpfr_pow(hi.v, x.v, e.v, MPFR_RNDU);
  mpfr_mul_q(lo.v, lo.v, ab.get_mpq_t(), MPFR_RNDD);
  mpfr_mul_q(hi.v, hi.v, ab.get_mpq_t(), MPFR_RNDU);
}

class SignOracle {
 public:
  explicit SignOracle(const WeightSequence& w) : w_(w) { grow(64); }

  /// Sign of g(t) = sum (k-1) omega_k t^k; 0 when undecidable at 256 bits.
  int sign(const Mp& t) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      Mp lo, hi;
      if (!evaluate(t, lo, hi)) {
        if (!grow(terms() * 2)) break;
        continue;
      }
      if (mpfr_sgn(lo.v) > 0) return 1;
      if (mpfr_sgn(hi.v) < 0) return -1;
      if (w_.finite_support() || !grow(terms() * 2)) return 0;
    }
    return 0;
  }

 private:
  std::size_t terms() const { return lo_.size(); }

  bool grow(std::size_t k_max) {
    if (auto m = w_.max_index()) k_max = std::min(k_max, *m + 1);
    if (k_max > (std::size_t{1} << 22)) return false;
    if (k_max <= lo_.size()) return false;
    for (std::size_t k = lo_.size(); k < k_max; ++k) {
      Mp l, h;
      weight_bounds(w_, k, l, h);
      lo_.push_back(l);
      hi_.push_back(h);
    }
    return true;
  }

  /// Bound on sum_{k >= K} (k-1) omega_k t^k; false if none is available.
  bool tail_bound(const Mp& t, Mp& out) {
    const std::size_t K = terms();
    if (auto m = w_.max_index(); m && K > *m) {
      mpfr_set_zero(out.v, 1);
      return true;
    }
    const long double tt = mpfr_get_ld(t.v, MPFR_RNDU);
    const long double a = to_long_double(w_.scale()) * (1.0L + 1e-15L);
    const long double b = to_long_double(w_.base()) * (1.0L + 1e-15L);
    const long double kk = static_cast<long double>(K);
    long double bound = std::numeric_limits<long double>::infinity();
    if (w_.family() == Family::power) {
      // (k-1) a (bt)^k (k+1)^-s <= a (K+1)^-s k v^k for k >= K
      long double v = b * tt;
      if (v >= 1.0L) return false;
      long double s = static_cast<long double>(w_.beta()) * w_.exponent();
      long double geo = std::pow(v, kk) * (kk - (kk - 1.0L) * v) / ((1.0L - v) * (1.0L - v));
      bound = a * std::pow(kk + 1.0L, -s) * geo;
    } else if (w_.family() == Family::poisson || w_.family() == Family::geometric) {
      // term ratio for k >= K is at most 2 b t q / (K+1)^d, q = lambda^d or p^d
      long double d = static_cast<long double>(w_.exponent());
      long double q = std::pow(to_long_double(w_.parameter()) * (1.0L + 1e-15L), d);
      long double r = w_.family() == Family::poisson ? 2.0L * b * tt * q / std::pow(kk + 1.0L, d)
                                                     : 2.0L * b * tt * q;
      if (r >= 1.0L) return false;
      Mp first;
      mpfr_pow_ui(first.v, t.v, K, MPFR_RNDU);
      Mp wl, wh;
      weight_bounds(w_, K, wl, wh);
      mpfr_mul(first.v, first.v, wh.v, MPFR_RNDU);
      mpfr_mul_ui(first.v, first.v, K, MPFR_RNDU);
      bound = mpfr_get_ld(first.v, MPFR_RNDU) / (1.0L - r) * (1.0L + 1e-12L);
    }
    if (!std::isfinite(bound)) return false;
    mpfr_set_ld(out.v, bound, MPFR_RNDU);
    return true;
  }

  bool evaluate(const Mp& t, Mp& lo, Mp& hi) {
    Mp tail;
    if (!tail_bound(t, tail)) return false;
    // tail must be negligible for the bracket to be informative
    mpfr_neg(lo.v, hi_[0].v, MPFR_RNDD);
    mpfr_neg(hi.v, lo_[0].v, MPFR_RNDU);
    Mp tk_lo, tk_hi, term;
    mpfr_set(tk_lo.v, t.v, MPFR_RNDD);
    mpfr_set(tk_hi.v, t.v, MPFR_RNDU);
    for (std::size_t k = 2; k < terms(); ++k) {
      mpfr_mul(tk_lo.v, tk_lo.v, t.v, MPFR_RNDD);
      mpfr_mul(tk_hi.v, tk_hi.v, t.v, MPFR_RNDU);
      mpfr_mul(term.v, lo_[k].v, tk_lo.v, MPFR_RNDD);
      mpfr_mul_ui(term.v, term.v, k - 1, MPFR_RNDD);
      mpfr_add(lo.v, lo.v, term.v, MPFR_RNDD);
      mpfr_mul(term.v, hi_[k].v, tk_hi.v, MPFR_RNDU);
      mpfr_mul_ui(term.v, term.v, k - 1, MPFR_RNDU);
      mpfr_add(hi.v, hi.v, term.v, MPFR_RNDU);
    }
    mpfr_add(hi.v, hi.v, tail.v, MPFR_RNDU);
    return true;
  }

  const WeightSequence& w_;
  std::vector<Mp> lo_, hi_;
};

}  // namespace

TauBracket certified_tau(const WeightSequence& w) {
  SignOracle oracle(w);
  Mp lo, hi, mid, width;
  mpfr_set_zero(lo.v, 1);
  const long double rho = w.radius();
  if (std::isfinite(rho)) {
    // g(t) >= 0 near rho whenever nu >= 1; the open end is never evaluated.
    if (auto r = w.radius_exact()) {
      mpfr_set_q(hi.v, r->get_mpq_t(), MPFR_RNDN);
    } else {
      mpfr_set_ld(hi.v, rho, MPFR_RNDN);
    }
  } else {
    mpfr_set_ui(hi.v, 1, MPFR_RNDN);
    int guard = 0;
    while (oracle.sign(hi) < 0) {
      mpfr_set(lo.v, hi.v, MPFR_RNDN);
      mpfr_mul_2ui(hi.v, hi.v, 1, MPFR_RNDN);
      if (++guard > 200) throw std::runtime_error("could not bracket tau for " + w.describe());
    }
  }
  for (int it = 0; it < 400; ++it) {
    mpfr_sub(width.v, hi.v, lo.v, MPFR_RNDU);
    if (mpfr_cmp_ui_2exp(width.v, 1, -80) <= 0) break;
    mpfr_add(mid.v, lo.v, hi.v, MPFR_RNDN);
    mpfr_div_2ui(mid.v, mid.v, 1, MPFR_RNDN);
    int s = oracle.sign(mid);
    if (s == 0) {
      // undecidable at working precision: the root is within rounding of mid
      mpfr_set(lo.v, mid.v, MPFR_RNDN);
      mpfr_set(hi.v, mid.v, MPFR_RNDN);
      break;
    }
    mpfr_set(s < 0 ? lo.v : hi.v, mid.v, MPFR_RNDN);
  }
  TauBracket out;
  out.lower = mpfr_get_ld(lo.v, MPFR_RNDD);
  out.upper = mpfr_get_ld(hi.v, MPFR_RNDU);
  mpfr_add(mid.v, lo.v, hi.v, MPFR_RNDN);
  mpfr_div_2ui(mid.v, mid.v, 1, MPFR_RNDN);
  out.value = mpfr_get_ld(mid.v, MPFR_RNDN);
  return out;
}

}  // namespace sgt
