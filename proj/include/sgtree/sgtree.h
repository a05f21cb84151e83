#ifndef SGTREE_SGTREE_H
#define SGTREE_SGTREE_H

/*
 * C interface to the sgtree library: weight sequences, exact series,
 * samplers, tree statistics and the verification checks.
 *
 * Conventions
 *   - every call returns an sgt_status; SGT_OK is zero;
 *   - on failure sgt_last_error() describes the problem (thread-local,
 *     valid until the next failing call on the same thread);
 *   - strings returned through char** are heap allocated and must be
 *     released with sgt_string_free;
 *   - handles are independent; distinct handles may be used from
 *     different threads concurrently, one handle may not.
 *   - exact values are "numerator/denominator" strings.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SGT_API __declspec(dllexport)
#else
#define SGT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sgt_status {
  SGT_OK = 0,
  SGT_ERR_INVALID_ARGUMENT = 1, /* bad argument, unknown name, malformed input */
  SGT_ERR_INVARIANT = 2,        /* weight sequence or size violates an invariant */
  SGT_ERR_SAMPLER_EXHAUSTED = 3,
  SGT_ERR_IO = 4,
  SGT_ERR_INTERNAL = 5
} sgt_status;

typedef enum sgt_mode {
  SGT_MODE_EXACT = 0,   /* U_n via the symmetry decomposition (n <= 512) */
  SGT_MODE_APPROX = 1,  /* S_n: pair split joined at the roots */
  SGT_MODE_PLANTED = 2, /* size-conditioned planted tree */
  SGT_MODE_PAIR = 3     /* T*_n, emitted as the joined planted word */
} sgt_mode;

typedef struct sgt_weights sgt_weights;
typedef struct sgt_rng sgt_rng;
typedef struct sgt_sampler sgt_sampler;

SGT_API const char* sgt_version(void);
SGT_API const char* sgt_last_error(void);
SGT_API const char* sgt_status_name(sgt_status status);
SGT_API void sgt_string_free(char* s);

/* weights ---------------------------------------------------------------- */

/* {"family": "explicit", "weights": ["1", "0", "1"]} or
 * {"family": "geometric" | "poisson" | "power", "params": {...}} */
SGT_API sgt_status sgt_weights_from_json(const char* json, sgt_weights** out);
SGT_API sgt_status sgt_weights_from_file(const char* path, sgt_weights** out);
SGT_API void sgt_weights_free(sgt_weights* w);
SGT_API sgt_status sgt_weights_describe(const sgt_weights* w, char** out);
/* Strict span; fails with SGT_ERR_INVARIANT for sequences without branching. */
SGT_API sgt_status sgt_weights_span(const sgt_weights* w, size_t* out);
/* tau bracket, Phi(tau), mu, nu, sigma^2 and the first pi_k as JSON. */
SGT_API sgt_status sgt_offspring_json(const sgt_weights* w, size_t table, char** out);

/* series ----------------------------------------------------------------- */

/* label: "T" (d must be 1), "Td" (omega^d), "Rv", "Re", "L", "ZU".
 * Writes the coefficient [x^n] as "p/q". */
SGT_API sgt_status sgt_series_coeff(const sgt_weights* w, const char* label, unsigned d, size_t n, char** out);
/* Coefficients 0..order as a JSON array of "p/q" strings. */
SGT_API sgt_status sgt_series_json(const sgt_weights* w, const char* label, unsigned d, size_t order, char** out);
/* P(sigma_n != id) as "p/q"; SGT_ERR_INVARIANT when [x^n] Z_U = 0. */
SGT_API sgt_status sgt_symmetry_probability(const sgt_weights* w, size_t n, char** out);
/* Ratio-based estimate of the radius of T/x and the composition check for
 * f(z) = z^2, as JSON. */
SGT_API sgt_status sgt_subexp_json(const sgt_weights* w, size_t order, char** out);

/* random streams ----------------------------------------------------------- */

SGT_API sgt_status sgt_rng_new(uint64_t seed, uint64_t stream, sgt_rng** out);
SGT_API sgt_status sgt_rng_fork(const sgt_rng* parent, uint64_t index, sgt_rng** out);
SGT_API void sgt_rng_free(sgt_rng* r);

/* samplers --------------------------------------------------------------- */

SGT_API sgt_status sgt_sampler_new(const sgt_weights* w, size_t n, sgt_mode mode, sgt_sampler** out);
SGT_API void sgt_sampler_free(sgt_sampler* s);
/* One tree in wire format: "2,0,0" for planted words, "U:..." (canonical
 * code) for unrooted trees. */
SGT_API sgt_status sgt_sampler_draw(sgt_sampler* s, sgt_rng* rng, char** wire);
/* One tree, measured: JSON SampleReport. The uniform census vertex is drawn
 * from rng after the tree. */
SGT_API sgt_status sgt_sampler_draw_report(sgt_sampler* s, sgt_rng* rng, unsigned max_radius, char** json);
SGT_API sgt_status sgt_sampler_acceptance_rate(const sgt_sampler* s, double* out);

/* Measure a tree given in wire format. */
SGT_API sgt_status sgt_measure(const char* wire, sgt_rng* rng, unsigned max_radius, char** json);

/* checks ------------------------------------------------------------------ */

/* check: "series-oracle", "unrooted-oracle", "split-independence", "tv-decay", "subexp"
 * (for subexp n_max is the series order). */
SGT_API sgt_status sgt_verify(const sgt_weights* w, const char* check, size_t n_max, int* passed, char** json);

/* Monte Carlo checks; sample i uses the fork i of (seed, stream), so the
 * reports do not depend on threads. */
SGT_API sgt_status sgt_check_degree_clt(const sgt_weights* w, unsigned d, size_t n, size_t batches, uint64_t seed,
                                        uint64_t stream, unsigned threads, int* passed, char** json);
SGT_API sgt_status sgt_check_diameter_tail(const sgt_weights* w, size_t n, size_t samples, uint64_t seed,
                                           uint64_t stream, unsigned threads, int* passed, char** json);
SGT_API sgt_status sgt_check_max_degree(const sgt_weights* w, size_t n, size_t samples, uint64_t seed,
                                        uint64_t stream, unsigned threads, int* passed, char** json);
SGT_API sgt_status sgt_check_neighborhood(const sgt_weights* w, unsigned radius, const size_t* sizes, size_t nsizes,
                                          size_t samples, uint64_t seed, uint64_t stream, unsigned threads,
                                          int* passed, char** json);

#ifdef __cplusplus
}
#endif

#endif /* SGTREE_SGTREE_H */
