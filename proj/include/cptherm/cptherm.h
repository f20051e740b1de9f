#ifndef CPTHERM_CPTHERM_H
#define CPTHERM_CPTHERM_H

/* C interface to the pressure library. Objects are opaque handles created by
 * the *_create / *_new functions and released by the matching *_free.
 * Every fallible call returns a cpt_status; on failure the message of the
 * most recent error on the calling thread is available from
 * cpt_last_error(). */

#include <stddef.h>
#include <stdint.h>

#if defined(CPT_BUILDING_LIBRARY)
#define CPT_API __attribute__((visibility("default")))
#else
#define CPT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cpt_system cpt_system;
typedef struct cpt_potential cpt_potential;
typedef struct cpt_subset cpt_subset;

typedef enum cpt_status {
  CPT_OK = 0,
  CPT_INVALID_ARGUMENT = 1,
  CPT_INVALID_SYSTEM = 2,
  CPT_INSUFFICIENT_WORD = 3,
  CPT_NO_UNIQUE_PERRON = 4,
  CPT_NO_CONVERGENCE = 5,
  CPT_INCONCLUSIVE = 6,
  CPT_INVALID_COVER = 7,
  CPT_INVALID_BUDGET = 8,
  CPT_CONFIG_ERROR = 9,
  CPT_IO_ERROR = 10,
  CPT_INTERNAL_ERROR = 100
} cpt_status;

CPT_API const char* cpt_version(void);
/* Message of the last failed call on this thread; "" when none. */
CPT_API const char* cpt_last_error(void);
CPT_API const char* cpt_status_name(cpt_status status);

/* Systems. adjacency is k*k bytes, row-major, entries 0 or 1. */
CPT_API cpt_status cpt_system_full_shift(int k, int two_sided, cpt_system** out);
CPT_API cpt_status cpt_system_sft(int k, const unsigned char* adjacency, int two_sided,
                                  cpt_system** out);
CPT_API void cpt_system_free(cpt_system* system);
CPT_API int cpt_system_alphabet_size(const cpt_system* system);
CPT_API cpt_status cpt_system_word_count(const cpt_system* system, int n, uint64_t* out);

/* Potentials of the given depth; table has k^depth entries indexed by the
 * base-k code of the window (first symbol most significant). */
CPT_API cpt_status cpt_potential_create(const cpt_system* system, int depth, const double* table,
                                        size_t length, cpt_potential** out);
CPT_API void cpt_potential_free(cpt_potential* potential);

/* Subsets. Cylinder words are concatenated in `symbols`, with `lengths`
 * giving the length of each of the `count` words. */
CPT_API cpt_status cpt_subset_whole(cpt_subset** out);
CPT_API cpt_status cpt_subset_sub_shift(const cpt_system* system, const unsigned char* adjacency,
                                        cpt_subset** out);
CPT_API cpt_status cpt_subset_cylinders(const cpt_system* system, const int* symbols,
                                        const size_t* lengths, size_t count, int start_index,
                                        cpt_subset** out);
CPT_API void cpt_subset_free(cpt_subset* subset);

/* Transfer-matrix oracles. */
CPT_API cpt_status cpt_transfer_pressure(const cpt_system* system, const cpt_potential* phi,
                                         double* out);
CPT_API cpt_status cpt_equilibrium(const cpt_system* system, const cpt_potential* phi,
                                   double* entropy, double* integral, double* log_eigenvalue);

/* Cover estimators. A NULL subset means the whole system. */
CPT_API cpt_status cpt_log_lambda(const cpt_system* system, const cpt_subset* subset,
                                  const cpt_potential* phi, int cover_depth, int n, double* out);
CPT_API cpt_status cpt_capacity_pressures(const cpt_system* system, const cpt_subset* subset,
                                          const cpt_potential* phi, int cover_depth, int n_max,
                                          double* lower, double* upper);
CPT_API cpt_status cpt_critical_alpha(const cpt_system* system, const cpt_subset* subset,
                                      const cpt_potential* phi, int cover_depth, int n_max,
                                      double tol, double* value, double* bracket_lo,
                                      double* bracket_hi);

/* T(q), alpha(q) and E(alpha(q)) on `count` strictly increasing q values. */
CPT_API cpt_status cpt_t_curve(const cpt_system* system, const cpt_potential* phi, const double* q,
                               size_t count, double* t, double* alpha, double* e);

CPT_API cpt_status cpt_gap_example(double* pressure_compactified, double* sup_over_line,
                                   double* gap, double* estimated_gap);

/* Runs one subcommand on a JSON configuration (may be NULL or "" for
 * "suite"). tol <= 0 keeps the configured tolerance; seed is applied when
 * has_seed is nonzero. When out_dir is non-NULL the tables and summary.json
 * are written there. *summary_json receives the summary (free with
 * cpt_string_free); *all_pass is set to 1 iff every check passed. When
 * timings is non-NULL it receives one "task seconds PASS|FAIL" line per task;
 * wall-clock stays out of the summary so repeated runs are byte-identical. */
CPT_API cpt_status cpt_run(const char* subcommand, const char* config_json, const char* out_dir,
                           double tol, int has_seed, uint64_t seed, int jobs, char** summary_json,
                           int* all_pass, char** timings);
CPT_API void cpt_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* CPTHERM_CPTHERM_H */
