#ifndef DYNLAB_H
#define DYNLAB_H

/* C API of the dynlab core: opaque handles, integer status codes,
 * JSON strings for structured payloads. Every char* returned through an
 * out-parameter is heap-allocated and must be released with
 * dynlab_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dynlab_status {
  DYNLAB_OK = 0,
  DYNLAB_ERR_INVALID_ARGUMENT = 1,
  DYNLAB_ERR_PARSE = 2,
  DYNLAB_ERR_UNSUPPORTED = 3,
  DYNLAB_ERR_IO = 4,
  DYNLAB_ERR_INTERNAL = 5
} dynlab_status;

typedef struct dynlab_system dynlab_system;
typedef struct dynlab_setgen dynlab_setgen;
typedef struct dynlab_window dynlab_window;

const char* dynlab_version(void);
void dynlab_string_free(char* s);

/* --- systems ------------------------------------------------------------ */

dynlab_status dynlab_system_create(const char* spec_json, dynlab_system** out,
                                   char** error_message);
void dynlab_system_destroy(dynlab_system* sys);
int dynlab_system_minimal_by_construction(const dynlab_system* sys);
/* 0 when the variant has no shared orbit period. */
uint64_t dynlab_system_period_hint(const dynlab_system* sys);

/* N_T(x, U) on [0, horizon); point and open set as JSON specs. */
dynlab_status dynlab_return_set(const dynlab_system* sys, const char* point_json,
                                const char* open_set_json, uint64_t horizon,
                                dynlab_window** out, char** error_message);

/* {n : T^n x in U, S^n y in V} on [0, horizon). */
dynlab_status dynlab_transfer_set(const dynlab_system* sys_x,
                                  const dynlab_system* sys_y,
                                  const char* x_json, const char* y_json,
                                  const char* u_json, const char* v_json,
                                  uint64_t horizon, dynlab_window** out,
                                  char** error_message);

/* --- integer-set windows -------------------------------------------------- */

dynlab_status dynlab_setgen_create(const char* spec_json, dynlab_setgen** out,
                                   char** error_message);
void dynlab_setgen_destroy(dynlab_setgen* gen);
dynlab_status dynlab_setgen_window(const dynlab_setgen* gen, uint64_t horizon,
                                   dynlab_window** out, char** error_message);

uint64_t dynlab_window_horizon(const dynlab_window* w);
int dynlab_window_test(const dynlab_window* w, uint64_t n);
uint64_t dynlab_window_count(const dynlab_window* w);
void dynlab_window_destroy(dynlab_window* w);

/* Text format: "H=<int>" header, then elements or start:length runs. */
dynlab_status dynlab_window_to_text(const dynlab_window* w, char** out);
dynlab_status dynlab_window_from_text(const char* text, dynlab_window** out,
                                      char** error_message);

/* Claim JSON: {"family":"syndetic","parameters":{"gap":3}} and friends;
 * the verdict is returned as JSON. */
dynlab_status dynlab_check_family(const dynlab_window* w, const char* claim_json,
                                  char** verdict_json, char** error_message);

/* --- experiments ----------------------------------------------------------- */

/* Runs one experiment config (see the README for the schema); the full
 * report is returned as JSON. */
dynlab_status dynlab_run_experiment(const char* config_json, char** report_json,
                                    char** error_message);

/* 0 all verified, 1 some refuted, 2 inconclusive present, 3 errors inside
 * the report, -1 malformed report. */
int dynlab_report_exit_code(const char* report_json);

dynlab_status dynlab_report_to_csv(const char* report_json, char** csv_out,
                                   char** error_message);

#ifdef __cplusplus
}
#endif

#endif /* DYNLAB_H */
