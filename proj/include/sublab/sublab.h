#ifndef SUBLAB_H
#define SUBLAB_H

/* C interface to the sublab core. Handles are opaque; every fallible call
 * returns a sublab_status and leaves a message in sublab_last_error() for the
 * calling thread. Strings returned by result accessors stay valid until the
 * result is freed; strings returned through char** out-parameters must be
 * released with sublab_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SUBLAB_API __declspec(dllexport)
#else
#define SUBLAB_API __attribute__((visibility("default")))
#endif

typedef enum sublab_status {
  SUBLAB_OK = 0,
  SUBLAB_E_INVALID_ARGUMENT = 1,
  SUBLAB_E_PARSE = 2,
  SUBLAB_E_RANGE = 3,
  SUBLAB_E_DIMENSION = 4,
  SUBLAB_E_CAP = 5,
  SUBLAB_E_NUMERICAL = 6,
  SUBLAB_E_CONFIG = 7,
  SUBLAB_E_IO = 8,
  SUBLAB_E_INTERNAL = 9
} sublab_status;

typedef struct sublab_config sublab_config;
typedef struct sublab_result sublab_result;

SUBLAB_API const char* sublab_version(void);
SUBLAB_API const char* sublab_last_error(void);
SUBLAB_API const char* sublab_status_name(sublab_status status);
/* Process exit code for a failed call: 2 for input errors, 4 for numerical ones. */
SUBLAB_API int sublab_status_exit_code(sublab_status status);

SUBLAB_API size_t sublab_command_count(void);
SUBLAB_API const char* sublab_command_name(size_t index);

SUBLAB_API sublab_status sublab_config_load(const char* path, sublab_config** out);
SUBLAB_API sublab_status sublab_config_parse(const char* text, sublab_config** out);
SUBLAB_API void sublab_config_free(sublab_config* cfg);
SUBLAB_API sublab_status sublab_config_set_seed(sublab_config* cfg, uint64_t seed);
SUBLAB_API sublab_status sublab_config_set_jobs(sublab_config* cfg, int jobs);
SUBLAB_API uint64_t sublab_config_seed(const sublab_config* cfg);
/* [run] out and format values, or NULL for a NULL handle. */
SUBLAB_API const char* sublab_config_out_dir(const sublab_config* cfg);
SUBLAB_API const char* sublab_config_format(const sublab_config* cfg);

/* Runs one command. A mathematical failure is still SUBLAB_OK; inspect
 * sublab_result_exit_code. */
SUBLAB_API sublab_status sublab_run(const sublab_config* cfg, const char* command, sublab_result** out);
SUBLAB_API void sublab_result_free(sublab_result* result);
SUBLAB_API int sublab_result_exit_code(const sublab_result* result);
SUBLAB_API const char* sublab_result_command(const sublab_result* result);
SUBLAB_API const char* sublab_result_json(const sublab_result* result);
SUBLAB_API const char* sublab_result_summary(const sublab_result* result);
SUBLAB_API size_t sublab_result_table_count(const sublab_result* result);
SUBLAB_API const char* sublab_result_table_name(const sublab_result* result, size_t index);
SUBLAB_API const char* sublab_result_table_csv(const sublab_result* result, size_t index);

/* Expression helpers on the coefficient grammar (coordinates x1..xd). */
SUBLAB_API sublab_status sublab_expr_eval(const char* text, int dimension, const double* x, double* out);
SUBLAB_API sublab_status sublab_expr_simplify(const char* text, int dimension, char** out);
SUBLAB_API sublab_status sublab_expr_differentiate(const char* text, int dimension, int k, char** out);
/* Lie bracket of two fields given as arrays of `dimension` coefficient strings;
 * *out receives `dimension` strings, released with sublab_string_array_free. */
SUBLAB_API sublab_status sublab_lie_bracket(const char* const* x, const char* const* y, int dimension, char*** out);
SUBLAB_API void sublab_string_free(char* s);
SUBLAB_API void sublab_string_array_free(char** s, int count);

#ifdef __cplusplus
}
#endif

#endif
