/* Exercises the shared library through its C header only. */

#include "sublab/sublab.h"

#include <math.h>
#include <stdio.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static const char* grushin =
    "[system]\n"
    "dimension = 2\n"
    "field1 = \"1\", \"0\"\n"
    "field2 = \"0\", \"sin(x1)\"\n"
    "[hormander]\n"
    "grid = 16\n"
    "[bch]\n"
    "t_count = 5\n";

int main(void) {
  sublab_config* cfg = NULL;
  sublab_result* res = NULL;
  char* s = NULL;
  char** arr = NULL;
  double v = 0.0;
  const double x[2] = {0.5, 1.0};
  const char* xf[2] = {"1", "0"};
  const char* yf[2] = {"0", "sin(x1)"};
  size_t i;
  int found = 0;

  EXPECT(strlen(sublab_version()) > 0);
  for (i = 0; i < sublab_command_count(); ++i) found += strcmp(sublab_command_name(i), "subell") == 0;
  EXPECT(found == 1);
  EXPECT(sublab_command_name(1000) == NULL);

  EXPECT(sublab_config_parse(grushin, &cfg) == SUBLAB_OK);
  EXPECT(sublab_config_set_seed(cfg, 5) == SUBLAB_OK);
  EXPECT(sublab_config_seed(cfg) == 5);
  EXPECT(sublab_config_set_jobs(cfg, 0) == SUBLAB_E_RANGE);
  EXPECT(strstr(sublab_last_error(), "jobs") != NULL);
  EXPECT(strcmp(sublab_config_format(cfg), "json") == 0);

  EXPECT(sublab_run(cfg, "check-hormander", &res) == SUBLAB_OK);
  EXPECT(sublab_result_exit_code(res) == 0);
  EXPECT(strstr(sublab_result_json(res), "\"rank\": 2") != NULL);
  EXPECT(sublab_result_table_count(res) == 1);
  EXPECT(strcmp(sublab_result_table_name(res, 0), "criteria") == 0);
  EXPECT(sublab_result_table_csv(res, 1) == NULL);
  sublab_result_free(res);
  res = NULL;

  EXPECT(sublab_run(cfg, "bch", &res) == SUBLAB_OK);
  EXPECT(strncmp(sublab_result_table_csv(res, 0), "t,defect\n", 9) == 0);
  sublab_result_free(res);
  res = NULL;

  EXPECT(sublab_run(cfg, "holder", &res) == SUBLAB_E_CONFIG);
  EXPECT(res == NULL);
  EXPECT(sublab_status_exit_code(SUBLAB_E_CONFIG) == 2);
  EXPECT(sublab_status_exit_code(SUBLAB_E_NUMERICAL) == 4);
  sublab_config_free(cfg);
  cfg = NULL;

  EXPECT(sublab_config_parse("[system]\ndimension = 2\nfield1 = \"1\", \"sin(x1\"\n", &cfg) == SUBLAB_E_PARSE);
  EXPECT(cfg == NULL);
  EXPECT(strstr(sublab_last_error(), "position 6") != NULL);
  EXPECT(sublab_config_load("/nonexistent/file.ini", &cfg) == SUBLAB_E_IO);
  EXPECT(sublab_run(NULL, "bch", &res) == SUBLAB_E_INVALID_ARGUMENT);

  EXPECT(sublab_expr_eval("sin(x1)*x2 + 1/2", 2, x, &v) == SUBLAB_OK);
  EXPECT(fabs(v - (sin(0.5) + 0.5)) < 1e-15);
  EXPECT(sublab_expr_eval("x3", 2, x, &v) == SUBLAB_E_RANGE);
  EXPECT(sublab_expr_differentiate("x1*x1", 1, 1, &s) == SUBLAB_OK);
  EXPECT(s != NULL);
  if (s) {
    double at = 0.0;
    const double p[1] = {3.0};
    EXPECT(sublab_expr_eval(s, 1, p, &at) == SUBLAB_OK);
    EXPECT(fabs(at - 6.0) < 1e-15);
  }
  sublab_string_free(s);
  EXPECT(sublab_expr_simplify("0*x1 + 2", 1, &s) == SUBLAB_OK);
  EXPECT(s && strcmp(s, "2") == 0);
  sublab_string_free(s);

  EXPECT(sublab_lie_bracket(xf, yf, 2, &arr) == SUBLAB_OK);
  if (arr) {
    EXPECT(strcmp(arr[0], "0") == 0);
    EXPECT(strcmp(arr[1], "cos(x1)") == 0);
  }
  sublab_string_array_free(arr, 2);

  if (failures) fprintf(stderr, "%d check(s) failed\n", failures);
  return failures ? 1 : 0;
}
