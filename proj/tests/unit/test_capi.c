#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "revival/revival.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static int near(double a, double b, double rel) { return fabs(a - b) <= rel * fabs(b); }

static void test_status(void) {
  CHECK(strcmp(rv_status_name(RV_OK), "ok") == 0);
  CHECK(strlen(rv_status_name(RV_ERR_DETECTION)) > 0);
  CHECK(strlen(rv_version()) > 0);
}

static void test_units(void) {
  rv_units u;
  CHECK(rv_derive_units(2.2e-25, 9.8, 2.0 * 3.14159265358979 * 930.0, 1.054571817e-34, &u) == RV_OK);
  CHECK(near(u.kbar, 0.99584, 1e-3));
  CHECK(rv_derive_units(-1.0, 9.8, 1.0, 1e-34, &u) == RV_ERR_DOMAIN);
  CHECK(strlen(rv_last_error()) > 0);
  CHECK(rv_derive_units(1.0, 9.8, 1.0, 1e-34, NULL) == RV_ERR_INVALID_ARGUMENT);
}

static void test_spectrum_and_prediction(void) {
  rv_spectrum* s = NULL;
  double e = 0.0, n = 0.0, d1 = 0.0, d2 = 0.0, T = 0.0;
  rv_resonance ctx;
  rv_prediction p;
  CHECK(rv_spectrum_create(RV_SPECTRUM_TRIANGULAR, 1.0, 0.0, 1.0, &s) == RV_OK);
  CHECK(rv_spectrum_energy(s, 1.0, &e) == RV_OK);
  CHECK(near(e, 1.84158, 1e-5));
  CHECK(rv_spectrum_level(s, e, &n) == RV_OK);
  CHECK(fabs(n - 1.0) < 1e-9);
  CHECK(rv_spectrum_derivatives(s, 10.0, &d1, &d2) == RV_OK);
  CHECK(d1 > 0.0 && d2 < 0.0);
  CHECK(rv_spectrum_period(s, 104.1, &T) == RV_OK);
  CHECK(near(T, 28.86, 1e-3));
  CHECK(rv_spectrum_energy(s, 0.0, &e) == RV_ERR_DOMAIN);

  CHECK(rv_resonance_build(s, 70.28, 0.25, &ctx) == RV_OK);
  CHECK(ctx.N == 4);
  CHECK(rv_revival_time(&ctx, RV_FORMULA_BOUNCER, 0.25, &p) == RV_OK);
  CHECK(fabs(p.ratio - 0.626757) < 1e-5);
  CHECK(p.formula == RV_FORMULA_BOUNCER);
  CHECK(rv_revival_time(&ctx, RV_FORMULA_GENERAL, 0.25, &p) == RV_OK);
  CHECK(p.ratio > 0.0 && p.ratio < 1.0);
  CHECK(rv_classical_period(&ctx, &T) == RV_OK);
  CHECK(near(T, 23.71, 1e-3));
  CHECK(rv_quasi_energy(&ctx, 0, 1, &e) == RV_OK);
  CHECK(rv_quasi_energy(&ctx, 2, 1, &e) == RV_ERR_BRANCH_AMBIGUITY);
  CHECK(rv_quasi_energy(&ctx, 2, 0, &e) == RV_ERR_SINGULAR_ORDER);
  rv_spectrum_destroy(s);
  rv_spectrum_destroy(NULL);
}

static void test_mathieu(void) {
  double a = 0.0;
  int used = 0;
  CHECK(rv_mathieu_series(0.5, 0.0, &a) == RV_OK);
  CHECK(fabs(a - 0.25) < 1e-15);
  CHECK(rv_mathieu_series(1.0, 0.1, &a) == RV_ERR_SINGULAR_ORDER);
  CHECK(rv_mathieu_matrix(0.5, 0.1, 0, &a, &used) == RV_OK);
  CHECK(used >= 10);
  CHECK(rv_mathieu_matrix(0.5, 0.1, 5, &a, NULL) == RV_ERR_INVALID_ARGUMENT);
}

static void test_config(void) {
  rv_config* c = NULL;
  char small[4];
  size_t needed = 0;
  char* buf;
  double v = 0.0;
  double lambdas[8];
  rv_config* back = NULL;
  rv_run_info info;

  CHECK(rv_config_parse("E_r = 70.28\nlambda = 0, 0.1\nn_points = 1024\n", &c) == RV_OK);
  CHECK(rv_config_get_number(c, "E_r", &v) == RV_OK && v == 70.28);
  CHECK(rv_config_lambda_count(c) == 2);
  CHECK(rv_config_lambdas(c, lambdas, 8) == RV_OK && lambdas[1] == 0.1);
  CHECK(rv_config_lambdas(c, lambdas, 1) == RV_ERR_INVALID_ARGUMENT);
  CHECK(rv_config_set(c, "kbar", "-1") == RV_ERR_CONFIG);
  CHECK(rv_config_get_number(c, "spectrum", &v) != RV_OK);
  CHECK(rv_config_get_string(c, "spectrum", small, sizeof small, &needed) != RV_OK);
  CHECK(needed == strlen("triangular") + 1);

  CHECK(rv_config_echo(c, small, sizeof small, &needed) != RV_OK);
  buf = malloc(needed);
  CHECK(rv_config_echo(c, buf, needed, NULL) == RV_OK);
  CHECK(rv_config_parse(buf, &back) == RV_OK);
  CHECK(rv_config_get_number(back, "n_points", &v) == RV_OK && v == 1024.0);
  free(buf);
  rv_config_destroy(back);

  CHECK(rv_run_plan(c, 0.0, &info) == RV_OK);
  CHECK(info.n_points == 1024);
  CHECK(info.T_guess > 20000.0);
  CHECK(info.t_end > info.T_guess);

  rv_config_destroy(c);
  rv_config_destroy(NULL);

  c = NULL;
  CHECK(rv_config_parse("foo = 1\n", &c) == RV_ERR_CONFIG);
  CHECK(c == NULL);
  CHECK(strstr(rv_last_error(), "line 1") != NULL);
  CHECK(rv_config_parse_file("/nonexistent/run.cfg", &c) != RV_OK);
}

static void test_null_handles(void) {
  double x;
  CHECK(rv_spectrum_energy(NULL, 1.0, &x) == RV_ERR_INVALID_ARGUMENT);
  CHECK(rv_series_size(NULL) == 0);
  CHECK(rv_sweep_size(NULL) == 0);
  CHECK(rv_config_lambda_count(NULL) == 0);
  CHECK(rv_sweep_read_csv("/nonexistent/sweep.csv", NULL) == RV_ERR_INVALID_ARGUMENT);
}

int main(void) {
  test_status();
  test_units();
  test_spectrum_and_prediction();
  test_mathieu();
  test_config();
  test_null_handles();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi_test: all checks passed\n");
  return 0;
}
