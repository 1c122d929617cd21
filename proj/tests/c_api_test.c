#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "shearinst/shearinst.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  const double pi = 3.14159265358979323846;
  EXPECT(strcmp(si_version(), "0.1.0") == 0);
  EXPECT(strcmp(si_status_name(SI_ERR_NO_UNSTABLE_NEUTRAL_MODE), "NoUnstableNeutralMode") == 0);

  si_profile* sine = NULL;
  EXPECT(si_profile_sine(2.0, &sine) == SI_OK);
  double u = 0.0;
  EXPECT(si_profile_eval(sine, 0.25, 0, &u) == SI_OK);
  EXPECT(fabs(u + sin(0.5)) < 1e-14);
  EXPECT(si_profile_eval(sine, 3.0, 0, &u) == SI_ERR_OUT_OF_DOMAIN);
  EXPECT(strlen(si_last_error()) > 0);

  si_neutral* mode = NULL;
  EXPECT(si_neutral_solve(sine, 2000, &mode) == SI_OK);
  double alpha_sq = 0.0;
  EXPECT(si_neutral_alpha_sq(mode, &alpha_sq) == SI_OK);
  EXPECT(fabs(alpha_sq - (4.0 - pi * pi / 4.0)) < 1e-5);
  EXPECT(si_neutral_size(mode) == 2000);
  double* y = malloc(2000 * sizeof(double));
  double* phi = malloc(2000 * sizeof(double));
  EXPECT(si_neutral_copy(mode, y, phi, 2000) == SI_OK);
  EXPECT(fabs(phi[1000] - cos(pi * y[1000] / 2.0)) < 1e-4);
  free(y);
  free(phi);

  double re = 0.0, im = 0.0;
  EXPECT(si_lambda(sine, mode, 4, &re, &im) == SI_OK);
  EXPECT(fabs(im - 2.0 * pi) < 0.01 * 2.0 * pi);
  si_set_lambda_sign_fault(1);
  EXPECT(si_lambda(sine, mode, 4, &re, &im) == SI_ERR_IMAG_NOT_POSITIVE);
  si_set_lambda_sign_fault(0);
  si_neutral_free(mode);

  si_profile* weak = NULL;
  EXPECT(si_profile_sine(1.0, &weak) == SI_OK);
  EXPECT(si_neutral_solve(weak, 200, &mode) == SI_ERR_NO_UNSTABLE_NEUTRAL_MODE);
  si_profile_free(weak);
  si_profile_free(sine);

  si_profile* sheet = NULL;
  EXPECT(si_profile_rescaled(16.0, &sheet) == SI_OK);
  EXPECT(si_profile_eval(sheet, 0.125, 0, &u) == SI_OK);
  EXPECT(fabs(u + 1.0) < 1e-14);
  si_profile_free(sheet);

  si_config* config = NULL;
  EXPECT(si_config_new(&config) == SI_OK);
  EXPECT(si_config_merge_json(config, "{\"bogus\": 1}") == SI_ERR_CONFIG);
  EXPECT(si_config_merge_json(config, "{\"n\": 200, \"out_dir\": \"c_api_out\"}") == SI_OK);
  EXPECT(si_config_load_file(config, "/nonexistent.json") == SI_ERR_IO);
  char* text = NULL;
  EXPECT(si_config_to_json(config, &text) == SI_OK);
  EXPECT(text && strstr(text, "\"n\": 200") != NULL);
  si_string_free(text);

  si_result* result = NULL;
  EXPECT(si_run(config, "neutral", &result) == SI_OK);
  EXPECT(si_result_exit_code(result) == 0);
  EXPECT(si_result_file_count(result) == 2);
  EXPECT(si_result_file(result, 99) == NULL);
  EXPECT(strstr(si_result_report(result), "alpha_sq") != NULL);
  si_result_free(result);

  EXPECT(si_run(NULL, "neutral", &result) == SI_ERR_NULL_HANDLE);
  EXPECT(si_result_exit_code(NULL) == 1);
  si_config_free(config);

  if (failures) fprintf(stderr, "%d failures\n", failures);
  else printf("c api: all checks passed\n");
  return failures ? 1 : 0;
}
