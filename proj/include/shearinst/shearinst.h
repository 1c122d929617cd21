#ifndef SHEARINST_H
#define SHEARINST_H

#include <stddef.h>

#if defined(_WIN32)
#define SI_API __declspec(dllexport)
#else
#define SI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 1..25 mirror the library's error codes. */
typedef enum si_status {
  SI_OK = 0,
  SI_ERR_INVALID_ARGUMENT = 1,
  SI_ERR_OUT_OF_DOMAIN,
  SI_ERR_UNSUPPORTED_ORDER,
  SI_ERR_RATIO_UNDEFINED,
  SI_ERR_SHAPE_MISMATCH,
  SI_ERR_SINGULAR_OPERATOR,
  SI_ERR_SINGULARITY_ON_BOUNDARY,
  SI_ERR_NO_CONVERGENCE,
  SI_ERR_NO_UNSTABLE_NEUTRAL_MODE,
  SI_ERR_NO_BOUND_STATE,
  SI_ERR_NOT_CONVERGING,
  SI_ERR_NO_CROSSING,
  SI_ERR_IMAG_NOT_POSITIVE,
  SI_ERR_INVALID_RANGE,
  SI_ERR_DIVERGENT_COEFFICIENT,
  SI_ERR_SINGULAR_T,
  SI_ERR_NEUMANN_DIVERGING,
  SI_ERR_NOT_CONVERGED,
  SI_ERR_WINDING_MISMATCH,
  SI_ERR_PHASE_UNWRAP_AMBIGUOUS,
  SI_ERR_CONVERGED_TO_REAL_AXIS,
  SI_ERR_BOUND_VIOLATION,
  SI_ERR_BLOCK_NOT_CONTRACTING,
  SI_ERR_CONFIG,
  SI_ERR_IO,
  SI_ERR_NULL_HANDLE = 100,
  SI_ERR_INTERNAL = 101
} si_status;

typedef struct si_config si_config;
typedef struct si_result si_result;
typedef struct si_profile si_profile;
typedef struct si_neutral si_neutral;

SI_API const char* si_version(void);
SI_API const char* si_status_name(si_status status);
/* Message of the last failing call on this thread; never NULL. */
SI_API const char* si_last_error(void);
/* Frees strings returned through char** out-parameters. */
SI_API void si_string_free(char* text);

/* Configuration: defaults on creation; JSON overlays reject unknown keys. */
SI_API si_status si_config_new(si_config** out);
SI_API void si_config_free(si_config* config);
SI_API si_status si_config_merge_json(si_config* config, const char* json_text);
SI_API si_status si_config_load_file(si_config* config, const char* path);
SI_API si_status si_config_to_json(const si_config* config, char** out);

/* Runs neutral | lambda | dispersion | sheet | glue | validate. Returns SI_OK
   whenever the command ran; its outcome is in si_result_exit_code. */
SI_API si_status si_run(const si_config* config, const char* command, si_result** out);
SI_API int si_result_exit_code(const si_result* result);
SI_API const char* si_result_text(const si_result* result);
SI_API const char* si_result_report(const si_result* result);
SI_API size_t si_result_file_count(const si_result* result);
SI_API const char* si_result_file(const si_result* result, size_t index);
SI_API void si_result_free(si_result* result);

/* Profiles and neutral modes for direct numerical use. */
SI_API si_status si_profile_sine(double beta, si_profile** out);
SI_API si_status si_profile_sheet(si_profile** out);
SI_API si_status si_profile_rescaled(double k, si_profile** out);
SI_API si_status si_profile_eval(const si_profile* profile, double y, int order, double* out);
SI_API void si_profile_free(si_profile* profile);

/* Channel neutral mode on a uniform grid with n interior nodes. */
SI_API si_status si_neutral_solve(const si_profile* profile, int n, si_neutral** out);
SI_API si_status si_neutral_alpha_sq(const si_neutral* mode, double* out);
SI_API size_t si_neutral_size(const si_neutral* mode);
/* Copies min(len, size) nodes and values; either buffer may be NULL. */
SI_API si_status si_neutral_copy(const si_neutral* mode, double* y, double* phi, size_t len);
SI_API void si_neutral_free(si_neutral* mode);

SI_API si_status si_lambda(const si_profile* profile, const si_neutral* mode, int tau_decades, double* re,
                           double* im);

/* Test hook: flips the sign of Im lambda inside the library when nonzero. */
SI_API void si_set_lambda_sign_fault(int enabled);

#ifdef __cplusplus
}
#endif

#endif
