/* C interface to the msns solver library.
 *
 * Every function returns an msns_status. On failure the message for the
 * calling thread is available from msns_last_error() until the next call.
 * Strings returned through char** are owned by the caller and released with
 * msns_string_free(). */
#ifndef MSNS_H
#define MSNS_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum msns_status {
  MSNS_OK = 0,
  MSNS_ERR_INVALID_ARGUMENT = 1,
  MSNS_ERR_CONFIG = 2,
  MSNS_ERR_CONVERGENCE = 3,
  MSNS_ERR_IO = 4,
  MSNS_ERR_NUMERIC = 5,
  MSNS_ERR_INTERNAL = 6
} msns_status;

typedef struct msns_config msns_config;
typedef struct msns_field msns_field;

typedef struct msns_run_summary {
  size_t windows;
  double final_time;
  size_t checkpoints;
  size_t sup_violations;
  size_t l2_violations;
} msns_run_summary;

const char* msns_last_error(void);
const char* msns_status_name(msns_status status);

msns_status msns_config_load(const char* path, msns_config** out);
msns_status msns_config_parse(const char* json_text, msns_config** out);
void msns_config_free(msns_config* config);
msns_status msns_config_set_output_dir(msns_config* config, const char* directory);
msns_status msns_config_hash(const msns_config* config, uint64_t* out);

msns_status msns_run(const msns_config* config, msns_run_summary* summary);
msns_status msns_resume(const char* checkpoint_path, const msns_config* config,
                        msns_run_summary* summary);

/* passed is set to 1 when every row is within tolerance. */
msns_status msns_validate(const msns_config* config, double tolerance, char** table,
                          int* passed);
msns_status msns_probe_operators(const msns_config* config, uint64_t seed, int count,
                                 char** report_json);
msns_status msns_fit_q(const msns_config* config, double t, double* q, double* residual,
                       int* degenerate);

/* Initial velocity described by the configuration's flow section. */
msns_status msns_field_from_config(const msns_config* config, msns_field** out);
msns_status msns_checkpoint_read(const char* path, msns_field** out, double* t);
msns_status msns_field_norms(const msns_field* field, double* sup_norm, double* l2_norm,
                             double* max_divergence);
/* Copies the 3 n^3 component-major samples into buffer (length >= 3 n^3). */
msns_status msns_field_samples(const msns_field* field, double* buffer, size_t length,
                               int* n);
void msns_field_free(msns_field* field);

void msns_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* MSNS_H */
