/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the mode-multiplexed link simulator. All entry points return
 * a status code; on any non-OK status mdmsim_last_error() carries a
 * human-readable message for the calling thread. Objects are opaque handles
 * released with the matching _free call; strings returned through char**
 * parameters are released with mdmsim_string_free().
 */
#ifndef MDMSIM_H
#define MDMSIM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdmsim_status {
    MDMSIM_OK = 0,
    MDMSIM_ERR_INVALID_ARGUMENT = 1,
    MDMSIM_ERR_PARSE = 2,
    MDMSIM_ERR_VALIDATION = 3,
    MDMSIM_ERR_RUNTIME = 4,
    MDMSIM_ERR_IO = 5
} mdmsim_status;

typedef struct mdmsim_spec mdmsim_spec;
typedef struct mdmsim_result mdmsim_result;

const char* mdmsim_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* mdmsim_last_error(void);

/* JSON array of available preset names. Static storage, do not free. */
const char* mdmsim_preset_names_json(void);

/* Builds a spec from JSON text (empty string means all defaults). On
 * validation problems returns MDMSIM_ERR_VALIDATION and, when report_json_out
 * is non-NULL, stores a JSON array of {path, message} records. */
mdmsim_status mdmsim_spec_from_json(const char* json_utf8, mdmsim_spec** out);
mdmsim_status mdmsim_spec_from_preset(const char* name, mdmsim_spec** out);
mdmsim_status mdmsim_validate_json(const char* json_utf8, char** report_json_out);

mdmsim_status mdmsim_spec_to_json(const mdmsim_spec* spec, char** json_out);
mdmsim_status mdmsim_spec_set_seed(mdmsim_spec* spec, uint64_t seed);
mdmsim_status mdmsim_spec_set_jobs(mdmsim_spec* spec, int jobs);
mdmsim_status mdmsim_spec_set_output_dir(mdmsim_spec* spec, const char* dir);
mdmsim_status mdmsim_spec_set_dump_matrices(mdmsim_spec* spec, int enable);

/* Runs the experiment described by the spec; outputs are written under the
 * spec's output directory. The handle gives access to the run summary. */
mdmsim_status mdmsim_run(const mdmsim_spec* spec, mdmsim_result** out);

mdmsim_status mdmsim_result_summary_json(const mdmsim_result* result, char** json_out);
int mdmsim_result_failure_count(const mdmsim_result* result);
mdmsim_status mdmsim_result_output_dir(const mdmsim_result* result, char** dir_out);

/* Re-emits plot data from a results directory. figure_id is one of
 * gmi_vs_power, mdl_vs_power, xt_matrix. files_json_out (optional) receives a
 * JSON array of the written paths. */
mdmsim_status mdmsim_export_figure(const char* results_dir, const char* figure_id,
                                   const char* out_dir, char** files_json_out);

void mdmsim_spec_free(mdmsim_spec* spec);
void mdmsim_result_free(mdmsim_result* result);
void mdmsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* MDMSIM_H */
