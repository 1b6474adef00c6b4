/* C API for the MLES rule-fact network library.
 *
 * Opaque handles and integer status codes.  Every function returning
 * mles_status sets a thread-local error message readable through
 * mles_last_error() on failure.  Strings returned through char** are owned
 * by the caller and must be released with mles_string_free().
 */
#ifndef MLES_H
#define MLES_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mles_status {
    MLES_OK = 0,
    MLES_ERR_IO = 1,         /* file missing/unreadable */
    MLES_ERR_PARSE = 2,      /* text format errors; details in last_error */
    MLES_ERR_VALIDATION = 3, /* structurally invalid network */
    MLES_ERR_ARGUMENT = 4,   /* bad argument or configuration */
    MLES_ERR_RUNTIME = 5     /* everything else */
} mles_status;

typedef struct mles_network mles_network;
typedef struct mles_facts mles_facts;
typedef struct mles_column_map mles_column_map;
typedef struct mles_dataset mles_dataset;
typedef struct mles_explain_result mles_explain_result;
typedef struct mles_train_report mles_train_report;

const char* mles_last_error(void);
void mles_string_free(char* s);

/* ---- networks ---- */

mles_status mles_network_from_string(const char* text, mles_network** out);
mles_status mles_network_from_file(const char* path, mles_network** out);
void mles_network_free(mles_network* net);

/* canonical serialization */
mles_status mles_network_to_string(const mles_network* net, char** out);
mles_status mles_network_to_file(const mles_network* net, const char* path);

/* valid==1 when the network is well formed; report lists violations and
 * warnings either way */
mles_status mles_network_validate(const mles_network* net, int* valid,
                                  char** report);

size_t mles_network_input_count(const mles_network* net);
mles_status mles_network_target(const mles_network* net, char** out);

/* shipped domain networks: "sentencing" or "patentability" */
mles_status mles_network_builtin(const char* name, mles_network** out);

/* ---- fact assignments ---- */

/* text: `factid=value` lines, `#` comments, optional `map=<path>` line */
mles_status mles_facts_from_string(const char* text, mles_facts** out);
mles_status mles_facts_from_file(const char* path, mles_facts** out);
mles_status mles_facts_set(mles_facts* facts, const char* fact_id,
                           double value);
/* column-map path named by a `map=` line, or NULL; owned by the handle */
const char* mles_facts_map_path(const mles_facts* facts);
void mles_facts_free(mles_facts* facts);

mles_status mles_infer(const mles_network* net, const mles_facts* facts,
                       double* value);

/* ---- explanation ---- */

mles_status mles_explain(const mles_network* net, const mles_facts* facts,
                         mles_explain_result** out);
size_t mles_explain_count(const mles_explain_result* result);
/* rule_id pointer is owned by the result handle */
mles_status mles_explain_entry(const mles_explain_result* result, size_t index,
                               const char** rule_id, double* input1,
                               double* input2, double* weight1, double* output,
                               double* path_weight);
void mles_explain_free(mles_explain_result* result);

/* ---- column maps and datasets ---- */

mles_status mles_column_map_from_string(const char* text,
                                        mles_column_map** out);
mles_status mles_column_map_from_file(const char* path, mles_column_map** out);
double mles_column_map_output_cap(const mles_column_map* map);
/* owned by the handle */
const char* mles_column_map_output_unit(const mles_column_map* map);
void mles_column_map_free(mles_column_map* map);

mles_status mles_dataset_from_csv_file(const char* path,
                                       const mles_column_map* map,
                                       mles_dataset** out);
size_t mles_dataset_record_count(const mles_dataset* dataset);
size_t mles_dataset_skipped_rows(const mles_dataset* dataset);
void mles_dataset_free(mles_dataset* dataset);

/* ---- training ---- */

typedef struct mles_train_config {
    double velocity;        /* (0,1] */
    int epochs;             /* >= 1 */
    double error_tolerance; /* >= 0 */
    unsigned long long shuffle_seed;
    double max_weight_step; /* < 0 means "use velocity" */
} mles_train_config;

void mles_train_config_default(mles_train_config* config);

mles_status mles_train(mles_network* net, const mles_dataset* dataset,
                       const mles_train_config* config,
                       mles_train_report** out);
int mles_train_report_epochs_run(const mles_train_report* report);
int mles_train_report_converged(const mles_train_report* report);
double mles_train_report_epoch_mae(const mles_train_report* report, int epoch);
double mles_train_report_initial_mae(const mles_train_report* report);
double mles_train_report_initial_rmse(const mles_train_report* report);
double mles_train_report_final_mae(const mles_train_report* report);
double mles_train_report_final_rmse(const mles_train_report* report);
void mles_train_report_free(mles_train_report* report);

mles_status mles_evaluate(const mles_network* net, const mles_dataset* dataset,
                          double* mae, double* rmse);

/* ---- synthetic recovery experiments ---- */

typedef struct mles_recovery_row {
    unsigned long long seed;
    int rule_count;
    int train_records;
    int holdout_records;
    double untrained_mae;
    double trained_mae;
    double improvement_ratio; /* trained/untrained; 0 when untrained is 0 */
    int epochs_run;
} mles_recovery_row;

mles_status mles_recovery_experiment(int rule_count, int record_count,
                                     double train_fraction,
                                     unsigned long long seed,
                                     const mles_train_config* train,
                                     mles_recovery_row* out);

#ifdef __cplusplus
}
#endif

#endif /* MLES_H */
