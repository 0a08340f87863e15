/* misboost: multiple-instance boosting with learned prototype instances.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through these functions; every fallible call returns a
 * misb_status and leaves a thread-local message readable via
 * misb_last_error(). Strings returned through char** are heap-allocated and
 * must be released with misb_string_free().
 */
#ifndef MISBOOST_H
#define MISBOOST_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum misb_status {
    MISB_OK = 0,
    MISB_ERR_ARG = 1,      /* invalid argument or option */
    MISB_ERR_IO = 2,       /* file cannot be read or written */
    MISB_ERR_PARSE = 3,    /* malformed dataset/model/report document */
    MISB_ERR_DIM = 4,      /* dimension mismatch */
    MISB_ERR_DATA = 5,     /* precondition on the data violated */
    MISB_ERR_INTERNAL = 6
} misb_status;

const char* misb_status_name(misb_status status);
const char* misb_last_error(void);
void misb_string_free(char* s);

typedef struct misb_dataset misb_dataset;
typedef struct misb_model misb_model;
typedef struct misb_report misb_report;

/* format: "mil-csv" or "mil-sparse" */
misb_status misb_dataset_load(const char* path, const char* format,
                              misb_dataset** out);
void misb_dataset_free(misb_dataset* ds);
size_t misb_dataset_num_bags(const misb_dataset* ds);
size_t misb_dataset_dim(const misb_dataset* ds);

typedef struct misb_train_options {
    int k;                 /* cluster count (default 100) */
    int max_m;             /* maximum boosting stages (default 100) */
    int sel_folds;         /* stage-selection folds (default 4) */
    double alpha;          /* <= 0: data-driven soft-min sharpness */
    double tol;            /* base-learner convergence tolerance */
    uint64_t seed;
    int jobs;              /* <= 0: all available processors */
    int restricted;        /* confine prototypes to training instances */
    int normalize;         /* z-score features on training data (default 1) */
    int restarts;          /* <= 0: one restart per cluster center */
} misb_train_options;

void misb_train_options_init(misb_train_options* opts);

misb_status misb_train(const misb_dataset* ds, const misb_train_options* opts,
                       misb_model** out);
misb_status misb_model_save(const misb_model* model, const char* path);
misb_status misb_model_load(const char* path, misb_model** out);
void misb_model_free(misb_model* model);
size_t misb_model_num_stages(const misb_model* model);
size_t misb_model_dim(const misb_model* model);

/* JSON summary: selected stage count, validation curve, alpha used. */
misb_status misb_model_summary_json(const misb_model* model, char** out);

/* CSV "bag_id,predicted_label,margin" in dataset order, margins printed
 * with round-trip precision. Fails without partial output on mismatch. */
misb_status misb_predict_csv(const misb_model* model, const misb_dataset* ds,
                             char** out);

/* Fraction of labeled bags predicted correctly. */
misb_status misb_accuracy(const misb_model* model, const misb_dataset* ds,
                          double* out);

misb_status misb_cross_validate(const misb_dataset* ds, int folds,
                                const misb_train_options* opts, int with_ap,
                                misb_report** out);
void misb_report_free(misb_report* report);
misb_status misb_report_json(const misb_report* report, char** out);
misb_status misb_report_table(const misb_report* report, char** out);
misb_status misb_report_set_name(misb_report* report, const char* name);

/* Merge saved report JSON files into one comparison table. */
misb_status misb_report_merge_files(const char* const* paths, size_t n,
                                    char** out_table);

/* Nearest-instance-to-prototype table for the first top_k stages. */
misb_status misb_inspect(const misb_model* model, const misb_dataset* ds,
                         int top_k, char** out);

#ifdef __cplusplus
}
#endif

#endif /* MISBOOST_H */
