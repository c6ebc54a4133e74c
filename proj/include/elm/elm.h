/*
 * C interface to the dynamic ELM engine.
 *
 * Every object is an opaque handle owned by the caller and released with the
 * matching *_free function. Functions return an elm_status; on failure the
 * message for the calling thread is available from elm_last_error() until the
 * next failing call on that thread.
 */
#ifndef ELM_ELM_H
#define ELM_ELM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ELM_BUILDING_LIBRARY)
#    define ELM_API __declspec(dllexport)
#  else
#    define ELM_API __declspec(dllimport)
#  endif
#else
#  define ELM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elm_status {
  ELM_OK = 0,
  ELM_ERR_ARGUMENT = 1,   /* bad argument value */
  ELM_ERR_SHAPE = 2,      /* dimension mismatch */
  ELM_ERR_DATA = 3,       /* unreadable or malformed file */
  ELM_ERR_STATE = 4,      /* operation invalid for the object's state */
  ELM_ERR_SINGULAR = 5,   /* Gram matrix not positive definite */
  ELM_ERR_DEGENERATE = 6, /* update hit a numerically dependent node */
  ELM_ERR_INTERNAL = 7
} elm_status;

typedef enum elm_variant { ELM_VARIANT_Q = 0, ELM_VARIANT_LDL = 1 } elm_variant;

typedef enum elm_activation {
  ELM_ACT_SIGMOID = 0,
  ELM_ACT_TANH = 1,
  ELM_ACT_GAUSSIAN = 2,
  ELM_ACT_LINEAR = 3
} elm_activation;

typedef enum elm_bench_op { ELM_BENCH_GROW = 0, ELM_BENCH_PRUNE = 1 } elm_bench_op;

typedef struct elm_dataset elm_dataset;
typedef struct elm_model elm_model;
typedef struct elm_session elm_session;

typedef struct elm_train_options {
  size_t hidden;      /* initial node count, >= 1 */
  double k0sq;        /* Tikhonov factor */
  int variant;        /* elm_variant */
  uint64_t seed;
  int activation;     /* elm_activation */
  int allow_zero_reg; /* permit k0sq == 0 */
  int minmax;         /* scale inputs to [0, 1] per feature */
} elm_train_options;

typedef struct elm_verify_report {
  size_t nodes;
  size_t samples;
  int variant;
  double weight_deviation;  /* W against the direct solve, relative Frobenius */
  double inverse_deviation; /* Q or L D L^T against (H H^T + k0sq I)^-1; NaN if absent */
  double mse;
  int factor_hygiene;       /* 1 when L is exactly unit upper / D > 0 / Q symmetric */
} elm_verify_report;

typedef struct elm_model_info {
  size_t nodes;
  size_t inputs;
  size_t outputs;
  double k0sq;
  int variant;
  int activation;
  int has_state; /* 0 for a light model */
  int has_scaler;
} elm_model_info;

typedef struct elm_bench_cell {
  int op; /* elm_bench_op */
  size_t nodes;
  size_t step;
  size_t samples;
  int variant;
} elm_bench_cell;

typedef struct elm_bench_row {
  elm_bench_cell cell;
  size_t repetitions;
  double incremental_seconds;
  double oracle_seconds;
  double speedup;
  double deviation;
} elm_bench_row;

ELM_API const char* elm_last_error(void);
ELM_API const char* elm_status_name(elm_status status);

/* Datasets: samples are CSV rows; x has one column per feature. */
ELM_API elm_status elm_dataset_from_csv(const char* x_path, const char* y_path, int skip_header,
                                        elm_dataset** out);
/* x is samples x features and y samples x outputs, both row-major. */
ELM_API elm_status elm_dataset_from_rows(const double* x, size_t features, const double* y,
                                         size_t outputs, size_t samples, elm_dataset** out);
ELM_API elm_status elm_dataset_shape(const elm_dataset* data, size_t* features, size_t* outputs,
                                     size_t* samples);
ELM_API void elm_dataset_free(elm_dataset* data);

ELM_API void elm_train_options_default(elm_train_options* options);

ELM_API elm_status elm_session_train(const elm_dataset* data, const elm_train_options* options,
                                     elm_session** out);
/* Requires a model saved with its update state (not light). */
ELM_API elm_status elm_session_from_model(const elm_model* model, const elm_dataset* data,
                                          elm_session** out);
ELM_API elm_status elm_session_clone(const elm_session* session, elm_session** out);
ELM_API elm_status elm_session_add_nodes(elm_session* session, size_t delta, uint64_t seed);
ELM_API elm_status elm_session_remove_nodes(elm_session* session, const size_t* indices,
                                            size_t count);
ELM_API elm_status elm_session_refresh(elm_session* session);
ELM_API elm_status elm_session_verify(const elm_session* session, elm_verify_report* out);
ELM_API size_t elm_session_nodes(const elm_session* session);
/* Copies W (outputs x nodes, row-major). Pass out == NULL to query the shape. */
ELM_API elm_status elm_session_weights(const elm_session* session, double* out, size_t capacity,
                                       size_t* rows, size_t* cols);
ELM_API elm_status elm_session_to_model(const elm_session* session, elm_model** out);
ELM_API void elm_session_free(elm_session* session);

ELM_API elm_status elm_model_load(const char* path, elm_model** out);
ELM_API elm_status elm_model_save(const elm_model* model, const char* path, int light);
ELM_API elm_status elm_model_info_get(const elm_model* model, elm_model_info* out);
/* Records where the training data lives; NULL clears a path. */
ELM_API elm_status elm_model_set_data_paths(elm_model* model, const char* x_path,
                                            const char* y_path, int header);
/* Returns NULL when no path is recorded. */
ELM_API const char* elm_model_x_path(const elm_model* model);
ELM_API const char* elm_model_y_path(const elm_model* model);
ELM_API int elm_model_data_header(const elm_model* model);
ELM_API elm_status elm_model_mse(const elm_model* model, const elm_dataset* data, double* out);
/* Writes predictions as samples x outputs, row-major. */
ELM_API elm_status elm_model_predict(const elm_model* model, const elm_dataset* data, double* out,
                                     size_t capacity);
/* Works for light models too; inverse_deviation is then NaN. */
ELM_API elm_status elm_model_verify(const elm_model* model, const elm_dataset* data,
                                    elm_verify_report* out);
ELM_API void elm_model_free(elm_model* model);

ELM_API elm_status elm_bench_run(const elm_bench_cell* cells, size_t count, size_t repetitions,
                                 uint64_t seed, elm_bench_row* out);
/* JSON text of one row. Writes at most capacity bytes including the NUL and
 * stores the full length (without NUL) in *needed. */
ELM_API elm_status elm_bench_row_json(const elm_bench_row* row, char* buffer, size_t capacity,
                                      size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* ELM_ELM_H */
