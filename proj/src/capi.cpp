#include "elm/elm.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>

#include "elm/bench.hpp"
#include "elm/io.hpp"
#include "elm/solver.hpp"

struct elm_dataset {
  elm::Dataset data;
};

struct elm_model {
  elm::ModelFile file;
};

struct elm_session {
  elm::Session session;
};

namespace {

thread_local std::string g_last_error;

elm_status fail(elm_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <class F>
elm_status guarded(F&& f) {
  try {
    f();
    return ELM_OK;
  } catch (const elm::ArgumentError& e) {
    return fail(ELM_ERR_ARGUMENT, e.what());
  } catch (const elm::ShapeError& e) {
    return fail(ELM_ERR_SHAPE, e.what());
  } catch (const elm::DataError& e) {
    return fail(ELM_ERR_DATA, e.what());
  } catch (const elm::StateError& e) {
    return fail(ELM_ERR_STATE, e.what());
  } catch (const elm::SingularityError& e) {
    return fail(ELM_ERR_SINGULAR, e.what());
  } catch (const elm::DegeneracyError& e) {
    return fail(ELM_ERR_DEGENERATE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ELM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ELM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(ELM_ERR_INTERNAL, "unknown error");
  }
}

#define ELM_REQUIRE(cond)                                                       \
  do {                                                                          \
    if (!(cond)) return fail(ELM_ERR_ARGUMENT, "null or invalid argument: " #cond); \
  } while (0)

elm::Variant to_variant(int v) {
  if (v == ELM_VARIANT_Q) return elm::Variant::q;
  if (v == ELM_VARIANT_LDL) return elm::Variant::ldl;
  throw elm::ArgumentError("unknown variant code " + std::to_string(v));
}

elm::Activation to_activation(int a) {
  switch (a) {
    case ELM_ACT_SIGMOID: return elm::Activation::sigmoid;
    case ELM_ACT_TANH: return elm::Activation::tanh;
    case ELM_ACT_GAUSSIAN: return elm::Activation::gaussian;
    case ELM_ACT_LINEAR: return elm::Activation::linear;
  }
  throw elm::ArgumentError("unknown activation code " + std::to_string(a));
}

int from_activation(elm::Activation a) { return static_cast<int>(a); }
int from_variant(elm::Variant v) { return v == elm::Variant::q ? ELM_VARIANT_Q : ELM_VARIANT_LDL; }

elm_verify_report to_c(const elm::VerifyReport& r) {
  return {r.nodes,        r.samples, from_variant(r.variant), r.weight_deviation,
          r.inverse_deviation, r.mse, r.factor_hygiene ? 1 : 0};
}

elm::BenchCell to_cpp(const elm_bench_cell& c) {
  elm::BenchCell cell;
  if (c.op != ELM_BENCH_GROW && c.op != ELM_BENCH_PRUNE) throw elm::ArgumentError("unknown bench op");
  cell.op = c.op == ELM_BENCH_GROW ? elm::BenchOp::grow : elm::BenchOp::prune;
  cell.nodes = c.nodes;
  cell.step = c.step;
  cell.samples = c.samples;
  cell.variant = to_variant(c.variant);
  return cell;
}

elm_bench_cell to_c(const elm::BenchCell& c) {
  return {c.op == elm::BenchOp::grow ? ELM_BENCH_GROW : ELM_BENCH_PRUNE, c.nodes, c.step, c.samples,
          from_variant(c.variant)};
}

}  // namespace

extern "C" {

const char* elm_last_error(void) { return g_last_error.c_str(); }

const char* elm_status_name(elm_status status) {
  switch (status) {
    case ELM_OK: return "ok";
    case ELM_ERR_ARGUMENT: return "argument error";
    case ELM_ERR_SHAPE: return "shape error";
    case ELM_ERR_DATA: return "data error";
    case ELM_ERR_STATE: return "state error";
    case ELM_ERR_SINGULAR: return "singularity error";
    case ELM_ERR_DEGENERATE: return "degeneracy error";
    case ELM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

elm_status elm_dataset_from_csv(const char* x_path, const char* y_path, int skip_header,
                                elm_dataset** out) {
  ELM_REQUIRE(x_path && y_path && out);
  return guarded([&] {
    elm::Dataset d{elm::load_csv_columns(x_path, skip_header != 0),
                   elm::load_csv_columns(y_path, skip_header != 0)};
    elm::validate(d);
    *out = new elm_dataset{std::move(d)};
  });
}

elm_status elm_dataset_from_rows(const double* x, size_t features, const double* y, size_t outputs,
                                 size_t samples, elm_dataset** out) {
  ELM_REQUIRE(x && y && out && features > 0 && outputs > 0 && samples > 0);
  return guarded([&] {
    elm::Matrix xr(samples, features, std::vector<double>(x, x + samples * features));
    elm::Matrix yr(samples, outputs, std::vector<double>(y, y + samples * outputs));
    if (!elm::all_finite(xr) || !elm::all_finite(yr)) throw elm::DataError("non-finite value in data");
    *out = new elm_dataset{elm::Dataset{xr.transpose(), yr.transpose()}};
  });
}

elm_status elm_dataset_shape(const elm_dataset* data, size_t* features, size_t* outputs,
                             size_t* samples) {
  ELM_REQUIRE(data);
  if (features) *features = data->data.x.rows();
  if (outputs) *outputs = data->data.y.rows();
  if (samples) *samples = data->data.samples();
  return ELM_OK;
}

void elm_dataset_free(elm_dataset* data) { delete data; }

void elm_train_options_default(elm_train_options* options) {
  if (!options) return;
  *options = elm_train_options{16, 1.0, ELM_VARIANT_LDL, 0, ELM_ACT_SIGMOID, 0, 0};
}

elm_status elm_session_train(const elm_dataset* data, const elm_train_options* options,
                             elm_session** out) {
  ELM_REQUIRE(data && options && out);
  return guarded([&] {
    elm::SessionOptions o;
    o.initial_nodes = options->hidden;
    o.k0sq = options->k0sq;
    o.variant = to_variant(options->variant);
    o.seed = options->seed;
    o.activation = to_activation(options->activation);
    o.allow_zero_reg = options->allow_zero_reg != 0;
    o.minmax = options->minmax != 0;
    *out = new elm_session{elm::session_init(data->data, o)};
  });
}

elm_status elm_session_from_model(const elm_model* model, const elm_dataset* data,
                                  elm_session** out) {
  ELM_REQUIRE(model && data && out);
  return guarded([&] {
    if (!model->file.factors) {
      throw elm::StateError("model was saved without update state (light); it cannot be grown or pruned");
    }
    *out = new elm_session{elm::session_restore(model->file.model, data->data, model->file.k0sq,
                                                *model->file.factors)};
  });
}

elm_status elm_session_clone(const elm_session* session, elm_session** out) {
  ELM_REQUIRE(session && out);
  return guarded([&] { *out = new elm_session{session->session}; });
}

elm_status elm_session_add_nodes(elm_session* session, size_t delta, uint64_t seed) {
  ELM_REQUIRE(session);
  return guarded([&] { session->session = elm::add_nodes(session->session, delta, seed); });
}

elm_status elm_session_remove_nodes(elm_session* session, const size_t* indices, size_t count) {
  ELM_REQUIRE(session && (indices || count == 0));
  return guarded([&] {
    session->session =
        elm::remove_nodes(session->session, std::span<const std::size_t>(indices, count));
  });
}

elm_status elm_session_refresh(elm_session* session) {
  ELM_REQUIRE(session);
  return guarded([&] { session->session = elm::refresh(session->session); });
}

elm_status elm_session_verify(const elm_session* session, elm_verify_report* out) {
  ELM_REQUIRE(session && out);
  return guarded([&] { *out = to_c(elm::verify(session->session)); });
}

size_t elm_session_nodes(const elm_session* session) {
  return session ? session->session.nodes() : 0;
}

elm_status elm_session_weights(const elm_session* session, double* out, size_t capacity,
                               size_t* rows, size_t* cols) {
  ELM_REQUIRE(session);
  const elm::Matrix& w = session->session.model.output_weights;
  if (rows) *rows = w.rows();
  if (cols) *cols = w.cols();
  if (!out) return ELM_OK;
  if (capacity < w.size()) return fail(ELM_ERR_ARGUMENT, "output buffer too small");
  std::memcpy(out, w.data().data(), w.size() * sizeof(double));
  return ELM_OK;
}

elm_status elm_session_to_model(const elm_session* session, elm_model** out) {
  ELM_REQUIRE(session && out);
  return guarded([&] { *out = new elm_model{elm::model_file_from_session(session->session)}; });
}

void elm_session_free(elm_session* session) { delete session; }

elm_status elm_model_load(const char* path, elm_model** out) {
  ELM_REQUIRE(path && out);
  return guarded([&] { *out = new elm_model{elm::load_model(path)}; });
}

elm_status elm_model_save(const elm_model* model, const char* path, int light) {
  ELM_REQUIRE(model && path);
  return guarded([&] { elm::save_model(path, model->file, light != 0); });
}

elm_status elm_model_info_get(const elm_model* model, elm_model_info* out) {
  ELM_REQUIRE(model && out);
  const auto& f = model->file;
  *out = elm_model_info{f.model.hidden(),
                        f.model.inputs(),
                        f.model.output_weights.rows(),
                        f.k0sq,
                        from_variant(f.variant),
                        from_activation(f.model.activation),
                        f.factors ? 1 : 0,
                        f.model.scaler ? 1 : 0};
  return ELM_OK;
}

elm_status elm_model_set_data_paths(elm_model* model, const char* x_path, const char* y_path,
                                    int header) {
  ELM_REQUIRE(model);
  return guarded([&] {
    for (const char* p : {x_path, y_path})
      if (p && std::strchr(p, '\n')) throw elm::ArgumentError("data path contains a newline");
    model->file.x_path = x_path ? std::optional<std::string>(x_path) : std::nullopt;
    model->file.y_path = y_path ? std::optional<std::string>(y_path) : std::nullopt;
    model->file.header = header != 0;
  });
}

const char* elm_model_x_path(const elm_model* model) {
  return model && model->file.x_path ? model->file.x_path->c_str() : nullptr;
}

const char* elm_model_y_path(const elm_model* model) {
  return model && model->file.y_path ? model->file.y_path->c_str() : nullptr;
}

int elm_model_data_header(const elm_model* model) { return model && model->file.header ? 1 : 0; }

elm_status elm_model_mse(const elm_model* model, const elm_dataset* data, double* out) {
  ELM_REQUIRE(model && data && out);
  return guarded([&] {
    const auto& m = model->file.model;
    const elm::Matrix h = elm::compute_hidden(m, elm::prepare_inputs(m, data->data.x));
    *out = elm::mse(data->data.y, elm::predict(m, h));
  });
}

elm_status elm_model_predict(const elm_model* model, const elm_dataset* data, double* out,
                             size_t capacity) {
  ELM_REQUIRE(model && data && out);
  return guarded([&] {
    const auto& m = model->file.model;
    const elm::Matrix z =
        elm::predict(m, elm::compute_hidden(m, elm::prepare_inputs(m, data->data.x))).transpose();
    if (capacity < z.size()) throw elm::ArgumentError("output buffer too small");
    std::memcpy(out, z.data().data(), z.size() * sizeof(double));
  });
}

elm_status elm_model_verify(const elm_model* model, const elm_dataset* data,
                            elm_verify_report* out) {
  ELM_REQUIRE(model && data && out);
  return guarded([&] {
    const auto& f = model->file;
    if (f.factors) {
      *out = to_c(elm::verify(elm::session_restore(f.model, data->data, f.k0sq, *f.factors)));
      return;
    }
    elm::validate(data->data);
    const elm::Matrix h = elm::compute_hidden(f.model, elm::prepare_inputs(f.model, data->data.x));
    const elm::Matrix w_ref = elm::direct_weights(h, data->data.y, f.k0sq);
    if (w_ref.rows() != f.model.output_weights.rows()) {
      throw elm::ShapeError("verify: target count does not match model outputs");
    }
    elm::VerifyReport r;
    r.nodes = f.model.hidden();
    r.samples = data->data.samples();
    r.variant = f.variant;
    r.weight_deviation = elm::relative_deviation(f.model.output_weights, w_ref);
    r.inverse_deviation = std::numeric_limits<double>::quiet_NaN();
    r.mse = elm::mse(data->data.y, elm::predict(f.model, h));
    *out = to_c(r);
  });
}

void elm_model_free(elm_model* model) { delete model; }

elm_status elm_bench_run(const elm_bench_cell* cells, size_t count, size_t repetitions,
                         uint64_t seed, elm_bench_row* out) {
  ELM_REQUIRE((cells && out) || count == 0);
  return guarded([&] {
    std::vector<elm::BenchCell> grid;
    grid.reserve(count);
    for (size_t i = 0; i < count; ++i) grid.push_back(to_cpp(cells[i]));
    const auto rows = elm::run_bench(grid, repetitions, seed);
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      out[i] = elm_bench_row{to_c(r.cell), r.repetitions, r.incremental_seconds, r.oracle_seconds,
                             r.speedup, r.deviation};
    }
  });
}

elm_status elm_bench_row_json(const elm_bench_row* row, char* buffer, size_t capacity,
                              size_t* needed) {
  ELM_REQUIRE(row);
  return guarded([&] {
    elm::BenchRow r{to_cpp(row->cell), row->repetitions, row->incremental_seconds,
                    row->oracle_seconds, row->speedup, row->deviation};
    const std::string text = elm::bench_row_json(r);
    if (needed) *needed = text.size();
    if (buffer && capacity > 0) {
      const size_t n = std::min(capacity - 1, text.size());
      std::memcpy(buffer, text.data(), n);
      buffer[n] = '\0';
    }
  });
}

}  // extern "C"
