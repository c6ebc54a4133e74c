#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "elm/elm.h"

namespace {

struct Data {
  std::vector<double> x;  // samples x features
  std::vector<double> y;  // samples x outputs
  std::size_t samples;
};

Data make_data(std::size_t samples) {
  Data d{{}, {}, samples};
  for (std::size_t k = 0; k < samples; ++k) {
    const double a = std::sin(0.37 * static_cast<double>(k));
    const double b = std::cos(0.11 * static_cast<double>(k));
    d.x.push_back(a);
    d.x.push_back(b);
    d.y.push_back(a * b + 0.5 * a);
  }
  return d;
}

elm_dataset* dataset(const Data& d) {
  elm_dataset* out = nullptr;
  REQUIRE(elm_dataset_from_rows(d.x.data(), 2, d.y.data(), 1, d.samples, &out) == ELM_OK);
  return out;
}

}  // namespace

TEST_CASE("C API: train, grow, prune, verify") {
  const Data d = make_data(80);
  elm_dataset* data = dataset(d);
  std::size_t f = 0, o = 0, k = 0;
  CHECK(elm_dataset_shape(data, &f, &o, &k) == ELM_OK);
  CHECK(f == 2);
  CHECK(o == 1);
  CHECK(k == 80);

  for (int variant : {ELM_VARIANT_Q, ELM_VARIANT_LDL}) {
    elm_train_options opts;
    elm_train_options_default(&opts);
    CHECK(opts.hidden == 16);
    CHECK(opts.k0sq == 1.0);
    CHECK(opts.variant == ELM_VARIANT_LDL);
    opts.hidden = 6;
    opts.variant = variant;
    elm_session* s = nullptr;
    REQUIRE(elm_session_train(data, &opts, &s) == ELM_OK);
    CHECK(elm_session_nodes(s) == 6);
    CHECK(elm_session_add_nodes(s, 4, 3) == ELM_OK);
    CHECK(elm_session_nodes(s) == 10);
    const std::size_t idx[] = {0, 7};
    CHECK(elm_session_remove_nodes(s, idx, 2) == ELM_OK);
    CHECK(elm_session_nodes(s) == 8);

    elm_verify_report r{};
    CHECK(elm_session_verify(s, &r) == ELM_OK);
    CHECK(r.nodes == 8);
    CHECK(r.samples == 80);
    CHECK(r.variant == variant);
    CHECK(r.weight_deviation <= 1e-9);
    CHECK(r.inverse_deviation <= 1e-9);
    CHECK(r.factor_hygiene == 1);

    std::size_t rows = 0, cols = 0;
    CHECK(elm_session_weights(s, nullptr, 0, &rows, &cols) == ELM_OK);
    CHECK(rows == 1);
    CHECK(cols == 8);
    std::vector<double> w(rows * cols);
    CHECK(elm_session_weights(s, w.data(), w.size(), &rows, &cols) == ELM_OK);
    CHECK(elm_session_weights(s, w.data(), 1, &rows, &cols) == ELM_ERR_ARGUMENT);

    elm_session* copy = nullptr;
    CHECK(elm_session_clone(s, &copy) == ELM_OK);
    CHECK(elm_session_refresh(copy) == ELM_OK);
    CHECK(elm_session_nodes(copy) == 8);
    elm_session_free(copy);
    elm_session_free(s);
  }
  elm_dataset_free(data);
}

TEST_CASE("C API: error codes and messages") {
  CHECK(std::string(elm_status_name(ELM_ERR_SHAPE)).size() > 0);
  const Data d = make_data(20);
  elm_dataset* data = dataset(d);
  elm_train_options opts;
  elm_train_options_default(&opts);
  opts.hidden = 4;
  elm_session* s = nullptr;
  CHECK(elm_session_train(nullptr, &opts, &s) == ELM_ERR_ARGUMENT);
  CHECK(std::string(elm_last_error()).size() > 0);

  opts.k0sq = 0.0;
  CHECK(elm_session_train(data, &opts, &s) == ELM_ERR_ARGUMENT);
  opts.allow_zero_reg = 1;
  opts.hidden = 30;
  CHECK(elm_session_train(data, &opts, &s) == ELM_ERR_SINGULAR);
  opts.k0sq = 1.0;
  opts.hidden = 4;
  REQUIRE(elm_session_train(data, &opts, &s) == ELM_OK);
  const std::size_t all[] = {0, 1, 2, 3};
  CHECK(elm_session_remove_nodes(s, all, 4) == ELM_ERR_ARGUMENT);
  const std::size_t bad[] = {9};
  CHECK(elm_session_remove_nodes(s, bad, 1) == ELM_ERR_ARGUMENT);
  CHECK(elm_session_add_nodes(s, 0, 1) == ELM_ERR_ARGUMENT);

  elm_dataset* other = nullptr;
  CHECK(elm_dataset_from_csv("/nonexistent/x.csv", "/nonexistent/y.csv", 0, &other) == ELM_ERR_DATA);

  const std::vector<double> x3(60, 0.5), y1(20, 0.0);
  REQUIRE(elm_dataset_from_rows(x3.data(), 3, y1.data(), 1, 20, &other) == ELM_OK);
  elm_model* m = nullptr;
  REQUIRE(elm_session_to_model(s, &m) == ELM_OK);
  double mse = 0.0;
  CHECK(elm_model_mse(m, other, &mse) == ELM_ERR_SHAPE);
  elm_model_free(m);
  elm_dataset_free(other);
  elm_session_free(s);
  elm_dataset_free(data);
}

TEST_CASE("C API: model save, load and light restore") {
  const Data d = make_data(50);
  elm_dataset* data = dataset(d);
  elm_train_options opts;
  elm_train_options_default(&opts);
  opts.hidden = 5;
  opts.minmax = 1;
  elm_session* s = nullptr;
  REQUIRE(elm_session_train(data, &opts, &s) == ELM_OK);
  elm_model* m = nullptr;
  REQUIRE(elm_session_to_model(s, &m) == ELM_OK);
  CHECK(elm_model_x_path(m) == nullptr);
  CHECK(elm_model_set_data_paths(m, "x.csv", "y.csv", 1) == ELM_OK);
  CHECK(std::string(elm_model_x_path(m)) == "x.csv");
  CHECK(elm_model_data_header(m) == 1);

  elm_model_info info{};
  CHECK(elm_model_info_get(m, &info) == ELM_OK);
  CHECK(info.nodes == 5);
  CHECK(info.inputs == 2);
  CHECK(info.outputs == 1);
  CHECK(info.has_state == 1);
  CHECK(info.has_scaler == 1);

  const auto dir = std::filesystem::temp_directory_path();
  const std::string full = (dir / "elm_capi_full.elm").string();
  const std::string light = (dir / "elm_capi_light.elm").string();
  CHECK(elm_model_save(m, full.c_str(), 0) == ELM_OK);
  CHECK(elm_model_save(m, light.c_str(), 1) == ELM_OK);

  elm_model* mf = nullptr;
  elm_model* ml = nullptr;
  REQUIRE(elm_model_load(full.c_str(), &mf) == ELM_OK);
  REQUIRE(elm_model_load(light.c_str(), &ml) == ELM_OK);

  elm_session* restored = nullptr;
  CHECK(elm_session_from_model(mf, data, &restored) == ELM_OK);
  CHECK(elm_session_add_nodes(restored, 2, 1) == ELM_OK);
  elm_session_free(restored);
  CHECK(elm_session_from_model(ml, data, &restored) == ELM_ERR_STATE);

  elm_verify_report r{};
  CHECK(elm_model_verify(ml, data, &r) == ELM_OK);
  CHECK(std::isnan(r.inverse_deviation));
  CHECK(r.weight_deviation <= 1e-12);

  std::vector<double> z(50);
  CHECK(elm_model_predict(mf, data, z.data(), z.size()) == ELM_OK);
  double mse_a = 0.0, mse_b = 0.0;
  CHECK(elm_model_mse(mf, data, &mse_a) == ELM_OK);
  CHECK(elm_model_mse(ml, data, &mse_b) == ELM_OK);
  CHECK(mse_a == mse_b);
  double sum = 0.0;
  for (std::size_t k = 0; k < 50; ++k) sum += (z[k] - d.y[k]) * (z[k] - d.y[k]);
  CHECK(sum / 50.0 == doctest::Approx(mse_a).epsilon(1e-12));

  elm_model_free(ml);
  elm_model_free(mf);
  elm_model_free(m);
  elm_session_free(s);
  elm_dataset_free(data);
  std::filesystem::remove(full);
  std::filesystem::remove(light);
}

TEST_CASE("C API: bench") {
  CHECK(elm_bench_run(nullptr, 0, 5, 1, nullptr) == ELM_OK);
  const elm_bench_cell cell{ELM_BENCH_GROW, 12, 3, 150, ELM_VARIANT_Q};
  elm_bench_row row{};
  REQUIRE(elm_bench_run(&cell, 1, 2, 1, &row) == ELM_OK);
  CHECK(row.repetitions == 5);
  CHECK(row.deviation <= 1e-9);
  std::size_t needed = 0;
  CHECK(elm_bench_row_json(&row, nullptr, 0, &needed) == ELM_OK);
  std::string buf(needed + 1, '\0');
  CHECK(elm_bench_row_json(&row, buf.data(), buf.size(), &needed) == ELM_OK);
  buf.resize(needed);
  CHECK(buf.front() == '{');
  CHECK(buf.back() == '}');
}
