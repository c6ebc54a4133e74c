#include "elm/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace elm {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::gaussian: return "gaussian";
    case Activation::linear: return "linear";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "gaussian") return Activation::gaussian;
  if (name == "linear") return Activation::linear;
  throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

double activate(Activation a, double x) noexcept {
  switch (a) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::tanh: return std::tanh(x);
    case Activation::gaussian: return std::exp(-x * x);
    case Activation::linear: return x;
  }
  return x;
}

NodeParams draw_nodes(std::size_t count, std::size_t inputs, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  auto uniform = [&gen] {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
  };
  NodeParams out{Matrix(count, inputs), Vector(count)};
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t n = 0; n < inputs; ++n) out.input(i, n) = uniform();
    out.bias[i] = uniform();
  }
  return out;
}

void validate(const Dataset& data) {
  if (data.x.cols() != data.y.cols()) {
    throw ShapeError("dataset: X has " + std::to_string(data.x.cols()) + " samples, Y has " +
                     std::to_string(data.y.cols()));
  }
  if (data.x.cols() == 0) throw ShapeError("dataset: no samples");
}

ElmModel random_init(std::size_t hidden, std::size_t inputs, std::uint64_t seed,
                     Activation activation) {
  if (hidden == 0 || inputs == 0) {
    throw ArgumentError("random_init: hidden and input counts must be positive");
  }
  NodeParams p = draw_nodes(hidden, inputs, seed);
  return ElmModel{std::move(p.input), std::move(p.bias), activation, Matrix{}, std::nullopt};
}

Matrix compute_hidden(const Matrix& input_weights, std::span<const double> biases,
                      Activation activation, const Matrix& x) {
  if (input_weights.cols() != x.rows()) {
    throw ShapeError("compute_hidden: weights expect " + std::to_string(input_weights.cols()) +
                     " inputs, X has " + std::to_string(x.rows()));
  }
  if (biases.size() != input_weights.rows()) throw ShapeError("compute_hidden: bias length");
  Matrix h = mat_mul(input_weights, x);
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (double& v : h.row_span(i)) v = activate(activation, v + biases[i]);
  return h;
}

Matrix compute_hidden(const ElmModel& model, const Matrix& x) {
  return compute_hidden(model.input_weights, model.biases, model.activation, x);
}

Matrix predict(const ElmModel& model, const Matrix& hidden) {
  if (!model.trained()) throw StateError("predict: model has no output weights");
  return mat_mul(model.output_weights, hidden);
}

double mse(const Matrix& y, const Matrix& z) {
  if (y.rows() != z.rows() || y.cols() != z.cols()) throw ShapeError("mse: shape mismatch");
  if (y.cols() == 0) throw ShapeError("mse: no samples");
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y.data()[i] - z.data()[i];
    sum += e * e;
  }
  return sum / static_cast<double>(y.cols());
}

MinMaxScaler MinMaxScaler::fit(const Matrix& x) {
  MinMaxScaler s{Vector(x.rows()), Vector(x.rows())};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto row = x.row_span(i);
    auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    s.lo[i] = row.empty() ? 0.0 : *lo;
    s.hi[i] = row.empty() ? 1.0 : *hi;
  }
  return s;
}

Matrix MinMaxScaler::apply(const Matrix& x) const {
  if (x.rows() != lo.size()) throw ShapeError("MinMaxScaler: feature count mismatch");
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double span = hi[i] - lo[i];
    for (double& v : out.row_span(i)) v = span > 0.0 ? (v - lo[i]) / span : 0.0;
  }
  return out;
}

Matrix prepare_inputs(const ElmModel& model, const Matrix& raw_x) {
  return model.scaler ? model.scaler->apply(raw_x) : raw_x;
}

}  // namespace elm
