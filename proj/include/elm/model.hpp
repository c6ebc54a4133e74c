#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "elm/matrix.hpp"

namespace elm {

enum class Activation { sigmoid, tanh, gaussian, linear };

std::string_view to_string(Activation a) noexcept;
// Throws ArgumentError for an unknown name.
Activation parse_activation(std::string_view name);

double activate(Activation a, double x) noexcept;

// Random input weights and biases of a run of hidden nodes. Row i of `input`
// together with bias[i] defines node i.
struct NodeParams {
  Matrix input;  // count x N
  Vector bias;   // count
};

// Draws `count` nodes with every entry uniform on [-1, 1].
//
// The generator is std::mt19937_64 seeded with `seed`; each double is built
// from the top 53 bits of one 64-bit draw, u = (x >> 11) * 2^-53, then mapped
// to 2u - 1. Nodes are drawn in order, each as its N input weights followed by
// its bias, so the first k nodes of a larger draw equal a draw of k nodes.
NodeParams draw_nodes(std::size_t count, std::size_t inputs, std::uint64_t seed);

// Per-feature affine map of inputs onto [0, 1], fitted on training rows.
struct MinMaxScaler {
  Vector lo;
  Vector hi;

  static MinMaxScaler fit(const Matrix& x);
  Matrix apply(const Matrix& x) const;
};

struct ElmModel {
  Matrix input_weights;  // l x N
  Vector biases;         // l
  Activation activation = Activation::sigmoid;
  Matrix output_weights;  // M x l, empty before training
  std::optional<MinMaxScaler> scaler;  // applied to raw inputs when present

  std::size_t hidden() const noexcept { return input_weights.rows(); }
  std::size_t inputs() const noexcept { return input_weights.cols(); }
  bool trained() const noexcept { return !output_weights.empty(); }
};

// Samples are columns: x is N x K, y is M x K.
struct Dataset {
  Matrix x;
  Matrix y;

  std::size_t samples() const noexcept { return x.cols(); }
};

// Checks x.cols() == y.cols() >= 1.
void validate(const Dataset& data);

ElmModel random_init(std::size_t hidden, std::size_t inputs, std::uint64_t seed,
                     Activation activation);

// f(A x + d 1^T), entry-wise activation.
Matrix compute_hidden(const Matrix& input_weights, std::span<const double> biases,
                      Activation activation, const Matrix& x);
Matrix compute_hidden(const ElmModel& model, const Matrix& x);

// Z = W H. Throws StateError if the model has no output weights.
Matrix predict(const ElmModel& model, const Matrix& hidden);

// ||Y - Z||_F^2 / K.
double mse(const Matrix& y, const Matrix& z);

// Raw inputs mapped through the model's scaler, if it has one.
Matrix prepare_inputs(const ElmModel& model, const Matrix& raw_x);

}  // namespace elm
