#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "elm/errors.hpp"

namespace elm {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Zero-sized dimensions are allowed so an
// engine state can start with no hidden nodes.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> diag);
  static Matrix column(std::span<const double> values);
  static Matrix row(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row_span(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  Matrix transpose() const;

  // Copy of the sub-block starting at (r0, c0) with the given extent.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& src);

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) noexcept;

  bool operator==(const Matrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

// a * b.
Matrix mat_mul(const Matrix& a, const Matrix& b);
// a * b^T, evaluated as row dot products.
Matrix mul_abt(const Matrix& a, const Matrix& b);
// a^T * b.
Matrix mul_atb(const Matrix& a, const Matrix& b);
// a * a^T, exactly symmetric.
Matrix gram_rows(const Matrix& a);

Matrix hstack(const Matrix& left, const Matrix& right);
Matrix vstack(const Matrix& top, const Matrix& bottom);

// Scales column j of a by s[j].
Matrix scale_columns(Matrix a, std::span<const double> s);

// Replaces a by (a + a^T) / 2.
void symmetrize(Matrix& a);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double trace(const Matrix& a);
bool all_finite(const Matrix& a);

// ||a - a^T||_max <= rel_tol * (1 + ||a||_max).
bool is_symmetric(const Matrix& a, double rel_tol = 1e-12);

// ||a - b||_F / ||b||_F, or the absolute norm when b is zero.
double relative_deviation(const Matrix& a, const Matrix& b);

// Lower Cholesky factor c with a = c c^T. Any pivot <= pivot_floor raises
// SingularityError.
Matrix cholesky_lower(const Matrix& a, double pivot_floor);
Matrix cholesky_solve(const Matrix& chol, const Matrix& b);

// Solves a x = b for symmetric positive definite a via Cholesky.
// Throws SingularityError on a non-positive pivot.
Matrix spd_solve(const Matrix& a, const Matrix& b);

// Solves x * u^T = b for x (u upper triangular, unit or not).
Matrix solve_right_upper_transpose(const Matrix& b, const Matrix& u);

// Inverse of a unit lower triangular matrix.
Matrix invert_unit_lower(const Matrix& lower);

// Permutation stored as map[new_position] = old_index.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> map);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return map_.size(); }
  std::size_t operator[](std::size_t pos) const noexcept { return map_[pos]; }
  const std::vector<std::size_t>& map() const noexcept { return map_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  bool operator==(const Permutation&) const = default;

private:
  std::vector<std::size_t> map_;
};

// Moves `removed` (in the given order) to the tail, keeping the relative order
// of the remaining indices.
Permutation permute_to_tail(std::size_t n, std::span<const std::size_t> removed);

Matrix permute_rows(const Matrix& a, const Permutation& p);
Matrix permute_cols(const Matrix& a, const Permutation& p);
// P a P^T.
Matrix permute_symmetric(const Matrix& a, const Permutation& p);
Vector permute_vector(std::span<const double> v, const Permutation& p);

}  // namespace elm
