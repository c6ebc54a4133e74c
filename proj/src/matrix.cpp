#include "elm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace elm {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch " + dims(a) + " vs " + dims(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Matrix: data length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw ShapeError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::row(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nrows, std::size_t ncols) const {
  if (r0 + nrows > rows_ || c0 + ncols > cols_) {
    throw ShapeError("block: " + std::to_string(nrows) + "x" + std::to_string(ncols) + " at (" +
                     std::to_string(r0) + "," + std::to_string(c0) + ") exceeds " + dims(*this));
  }
  Matrix out(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i) {
    const double* src = data_.data() + (r0 + i) * cols_ + c0;
    std::copy(src, src + ncols, out.data_.data() + i * ncols);
  }
  return out;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& src) {
  if (r0 + src.rows_ > rows_ || c0 + src.cols_ > cols_) {
    throw ShapeError("set_block: " + dims(src) + " does not fit in " + dims(*this));
  }
  for (std::size_t i = 0; i < src.rows_; ++i) {
    const double* from = src.data_.data() + i * src.cols_;
    std::copy(from, from + src.cols_, data_.data() + (r0 + i) * cols_ + c0);
  }
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ShapeError("mat_mul: " + dims(a) + " * " + dims(b));
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row_span(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* src = b.row_span(k).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += aik * src[j];
    }
  }
  return out;
}

Matrix mul_abt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw ShapeError("mul_abt: " + dims(a) + " * (" + dims(b) + ")^T");
  Matrix out(a.rows(), b.rows());
  const std::size_t k = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row_span(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* bj = b.row_span(j).data();
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += ai[t] * bj[t];
      out(i, j) = s;
    }
  }
  return out;
}

Matrix mul_atb(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("mul_atb: (" + dims(a) + ")^T * " + dims(b));
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* bk = b.row_span(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      if (aki == 0.0) continue;
      double* dst = out.row_span(i).data();
      for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += aki * bk[j];
    }
  }
  return out;
}

Matrix gram_rows(const Matrix& a) {
  Matrix out(a.rows(), a.rows());
  const std::size_t k = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row_span(i).data();
    for (std::size_t j = 0; j <= i; ++j) {
      const double* aj = a.row_span(j).data();
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += ai[t] * aj[t];
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  if (left.rows() != right.rows()) throw ShapeError("hstack: " + dims(left) + " | " + dims(right));
  Matrix out(left.rows(), left.cols() + right.cols());
  out.set_block(0, 0, left);
  out.set_block(0, left.cols(), right);
  return out;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw ShapeError("vstack: " + dims(top) + " / " + dims(bottom));
  std::vector<double> data;
  data.reserve(top.size() + bottom.size());
  data.insert(data.end(), top.data().begin(), top.data().end());
  data.insert(data.end(), bottom.data().begin(), bottom.data().end());
  return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(data));
}

Matrix scale_columns(Matrix a, std::span<const double> s) {
  if (s.size() != a.cols()) throw ShapeError("scale_columns: length mismatch");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) *= s[j];
  return a;
}

void symmetrize(Matrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("symmetrize: non-square " + dims(a));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

double trace(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) s += a(i, i);
  return s;
}

bool all_finite(const Matrix& a) {
  return std::all_of(a.data().begin(), a.data().end(), [](double v) { return std::isfinite(v); });
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  return worst <= rel_tol * (1.0 + max_abs(a));
}

double relative_deviation(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "relative_deviation");
  const double diff = frobenius_norm(a - b);
  const double ref = frobenius_norm(b);
  return ref > 0.0 ? diff / ref : diff;
}

Matrix cholesky_lower(const Matrix& a, double pivot_floor) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeError("cholesky_lower: non-square " + dims(a));
  Matrix c(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= c(j, k) * c(j, k);
    if (!(pivot > pivot_floor)) {
      throw SingularityError("non-positive pivot " + std::to_string(pivot) + " at column " +
                             std::to_string(j));
    }
    const double cjj = std::sqrt(pivot);
    c(j, j) = cjj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
      c(i, j) = s / cjj;
    }
  }
  return c;
}

Matrix cholesky_solve(const Matrix& c, const Matrix& b) {
  const std::size_t n = c.rows();
  if (b.rows() != n) throw ShapeError("cholesky_solve: rhs " + dims(b) + " for " + dims(c));
  Matrix x = b;
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = x.row_span(i).data();
    for (std::size_t k = 0; k < i; ++k) {
      const double cik = c(i, k);
      const double* xk = x.row_span(k).data();
      for (std::size_t j = 0; j < m; ++j) xi[j] -= cik * xk[j];
    }
    for (std::size_t j = 0; j < m; ++j) xi[j] /= c(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double* xi = x.row_span(ii).data();
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double cki = c(k, ii);
      const double* xk = x.row_span(k).data();
      for (std::size_t j = 0; j < m; ++j) xi[j] -= cki * xk[j];
    }
    for (std::size_t j = 0; j < m; ++j) xi[j] /= c(ii, ii);
  }
  return x;
}

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ShapeError("spd_solve: non-square " + dims(a));
  if (b.rows() != n) throw ShapeError("spd_solve: rhs " + dims(b) + " for " + dims(a));
  if (!is_symmetric(a)) throw ArgumentError("spd_solve: matrix is not symmetric");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;
  try {
    return cholesky_solve(cholesky_lower(a, floor), b);
  } catch (const SingularityError& e) {
    throw SingularityError(std::string("spd_solve: ") + e.what());
  }
}

Matrix solve_right_upper_transpose(const Matrix& b, const Matrix& u) {
  const std::size_t n = u.rows();
  if (u.cols() != n || b.cols() != n) {
    throw ShapeError("solve_right_upper_transpose: " + dims(b) + " vs " + dims(u));
  }
  // x u^T = b  <=>  u x^T = b^T; back substitution per row of x.
  Matrix x(b.rows(), n);
  for (std::size_t r = 0; r < b.rows(); ++r) {
    for (std::size_t i = n; i-- > 0;) {
      double s = b(r, i);
      for (std::size_t k = i + 1; k < n; ++k) s -= u(i, k) * x(r, k);
      if (u(i, i) == 0.0) throw SingularityError("solve_right_upper_transpose: zero diagonal");
      x(r, i) = s / u(i, i);
    }
  }
  return x;
}

Matrix invert_unit_lower(const Matrix& lower) {
  const std::size_t n = lower.rows();
  if (lower.cols() != n) throw ShapeError("invert_unit_lower: non-square " + dims(lower));
  Matrix inv = Matrix::identity(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += lower(i, k) * inv(k, j);
      inv(i, j) = -s;
    }
  }
  return inv;
}

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> seen(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || seen[v]) throw ArgumentError("Permutation: map is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = i;
  return Permutation(std::move(map));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t pos = 0; pos < map_.size(); ++pos) inv[map_[pos]] = pos;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < map_.size(); ++i)
    if (map_[i] != i) return false;
  return true;
}

Permutation permute_to_tail(std::size_t n, std::span<const std::size_t> removed) {
  std::vector<bool> is_removed(n, false);
  for (std::size_t idx : removed) {
    if (idx >= n) {
      throw ArgumentError("permute_to_tail: index " + std::to_string(idx) + " out of range for " +
                          std::to_string(n));
    }
    if (is_removed[idx]) throw ArgumentError("permute_to_tail: duplicate index " + std::to_string(idx));
    is_removed[idx] = true;
  }
  std::vector<std::size_t> map;
  map.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (!is_removed[i]) map.push_back(i);
  map.insert(map.end(), removed.begin(), removed.end());
  return Permutation(std::move(map));
}

Matrix permute_rows(const Matrix& a, const Permutation& p) {
  if (p.size() != a.rows()) throw ShapeError("permute_rows: permutation size mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t pos = 0; pos < p.size(); ++pos) {
    auto src = a.row_span(p[pos]);
    std::copy(src.begin(), src.end(), out.row_span(pos).begin());
  }
  return out;
}

Matrix permute_cols(const Matrix& a, const Permutation& p) {
  if (p.size() != a.cols()) throw ShapeError("permute_cols: permutation size mismatch");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t pos = 0; pos < p.size(); ++pos) out(i, pos) = a(i, p[pos]);
  return out;
}

Matrix permute_symmetric(const Matrix& a, const Permutation& p) {
  if (a.rows() != a.cols() || p.size() != a.rows()) {
    throw ShapeError("permute_symmetric: size mismatch");
  }
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) out(i, j) = a(p[i], p[j]);
  return out;
}

Vector permute_vector(std::span<const double> v, const Permutation& p) {
  if (p.size() != v.size()) throw ShapeError("permute_vector: size mismatch");
  Vector out(v.size());
  for (std::size_t pos = 0; pos < p.size(); ++pos) out[pos] = v[p[pos]];
  return out;
}

}  // namespace elm
