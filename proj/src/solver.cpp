#include "elm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace elm {

RegularizedGram build_gram(const Matrix& hidden, double k0sq) {
  if (!(k0sq >= 0.0)) throw ArgumentError("build_gram: k0sq must be non-negative");
  Matrix r = gram_rows(hidden);
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) += k0sq;
  symmetrize(r);
  return {std::move(r), k0sq};
}

Matrix invert_to_q(const RegularizedGram& gram) {
  Matrix q = spd_solve(gram.r, Matrix::identity(gram.r.rows()));
  symmetrize(q);
  return q;
}

Matrix direct_weights(const Matrix& hidden, const Matrix& targets, double k0sq) {
  if (targets.cols() != hidden.cols()) {
    throw ShapeError("direct_weights: Y has " + std::to_string(targets.cols()) +
                     " samples, H has " + std::to_string(hidden.cols()));
  }
  const RegularizedGram gram = build_gram(hidden, k0sq);
  // R W^T = H Y^T
  return spd_solve(gram.r, mul_abt(hidden, targets)).transpose();
}

Matrix pseudo_inverse_b(const Matrix& hidden, double k0sq) {
  const RegularizedGram gram = build_gram(hidden, k0sq);
  return spd_solve(gram.r, hidden).transpose();
}

InverseLdl inverse_ldl_factorize(const Matrix& r) {
  const std::size_t n = r.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < std::min(n, r.cols()); ++i) max_diag = std::max(max_diag, std::abs(r(i, i)));
  return inverse_ldl_factorize(
      r, static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag);
}

InverseLdl inverse_ldl_factorize(const Matrix& r, double floor) {
  const std::size_t n = r.rows();
  if (r.cols() != n) throw ShapeError("inverse_ldl_factorize: non-square matrix");
  if (!is_symmetric(r)) throw ArgumentError("inverse_ldl_factorize: matrix is not symmetric");

  Matrix lower = Matrix::identity(n);
  Vector pivots(n);
  for (std::size_t j = 0; j < n; ++j) {
    double dj = r(j, j);
    for (std::size_t k = 0; k < j; ++k) dj -= lower(j, k) * lower(j, k) * pivots[k];
    if (!(dj > floor)) {
      throw SingularityError("inverse_ldl_factorize: non-positive pivot " + std::to_string(dj) +
                             " at column " + std::to_string(j));
    }
    pivots[j] = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = r(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k) * pivots[k];
      lower(i, j) = s / dj;
    }
  }

  InverseLdl out{invert_unit_lower(lower).transpose(), Vector(n)};
  for (std::size_t i = 0; i < n; ++i) out.diag[i] = 1.0 / pivots[i];
  return out;
}

Matrix ldl_product(const InverseLdl& f) {
  return mul_abt(scale_columns(f.unit_upper, f.diag), f.unit_upper);
}

Matrix apply_ldl(const InverseLdl& f, const Matrix& x) {
  const std::size_t n = f.size();
  if (x.rows() != n) throw ShapeError("apply_ldl: operand rows do not match factor size");
  const Matrix& u = f.unit_upper;
  const std::size_t m = x.cols();

  // y = L^T x; L^T is lower triangular so row i only reads rows <= i of x.
  Matrix y(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* yi = y.row_span(i).data();
    for (std::size_t k = 0; k <= i; ++k) {
      const double uki = u(k, i);
      if (uki == 0.0) continue;
      const double* xk = x.row_span(k).data();
      for (std::size_t j = 0; j < m; ++j) yi[j] += uki * xk[j];
    }
    for (std::size_t j = 0; j < m; ++j) yi[j] *= f.diag[i];
  }
  // z = L y
  Matrix z(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    double* zi = z.row_span(i).data();
    for (std::size_t k = i; k < n; ++k) {
      const double uik = u(i, k);
      if (uik == 0.0) continue;
      const double* yk = y.row_span(k).data();
      for (std::size_t j = 0; j < m; ++j) zi[j] += uik * yk[j];
    }
  }
  return z;
}

bool factor_hygiene_ok(const InverseLdl& f) noexcept {
  const std::size_t n = f.size();
  if (f.unit_upper.rows() != n || f.unit_upper.cols() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (f.unit_upper(i, i) != 1.0) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (f.unit_upper(i, j) != 0.0) return false;
    if (!(f.diag[i] > 0.0) || !std::isfinite(f.diag[i])) return false;
  }
  return true;
}

}  // namespace elm
