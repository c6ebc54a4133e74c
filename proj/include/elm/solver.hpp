#pragma once

#include "elm/matrix.hpp"

namespace elm {

// R = H H^T + k0sq I.
struct RegularizedGram {
  Matrix r;
  double k0sq = 0.0;
};

// Factors of the inverse Gram: unit upper triangular L and positive diagonal D
// with L diag(D) L^T = R^-1.
struct InverseLdl {
  Matrix unit_upper;
  Vector diag;

  std::size_t size() const noexcept { return diag.size(); }
};

// k0sq == 0 is accepted; a rank-deficient H then surfaces as SingularityError
// in whatever consumes the Gram.
RegularizedGram build_gram(const Matrix& hidden, double k0sq);

// Q = R^-1, symmetrized.
Matrix invert_to_q(const RegularizedGram& gram);

// W = Y H^T (H H^T + k0sq I)^-1 via an SPD solve; never forms the inverse.
Matrix direct_weights(const Matrix& hidden, const Matrix& targets, double k0sq);

// B = H^T (H H^T + k0sq I)^-1, so that W = Y B.
Matrix pseudo_inverse_b(const Matrix& hidden, double k0sq);

// Conventional R = Lc Dc Lc^T, returned as L = Lc^-T and D = 1 / Dc.
InverseLdl inverse_ldl_factorize(const Matrix& r);
// Same, with an explicit pivot floor: any pivot <= pivot_floor raises
// SingularityError.
InverseLdl inverse_ldl_factorize(const Matrix& r, double pivot_floor);
inline InverseLdl inverse_ldl_factorize(const RegularizedGram& gram) {
  return inverse_ldl_factorize(gram.r);
}

// L diag(D) L^T as a dense matrix.
Matrix ldl_product(const InverseLdl& f);

// L diag(D) L^T x, evaluated right to left in O(l^2) per column.
Matrix apply_ldl(const InverseLdl& f, const Matrix& x);

// True when L is exactly unit upper triangular and every D entry is positive.
bool factor_hygiene_ok(const InverseLdl& f) noexcept;

}  // namespace elm
