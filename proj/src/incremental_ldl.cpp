#include "elm/incremental_ldl.hpp"

#include <string>

namespace elm {

LdlState make_ldl_state(Matrix hidden, Matrix targets, double k0sq) {
  if (targets.cols() != hidden.cols()) throw ShapeError("make_ldl_state: sample count mismatch");
  InverseLdl factors = inverse_ldl_factorize(build_gram(hidden, k0sq));
  // W^T = L D L^T H Y^T
  Matrix w = apply_ldl(factors, mul_abt(hidden, targets)).transpose();
  return LdlState{std::move(hidden), std::move(targets), k0sq, std::move(factors), std::move(w)};
}

LdlState make_empty_ldl_state(Matrix targets, double k0sq) {
  const std::size_t k = targets.cols();
  const std::size_t m = targets.rows();
  return LdlState{Matrix(0, k), std::move(targets), k0sq, InverseLdl{Matrix(0, 0), {}},
                  Matrix(m, 0)};
}

LdlState grow_ldl_single(const LdlState& state, std::span<const double> hbar) {
  if (hbar.size() != state.hidden.cols()) throw ShapeError("grow_ldl_single: sample count mismatch");
  const std::size_t l = state.nodes();
  const Matrix hcol = Matrix::column(hbar);

  const Matrix p = mat_mul(state.hidden, hcol);
  const Matrix qp = apply_ldl(state.factors, p);
  double hh = 0.0;
  for (double v : hbar) hh += v * v;
  const double base = hh + state.k0sq;
  double ptqp = 0.0;
  for (std::size_t i = 0; i < l; ++i) ptqp += p(i, 0) * qp(i, 0);
  const double schur = base - ptqp;
  if (!(schur > 1e-12 * base)) {
    throw DegeneracyError("grow_ldl_single: new node is numerically dependent (Schur scalar " +
                          std::to_string(schur) + ")");
  }
  const double tau = 1.0 / schur;
  const Matrix t_tilde = qp * -1.0;

  InverseLdl factors{Matrix::identity(l + 1), state.factors.diag};
  factors.unit_upper.set_block(0, 0, state.factors.unit_upper);
  factors.unit_upper.set_block(0, l, t_tilde);
  factors.diag.push_back(tau);

  const Matrix wbar = (mat_mul(state.targets, hcol) - mat_mul(state.weights, p)) * tau;
  Matrix w = hstack(state.weights + mul_abt(wbar, t_tilde), wbar);

  return LdlState{vstack(state.hidden, Matrix::row(hbar)), state.targets, state.k0sq,
                  std::move(factors), std::move(w)};
}

LdlState grow_ldl_block(const LdlState& state, const Matrix& new_rows) {
  if (new_rows.cols() != state.hidden.cols()) {
    throw ShapeError("grow_ldl_block: sample count mismatch");
  }
  const std::size_t l = state.nodes();
  const std::size_t delta = new_rows.rows();
  if (delta == 0) throw ArgumentError("grow_ldl_block: empty block");

  const Matrix p = mul_abt(state.hidden, new_rows);
  Matrix f = gram_rows(new_rows);
  for (std::size_t i = 0; i < delta; ++i) f(i, i) += state.k0sq;
  const Matrix qp = apply_ldl(state.factors, p);
  Matrix schur = f - mul_atb(p, qp);
  symmetrize(schur);

  InverseLdl vs;
  try {
    vs = inverse_ldl_factorize(schur, 1e-12 * trace(f) / static_cast<double>(delta));
  } catch (const SingularityError& e) {
    throw DegeneracyError(std::string("grow_ldl_block: block of ") + std::to_string(delta) +
                          " nodes appended at index " + std::to_string(l) +
                          " is numerically dependent (" + e.what() + ")");
  }
  const Matrix& v = vs.unit_upper;
  const Matrix u = mat_mul(qp, v) * -1.0;  // l x delta

  InverseLdl factors{Matrix(l + delta, l + delta), state.factors.diag};
  factors.unit_upper.set_block(0, 0, state.factors.unit_upper);
  factors.unit_upper.set_block(0, l, u);
  factors.unit_upper.set_block(l, l, v);
  factors.diag.insert(factors.diag.end(), vs.diag.begin(), vs.diag.end());

  // E V S, then top W + E V S U^T and new columns E V S V^T.
  const Matrix e = mul_abt(state.targets, new_rows) - mat_mul(state.weights, p);
  const Matrix evs = scale_columns(mat_mul(e, v), vs.diag);
  Matrix w = hstack(state.weights + mul_abt(evs, u), mul_abt(evs, v));

  return LdlState{vstack(state.hidden, new_rows), state.targets, state.k0sq, std::move(factors),
                  std::move(w)};
}

}  // namespace elm
