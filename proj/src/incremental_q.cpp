#include "elm/incremental_q.hpp"

#include <string>

#include "elm/solver.hpp"

namespace elm {

namespace {

void check_rows(const QState& state, std::size_t cols, const char* what) {
  if (cols != state.hidden.cols()) {
    throw ShapeError(std::string(what) + ": new rows have " + std::to_string(cols) +
                     " samples, state has " + std::to_string(state.hidden.cols()));
  }
}

}  // namespace

NodeBlock make_node_block(NodeParams params, Activation activation, const Matrix& x) {
  Matrix h = compute_hidden(params.input, params.bias, activation, x);
  return NodeBlock{std::move(h), std::move(params)};
}

QState make_q_state(Matrix hidden, Matrix targets, double k0sq) {
  if (targets.cols() != hidden.cols()) throw ShapeError("make_q_state: sample count mismatch");
  Matrix q = invert_to_q(build_gram(hidden, k0sq));
  Matrix w = mat_mul(mul_abt(targets, hidden), q);
  return QState{std::move(hidden), std::move(targets), k0sq, std::move(q), std::move(w)};
}

QState make_empty_q_state(Matrix targets, double k0sq) {
  const std::size_t k = targets.cols();
  const std::size_t m = targets.rows();
  return QState{Matrix(0, k), std::move(targets), k0sq, Matrix(0, 0), Matrix(m, 0)};
}

QState grow_q_single(const QState& state, std::span<const double> hbar) {
  check_rows(state, hbar.size(), "grow_q_single");
  const std::size_t l = state.nodes();
  const Matrix hcol = Matrix::column(hbar);

  const Matrix p = mat_mul(state.hidden, hcol);  // l x 1
  const Matrix qp = mat_mul(state.q, p);
  double hh = 0.0;
  for (double v : hbar) hh += v * v;
  const double base = hh + state.k0sq;
  double ptqp = 0.0;
  for (std::size_t i = 0; i < l; ++i) ptqp += p(i, 0) * qp(i, 0);
  const double schur = base - ptqp;
  if (!(schur > 1e-12 * base)) {
    throw DegeneracyError("grow_q_single: new node is numerically dependent (Schur scalar " +
                          std::to_string(schur) + ")");
  }
  const double tau = 1.0 / schur;
  const Matrix t = qp * (-tau);

  Matrix q(l + 1, l + 1);
  q.set_block(0, 0, state.q + mul_abt(t, t) * (1.0 / tau));
  q.set_block(0, l, t);
  q.set_block(l, 0, t.transpose());
  q(l, l) = tau;
  symmetrize(q);

  // wbar = tau (Y hbar - W p); W~ = W + (wbar / tau) t^T
  const Matrix e = mat_mul(state.targets, hcol) - mat_mul(state.weights, p);
  const Matrix wbar = e * tau;
  Matrix w = hstack(state.weights + mul_abt(wbar * (1.0 / tau), t), wbar);

  return QState{vstack(state.hidden, Matrix::row(hbar)), state.targets, state.k0sq, std::move(q),
                std::move(w)};
}

Matrix grow_w_q(const Matrix& weights, const Matrix& targets, const Matrix& new_rows,
                const Matrix& p, const Matrix& t, const Matrix& g) {
  const std::size_t l = weights.cols();
  const std::size_t delta = new_rows.rows();
  if (p.rows() != l || p.cols() != delta || t.rows() != l || t.cols() != delta ||
      g.rows() != delta || g.cols() != delta || targets.cols() != new_rows.cols() ||
      targets.rows() != weights.rows()) {
    throw ShapeError("grow_w_q: inconsistent operand shapes");
  }
  const Matrix e = mul_abt(targets, new_rows) - mat_mul(weights, p);
  return hstack(weights + mul_abt(e, t), mat_mul(e, g));
}

QState grow_q_block(const QState& state, const Matrix& new_rows) {
  check_rows(state, new_rows.cols(), "grow_q_block");
  const std::size_t l = state.nodes();
  const std::size_t delta = new_rows.rows();
  if (delta == 0) throw ArgumentError("grow_q_block: empty block");

  const Matrix p = mul_abt(state.hidden, new_rows);  // l x delta
  Matrix f = gram_rows(new_rows);
  for (std::size_t i = 0; i < delta; ++i) f(i, i) += state.k0sq;
  const Matrix qp = mat_mul(state.q, p);
  Matrix schur = f - mul_atb(p, qp);
  symmetrize(schur);

  Matrix chol;
  try {
    chol = cholesky_lower(schur, 1e-12 * trace(f) / static_cast<double>(delta));
  } catch (const SingularityError& e) {
    throw DegeneracyError(std::string("grow_q_block: block of ") + std::to_string(delta) +
                          " nodes appended at index " + std::to_string(l) +
                          " is numerically dependent (" + e.what() + ")");
  }
  Matrix g = cholesky_solve(chol, Matrix::identity(delta));
  symmetrize(g);
  const Matrix t = mat_mul(qp, g) * -1.0;  // l x delta

  Matrix q(l + delta, l + delta);
  q.set_block(0, 0, state.q - mul_abt(qp, t));
  q.set_block(0, l, t);
  q.set_block(l, 0, t.transpose());
  q.set_block(l, l, g);
  symmetrize(q);

  Matrix w = grow_w_q(state.weights, state.targets, new_rows, p, t, g);
  return QState{vstack(state.hidden, new_rows), state.targets, state.k0sq, std::move(q),
                std::move(w)};
}

}  // namespace elm
