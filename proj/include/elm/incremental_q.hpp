#pragma once

#include <span>

#include "elm/matrix.hpp"
#include "elm/model.hpp"

namespace elm {

// State of the Q-based engine: Q = (H H^T + k0sq I)^-1 and W = Y H^T Q.
// H is kept because every grow needs H times the new rows.
struct QState {
  Matrix hidden;   // l x K
  Matrix targets;  // M x K
  double k0sq = 0.0;
  Matrix q;        // l x l, symmetric
  Matrix weights;  // M x l

  std::size_t nodes() const noexcept { return hidden.rows(); }
};

// New hidden rows plus the parameters that generated them.
struct NodeBlock {
  Matrix hidden;  // delta x K
  NodeParams params;

  std::size_t size() const noexcept { return hidden.rows(); }
};

NodeBlock make_node_block(NodeParams params, Activation activation, const Matrix& x);

// Initializes Q and W from the direct oracle.
QState make_q_state(Matrix hidden, Matrix targets, double k0sq);
// A state with no hidden nodes; W is M x 0.
QState make_empty_q_state(Matrix targets, double k0sq);

// Adds one node with hidden row `hbar` using the scalar Schur recursion.
// Throws DegeneracyError when the Schur scalar is <= 1e-12 (hbar'hbar + k0sq).
QState grow_q_single(const QState& state, std::span<const double> hbar);

// Adds delta nodes in one step through the delta x delta Schur complement.
// Throws DegeneracyError when that complement has a pivot
// <= 1e-12 trace(F) / delta.
QState grow_q_block(const QState& state, const Matrix& new_rows);
inline QState grow_q_block(const QState& state, const NodeBlock& block) {
  return grow_q_block(state, block.hidden);
}

// [W + (Y Hbar^T - W P) T^T | (Y Hbar^T - W P) G].
Matrix grow_w_q(const Matrix& weights, const Matrix& targets, const Matrix& new_rows,
                const Matrix& p, const Matrix& t, const Matrix& g);

}  // namespace elm
