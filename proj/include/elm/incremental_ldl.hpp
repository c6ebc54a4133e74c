#pragma once

#include <span>

#include "elm/incremental_q.hpp"
#include "elm/solver.hpp"

namespace elm {

// State of the factorized engine. Q is never formed; it is represented by the
// inverse LDL^T factors, L diag(D) L^T = (H H^T + k0sq I)^-1.
struct LdlState {
  Matrix hidden;   // l x K
  Matrix targets;  // M x K
  double k0sq = 0.0;
  InverseLdl factors;
  Matrix weights;  // M x l

  std::size_t nodes() const noexcept { return hidden.rows(); }
};

LdlState make_ldl_state(Matrix hidden, Matrix targets, double k0sq);
LdlState make_empty_ldl_state(Matrix targets, double k0sq);

// One node: L grows by the column [t~; 1] with t~ = -L D L^T p, and D by tau.
LdlState grow_ldl_single(const LdlState& state, std::span<const double> hbar);

// delta nodes: L grows by [U; V], D by S, where V S V^T inverts the Schur
// complement F - P^T Q P and U = -L D L^T P V.
LdlState grow_ldl_block(const LdlState& state, const Matrix& new_rows);
inline LdlState grow_ldl_block(const LdlState& state, const NodeBlock& block) {
  return grow_ldl_block(state, block.hidden);
}

}  // namespace elm
