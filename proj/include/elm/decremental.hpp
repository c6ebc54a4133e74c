#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "elm/incremental_ldl.hpp"
#include "elm/incremental_q.hpp"

namespace elm {

// Nodes to drop from a state of `nodes()` hidden nodes. `indices` is sorted
// ascending; `perm` moves them to the tail in that order.
struct RemovalPlan {
  std::vector<std::size_t> indices;
  Permutation perm;

  std::size_t removed() const noexcept { return indices.size(); }
  std::size_t nodes() const noexcept { return perm.size(); }
  std::size_t kept() const noexcept { return nodes() - removed(); }
};

// Sorts `indices`; rejects duplicates, out-of-range indices, an empty set and
// a set covering every node.
RemovalPlan make_removal_plan(std::size_t nodes, std::span<const std::size_t> indices);

// 2x2 block of a wide-sense Givens rotation, row-major:
// {psi(j,j), psi(j,j+1), psi(j+1,j), psi(j+1,j+1)}.
using Rotation2 = std::array<double, 4>;

// Column transform psi for entries (lj, ljp1) of one row of L and weights
// (dj, djp1) of D. (lj, ljp1) psi = (0, x) and psi diag(dj, djp1) psi^T =
// diag(dj, djp1). The block is
//
//   [ ljp1^2 djp1       dj lj ljp1  ]
//   [ -djp1 lj ljp1     ljp1^2 djp1 ]  /  |ljp1| sqrt(djp1 (ljp1^2 djp1 + lj^2 dj))
//
// evaluated with the common factor |ljp1| cancelled. Returns nullopt when
// ljp1 == 0; the caller swaps columns instead. Throws ArgumentError unless
// dj, djp1 > 0.
std::optional<Rotation2> wide_givens(double lj, double ljp1, double dj, double djp1);

struct GivensStep {
  enum class Kind { rotation, swap };
  Kind kind = Kind::rotation;
  std::size_t row = 0;     // row whose entry at `col` was eliminated
  std::size_t col = 0;     // acts on columns col and col + 1
  Rotation2 psi{1.0, 0.0, 0.0, 1.0};
};

struct GivensPlan {
  std::vector<GivensStep> steps;
  Vector column_scales;  // applied to each column after the sweeps
};

struct Retriangularized {
  InverseLdl factors;
  GivensPlan plan;
};

// Permutes the rows of L by plan.perm and restores unit upper triangular form
// with wide-sense rotations, so that Lnew diag(Dnew) Lnew^T = P L diag(D) L^T P^T.
// Throws DegeneracyError if a diagonal entry collapses below 1e-14.
Retriangularized retriangularize(const InverseLdl& factors, const RemovalPlan& plan);

QState shrink_q(const QState& state, const RemovalPlan& plan);
LdlState shrink_ldl(const LdlState& state, const RemovalPlan& plan);

}  // namespace elm
