#include "elm/decremental.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace elm {

RemovalPlan make_removal_plan(std::size_t nodes, std::span<const std::size_t> indices) {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.empty()) throw ArgumentError("removal: no indices given");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("removal: duplicate index");
  }
  if (sorted.back() >= nodes) {
    throw ArgumentError("removal: index " + std::to_string(sorted.back()) + " out of range for " +
                        std::to_string(nodes) + " nodes");
  }
  if (sorted.size() >= nodes) throw ArgumentError("removal: cannot remove every node");
  Permutation perm = permute_to_tail(nodes, sorted);
  return RemovalPlan{std::move(sorted), std::move(perm)};
}

std::optional<Rotation2> wide_givens(double lj, double ljp1, double dj, double djp1) {
  if (!(dj > 0.0) || !(djp1 > 0.0)) throw ArgumentError("wide_givens: weights must be positive");
  if (ljp1 == 0.0) return std::nullopt;
  const double sd = std::sqrt(dj);
  const double sdp1 = std::sqrt(djp1);
  const double s = std::hypot(ljp1 * sdp1, lj * sd);
  const double sign = ljp1 > 0.0 ? 1.0 : -1.0;
  const double diag = std::abs(ljp1) * sdp1 / s;
  return Rotation2{diag, sign * dj * lj / (sdp1 * s), -sign * sdp1 * lj / s, diag};
}

namespace {

void apply_rotation(Matrix& l, std::size_t last_row, std::size_t j, const Rotation2& psi) {
  for (std::size_t r = 0; r <= last_row; ++r) {
    const double a = l(r, j);
    const double b = l(r, j + 1);
    if (a == 0.0 && b == 0.0) continue;
    l(r, j) = a * psi[0] + b * psi[2];
    l(r, j + 1) = a * psi[1] + b * psi[3];
  }
}

void swap_columns(Matrix& l, Vector& d, std::size_t last_row, std::size_t j) {
  for (std::size_t r = 0; r <= last_row; ++r) std::swap(l(r, j), l(r, j + 1));
  std::swap(d[j], d[j + 1]);
}

}  // namespace

Retriangularized retriangularize(const InverseLdl& factors, const RemovalPlan& plan) {
  const std::size_t n = factors.size();
  if (plan.nodes() != n) throw ShapeError("retriangularize: plan does not match factor size");

  Matrix l = permute_rows(factors.unit_upper, plan.perm);
  Vector d = factors.diag;
  GivensPlan record;

  // Displaced rows sit at positions kept..n-1. Clear the bottom one first: its
  // sweep spans columns 0..n-1, each later sweep stops one column earlier, so
  // already cleared rows are never touched again.
  for (std::size_t q = n; q-- > plan.kept();) {
    for (std::size_t j = 0; j < q; ++j) {
      const double a = l(q, j);
      if (a == 0.0) continue;
      const double b = l(q, j + 1);
      if (const auto psi = wide_givens(a, b, d[j], d[j + 1])) {
        apply_rotation(l, q, j, *psi);
        l(q, j) = 0.0;
        record.steps.push_back({GivensStep::Kind::rotation, q, j, *psi});
      } else {
        swap_columns(l, d, q, j);
        record.steps.push_back({GivensStep::Kind::swap, q, j, Rotation2{0.0, 1.0, 1.0, 0.0}});
      }
    }
  }

  record.column_scales.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double pivot = l(c, c);
    if (!(std::abs(pivot) > 1e-14)) {
      throw DegeneracyError("retriangularize: diagonal entry " + std::to_string(c) +
                            " collapsed to " + std::to_string(pivot));
    }
    const double scale = 1.0 / pivot;
    for (std::size_t r = 0; r < c; ++r) l(r, c) *= scale;
    l(c, c) = 1.0;
    for (std::size_t r = c + 1; r < n; ++r) l(r, c) = 0.0;
    d[c] *= pivot * pivot;
    record.column_scales[c] = scale;
  }

  return Retriangularized{InverseLdl{std::move(l), std::move(d)}, std::move(record)};
}

QState shrink_q(const QState& state, const RemovalPlan& plan) {
  const std::size_t n = state.nodes();
  if (plan.nodes() != n) throw ShapeError("shrink_q: plan does not match state size");
  const std::size_t k = plan.kept();
  const std::size_t tau = plan.removed();

  const Matrix qp = permute_symmetric(state.q, plan.perm);
  const Matrix t = qp.block(0, k, k, tau);
  const Matrix g = qp.block(k, k, tau, tau);

  Matrix ginv_tt;  // G^-1 T^T, tau x k
  try {
    ginv_tt = spd_solve(g, t.transpose());
  } catch (const SingularityError& e) {
    throw StateError(std::string("shrink_q: removed block of Q is not positive definite, state is "
                                 "corrupted (") + e.what() + ")");
  }
  Matrix q = qp.block(0, 0, k, k) - mat_mul(t, ginv_tt);
  symmetrize(q);

  const Matrix wp = permute_cols(state.weights, plan.perm);
  const std::size_t m = wp.rows();
  Matrix w = wp.block(0, 0, m, k) - mat_mul(wp.block(0, k, m, tau), ginv_tt);

  Matrix h = permute_rows(state.hidden, plan.perm).block(0, 0, k, state.hidden.cols());
  return QState{std::move(h), state.targets, state.k0sq, std::move(q), std::move(w)};
}

LdlState shrink_ldl(const LdlState& state, const RemovalPlan& plan) {
  const std::size_t n = state.nodes();
  if (plan.nodes() != n) throw ShapeError("shrink_ldl: plan does not match state size");
  const std::size_t k = plan.kept();
  const std::size_t tau = plan.removed();

  Retriangularized tri = retriangularize(state.factors, plan);
  const Matrix& l = tri.factors.unit_upper;
  const Matrix u = l.block(0, k, k, tau);
  const Matrix v = l.block(k, k, tau, tau);

  const Matrix wp = permute_cols(state.weights, plan.perm);
  const std::size_t m = wp.rows();
  // W_{:,1:k} - W_{:,k+1:n} V^-T U^T
  Matrix w = wp.block(0, 0, m, k) -
             mul_abt(solve_right_upper_transpose(wp.block(0, k, m, tau), v), u);

  InverseLdl factors{l.block(0, 0, k, k),
                     Vector(tri.factors.diag.begin(), tri.factors.diag.begin() + k)};
  Matrix h = permute_rows(state.hidden, plan.perm).block(0, 0, k, state.hidden.cols());
  return LdlState{std::move(h), state.targets, state.k0sq, std::move(factors), std::move(w)};
}

}  // namespace elm
