#include "doctest.h"
#include "elm/errors.hpp"
#include "elm/incremental_q.hpp"
#include "elm/solver.hpp"
#include "test_support.hpp"

using namespace elm;
using namespace elm::testing;

TEST_CASE("grow_q_single: orthonormal example") {
  const QState s = make_q_state(Matrix{{1, 0}}, Matrix{{1, 2}}, 1.0);
  CHECK(near(s.q, Matrix{{0.5}}));
  CHECK(near(s.weights, Matrix{{0.5}}));
  const Vector hbar{0, 1};
  const QState g = grow_q_single(s, hbar);
  CHECK(near(g.q, 0.5 * Matrix::identity(2)));
  CHECK(near(g.weights, Matrix{{0.5, 1}}));
  CHECK(g.hidden == Matrix::identity(2));
}

TEST_CASE("grow_q_single: zero node changes nothing in old columns") {
  std::mt19937_64 gen(1);
  const QState s = make_q_state(random_matrix(3, 10, gen), random_matrix(1, 10, gen), 2.0);
  const Vector zero(10, 0.0);
  const QState g = grow_q_single(s, zero);
  CHECK(g.q.block(0, 0, 3, 3) == s.q);
  CHECK(g.q(3, 3) == 0.5);
  CHECK(max_abs(g.q.block(0, 3, 3, 1)) == 0.0);
  CHECK(g.weights.block(0, 0, 1, 3) == s.weights);
  CHECK(g.weights(0, 3) == 0.0);
}

TEST_CASE("grow_q_single matches the oracle") {
  const Problem p = random_problem(5, 3, 2, 30, 4);
  QState s = make_q_state(p.h, p.y, 1.0);
  const Matrix extra = more_rows(1, p.x, 77);
  s = grow_q_single(s, extra.row_span(0));
  const Matrix h = vstack(p.h, extra);
  CHECK(rel(s.q, invert_to_q(build_gram(h, 1.0))) <= 1e-10);
  CHECK(rel(s.weights, direct_weights(h, p.y, 1.0)) <= 1e-10);
}

TEST_CASE("grow_q_single rejects dependent node without regularization") {
  const QState s = make_q_state(Matrix{{1, 2}, {0, 1}}, Matrix{{1, 1}}, 0.0);
  const Vector dup{1, 3};
  CHECK_THROWS_AS(grow_q_single(s, dup), DegeneracyError);
}

TEST_CASE("grow_q_block: orthonormal example") {
  const QState s = make_q_state(Matrix{{1, 0, 0}}, Matrix{{1, 2, 3}}, 1.0);
  const QState g = grow_q_block(s, Matrix{{0, 1, 0}, {0, 0, 1}});
  CHECK(near(g.q, 0.5 * Matrix::identity(3)));
  CHECK(near(g.weights, Matrix{{0.5, 1, 1.5}}));
}

TEST_CASE("grow_q_block: random instance matches oracle") {
  const Problem p = random_problem(6, 4, 2, 40, 8);
  const QState s = make_q_state(p.h, p.y, 1.0);
  const Matrix extra = more_rows(3, p.x, 99);
  const QState g = grow_q_block(s, extra);
  const Matrix h = vstack(p.h, extra);
  CHECK(rel(g.q, invert_to_q(build_gram(h, 1.0))) <= 1e-10);
  CHECK(rel(g.weights, direct_weights(h, p.y, 1.0)) <= 1e-10);
  CHECK(is_symmetric(g.q));
}

TEST_CASE("grow_q_block with one row equals grow_q_single") {
  const Problem p = random_problem(7, 3, 2, 25, 12);
  const QState s = make_q_state(p.h, p.y, 0.3);
  const Matrix extra = more_rows(1, p.x, 5);
  const QState a = grow_q_block(s, extra);
  const QState b = grow_q_single(s, extra.row_span(0));
  CHECK(rel(a.q, b.q) <= 1e-12);
  CHECK(rel(a.weights, b.weights) <= 1e-12);
}

TEST_CASE("grow_q_block from an empty state equals the oracle") {
  const Problem p = random_problem(8, 3, 1, 50, 3);
  const QState g = grow_q_block(make_empty_q_state(p.y, 1.0), p.h);
  CHECK(rel(g.q, invert_to_q(build_gram(p.h, 1.0))) <= 1e-10);
  CHECK(rel(g.weights, direct_weights(p.h, p.y, 1.0)) <= 1e-10);
}

TEST_CASE("grow_q_block degeneracy names the block") {
  const QState s = make_q_state(Matrix{{1, 2}}, Matrix{{1, 1}}, 0.0);
  try {
    grow_q_block(s, Matrix{{2, 4}});
    FAIL("expected a degeneracy error");
  } catch (const DegeneracyError& e) {
    CHECK(std::string(e.what()).find("block") != std::string::npos);
  }
}

TEST_CASE("grow_w_q examples") {
  std::mt19937_64 gen(2);
  const Matrix w = random_matrix(2, 3, gen);
  const Matrix y = random_matrix(2, 6, gen);
  const Matrix hbar = random_matrix(2, 6, gen);
  const Matrix p = random_matrix(3, 2, gen);
  const Matrix g = random_matrix(2, 2, gen);
  const Matrix out = grow_w_q(w, y, hbar, p, Matrix(3, 2), g);
  CHECK(out.block(0, 0, 2, 3) == w);
  const Matrix zero = grow_w_q(Matrix(2, 3), Matrix(2, 6), hbar, p, random_matrix(3, 2, gen), g);
  CHECK(max_abs(zero) == 0.0);
  CHECK_THROWS_AS(grow_w_q(w, y, hbar, p, Matrix(2, 2), g), ShapeError);
}

TEST_CASE("sequences of grows track the oracle and stay symmetric") {
  for (double k0sq : {0.1, 1.0, 10.0}) {
    const Problem p = random_problem(2, 6, 2, 120, 31);
    QState s = make_q_state(p.h, p.y, k0sq);
    Matrix h = p.h;
    std::uint64_t seed = 1000;
    const std::size_t steps[] = {1, 2, 4, 8};
    std::size_t i = 0;
    while (s.nodes() < 48) {
      const std::size_t delta = std::min<std::size_t>(steps[i++ % 4], 48 - s.nodes());
      const Matrix extra = more_rows(delta, p.x, seed++);
      s = grow_q_block(s, extra);
      h = vstack(h, extra);
      CHECK(is_symmetric(s.q));
    }
    const Matrix w_ref = direct_weights(h, p.y, k0sq);
    const Matrix q_ref = invert_to_q(build_gram(h, k0sq));
    CHECK(frobenius_norm(s.weights - w_ref) <= 1e-9 * (1 + frobenius_norm(w_ref)));
    CHECK(frobenius_norm(s.q - q_ref) <= 1e-9 * (1 + frobenius_norm(q_ref)));
  }
}

TEST_CASE("growing by four at once equals four single steps") {
  const Problem p = random_problem(5, 3, 2, 60, 41);
  const QState s = make_q_state(p.h, p.y, 1.0);
  const Matrix extra = more_rows(4, p.x, 8);
  const QState once = grow_q_block(s, extra);
  QState steps = s;
  for (std::size_t r = 0; r < 4; ++r) steps = grow_q_block(steps, extra.block(r, 0, 1, extra.cols()));
  CHECK(rel(once.q, steps.q) <= 1e-10);
  CHECK(rel(once.weights, steps.weights) <= 1e-10);
}

TEST_CASE("Schur complement is bounded below by the regularizer") {
  const Problem p = random_problem(6, 3, 1, 30, 51);
  const double k0sq = 0.7;
  const QState s = make_q_state(p.h, p.y, k0sq);
  const Matrix extra = more_rows(3, p.x, 52);
  const Matrix pm = mul_abt(p.h, extra);
  Matrix schur = gram_rows(extra) + k0sq * Matrix::identity(3) - mul_atb(pm, mat_mul(s.q, pm));
  symmetrize(schur);
  // Shifting down by k0sq - eps must leave it positive semidefinite.
  const Matrix shifted = schur - (k0sq - 1e-9) * Matrix::identity(3);
  CHECK_NOTHROW(cholesky_lower(shifted, 0.0));
}
