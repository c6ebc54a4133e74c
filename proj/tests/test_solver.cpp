#include <cmath>

#include "doctest.h"
#include "elm/errors.hpp"
#include "elm/solver.hpp"
#include "test_support.hpp"

using namespace elm;
using namespace elm::testing;

TEST_CASE("build_gram examples") {
  CHECK(build_gram(Matrix(1, 3), 1.0).r == Matrix{{1}});
  CHECK(build_gram(Matrix::identity(2), 1.0).r == 2.0 * Matrix::identity(2));
  CHECK(build_gram(Matrix{{1, 1}}, 0.5).r == Matrix{{2.5}});
  CHECK_THROWS_AS(build_gram(Matrix{{1}}, -1.0), ArgumentError);
}

TEST_CASE("invert_to_q examples") {
  CHECK(near(invert_to_q({2.0 * Matrix::identity(2), 1.0}), 0.5 * Matrix::identity(2)));
  const Matrix r{{2, 1}, {1, 2}};
  const Matrix q = invert_to_q({r, 1.0});
  CHECK(max_abs(q - Matrix{{2.0 / 3, -1.0 / 3}, {-1.0 / 3, 2.0 / 3}}) <= 1e-15);
  CHECK(max_abs(mat_mul(r, q) - Matrix::identity(2)) <= 1e-15);
  CHECK_THROWS_AS(invert_to_q({Matrix{{1, 1}, {1, 1}}, 0.0}), SingularityError);
}

TEST_CASE("direct_weights examples") {
  CHECK(near(direct_weights(Matrix::identity(2), Matrix{{1, 2}}, 1.0), Matrix{{0.5, 1}}));
  CHECK(direct_weights(Matrix::identity(2), Matrix(1, 2), 1.0) == Matrix(1, 2));
  CHECK(near(direct_weights(Matrix{{1, 0}}, Matrix{{1, 0}}, 1.0), Matrix{{0.5}}));
}

TEST_CASE("pseudo_inverse_b examples") {
  CHECK(near(pseudo_inverse_b(Matrix::identity(2), 1.0), 0.5 * Matrix::identity(2)));
  const Matrix b0 = pseudo_inverse_b(Matrix(1, 2), 1.0);
  CHECK(b0.rows() == 2);
  CHECK(b0.cols() == 1);
  CHECK(max_abs(b0) == 0.0);
  std::mt19937_64 gen(1);
  const Matrix h = random_matrix(2, 4, gen);
  const Matrix y = random_matrix(3, 4, gen);
  CHECK(rel(mat_mul(y, pseudo_inverse_b(h, 1.0)), direct_weights(h, y, 1.0)) <= 1e-12);
}

TEST_CASE("inverse_ldl_factorize examples") {
  const InverseLdl a = inverse_ldl_factorize(2.0 * Matrix::identity(2));
  CHECK(a.unit_upper == Matrix::identity(2));
  CHECK(a.diag == Vector{0.5, 0.5});

  const InverseLdl b = inverse_ldl_factorize(Matrix{{2, 1}, {1, 2}});
  CHECK(b.unit_upper == Matrix{{1, -0.5}, {0, 1}});
  CHECK(b.diag[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.diag[1] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(rel(ldl_product(b), gauss_jordan_inverse(Matrix{{2, 1}, {1, 2}})) <= 1e-15);

  const InverseLdl c = inverse_ldl_factorize(Matrix{{4}});
  CHECK(c.unit_upper == Matrix{{1}});
  CHECK(c.diag == Vector{0.25});

  CHECK_THROWS_AS(inverse_ldl_factorize(Matrix{{1, 1}, {1, 1}}), SingularityError);
}

TEST_CASE("oracle properties on random problems") {
  std::mt19937_64 gen(17);
  for (double k0sq : {0.01, 1.0, 100.0}) {
    for (std::size_t l : {1u, 5u, 17u, 32u}) {
      const std::size_t k = 128;
      const Matrix h = random_matrix(l, k, gen);
      const Matrix y = random_matrix(2, k, gen);
      const RegularizedGram g = build_gram(h, k0sq);
      CHECK(is_symmetric(g.r));
      const Matrix q = invert_to_q(g);
      CHECK(max_abs(mat_mul(q, g.r) - Matrix::identity(l)) <= 1e-9);
      CHECK(rel(q, gauss_jordan_inverse(g.r)) <= 1e-10);

      const InverseLdl f = inverse_ldl_factorize(g);
      CHECK(factor_hygiene_ok(f));
      CHECK(rel(ldl_product(f), q) <= 1e-10);

      const Matrix x = random_matrix(l, 3, gen);
      CHECK(rel(apply_ldl(f, x), mat_mul(ldl_product(f), x)) <= 1e-12);

      const Matrix w = direct_weights(h, y, k0sq);
      CHECK(rel(w, mat_mul(y, pseudo_inverse_b(h, k0sq))) <= 1e-12);
    }
  }
}

TEST_CASE("direct_weights satisfies first-order optimality") {
  std::mt19937_64 gen(23);
  const Matrix h = random_matrix(6, 40, gen);
  const Matrix y = random_matrix(2, 40, gen);
  const double k0sq = 0.5;
  const Matrix w = direct_weights(h, y, k0sq);
  auto objective = [&](const Matrix& ww) {
    const double e = frobenius_norm(y - mat_mul(ww, h));
    const double n = frobenius_norm(ww);
    return e * e + k0sq * n * n;
  };
  const double base = objective(w);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      for (double step : {1e-4, -1e-4}) {
        Matrix p = w;
        p(i, j) += step;
        CHECK(objective(p) >= base);
      }
    }
  }
}

TEST_CASE("factor hygiene rejects broken factors") {
  InverseLdl f = inverse_ldl_factorize(Matrix{{2, 1}, {1, 2}});
  CHECK(factor_hygiene_ok(f));
  InverseLdl g = f;
  g.unit_upper(1, 0) = 1e-300;
  CHECK_FALSE(factor_hygiene_ok(g));
  g = f;
  g.unit_upper(0, 0) = 1.0 + 1e-16 * 4;
  CHECK_FALSE(factor_hygiene_ok(g));
  g = f;
  g.diag[1] = 0.0;
  CHECK_FALSE(factor_hygiene_ok(g));
}
