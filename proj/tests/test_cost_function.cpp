#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "opinion/cost_function.hpp"
#include "opinion/rng.hpp"

using namespace opinion;
using opinion::test::finite_difference_gradient;

namespace {

// One representative of every catalogued constructor, over a few dimensions.
std::vector<CostFunction> catalogued_corpus() {
  Matrix m23(2, 3);
  m23 << 1.0, -0.5, 0.25, 0.0, 2.0, 1.5;
  Matrix m22(2, 2);
  m22 << 1.5, 0.2, 0.2, 0.7;
  Matrix a32(3, 2);
  a32 << 1.0, 0.0, -1.0, 2.0, 0.5, 0.5;
  Vector v3(3);
  v3 << 0.1, -0.2, 0.3;
  Vector c2(2);
  c2 << 0.8, -1.2;

  std::vector<CostFunction> corpus;
  corpus.push_back(CostFunction::square_scalar());
  corpus.push_back(CostFunction::quadratic_form(m23));
  corpus.push_back(CostFunction::power_norm(2.5, 2.0, 2));
  corpus.push_back(CostFunction::power_norm(3.0, 3.0, 3));
  corpus.push_back(CostFunction::abs_power(3.0));
  corpus.push_back(CostFunction::exp_scalar());
  corpus.push_back(CostFunction::exp_of(CostFunction::linear(c2, 0.4)));
  corpus.push_back(CostFunction::exp_of(CostFunction::quadratic_form(0.2 * m22)));
  corpus.push_back(CostFunction::cosh_scalar());
  corpus.push_back(CostFunction::cosh_of(CostFunction::norm(2.0, 3)));
  corpus.push_back(CostFunction::cosh_of(CostFunction::linear(c2, -0.3)));
  corpus.push_back(CostFunction::scaled(2.5, CostFunction::power_norm(2.0, 2.0, 2)));
  corpus.push_back(CostFunction::sum(CostFunction::quadratic_form(m22),
                                     CostFunction::power_norm(2.0, 4.0, 2)));
  corpus.push_back(CostFunction::affine_pre(a32, v3, CostFunction::power_norm(2.0, 2.0, 3)));
  corpus.push_back(CostFunction::affine_pre(
      a32, v3, CostFunction::exp_of(CostFunction::quadratic_form(0.1 * Matrix::Identity(3, 3)))));
  return corpus;
}

}  // namespace

TEST_CASE("evaluation matches the defining formulas") {
  const CostFunction q = CostFunction::quadratic_form(Matrix::Identity(2, 2));
  Vector v(2);
  v << 1.0, 2.0;
  CHECK(q.value(v) == doctest::Approx(5.0).epsilon(1e-14));

  const CostFunction pn = CostFunction::power_norm(2.0, 2.0, 2);
  Vector w(2);
  w << 3.0, 4.0;
  CHECK(pn.value(w) == doctest::Approx(25.0).epsilon(1e-14));

  CHECK(CostFunction::exp_scalar().value(Vector::Zero(1)) == doctest::Approx(1.0));
  CHECK(CostFunction::cosh_scalar().value(Vector::Zero(1)) == doctest::Approx(1.0));
  CHECK(CostFunction::abs_power(3.0).value(Vector::Constant(1, -2.0)) ==
        doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("gradients match the defining formulas") {
  const CostFunction q = CostFunction::quadratic_form(Matrix::Identity(2, 2));
  Vector v(2);
  v << 1.0, 2.0;
  const Vector g = q.gradient(v);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(4.0));

  const Vector ge = CostFunction::exp_scalar().gradient(Vector::Ones(1));
  CHECK(ge[0] == doctest::Approx(std::numbers::e).epsilon(1e-14));

  // |x|^3 on R^2 through the 2-norm at (0, 1): frozen from the central
  // finite-difference oracle (step 1e-6).
  const CostFunction p3 = CostFunction::power_norm(3.0, 2.0, 2);
  Vector e2(2);
  e2 << 0.0, 1.0;
  const Vector gp = p3.gradient(e2);
  const Vector fd = finite_difference_gradient(p3, e2);
  CHECK(gp[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(gp[1] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK((gp - fd).norm() <= 1e-5 * (1.0 + gp.norm()));
}

TEST_CASE("gradient agrees with finite differences on the catalogued corpus") {
  Rng rng(20240811);
  for (const auto& f : catalogued_corpus()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector v(f.input_dim());
      for (int k = 0; k < f.input_dim(); ++k) v[k] = rng.uniform(-3.0, 3.0);
      if (v.norm() < 1e-3) continue;  // keep clear of norm corners
      const Vector g = f.gradient(v);
      const Vector fd = finite_difference_gradient(f, v);
      CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("evaluation is nonnegative for catalogued constructions") {
  Rng rng(7);
  for (const auto& f : catalogued_corpus()) {
    REQUIRE(is_catalogued(f));
    for (int trial = 0; trial < 200; ++trial) {
      Vector v(f.input_dim());
      for (int k = 0; k < f.input_dim(); ++k) v[k] = rng.uniform(-10.0, 10.0);
      CHECK(f.value(v) >= 0.0);
    }
  }
}

TEST_CASE("norm gradients at the origin follow the exponent rule") {
  // alpha >= 2: continuous extension by zero.
  CHECK(CostFunction::power_norm(2.0, 2.0, 2).gradient(Vector::Zero(2)).norm() == 0.0);
  CHECK(CostFunction::power_norm(3.5, 2.5, 3).gradient(Vector::Zero(3)).norm() == 0.0);
  // alpha < 2: undefined.
  CHECK_THROWS_AS(CostFunction::power_norm(1.5, 2.0, 2).gradient(Vector::Zero(2)),
                  GradientUndefined);
  CHECK_THROWS_AS(CostFunction::norm(2.0, 2).gradient(Vector::Zero(2)), GradientUndefined);
  // cosh of a norm is differentiable at the origin with gradient zero.
  CHECK(CostFunction::cosh_of(CostFunction::norm(2.0, 3)).gradient(Vector::Zero(3)).norm() == 0.0);
  // exp of a norm keeps the corner.
  CHECK_THROWS_AS(CostFunction::exp_of(CostFunction::norm(2.0, 2)).gradient(Vector::Zero(2)),
                  GradientUndefined);
}

TEST_CASE("constructor preconditions") {
  CHECK_THROWS_AS(CostFunction::power_norm(1.0, 2.0, 1), ValidationError);
  CHECK_THROWS_AS(CostFunction::power_norm(2.0, 1.0, 1), ValidationError);
  CHECK_THROWS_AS(CostFunction::scaled(-0.5, CostFunction::square_scalar()), ValidationError);
  CHECK_THROWS_AS(
      CostFunction::sum(CostFunction::square_scalar(), CostFunction::power_norm(2.0, 2.0, 2)),
      DimensionError);
  CHECK_THROWS_AS(CostFunction::affine_pre(Matrix::Identity(2, 2), Vector::Zero(2),
                                           CostFunction::square_scalar()),
                  DimensionError);
}

TEST_CASE("dimension mismatches are rejected at evaluation") {
  const CostFunction f = CostFunction::quadratic_form(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(f.value(Vector::Zero(3)), DimensionError);
  CHECK_THROWS_AS(f.gradient(Vector::Zero(1)), DimensionError);
}

TEST_CASE("structural equality compares kinds and parameters exactly") {
  const CostFunction a = CostFunction::scaled(2.0, CostFunction::square_scalar());
  const CostFunction b = CostFunction::scaled(2.0, CostFunction::square_scalar());
  const CostFunction c = CostFunction::scaled(2.0 + 1e-15, CostFunction::square_scalar());
  CHECK(structurally_equal(a, b));
  CHECK(!structurally_equal(a, c));
  CHECK(!structurally_equal(a, CostFunction::square_scalar()));
}

TEST_CASE("linear and norm nodes are inner-only") {
  CHECK(!is_catalogued(CostFunction::linear(Vector::Ones(1), 0.0)));
  CHECK(!is_catalogued(CostFunction::norm(2.0, 2)));
  CHECK(!is_catalogued(CostFunction::scaled(1.0, CostFunction::norm(2.0, 2))));
  CHECK(is_catalogued(CostFunction::exp_scalar()));
  CHECK(is_catalogued(CostFunction::cosh_of(CostFunction::norm(2.0, 2))));
}

TEST_CASE("scale by zero erases the child everywhere") {
  const CostFunction f = CostFunction::scaled(0.0, CostFunction::power_norm(1.5, 2.0, 2));
  CHECK(f.value(Vector::Zero(2)) == 0.0);
  CHECK(f.gradient(Vector::Zero(2)).norm() == 0.0);  // no GradientUndefined leak
}
