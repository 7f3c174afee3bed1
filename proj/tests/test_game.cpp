#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "opinion/game.hpp"
#include "opinion/generator.hpp"
#include "opinion/rng.hpp"

using namespace opinion;
using namespace opinion::test;

TEST_CASE("two-person worked example costs") {
  const QuadraticGame game = two_person_example();
  const OpinionProfile nash = scalar_profile({1.0 / 3.0, 2.0 / 3.0});
  CHECK(person_cost(game, 0, nash) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(person_cost(game, 1, nash) == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(social_cost(game, nash) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));

  const OpinionProfile optimum = scalar_profile({2.0 / 5.0, 3.0 / 5.0});
  CHECK(social_cost(game, optimum) == doctest::Approx(2.0 / 5.0).epsilon(1e-14));
}

TEST_CASE("consensus at a shared anchor zeroes every cost") {
  QuadraticGame game = two_person_example();
  game.internal_opinion = {Vector::Constant(1, 0.7), Vector::Constant(1, 0.7)};
  const OpinionProfile consensus = scalar_profile({0.7, 0.7});
  CHECK(person_cost(game, 0, consensus) == doctest::Approx(0.0));
  CHECK(person_cost(game, 1, consensus) == doctest::Approx(0.0));
  // With distinct anchors the same profile cannot be free for both.
  const QuadraticGame original = two_person_example();
  CHECK(person_cost(original, 0, scalar_profile({1.0, 1.0})) > 0.0);
}

TEST_CASE("social cost is exactly the sum of person costs") {
  const QuadraticGame qgame = random_quadratic_game({6, 3, 0.6}, 42);
  const HeterogeneousGame game = quadratic_to_heterogeneous(qgame);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    OpinionProfile z;
    for (int i = 0; i < game.person_count(); ++i) {
      Vector block(game.dims[i]);
      for (int k = 0; k < game.dims[i]; ++k) block[k] = rng.uniform(-5.0, 5.0);
      z.push_back(std::move(block));
    }
    double sum = 0.0;
    for (int i = 0; i < game.person_count(); ++i) sum += person_cost(game, i, z);
    CHECK(social_cost(game, z) == sum);  // identical summation order
  }
}

TEST_CASE("all-zero game has zero social cost at zero") {
  QuadraticGame game;
  game.dim = 2;
  game.internal_weight = {Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  game.internal_opinion = {Vector::Zero(2), Vector::Zero(2)};
  CHECK(social_cost(game, zero_profile(game)) == 0.0);
}

TEST_CASE("person gradient vanishes at the Nash of the worked example") {
  const QuadraticGame game = two_person_example();
  const OpinionProfile nash = scalar_profile({1.0 / 3.0, 2.0 / 3.0});
  CHECK(max_abs(person_gradient(game, 0, nash)) <= 1e-14);
  CHECK(max_abs(person_gradient(game, 1, nash)) <= 1e-14);
}

TEST_CASE("quadratic gradient vanishes at the anchor with no edges") {
  QuadraticGame game;
  game.dim = 2;
  game.internal_weight = {Matrix::Identity(2, 2)};
  Vector s(2);
  s << 1.0, -2.0;
  game.internal_opinion = {s};
  CHECK(max_abs(person_gradient(game, 0, {s})) == 0.0);
}

TEST_CASE("heterogeneous person gradient matches finite differences on a corpus") {
  Rng rng(99);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const QuadraticGame qgame = random_quadratic_game({5, 2, 0.7}, seed);
    const HeterogeneousGame game = quadratic_to_heterogeneous(qgame);
    for (int trial = 0; trial < 100; ++trial) {
      OpinionProfile z;
      for (int i = 0; i < game.person_count(); ++i) {
        Vector block(game.dims[i]);
        for (int k = 0; k < game.dims[i]; ++k) block[k] = rng.uniform(-4.0, 4.0);
        z.push_back(std::move(block));
      }
      const int person = rng.uniform_int(0, game.person_count() - 1);
      const Vector g = person_gradient(game, person, z);
      const Vector fd = finite_difference_person_gradient(game, person, z);
      CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
    }
  }
}

TEST_CASE("symmetry check passes on undirected games and locates violations") {
  const QuadraticGame game = random_quadratic_game({5, 2, 0.8}, 3);
  CHECK(check_symmetric(game).symmetric);

  QuadraticGame broken = game;
  REQUIRE(!broken.weight.empty());
  const auto first = broken.weight.begin()->first;
  broken.weight[first] = broken.weight[first] + 0.5 * Matrix::Identity(2, 2);
  const SymmetryReport report = check_symmetric(broken);
  CHECK(!report.symmetric);
  CHECK(report.i == first.first);
  CHECK(report.j == first.second);
}

TEST_CASE("symmetric pairwise costs agree across both endpoints") {
  const QuadraticGame qgame = random_quadratic_game({6, 3, 0.7}, 17);
  const HeterogeneousGame game = quadratic_to_heterogeneous(qgame);
  REQUIRE(check_symmetric(game).symmetric);
  Rng rng(5);
  OpinionProfile z;
  for (int i = 0; i < game.person_count(); ++i) {
    Vector block(game.dims[i]);
    for (int k = 0; k < game.dims[i]; ++k) block[k] = rng.uniform(-5.0, 5.0);
    z.push_back(std::move(block));
  }
  for (const auto& [key, f] : game.pairwise) {
    const auto& mirror = game.pairwise.at({key.second, key.first});
    const double here = f.cost.value(f.own_map * z[key.first] + f.other_map * z[key.second]);
    const double there =
        mirror.cost.value(mirror.own_map * z[key.second] + mirror.other_map * z[key.first]);
    CHECK(std::abs(here - there) <= 1e-12 * (1.0 + std::abs(here)));
  }
}

TEST_CASE("quadratic to heterogeneous preserves person costs") {
  for (std::uint64_t seed : {10u, 11u}) {
    const QuadraticGame qgame = random_quadratic_game({5, 3, 0.6}, seed);
    const HeterogeneousGame game = quadratic_to_heterogeneous(qgame);
    CHECK(check_symmetric(game).symmetric);
    Rng rng(seed);
    for (int trial = 0; trial < 100; ++trial) {
      OpinionProfile z;
      for (int i = 0; i < qgame.person_count(); ++i) {
        Vector block(qgame.dim);
        for (int k = 0; k < qgame.dim; ++k) block[k] = rng.uniform(-5.0, 5.0);
        z.push_back(std::move(block));
      }
      for (int i = 0; i < qgame.person_count(); ++i)
        CHECK(std::abs(person_cost(game, i, z) - person_cost(qgame, i, z)) <= 1e-10);
    }
  }
}

TEST_CASE("identity weight converts to a plain difference penalty") {
  QuadraticGame game = two_person_example();
  const HeterogeneousGame converted = quadratic_to_heterogeneous(game);
  const auto& f = converted.pairwise.at({0, 1});
  CHECK(f.cost.kind() == CostFunction::Kind::QuadraticForm);
  CHECK(f.cost.matrix() == Matrix::Identity(1, 1));
  CHECK(f.own_map == Matrix::Identity(1, 1));
  CHECK(f.other_map == -Matrix::Identity(1, 1));
}

TEST_CASE("conversion rejects indefinite weights") {
  QuadraticGame game = two_person_example();
  game.weight[{0, 1}] = Matrix::Constant(1, 1, -0.1);
  game.weight[{1, 0}] = Matrix::Constant(1, 1, -0.1);
  CHECK_THROWS_AS(quadratic_to_heterogeneous(game), ValidationError);
}

TEST_CASE("psd_sqrt clamps round-off negatives and rejects real ones") {
  Matrix tiny(2, 2);
  tiny << 1.0, 0.0, 0.0, -5e-11;
  const Matrix root = psd_sqrt(tiny);
  CHECK((root * root - tiny.cwiseMax(0.0)).norm() <= 1e-9);

  Matrix negative(2, 2);
  negative << 1.0, 0.0, 0.0, -0.1;
  CHECK_THROWS_AS(psd_sqrt(negative), ValidationError);
}

TEST_CASE("FJ conversion with identity coupling collapses") {
  const Matrix identity = Matrix::Identity(2, 2);
  std::map<std::pair<int, int>, double> edges{{{0, 1}, 1.0}, {{1, 0}, 1.0}};
  Vector s0(2), s1(2);
  s0 << 1.0, 2.0;
  s1 << -1.0, 0.5;
  const QuadraticGame game = fj_to_quadratic({1.0, 1.0}, {s0, s1}, edges, identity);
  CHECK(game.weight.at({0, 1}) == identity);
  CHECK((game.internal_weight[0] - identity).norm() <= 1e-12);
  CHECK((game.internal_opinion[0] - s0).norm() <= 1e-12);
  CHECK((game.internal_opinion[1] - s1).norm() <= 1e-12);
}

TEST_CASE("FJ conversion derives R = 2I - C for the uniform coupling") {
  Matrix coupling(2, 2);
  coupling << 0.5, 0.5, 0.5, 0.5;
  std::map<std::pair<int, int>, double> edges{{{0, 1}, 1.0}, {{1, 0}, 1.0}};
  const QuadraticGame game =
      fj_to_quadratic({1.0, 1.0}, {Vector::Zero(2), Vector::Ones(2)}, edges, coupling);
  const Matrix expected = 2.0 * Matrix::Identity(2, 2) - coupling;
  CHECK((game.internal_weight[0] - expected).norm() <= 1e-12);
  // Eigenvalues 2 and 1: PD.
  CHECK(is_positive_definite(game.internal_weight[0]));
}

TEST_CASE("FJ conversion rejects a non-PSD coupling") {
  Matrix swap(2, 2);
  swap << 0.0, 1.0, 1.0, 0.0;  // symmetric, row-stochastic, eigenvalues +-1
  std::map<std::pair<int, int>, double> edges{{{0, 1}, 1.0}, {{1, 0}, 1.0}};
  CHECK_THROWS_AS(fj_to_quadratic({1.0, 1.0}, {Vector::Zero(2), Vector::Zero(2)}, edges, swap),
                  ValidationError);
}

TEST_CASE("FJ conversion with scalar identity coupling reproduces the scalar cost") {
  // c_i(z) = r_i (z_i - s_i)^2 + sum_j w_ij (z_i - z_j)^2.
  const Matrix one = Matrix::Identity(1, 1);
  std::map<std::pair<int, int>, double> edges{{{0, 1}, 2.0}, {{1, 0}, 2.0}};
  const double r0 = 1.5, r1 = 0.5;
  const Vector s0 = Vector::Constant(1, 0.3), s1 = Vector::Constant(1, -1.1);
  const QuadraticGame game = fj_to_quadratic({r0, r1}, {s0, s1}, edges, one);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const double z0 = rng.uniform(-5.0, 5.0), z1 = rng.uniform(-5.0, 5.0);
    const OpinionProfile z = scalar_profile({z0, z1});
    const double expected0 = r0 * (z0 - s0[0]) * (z0 - s0[0]) + 2.0 * (z0 - z1) * (z0 - z1);
    const double expected1 = r1 * (z1 - s1[0]) * (z1 - s1[0]) + 2.0 * (z1 - z0) * (z1 - z0);
    CHECK(std::abs(person_cost(game, 0, z) - expected0) <= 1e-12 * (1.0 + std::abs(expected0)));
    CHECK(std::abs(person_cost(game, 1, z) - expected1) <= 1e-12 * (1.0 + std::abs(expected1)));
  }
}

TEST_CASE("rectangular internal maps evaluate and differentiate") {
  // Internal cost dimension differs from the opinion dimension: g reads a
  // 2-d projection of a 3-d opinion.
  HeterogeneousGame game;
  game.dims = {3};
  game.internal.resize(1);
  Matrix projection(2, 3);
  projection << 1.0, 0.0, 0.5, 0.0, 1.0, -0.5;
  Vector anchor(2);
  anchor << 0.4, -0.2;
  game.internal[0] = InternalCost{CostFunction::quadratic_form(Matrix::Identity(2, 2)),
                                  projection, anchor};
  validate(game);

  Vector opinion(3);
  opinion << 1.0, 2.0, -1.0;
  const OpinionProfile z = {opinion};
  const Vector image = projection * opinion - anchor;
  CHECK(person_cost(game, 0, z) == doctest::Approx(image.squaredNorm()).epsilon(1e-14));
  const Vector g = person_gradient(game, 0, z);
  const Vector fd = finite_difference_person_gradient(game, 0, z);
  CHECK((g - fd).norm() <= 1e-5 * (1.0 + g.norm()));
}

TEST_CASE("validation flags record which internal weights are PD") {
  QuadraticGame game = two_person_example();
  game.internal_weight[1] = Matrix::Zero(1, 1);
  const QuadraticValidation report = validate(game);
  CHECK(report.ok);  // PSD still holds
  CHECK(report.internal_pd[0]);
  CHECK(!report.internal_pd[1]);
}

TEST_CASE("indefinite weights need the unsafe flag") {
  QuadraticGame game = two_person_example();
  game.weight[{0, 1}] = Matrix::Constant(1, 1, -1.0);
  game.weight[{1, 0}] = Matrix::Constant(1, 1, -1.0);
  CHECK(!validate(game).ok);
  game.unsafe_indefinite = true;
  CHECK(validate(game).ok);
}
