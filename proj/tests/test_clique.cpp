#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "opinion/clique.hpp"
#include "opinion/generator.hpp"
#include "opinion/rng.hpp"

using namespace opinion;
using namespace opinion::test;

namespace {

OpinionProfile random_profile(const HeterogeneousGame& game, Rng& rng, double half_width = 4.0) {
  OpinionProfile z;
  for (int i = 0; i < game.person_count(); ++i) {
    Vector block(game.dims[i]);
    for (int k = 0; k < game.dims[i]; ++k) block[k] = rng.uniform(-half_width, half_width);
    z.push_back(std::move(block));
  }
  return z;
}

CliqueGame worked_clique_example(std::vector<std::vector<int>> cliques) {
  CliqueGame game;
  game.base = quadratic_to_heterogeneous(two_person_example());
  game.cliques = std::move(cliques);
  return game;
}

}  // namespace

TEST_CASE("partition validation") {
  CliqueGame game = worked_clique_example({{0}, {1}});
  CHECK_NOTHROW(validate(game));
  game.cliques = {{0}};
  CHECK_THROWS_AS(validate(game), ValidationError);  // person 1 uncovered
  game.cliques = {{0, 1}, {1}};
  CHECK_THROWS_AS(validate(game), ValidationError);  // overlap
  game.cliques = {{0, 1}, {}};
  CHECK_THROWS_AS(validate(game), ValidationError);  // empty clique
}

TEST_CASE("clique costs specialize to person costs and the social cost") {
  const OpinionProfile z = scalar_profile({1.0 / 3.0, 2.0 / 3.0});

  const CliqueGame singletons = worked_clique_example({{0}, {1}});
  CHECK(clique_cost(singletons, 0, z) == doctest::Approx(2.0 / 9.0).epsilon(1e-12));
  CHECK(clique_cost(singletons, 0, z) ==
        doctest::Approx(person_cost(singletons.base, 0, z)).epsilon(1e-14));

  const CliqueGame everyone = worked_clique_example({{0, 1}});
  CHECK(clique_cost(everyone, 0, z) ==
        doctest::Approx(social_cost(everyone.base, z)).epsilon(1e-14));
}

TEST_CASE("singleton reduction reproduces the base game costs") {
  const CliqueGame game = worked_clique_example({{0}, {1}});
  const HeterogeneousGame reduced = reduce_clique(game);
  CHECK(reduced.person_count() == 2);
  CHECK(check_symmetric(reduced).symmetric);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const OpinionProfile z = random_profile(game.base, rng);
    const OpinionProfile stacked = stack_profile(game, z);
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(person_cost(reduced, i, stacked) - person_cost(game.base, i, z)) <= 1e-12);
  }
}

TEST_CASE("one all-person clique reduces to a single person carrying the social cost") {
  const CliqueGame game = worked_clique_example({{0, 1}});
  const HeterogeneousGame reduced = reduce_clique(game);
  REQUIRE(reduced.person_count() == 1);
  CHECK(reduced.dims[0] == 2);
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const OpinionProfile z = random_profile(game.base, rng);
    const OpinionProfile stacked = stack_profile(game, z);
    CHECK(std::abs(person_cost(reduced, 0, stacked) - social_cost(game.base, z)) <= 1e-12);
  }
}

TEST_CASE("reduction preserves clique costs on random games") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const CliqueGame game = random_clique_game({{5, 2, 0.7}, 3}, seed);
    const HeterogeneousGame reduced = reduce_clique(game);
    CHECK(check_symmetric(reduced).symmetric);
    Rng rng(seed + 1000);
    for (int trial = 0; trial < 100; ++trial) {
      const OpinionProfile z = random_profile(game.base, rng);
      const OpinionProfile stacked = stack_profile(game, z);
      for (std::size_t c = 0; c < game.cliques.size(); ++c) {
        const double native = clique_cost(game, static_cast<int>(c), z);
        const double via_reduction = person_cost(reduced, static_cast<int>(c), stacked);
        CHECK(std::abs(native - via_reduction) <= 1e-10 * (1.0 + std::abs(native)));
      }
    }
  }
}

TEST_CASE("stack and unstack are inverse") {
  const CliqueGame game = random_clique_game({{6, 2, 0.5}, 3}, 11);
  Rng rng(12);
  const OpinionProfile z = random_profile(game.base, rng);
  const OpinionProfile back = unstack_profile(game, stack_profile(game, z));
  CHECK(profile_inf_distance(z, back) == 0.0);
}

TEST_CASE("native clique Nash matches the reduced game's Nash") {
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const CliqueGame game = random_clique_game({{4, 2, 0.7}, 2}, seed);
    const HeterogeneousGame reduced = reduce_clique(game);

    const GeneralSolveResult native = nash_clique(game, zero_profile(game.base), {});
    REQUIRE(native.converged);
    const GeneralSolveResult via_reduction = nash_general(reduced, zero_profile(reduced), {});
    REQUIRE(via_reduction.converged);

    CHECK(profile_inf_distance(stack_profile(game, native.profile), via_reduction.profile) <=
          1e-6);
  }
}

TEST_CASE("singleton cliques recover person-level best response") {
  const QuadraticGame qgame = random_quadratic_game({4, 2, 0.8}, 33);
  CliqueGame game;
  game.base = quadratic_to_heterogeneous(qgame);
  for (int i = 0; i < 4; ++i) game.cliques.push_back({i});

  const GeneralSolveResult clique_nash = nash_clique(game, zero_profile(game.base), {});
  REQUIRE(clique_nash.converged);
  const GeneralSolveResult person_nash = nash_general(game.base, zero_profile(game.base), {});
  REQUIRE(person_nash.converged);
  CHECK(profile_inf_distance(clique_nash.profile, person_nash.profile) <= 1e-6);
}

TEST_CASE("one all-person clique pushes the Nash to the social optimum") {
  const QuadraticGame qgame = random_quadratic_game({3, 2, 1.0}, 44);
  CliqueGame game;
  game.base = quadratic_to_heterogeneous(qgame);
  game.cliques = {{0, 1, 2}};

  const GeneralSolveResult clique_nash = nash_clique(game, zero_profile(game.base), {});
  REQUIRE(clique_nash.converged);
  const GeneralSolveResult optimum = optimum_general(game.base, zero_profile(game.base), 1e-7);
  REQUIRE(optimum.residual <= 1e-6);
  CHECK(profile_inf_distance(clique_nash.profile, optimum.profile) <= 1e-6);

  const PoaResult poa = price_of_anarchy(game);
  const double sc_nash = social_cost(game.base, clique_nash.profile);
  const double sc_opt = social_cost(game.base, optimum.profile);
  CHECK(std::abs(sc_nash - sc_opt) <= 1e-6 * (1.0 + sc_opt));
  CHECK(poa.ratio <= 1.0 + 1e-6);
}

TEST_CASE("clique PoA equals the reduced game PoA and respects the bound") {
  for (std::uint64_t seed = 60; seed < 64; ++seed) {
    const CliqueGame game = random_clique_game({{4, 2, 0.7}, 2}, seed);
    const PoaResult native = price_of_anarchy(game);
    const PoaResult reduced = price_of_anarchy(reduce_clique(game), {});
    REQUIRE(native.kind == PoaResult::Kind::Ratio);
    REQUIRE(reduced.kind == PoaResult::Kind::Ratio);
    CHECK(std::abs(native.ratio - reduced.ratio) <= 1e-6);

    // Quadratic-derived costs carry the square certificate at both p values.
    const BoundReport bound = poa_upper_bound(game, 0.75, 2.0 / 3.0);
    REQUIRE(bound.ok);
    CHECK(native.ratio <= bound.bound + 1e-9);
  }
}
