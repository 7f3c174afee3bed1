#include "opinion/generator.hpp"

#include <algorithm>
#include <numeric>

#include "opinion/rng.hpp"

namespace opinion {

namespace {

Matrix random_psd(Rng& rng, int dim, double scale) {
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) g(r, c) = rng.normal();
  return (scale / dim) * (g * g.transpose());
}

}  // namespace

QuadraticGame random_quadratic_game(const RandomQuadraticOptions& options, std::uint64_t seed) {
  if (options.persons < 1 || options.dim < 1)
    throw ValidationError("random_quadratic_game: need at least one person and one dimension");
  if (options.density < 0.0 || options.density > 1.0)
    throw ValidationError("random_quadratic_game: density must lie in [0, 1]");
  Rng rng(seed);
  QuadraticGame game;
  game.dim = options.dim;
  for (int i = 0; i < options.persons; ++i) {
    game.internal_weight.push_back(random_psd(rng, options.dim, 1.0) +
                                   rng.uniform(0.5, 1.5) *
                                       Matrix::Identity(options.dim, options.dim));
    Vector s(options.dim);
    for (int k = 0; k < options.dim; ++k) s[k] = rng.uniform(-3.0, 3.0);
    game.internal_opinion.push_back(std::move(s));
  }
  for (int i = 0; i < options.persons; ++i) {
    for (int j = i + 1; j < options.persons; ++j) {
      if (rng.uniform01() >= options.density) continue;
      const Matrix w = random_psd(rng, options.dim, options.weight_scale);
      game.weight.emplace(std::make_pair(i, j), w);
      game.weight.emplace(std::make_pair(j, i), w);
    }
  }
  require_valid(game);
  return game;
}

CliqueGame random_clique_game(const RandomCliqueOptions& options, std::uint64_t seed) {
  if (options.max_clique_size < 1)
    throw ValidationError("random_clique_game: max clique size must be positive");
  Rng rng(seed);
  CliqueGame game;
  game.base = quadratic_to_heterogeneous(random_quadratic_game(options.base, rng.next()));

  std::vector<int> order(options.base.persons);
  std::iota(order.begin(), order.end(), 0);
  for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
    std::swap(order[i], order[rng.uniform_int(0, i)]);
  std::size_t at = 0;
  while (at < order.size()) {
    const int size = std::min<int>(rng.uniform_int(1, options.max_clique_size),
                                   static_cast<int>(order.size() - at));
    game.cliques.emplace_back(order.begin() + at, order.begin() + at + size);
    at += size;
  }
  validate(game);
  return game;
}

}  // namespace opinion
