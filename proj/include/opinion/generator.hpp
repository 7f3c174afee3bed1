#pragma once

#include "opinion/clique.hpp"
#include "opinion/game.hpp"

namespace opinion {

struct RandomQuadraticOptions {
  int persons = 5;
  int dim = 2;
  double density = 0.5;      // probability an unordered pair gets an edge
  double weight_scale = 1.0; // scale of the PSD edge weights
};

/// Undirected quadratic game with PD internal weights (smallest eigenvalue at
/// least 1/2), PSD edge weights, and anchors in [-3, 3]. Deterministic in the
/// seed.
QuadraticGame random_quadratic_game(const RandomQuadraticOptions& options, std::uint64_t seed);

struct RandomCliqueOptions {
  RandomQuadraticOptions base;
  int max_clique_size = 3;
};

/// Heterogeneous conversion of a random quadratic game plus a random
/// partition into cliques.
CliqueGame random_clique_game(const RandomCliqueOptions& options, std::uint64_t seed);

}  // namespace opinion
