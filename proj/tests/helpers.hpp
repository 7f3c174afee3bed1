#pragma once

#include <cmath>

#include "opinion/cost_function.hpp"
#include "opinion/game.hpp"

namespace opinion::test {

// Independent oracle: central finite differences with step h. Lives in test
// code only, never in the library.
inline Vector finite_difference_gradient(const CostFunction& f, const Vector& v,
                                         double h = 1e-6) {
  Vector grad(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    Vector hi = v, lo = v;
    hi[k] += h;
    lo[k] -= h;
    grad[k] = (f.value(hi) - f.value(lo)) / (2.0 * h);
  }
  return grad;
}

inline Vector finite_difference_person_gradient(const HeterogeneousGame& game, int person,
                                                const OpinionProfile& z, double h = 1e-6) {
  Vector grad(z[person].size());
  for (Eigen::Index k = 0; k < z[person].size(); ++k) {
    OpinionProfile hi = z, lo = z;
    hi[person][k] += h;
    lo[person][k] -= h;
    grad[k] = (person_cost(game, person, hi) - person_cost(game, person, lo)) / (2.0 * h);
  }
  return grad;
}

// The worked two-person scalar example: r = (1, 1), s = (0, 1), w12 = 1.
inline QuadraticGame two_person_example() {
  QuadraticGame game;
  game.dim = 1;
  game.internal_weight = {Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
  game.internal_opinion = {Vector::Zero(1), Vector::Ones(1)};
  game.weight.emplace(std::make_pair(0, 1), Matrix::Identity(1, 1));
  game.weight.emplace(std::make_pair(1, 0), Matrix::Identity(1, 1));
  return game;
}

inline OpinionProfile scalar_profile(std::initializer_list<double> values) {
  OpinionProfile z;
  for (double v : values) z.push_back(Vector::Constant(1, v));
  return z;
}

}  // namespace opinion::test
