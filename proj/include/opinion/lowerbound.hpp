#pragma once

#include "opinion/game.hpp"

namespace opinion {

/// Ingredients of the three-person tight construction: a scalar cost h, the
/// binding pair (x1, y1) for p = 2 and (x2, y2) for p = 1, and the (lambda,
/// kappa) at which both suitability constraints hold with equality.
struct TightInstanceSpec {
  CostFunction h;
  double x1 = 0.0, y1 = 0.0;
  double x2 = 0.0, y2 = 0.0;
  double lambda = 0.0, kappa = 0.0;
};

/// The built game plus its derived dilations, edge weight, equilibrium, and
/// reference profile. Persons are ordered (negative, zero, positive).
struct TightInstance {
  HeterogeneousGame game;
  double a = 0.0;  // edge dilation
  double b = 0.0;  // internal dilation
  double w = 0.0;  // edge weight
  OpinionProfile nash;
  OpinionProfile reference;  // the profile witnessing SC(x)/SC(ref) = lambda/kappa
};

/// Checks the equality and sign conditions, derives a, b, w, and assembles
/// the three-person game whose measured ratio is lambda/kappa.
TightInstance build_three_person(const TightInstanceSpec& spec);

/// The e^x instantiation: lambda = 2/e, kappa = ln 2, binding displacements
/// 1 - 2 ln 2 (p = 2) and 1 - ln 2 (p = 1), with the p = 1 pair shifted by +1
/// so the derived dilations are nonzero (for exp the constraints depend only
/// on the displacement, so the shift is harmless).
TightInstanceSpec exp_tight_spec();

/// Two-person scalar game with coupling (1 - z1)^2 z2^2 + z1^2 (1 - z2)^2 and
/// internal costs epsilon z^2. Not convex, so equilibrium logic is replaced
/// by per-player grid search.
struct NonconvexExample {
  double epsilon = 0.0;

  double person_cost(int person, double z1, double z2) const;
  double person_gradient(int person, double z1, double z2) const;
  double social_cost(double z1, double z2) const;

  /// Exhaustive per-player best response over a grid.
  double grid_best_response(int person, double other, double lo = -2.0, double hi = 2.0,
                            double step = 1e-4) const;
};

NonconvexExample nonconvex_example(double epsilon);

/// Two scalar persons, no internal anchoring, single undirected edge of
/// weight -1; carries the indefinite-weights flag. Has no Nash equilibrium.
QuadraticGame no_nash_example();

/// The same game with internal weight r in (0, 1) added; the best-response
/// map is then defined and diverges from any asymmetric start.
QuadraticGame no_nash_variant(double internal_weight);

}  // namespace opinion
