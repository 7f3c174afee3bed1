#include "opinion/lowerbound.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace opinion {

namespace {

double scalar_value(const CostFunction& f, double x) {
  return f.value(Vector::Constant(1, x));
}

double scalar_derivative(const CostFunction& f, double x) {
  return f.gradient(Vector::Constant(1, x))[0];
}

Matrix scalar_matrix(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TightInstance build_three_person(const TightInstanceSpec& spec) {
  if (!spec.h.valid() || spec.h.input_dim() != 1)
    throw ValidationError("build_three_person: h must be a scalar cost");
  if (!(spec.lambda > 0.0) || !(spec.kappa > 0.0))
    throw ValidationError("build_three_person: lambda and kappa must be positive");
  if (spec.x1 == spec.y1 || spec.x2 == spec.y2)
    throw ValidationError("build_three_person: degenerate pair (equal endpoints)");

  const double h_x1 = scalar_value(spec.h, spec.x1);
  const double h_y1 = scalar_value(spec.h, spec.y1);
  const double h_x2 = scalar_value(spec.h, spec.x2);
  const double h_y2 = scalar_value(spec.h, spec.y2);
  const double d_x1 = scalar_derivative(spec.h, spec.x1);
  const double d_x2 = scalar_derivative(spec.h, spec.x2);

  const double eq_p2 = spec.lambda * h_y1 - spec.kappa * h_x1 - d_x1 * (spec.y1 - spec.x1) / 2.0;
  const double eq_p1 = spec.lambda * h_y2 - spec.kappa * h_x2 - d_x2 * (spec.y2 - spec.x2);
  if (std::abs(eq_p2) > 1e-8 || std::abs(eq_p1) > 1e-8)
    throw ValidationError("build_three_person: suitability constraints not binding at the pairs");

  const double sign_p2 = d_x1 * (spec.x1 - spec.y1);
  const double sign_p1 = d_x2 * (spec.x2 - spec.y2);
  if (!(sign_p2 * sign_p1 < 0.0))
    throw ValidationError("build_three_person: binding terms must have opposite signs");

  TightInstance out;
  const double cross = spec.y1 * spec.x2 - spec.x1 * spec.y2;
  out.a = cross / (spec.x2 - spec.y2);
  out.b = cross / (spec.x1 - spec.y1);
  if (out.a == 0.0 || out.b == 0.0)
    throw ValidationError("build_three_person: degenerate dilation (zero a or b)");
  if (!(out.a * out.b < 0.0))
    throw ValidationError("build_three_person: dilations must have opposite signs");
  double w = -out.b * d_x2 / (out.a * d_x1);
  if (w < -1e-12) throw ValidationError("build_three_person: derived edge weight is negative");
  out.w = std::max(w, 0.0);

  // Persons: 0 = negative, 1 = zero, 2 = positive; all scalar.
  HeterogeneousGame& game = out.game;
  game.dims = {1, 1, 1};
  game.internal.resize(3);
  game.internal[0] = InternalCost{spec.h, scalar_matrix(-out.b), Vector::Constant(1, out.b)};
  game.internal[2] = InternalCost{spec.h, scalar_matrix(out.b), Vector::Constant(1, out.b)};

  const CostFunction edge = CostFunction::scaled(out.w, spec.h);
  const Matrix plus = scalar_matrix(out.a);
  const Matrix minus = scalar_matrix(-out.a);
  game.pairwise.emplace(std::make_pair(0, 1), PairwiseCost{edge, minus, plus});
  game.pairwise.emplace(std::make_pair(1, 0), PairwiseCost{edge, plus, minus});
  game.pairwise.emplace(std::make_pair(2, 1), PairwiseCost{edge, plus, minus});
  game.pairwise.emplace(std::make_pair(1, 2), PairwiseCost{edge, minus, plus});
  validate(game);

  const double x_pos = spec.x1 / out.a;
  const double y_pos = spec.y1 / out.a;
  out.nash = {Vector::Constant(1, -x_pos), Vector::Zero(1), Vector::Constant(1, x_pos)};
  out.reference = {Vector::Constant(1, -y_pos), Vector::Zero(1), Vector::Constant(1, y_pos)};
  return out;
}

TightInstanceSpec exp_tight_spec() {
  TightInstanceSpec spec;
  spec.h = CostFunction::exp_scalar();
  spec.lambda = 2.0 / std::numbers::e;
  spec.kappa = std::numbers::ln2;
  spec.x1 = 0.0;
  spec.y1 = 1.0 - 2.0 * std::numbers::ln2;
  spec.x2 = 1.0;
  spec.y2 = 2.0 - std::numbers::ln2;
  return spec;
}

double NonconvexExample::person_cost(int person, double z1, double z2) const {
  if (person != 0 && person != 1) throw ValidationError("nonconvex: person index out of range");
  const double own = person == 0 ? z1 : z2;
  const double coupling = (1.0 - z1) * (1.0 - z1) * z2 * z2 + z1 * z1 * (1.0 - z2) * (1.0 - z2);
  return epsilon * own * own + coupling;
}

double NonconvexExample::person_gradient(int person, double z1, double z2) const {
  if (person == 0)
    return 2.0 * epsilon * z1 - 2.0 * (1.0 - z1) * z2 * z2 + 2.0 * z1 * (1.0 - z2) * (1.0 - z2);
  if (person == 1)
    return 2.0 * epsilon * z2 + 2.0 * (1.0 - z1) * (1.0 - z1) * z2 - 2.0 * z1 * z1 * (1.0 - z2);
  throw ValidationError("nonconvex: person index out of range");
}

double NonconvexExample::social_cost(double z1, double z2) const {
  return person_cost(0, z1, z2) + person_cost(1, z1, z2);
}

double NonconvexExample::grid_best_response(int person, double other, double lo, double hi,
                                            double step) const {
  if (!(step > 0.0) || !(hi > lo)) throw ValidationError("nonconvex: bad grid");
  double best = lo;
  double best_cost = std::numeric_limits<double>::infinity();
  const long count = static_cast<long>(std::floor((hi - lo) / step));
  for (long k = 0; k <= count; ++k) {
    const double v = lo + k * step;
    const double c = person == 0 ? person_cost(0, v, other) : person_cost(1, other, v);
    if (c < best_cost) {
      best_cost = c;
      best = v;
    }
  }
  return best;
}

NonconvexExample nonconvex_example(double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("nonconvex_example: epsilon must be positive");
  return NonconvexExample{epsilon};
}

QuadraticGame no_nash_example() {
  QuadraticGame game;
  game.dim = 1;
  game.unsafe_indefinite = true;
  game.internal_weight = {Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
  game.internal_opinion = {Vector::Zero(1), Vector::Zero(1)};
  game.weight.emplace(std::make_pair(0, 1), scalar_matrix(-1.0));
  game.weight.emplace(std::make_pair(1, 0), scalar_matrix(-1.0));
  return game;
}

QuadraticGame no_nash_variant(double internal_weight) {
  if (!(internal_weight > 0.0) || !(internal_weight < 1.0))
    throw ValidationError("no_nash_variant: internal weight must lie in (0, 1)");
  QuadraticGame game = no_nash_example();
  game.internal_weight = {scalar_matrix(internal_weight), scalar_matrix(internal_weight)};
  return game;
}

}  // namespace opinion
