#include "opinion/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "opinion/dynamics.hpp"

namespace opinion {

namespace {

Vector solve_block_system(const Matrix& system, const Vector& rhs, const char* what) {
  Eigen::LDLT<Matrix> ldlt(system);
  if (ldlt.info() != Eigen::Success) throw SolveError(std::string(what) + ": factorization failed");
  Vector x = ldlt.solve(rhs);
  x += ldlt.solve(rhs - system * x);  // one refinement pass
  const double residual = max_abs(Vector(system * x - rhs));
  const double bound = 1e-9 * std::max(max_abs(rhs), 1e-300);
  if (residual > std::max(bound, 1e-12))
    throw SolveError(std::string(what) + ": residual above tolerance");
  return x;
}

OpinionProfile solve_quadratic(const QuadraticGame& game, double laplacian_factor,
                               const char* what) {
  if (!check_symmetric(game).symmetric)
    throw ValidationError(std::string(what) + ": game must be undirected");
  const BlockSystem sys = build_block_system(game);
  const Matrix system = sys.internal + laplacian_factor * sys.laplacian;
  const Vector x = solve_block_system(system, sys.internal * sys.anchor, what);
  return split(x, std::vector<int>(game.person_count(), game.dim));
}

}  // namespace

OpinionProfile nash_quadratic(const QuadraticGame& game) {
  return solve_quadratic(game, 1.0, "nash_quadratic");
}

OpinionProfile optimum_quadratic(const QuadraticGame& game) {
  return solve_quadratic(game, 2.0, "optimum_quadratic");
}

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1e-18;
// Cost comparisons are meaningless below a few ulps of the cost magnitude.
constexpr double kValueNoise = 1e-14;

// Per-person adjacency view; the solvers hit these lists in tight loops.
struct EdgeIndex {
  struct Term {
    const PairwiseCost* cost;
    int other;
  };
  std::vector<std::vector<Term>> outgoing;

  explicit EdgeIndex(const HeterogeneousGame& game) : outgoing(game.person_count()) {
    for (const auto& [key, f] : game.pairwise) outgoing[key.first].push_back({&f, key.second});
  }
};

double own_cost(const HeterogeneousGame& game, const EdgeIndex& edges, int person,
                const OpinionProfile& z, const Vector& zi) {
  double total = 0.0;
  if (game.internal[person]) {
    const InternalCost& g = *game.internal[person];
    total += g.cost.value(g.map * zi - g.anchor);
  }
  for (const auto& term : edges.outgoing[person])
    total += term.cost->cost.value(term.cost->own_map * zi + term.cost->other_map * z[term.other]);
  return total;
}

Vector own_gradient(const HeterogeneousGame& game, const EdgeIndex& edges, int person,
                    const OpinionProfile& z, const Vector& zi) {
  Vector grad = Vector::Zero(zi.size());
  if (game.internal[person]) {
    const InternalCost& g = *game.internal[person];
    grad += g.map.transpose() * g.cost.gradient(g.map * zi - g.anchor);
  }
  for (const auto& term : edges.outgoing[person])
    grad += term.cost->own_map.transpose() *
            term.cost->cost.gradient(term.cost->own_map * zi + term.cost->other_map * z[term.other]);
  return grad;
}

// Armijo backtracking descent of one person's cost in their own block.
// Returns the inf-norm of the total movement.
//
// Close to the minimum the cost comparisons hit double round-off (decreases
// below ~1e-16 of the cost's magnitude are invisible), so once the value
// test goes flat the search falls back to accepting steps that strictly
// shrink the gradient, which is computed with absolute accuracy.
double minimize_own_cost(const HeterogeneousGame& game, const EdgeIndex& edges, int person,
                         OpinionProfile& z, double tol, int max_iterations, bool polish) {
  Vector zi = z[person];
  const Vector start = zi;
  // Polish iterations seed the search with a secant estimate of the inverse
  // curvature along the trajectory, which contracts far faster than damped
  // unit steps on stiff blocks.
  double polish_step = 1.0;
  Vector prev_point, prev_grad;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector grad = own_gradient(game, edges, person, z, zi);
    if (max_abs(grad) <= tol) break;
    if (polish && prev_point.size() > 0) {
      const Vector dz = zi - prev_point;
      const Vector dg = grad - prev_grad;
      const double curvature = dg.squaredNorm();
      if (curvature > 0.0) {
        const double secant = dz.dot(dg) / curvature;
        if (secant > 0.0) polish_step = std::min(secant, 1.0);
      }
    }
    const double f0 = own_cost(game, edges, person, z, zi);
    const double slope = grad.squaredNorm();
    double step = polish ? polish_step : 1.0;
    bool moved = false;
    while (step > kMinStep) {
      const Vector candidate = zi - step * grad;
      const double trial = own_cost(game, edges, person, z, candidate);
      bool accept = trial < f0 && trial <= f0 - kArmijoSlope * step * slope;
      if (!accept && polish && trial <= f0 + kValueNoise * (1.0 + std::abs(f0)))
        accept = own_gradient(game, edges, person, z, candidate).squaredNorm() < slope;
      if (accept) {
        prev_point = zi;
        prev_grad = grad;
        zi = candidate;
        moved = true;
        polish_step = std::min(1.0, 2.0 * step);
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  z[person] = zi;
  return max_abs(Vector(zi - start));
}

double nash_residual(const HeterogeneousGame& game, const EdgeIndex& edges,
                     const OpinionProfile& z, int* worst = nullptr) {
  double max_residual = 0.0;
  for (int i = 0; i < game.person_count(); ++i) {
    const double r = max_abs(own_gradient(game, edges, i, z, z[i]));
    if (r > max_residual) {
      max_residual = r;
      if (worst != nullptr) *worst = i;
    }
  }
  return max_residual;
}

}  // namespace

GeneralSolveResult nash_general(const HeterogeneousGame& game, OpinionProfile z0,
                                const DescentOptions& options) {
  validate(game);
  if (!check_symmetric(game).symmetric)
    throw ValidationError("nash_general: game must be symmetric");
  const EdgeIndex edges(game);
  GeneralSolveResult result;
  result.profile = std::move(z0);
  // Plain sweeps run the cheap value-based line search; the inner solves
  // bottom out at the cost's round-off floor. Once updates settle, stubborn
  // persons are polished with the gradient-contraction fallback, which digs
  // below that floor.
  double round_tol = std::max(options.inner_tol, 1e-3);
  bool polish = false;
  for (int round = 1; round <= options.max_rounds; ++round) {
    double max_update = 0.0;
    for (int i = 0; i < game.person_count(); ++i)
      max_update = std::max(max_update,
                            minimize_own_cost(game, edges, i, result.profile, round_tol,
                                              options.max_inner_iterations, polish));
    round_tol = std::clamp(0.01 * max_update, options.inner_tol, 1e-3);
    result.rounds = round;
    if (max_update <= options.outer_tol) {
      result.residual = nash_residual(game, edges, result.profile);
      if (result.residual <= 10.0 * options.outer_tol) {
        result.converged = true;
        return result;
      }
      polish = true;
      round_tol = options.inner_tol;
    }
  }
  result.residual = nash_residual(game, edges, result.profile);
  result.converged = result.residual <= 10.0 * options.outer_tol;
  return result;
}

GeneralSolveResult optimum_general(const HeterogeneousGame& game, OpinionProfile z0, double tol,
                                   int max_iterations) {
  validate(game);
  GeneralSolveResult result;
  result.profile = std::move(z0);
  for (int it = 1; it <= max_iterations; ++it) {
    const OpinionProfile grad = social_gradient(game, result.profile);
    result.rounds = it;
    result.residual = profile_inf_norm(grad);
    if (result.residual <= tol) {
      result.converged = true;
      return result;
    }
    const double f0 = social_cost(game, result.profile);
    double slope = 0.0;
    for (const auto& block : grad) slope += block.squaredNorm();
    double step = 1.0;
    OpinionProfile candidate = result.profile;
    bool found = false;
    while (step > kMinStep) {
      for (std::size_t i = 0; i < candidate.size(); ++i)
        candidate[i] = result.profile[i] - step * grad[i];
      const double trial = social_cost(game, candidate);
      bool accept = trial < f0 && trial <= f0 - kArmijoSlope * step * slope;
      if (!accept && trial <= f0 + kValueNoise * (1.0 + std::abs(f0))) {
        // Value-flat regime: fall back to gradient contraction.
        double candidate_slope = 0.0;
        for (const auto& block : social_gradient(game, candidate))
          candidate_slope += block.squaredNorm();
        accept = candidate_slope < slope;
      }
      if (accept) {
        found = true;
        break;
      }
      step *= 0.5;
    }
    if (!found) break;  // flat to machine precision
    result.profile = candidate;
  }
  result.residual = profile_inf_norm(social_gradient(game, result.profile));
  result.converged = result.residual <= tol;
  return result;
}

NashReport verify_nash(const HeterogeneousGame& game, const OpinionProfile& x, double tol) {
  validate(game);
  NashReport report;
  for (int i = 0; i < game.person_count(); ++i) {
    const double r = max_abs(person_gradient(game, i, x));
    if (r > report.residual) {
      report.residual = r;
      report.worst_person = i;
    }
  }
  report.pass = report.residual <= tol;
  return report;
}

NashReport verify_nash(const QuadraticGame& game, const OpinionProfile& x, double tol) {
  NashReport report;
  for (int i = 0; i < game.person_count(); ++i) {
    const double r = max_abs(person_gradient(game, i, x));
    if (r > report.residual) {
      report.residual = r;
      report.worst_person = i;
    }
  }
  report.pass = report.residual <= tol;
  return report;
}

PoaResult poa_from_costs(double sc_nash, double sc_optimum) {
  constexpr double kFloor = 1e-12;
  PoaResult result;
  result.sc_nash = sc_nash;
  result.sc_optimum = sc_optimum;
  if (sc_optimum <= kFloor) {
    result.kind = sc_nash <= kFloor ? PoaResult::Kind::DegenerateOne : PoaResult::Kind::Unbounded;
    result.ratio = result.kind == PoaResult::Kind::DegenerateOne
                       ? 1.0
                       : std::numeric_limits<double>::infinity();
    return result;
  }
  result.kind = PoaResult::Kind::Ratio;
  result.ratio = sc_nash / sc_optimum;
  return result;
}

PoaResult price_of_anarchy(const QuadraticGame& game) {
  const OpinionProfile nash = nash_quadratic(game);
  const OpinionProfile optimum = optimum_quadratic(game);
  PoaResult result = poa_from_costs(social_cost(game, nash), social_cost(game, optimum));
  result.nash_residual = verify_nash(game, nash, 1e-6).residual;
  return result;
}

PoaResult price_of_anarchy(const HeterogeneousGame& game, const DescentOptions& options) {
  const GeneralSolveResult nash = nash_general(game, zero_profile(game), options);
  if (!nash.converged) throw SolveError("price_of_anarchy: best-response solve did not converge");
  // A residual of 1e-5 pins the optimal cost to ~1e-10 by strong convexity;
  // gradient descent on doubles cannot always push the gradient itself much
  // below 1e-7.
  const GeneralSolveResult optimum =
      optimum_general(game, zero_profile(game), std::max(options.outer_tol, 1e-7), 100000);
  if (!optimum.converged && optimum.residual > 1e-5)
    throw SolveError("price_of_anarchy: optimum solve did not converge");
  PoaResult result =
      poa_from_costs(social_cost(game, nash.profile), social_cost(game, optimum.profile));
  result.nash_residual = nash.residual;
  return result;
}

namespace {

CertificateEntry certificate_entry(const std::string& role, const CostFunction& f, double lambda,
                                   double kappa, const std::vector<int>& required_p,
                                   const SampleSpec& spec, std::uint64_t seed) {
  CertificateEntry entry{role, false, ""};
  const auto derived = derive_certificate(f);
  if (derived && std::abs(derived->lambda - lambda) <= 1e-9 &&
      std::abs(derived->kappa - kappa) <= 1e-9) {
    bool covers = true;
    for (int p : required_p) covers = covers && derived->p_set.count(p) > 0;
    if (covers) {
      entry.ok = true;
      entry.source = (derived->provenance.kind == Provenance::Kind::Analytic  ? "analytic: "
                      : derived->provenance.kind == Provenance::Kind::Searched ? "searched: "
                                                                               : "propagated: ") +
                     derived->provenance.detail;
      return entry;
    }
  }
  for (int p : required_p) {
    const SuitabilityReport check = verify_suitability(f, lambda, kappa, p, spec, seed);
    if (!check.pass) {
      std::ostringstream msg;
      msg << "sampled violation at p = " << p << " (magnitude " << check.violation << ")";
      entry.source = msg.str();
      return entry;
    }
  }
  entry.ok = true;
  std::ostringstream msg;
  msg << "sampled: " << spec.pairs << " pairs on [" << spec.box_lo << ", " << spec.box_hi
      << "], no violation";
  entry.source = msg.str();
  return entry;
}

}  // namespace

BoundReport poa_upper_bound(const HeterogeneousGame& game, double lambda, double kappa,
                            const SampleSpec& spec, std::uint64_t seed, bool strengthened) {
  validate(game);
  if (!(lambda > 0.0) || !(kappa > 0.0))
    throw ValidationError("poa_upper_bound: lambda and kappa must be positive");
  const SymmetryReport sym = check_symmetric(game);
  if (!sym.symmetric)
    throw ValidationError("poa_upper_bound: game is asymmetric at pair (" +
                          std::to_string(sym.i) + ", " + std::to_string(sym.j) + ")");

  BoundReport report;
  report.bound = lambda / kappa;
  report.ok = true;
  for (int i = 0; i < game.person_count(); ++i) {
    if (!game.internal[i]) continue;  // absent internal costs are zero
    std::ostringstream role;
    role << "g[" << i << "]";
    report.entries.push_back(
        certificate_entry(role.str(), game.internal[i]->cost, lambda, kappa, {1}, spec, seed));
    report.ok = report.ok && report.entries.back().ok;
  }
  const std::vector<int> edge_p = strengthened ? std::vector<int>{1, 2} : std::vector<int>{2};
  for (const auto& [key, f] : game.pairwise) {
    if (key.first > key.second) continue;  // symmetric mirror carries the same function
    std::ostringstream role;
    role << "f[" << key.first << "," << key.second << "]";
    report.entries.push_back(certificate_entry(role.str(), f.cost, lambda, kappa, edge_p, spec, seed));
    report.ok = report.ok && report.entries.back().ok;
  }
  return report;
}

BoundReport poa_upper_bound(const QuadraticGame& game, double lambda, double kappa,
                            const SampleSpec& spec, std::uint64_t seed) {
  if (!check_symmetric(game).symmetric)
    throw ValidationError("poa_upper_bound: quadratic game must be undirected");
  return poa_upper_bound(quadratic_to_heterogeneous(game), lambda, kappa, spec, seed, false);
}

}  // namespace opinion
