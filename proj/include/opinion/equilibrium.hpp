#pragma once

#include <string>
#include <vector>

#include "opinion/game.hpp"
#include "opinion/suitability.hpp"

namespace opinion {

/// Closed-form Nash of an undirected PD-internal quadratic game: the unique
/// solution of (R + L) x = R s.
OpinionProfile nash_quadratic(const QuadraticGame& game);

/// Social optimum of the same game: (R + 2L) y = R s, the stationary point of
/// SC(z) = (z - s)^T R (z - s) + 2 z^T L z.
OpinionProfile optimum_quadratic(const QuadraticGame& game);

struct DescentOptions {
  double inner_tol = 1e-10;
  double outer_tol = 1e-8;
  int max_rounds = 2000;
  int max_inner_iterations = 50000;
};

struct GeneralSolveResult {
  OpinionProfile profile;
  bool converged = false;
  int rounds = 0;
  double residual = 0.0;
};

/// Round-robin best response: each person minimizes their own cost by
/// gradient descent with Armijo backtracking (initial step 1, shrink 0.5,
/// slope factor 1e-4) until the largest per-person update falls below
/// outer_tol and the Nash residual below 10 * outer_tol.
GeneralSolveResult nash_general(const HeterogeneousGame& game, OpinionProfile z0,
                                const DescentOptions& options = {});

/// Full gradient descent on the social cost with the same line search;
/// terminates when the social gradient inf-norm falls below tol, or earlier
/// when progress sinks below double round-off (residual is reported either
/// way; by convexity the cost error is then of order residual squared).
GeneralSolveResult optimum_general(const HeterogeneousGame& game, OpinionProfile z0,
                                   double tol = 1e-7, int max_iterations = 100000);

struct NashReport {
  bool pass = false;
  int worst_person = -1;
  double residual = 0.0;
};
NashReport verify_nash(const HeterogeneousGame& game, const OpinionProfile& x, double tol);
NashReport verify_nash(const QuadraticGame& game, const OpinionProfile& x, double tol);

struct PoaResult {
  enum class Kind { Ratio, Unbounded, DegenerateOne };
  Kind kind = Kind::Ratio;
  double ratio = 1.0;
  double sc_nash = 0.0;
  double sc_optimum = 0.0;
  double nash_residual = 0.0;
};

/// SC(x)/SC(y) with the conventions: both costs below 1e-12 -> ratio one by
/// convention; only the optimum below -> unbounded.
PoaResult poa_from_costs(double sc_nash, double sc_optimum);

PoaResult price_of_anarchy(const QuadraticGame& game);
PoaResult price_of_anarchy(const HeterogeneousGame& game, const DescentOptions& options = {});

struct CertificateEntry {
  std::string role;  // "g[i]" or "f[i,j]"
  bool ok = false;
  std::string source;
};

struct BoundReport {
  bool ok = false;
  double bound = 0.0;
  std::vector<CertificateEntry> entries;
};

/// Certificate-backed upper bound lambda/kappa: every g_i needs (lambda,
/// kappa, 1)-suitability and every f_ij (lambda, kappa, 2); the strengthened
/// clique variant needs f_ij at p = 1 as well. Costs without a matching
/// derivable certificate fall back to sampled verification; a sampling
/// failure refuses the bound.
BoundReport poa_upper_bound(const HeterogeneousGame& game, double lambda, double kappa,
                            const SampleSpec& spec = {}, std::uint64_t seed = 0,
                            bool strengthened = false);
BoundReport poa_upper_bound(const QuadraticGame& game, double lambda, double kappa,
                            const SampleSpec& spec = {}, std::uint64_t seed = 0);

}  // namespace opinion
