#include "opinion/clique.hpp"

#include <algorithm>
#include <cmath>

namespace opinion {

namespace {

std::vector<std::vector<int>> sorted_cliques(const CliqueGame& game) {
  std::vector<std::vector<int>> cliques = game.cliques;
  for (auto& members : cliques) std::sort(members.begin(), members.end());
  return cliques;
}

}  // namespace

void validate(const CliqueGame& game) {
  validate(game.base);
  const int n = game.base.person_count();
  std::vector<bool> seen(n, false);
  for (const auto& members : game.cliques) {
    if (members.empty()) throw ValidationError("clique game: empty clique");
    for (int j : members) {
      if (j < 0 || j >= n) throw ValidationError("clique game: member index out of range");
      if (seen[j]) throw ValidationError("clique game: person appears in two cliques");
      seen[j] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) throw ValidationError("clique game: person not covered by the partition");
}

double clique_cost(const CliqueGame& game, int clique, const OpinionProfile& z) {
  if (clique < 0 || clique >= static_cast<int>(game.cliques.size()))
    throw ValidationError("clique_cost: clique index out of range");
  double total = 0.0;
  for (int j : game.cliques[clique]) total += person_cost(game.base, j, z);
  return total;
}

namespace {

// Selector matrix extracting person j's block from a clique's stack vector.
Matrix member_selector(const std::vector<int>& members, const std::vector<int>& dims, int j) {
  int stack_dim = 0;
  for (int m : members) stack_dim += dims[m];
  Matrix sel = Matrix::Zero(dims[j], stack_dim);
  int at = 0;
  for (int m : members) {
    if (m == j) {
      sel.block(0, at, dims[j], dims[j]) = Matrix::Identity(dims[j], dims[j]);
      break;
    }
    at += dims[m];
  }
  return sel;
}

CostFunction append_term(CostFunction acc, CostFunction term) {
  if (!acc.valid()) return term;
  return CostFunction::sum(std::move(acc), std::move(term));
}

}  // namespace

HeterogeneousGame reduce_clique(const CliqueGame& game) {
  validate(game);
  if (!check_symmetric(game.base).symmetric)
    throw ValidationError("reduce_clique: base game must be symmetric");

  const auto cliques = sorted_cliques(game);
  const int t = static_cast<int>(cliques.size());
  const auto& dims = game.base.dims;

  std::vector<int> clique_of(game.base.person_count());
  for (int c = 0; c < t; ++c)
    for (int j : cliques[c]) clique_of[j] = c;

  HeterogeneousGame out;
  out.dims.resize(t);
  out.internal.resize(t);
  for (int c = 0; c < t; ++c) {
    int stack_dim = 0;
    for (int j : cliques[c]) stack_dim += dims[j];
    out.dims[c] = stack_dim;

    // Everything internal to the clique folds into one cost over the stack:
    // member anchors plus intra-clique couplings.
    CostFunction folded;
    for (int j : cliques[c]) {
      if (!game.base.internal[j]) continue;
      const InternalCost& g = *game.base.internal[j];
      folded = append_term(folded, CostFunction::affine_pre(g.map * member_selector(cliques[c], dims, j),
                                                            -g.anchor, g.cost));
    }
    for (const auto& [key, f] : game.base.pairwise) {
      const auto [j, k] = key;
      if (clique_of[j] != c || clique_of[k] != c) continue;
      const Matrix map = f.own_map * member_selector(cliques[c], dims, j) +
                         f.other_map * member_selector(cliques[c], dims, k);
      folded = append_term(folded, CostFunction::affine_pre(map, Vector::Zero(map.rows()), f.cost));
    }
    if (folded.valid()) {
      out.internal[c] = InternalCost{folded, Matrix::Identity(stack_dim, stack_dim),
                                     Vector::Zero(stack_dim)};
    }
  }

  // Cross-clique couplings: stack the per-pair inputs, select them back out
  // inside the cost tree.
  for (int ci = 0; ci < t; ++ci) {
    for (int cl = ci + 1; cl < t; ++cl) {
      std::vector<std::pair<int, int>> entries;
      for (const auto& [key, f] : game.base.pairwise)
        if (clique_of[key.first] == ci && clique_of[key.second] == cl) entries.push_back(key);
      if (entries.empty()) continue;
      std::sort(entries.begin(), entries.end());

      int stacked_dim = 0;
      for (const auto& [j, k] : entries)
        stacked_dim += game.base.pairwise.at({j, k}).cost.input_dim();

      auto build_direction = [&](bool forward) {
        const int own_clique = forward ? ci : cl;
        const int other_clique = forward ? cl : ci;
        Matrix own_map = Matrix::Zero(stacked_dim, out.dims[own_clique]);
        Matrix other_map = Matrix::Zero(stacked_dim, out.dims[other_clique]);
        CostFunction folded;
        int at = 0;
        for (const auto& [j, k] : entries) {
          const int own_person = forward ? j : k;
          const int other_person = forward ? k : j;
          const PairwiseCost& f = game.base.pairwise.at({own_person, other_person});
          const int d = f.cost.input_dim();
          own_map.block(at, 0, d, out.dims[own_clique]) =
              f.own_map * member_selector(cliques[own_clique], dims, own_person);
          other_map.block(at, 0, d, out.dims[other_clique]) =
              f.other_map * member_selector(cliques[other_clique], dims, other_person);
          Matrix selector = Matrix::Zero(d, stacked_dim);
          selector.block(0, at, d, d) = Matrix::Identity(d, d);
          folded = append_term(folded,
                               CostFunction::affine_pre(selector, Vector::Zero(d), f.cost));
          at += d;
        }
        out.pairwise.emplace(std::make_pair(own_clique, other_clique),
                             PairwiseCost{folded, own_map, other_map});
      };
      build_direction(true);
      build_direction(false);
    }
  }

  validate(out);
  return out;
}

OpinionProfile stack_profile(const CliqueGame& game, const OpinionProfile& z) {
  const auto cliques = sorted_cliques(game);
  OpinionProfile out;
  out.reserve(cliques.size());
  for (const auto& members : cliques) {
    int stack_dim = 0;
    for (int j : members) stack_dim += game.base.dims[j];
    Vector block(stack_dim);
    int at = 0;
    for (int j : members) {
      block.segment(at, game.base.dims[j]) = z[j];
      at += game.base.dims[j];
    }
    out.push_back(std::move(block));
  }
  return out;
}

OpinionProfile unstack_profile(const CliqueGame& game, const OpinionProfile& stacked) {
  const auto cliques = sorted_cliques(game);
  OpinionProfile out(game.base.person_count());
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    int at = 0;
    for (int j : cliques[c]) {
      out[j] = stacked[c].segment(at, game.base.dims[j]);
      at += game.base.dims[j];
    }
  }
  return out;
}

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1e-18;
constexpr double kValueNoise = 1e-14;

// Gradient of clique cost q_c with respect to member j's block: j's own cost
// terms plus the mirror terms of intra-clique edges pointing at j.
Vector member_gradient(const CliqueGame& game, const std::vector<int>& clique_of, int c, int j,
                       const OpinionProfile& z) {
  Vector grad = person_gradient(game.base, j, z);
  for (const auto& [key, f] : game.base.pairwise) {
    if (key.second != j || clique_of[key.first] != c) continue;
    grad += f.other_map.transpose() *
            f.cost.gradient(f.own_map * z[key.first] + f.other_map * z[j]);
  }
  return grad;
}

double clique_residual(const CliqueGame& game, const std::vector<int>& clique_of,
                       const OpinionProfile& z) {
  double worst = 0.0;
  for (std::size_t c = 0; c < game.cliques.size(); ++c)
    for (int j : game.cliques[c])
      worst = std::max(worst,
                       max_abs(member_gradient(game, clique_of, static_cast<int>(c), j, z)));
  return worst;
}

// Joint Armijo descent of one clique's cost over its members' blocks.
double minimize_clique(const CliqueGame& game, const std::vector<int>& clique_of, int c,
                       OpinionProfile& z, double tol, int max_iterations, bool polish) {
  const auto& members = game.cliques[c];
  OpinionProfile start;
  start.reserve(members.size());
  for (int j : members) start.push_back(z[j]);

  // Polish iterations seed the search with a secant estimate of the inverse
  // curvature along the trajectory (see the person-level solver).
  double polish_step = 1.0;
  OpinionProfile prev_point;
  std::vector<Vector> prev_grads;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<Vector> grads;
    grads.reserve(members.size());
    double norm_inf = 0.0, slope = 0.0;
    for (int j : members) {
      grads.push_back(member_gradient(game, clique_of, c, j, z));
      norm_inf = std::max(norm_inf, max_abs(grads.back()));
      slope += grads.back().squaredNorm();
    }
    if (norm_inf <= tol) break;
    if (polish && !prev_point.empty()) {
      double dz_dg = 0.0, curvature = 0.0;
      for (std::size_t m = 0; m < members.size(); ++m) {
        const Vector dz = z[members[m]] - prev_point[m];
        const Vector dg = grads[m] - prev_grads[m];
        dz_dg += dz.dot(dg);
        curvature += dg.squaredNorm();
      }
      if (curvature > 0.0 && dz_dg > 0.0)
        polish_step = std::min(dz_dg / curvature, 1.0);
    }
    const double f0 = clique_cost(game, c, z);
    double step = polish ? polish_step : 1.0;
    OpinionProfile saved;
    saved.reserve(members.size());
    for (int j : members) saved.push_back(z[j]);
    bool accepted = false;
    while (step > kMinStep) {
      for (std::size_t m = 0; m < members.size(); ++m) z[members[m]] = saved[m] - step * grads[m];
      const double trial = clique_cost(game, c, z);
      bool accept = trial < f0 && trial <= f0 - kArmijoSlope * step * slope;
      if (!accept && polish && trial <= f0 + kValueNoise * (1.0 + std::abs(f0))) {
        // Value-flat regime: fall back to gradient contraction.
        double candidate_slope = 0.0;
        for (int j : members)
          candidate_slope += member_gradient(game, clique_of, c, j, z).squaredNorm();
        accept = candidate_slope < slope;
      }
      if (accept) {
        prev_point = saved;
        prev_grads = grads;
        accepted = true;
        polish_step = std::min(1.0, 2.0 * step);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      for (std::size_t m = 0; m < members.size(); ++m) z[members[m]] = saved[m];
      break;
    }
  }

  double moved = 0.0;
  for (std::size_t m = 0; m < members.size(); ++m)
    moved = std::max(moved, max_abs(Vector(z[members[m]] - start[m])));
  return moved;
}

}  // namespace

GeneralSolveResult nash_clique(const CliqueGame& game, OpinionProfile z0,
                               const DescentOptions& options) {
  validate(game);
  if (!check_symmetric(game.base).symmetric)
    throw ValidationError("nash_clique: base game must be symmetric");
  std::vector<int> clique_of(game.base.person_count());
  for (std::size_t c = 0; c < game.cliques.size(); ++c)
    for (int j : game.cliques[c]) clique_of[j] = static_cast<int>(c);

  GeneralSolveResult result;
  result.profile = std::move(z0);
  double round_tol = std::max(options.inner_tol, 1e-3);
  bool polish = false;
  for (int round = 1; round <= options.max_rounds; ++round) {
    double max_update = 0.0;
    for (std::size_t c = 0; c < game.cliques.size(); ++c)
      max_update = std::max(
          max_update, minimize_clique(game, clique_of, static_cast<int>(c), result.profile,
                                      round_tol, options.max_inner_iterations, polish));
    round_tol = std::clamp(0.01 * max_update, options.inner_tol, 1e-3);
    result.rounds = round;
    if (max_update <= options.outer_tol) {
      result.residual = clique_residual(game, clique_of, result.profile);
      if (result.residual <= 10.0 * options.outer_tol) {
        result.converged = true;
        return result;
      }
      polish = true;
      round_tol = options.inner_tol;
    }
  }
  result.residual = clique_residual(game, clique_of, result.profile);
  result.converged = result.residual <= 10.0 * options.outer_tol;
  return result;
}

PoaResult price_of_anarchy(const CliqueGame& game, const DescentOptions& options) {
  const GeneralSolveResult nash = nash_clique(game, zero_profile(game.base), options);
  if (!nash.converged) throw SolveError("price_of_anarchy: clique best response did not converge");
  const GeneralSolveResult optimum =
      optimum_general(game.base, zero_profile(game.base), std::max(options.outer_tol, 1e-7),
                      100000);
  if (!optimum.converged && optimum.residual > 1e-5)
    throw SolveError("price_of_anarchy: optimum solve did not converge");
  PoaResult result = poa_from_costs(social_cost(game.base, nash.profile),
                                    social_cost(game.base, optimum.profile));
  result.nash_residual = nash.residual;
  return result;
}

BoundReport poa_upper_bound(const CliqueGame& game, double lambda, double kappa,
                            const SampleSpec& spec, std::uint64_t seed) {
  validate(game);
  return poa_upper_bound(game.base, lambda, kappa, spec, seed, /*strengthened=*/true);
}

}  // namespace opinion
