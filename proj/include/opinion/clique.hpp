#pragma once

#include "opinion/equilibrium.hpp"
#include "opinion/game.hpp"

namespace opinion {

/// A heterogeneous game plus a partition of persons into cliques that each
/// jointly minimize the summed cost of their members.
struct CliqueGame {
  HeterogeneousGame base;
  std::vector<std::vector<int>> cliques;
};

/// Checks the partition (disjoint, covering, in range) and the base game.
void validate(const CliqueGame& game);

double clique_cost(const CliqueGame& game, int clique, const OpinionProfile& z);

/// One flat person per clique holding the stacked member opinions. Member
/// blocks are stacked in ascending person order; cross-clique couplings are
/// stacked per member pair and unpacked inside the cost tree by 0/1 selector
/// maps. Costs agree with the clique costs at every profile.
HeterogeneousGame reduce_clique(const CliqueGame& game);

/// Maps a profile of the base game onto the reduced game's block layout.
OpinionProfile stack_profile(const CliqueGame& game, const OpinionProfile& z);

/// Inverse of stack_profile.
OpinionProfile unstack_profile(const CliqueGame& game, const OpinionProfile& stacked);

/// Round-robin over cliques; each clique jointly descends its members'
/// stacked blocks with the same Armijo line search the person-level solver
/// uses. Stops when every member gradient of every clique cost vanishes.
GeneralSolveResult nash_clique(const CliqueGame& game, OpinionProfile z0,
                               const DescentOptions& options = {});

/// SC(nash_clique) / SC(optimum of the base game); the optimum is unchanged
/// by clique dynamics.
PoaResult price_of_anarchy(const CliqueGame& game, const DescentOptions& options = {});

/// Clique games need the strengthened requirement: pairwise costs suitable at
/// p = 1 as well as p = 2, because intra-clique couplings act as internal
/// costs after the reduction.
BoundReport poa_upper_bound(const CliqueGame& game, double lambda, double kappa,
                            const SampleSpec& spec = {}, std::uint64_t seed = 0);

}  // namespace opinion
