#pragma once

#include <optional>
#include <ostream>

#include "opinion/game.hpp"

namespace opinion {

/// Stacked form of the simultaneous update z(t+1) = L W z(t) + L R s, where
/// L is block diagonal with blocks (R_i + sum_j W_ij)^{-1} and the Laplacian
/// has blocks L_ii = sum_j W_ij, L_ij = -W_ij.
struct BlockSystem {
  Matrix response;   // block diagonal of (R_i + sum_j W_ij)^{-1}
  Matrix weight;     // block matrix of W_ij
  Matrix internal;   // block diagonal of R_i
  Matrix laplacian;  // L
  Vector anchor;     // stacked s
};

/// Requires every R_i positive definite so the per-person inverses exist.
BlockSystem build_block_system(const QuadraticGame& game);

OpinionProfile best_response_step(const QuadraticGame& game, const OpinionProfile& z);

struct TraceOptions {
  std::ostream* out = nullptr;
  int stride = 1;  // record every stride-th iteration
};

struct SimulateResult {
  enum class Status { Converged, Diverged, MaxIterReached };
  Status status = Status::MaxIterReached;
  OpinionProfile final;
  int iterations = 0;
};

SimulateResult simulate(const QuadraticGame& game, const OpinionProfile& z0, double tol,
                        int max_iter, const TraceOptions& trace = {});

struct NormalizationReport {
  bool normalized = true;
  int person = -1;
  double deviation = 0.0;  // inf-norm of sum_j W_ij - I at the first violator
};
NormalizationReport is_weight_normalized(const QuadraticGame& game);

/// Doubling construction: two copies of the game joined person-by-person with
/// cross weights d I - sum_j W_ij, then all weights and internal weights
/// divided by d. The result is weight-normalized and duplicates the Nash
/// equilibrium. With no explicit d, uses max_i lambda_max(sum_j W_ij) + 1.
QuadraticGame clone_transform(const QuadraticGame& game, std::optional<double> d = std::nullopt);

/// rho(L W) through the symmetric similarity L^{1/2} W L^{1/2}.
double spectral_radius(const QuadraticGame& game);

}  // namespace opinion
