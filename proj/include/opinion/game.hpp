#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "opinion/cost_function.hpp"
#include "opinion/types.hpp"

namespace opinion {

/// Internal cost g(R z_i - s) for one person.
struct InternalCost {
  CostFunction cost;  // g, input dim e
  Matrix map;         // R, e x m_i
  Vector anchor;      // s, dim e
};

/// Pairwise cost f(A z_i + B z_j) charged to person i for the ordered pair (i, j).
struct PairwiseCost {
  CostFunction cost;  // f, input dim d
  Matrix own_map;     // A, d x m_i
  Matrix other_map;   // B, d x m_j
};

/// Heterogeneous opinion-formation game: per-person dimensions, optional
/// internal costs, and sparse pairwise costs (absent pairs cost zero).
struct HeterogeneousGame {
  std::vector<int> dims;
  std::vector<std::optional<InternalCost>> internal;
  std::map<std::pair<int, int>, PairwiseCost> pairwise;

  int person_count() const { return static_cast<int>(dims.size()); }
};

/// Matrix-weighted quadratic game: shared opinion dimension, PSD edge weights
/// W_ij, symmetric internal weights R_i, internal opinions s_i.
struct QuadraticGame {
  int dim = 0;
  std::vector<Matrix> internal_weight;
  std::vector<Vector> internal_opinion;
  std::map<std::pair<int, int>, Matrix> weight;
  // Lifts the PSD requirement on edge weights; only pathological
  // reproductions construct such instances.
  bool unsafe_indefinite = false;

  int person_count() const { return static_cast<int>(internal_weight.size()); }
};

void validate(const HeterogeneousGame& game);

struct QuadraticValidation {
  bool ok = true;
  std::string issue;
  std::vector<bool> internal_pd;  // per person: R_i positive definite
};
QuadraticValidation validate(const QuadraticGame& game);
void require_valid(const QuadraticGame& game);

double person_cost(const HeterogeneousGame& game, int person, const OpinionProfile& z);
double person_cost(const QuadraticGame& game, int person, const OpinionProfile& z);
double social_cost(const HeterogeneousGame& game, const OpinionProfile& z);
double social_cost(const QuadraticGame& game, const OpinionProfile& z);

Vector person_gradient(const HeterogeneousGame& game, int person, const OpinionProfile& z);
Vector person_gradient(const QuadraticGame& game, int person, const OpinionProfile& z);

/// Gradient of the social cost, one block per person.
OpinionProfile social_gradient(const HeterogeneousGame& game, const OpinionProfile& z);

struct SymmetryReport {
  bool symmetric = true;
  int i = -1, j = -1;
  std::string detail;
};
SymmetryReport check_symmetric(const HeterogeneousGame& game);
SymmetryReport check_symmetric(const QuadraticGame& game);

/// Symmetric PSD square root; eigenvalues below -1e-10 are rejected, tiny
/// negatives are clamped to zero.
Matrix psd_sqrt(const Matrix& m);

HeterogeneousGame quadratic_to_heterogeneous(const QuadraticGame& game);

/// Multidimensional FJ instance -> quadratic game: W_ij = w_ij C and
/// R_i = (r_i + sum_j w_ij) I - sum_j w_ij C with internal opinion
/// R_i^{-1} r_i s_i. C must be symmetric, row-stochastic, and PSD.
QuadraticGame fj_to_quadratic(const std::vector<double>& anchor_weight,
                              const std::vector<Vector>& anchor_opinion,
                              const std::map<std::pair<int, int>, double>& edge_weight,
                              const Matrix& topic_coupling);

OpinionProfile zero_profile(const HeterogeneousGame& game);
OpinionProfile zero_profile(const QuadraticGame& game);

bool is_positive_definite(const Matrix& m, double tol = 0.0);
bool is_positive_semidefinite(const Matrix& m, double tol = 1e-10);

}  // namespace opinion
